"""Shared oracles and generators for the test suite.

Everything here is deliberately independent of the package's own
algorithms: determinants by cofactor expansion, invariant factors by
determinantal divisors, generating length by the dimension formula over
each prime, subgroup spans by breadth-first closure.
"""

import itertools
import math

from wallforms.errors import PreservationViolation, SquareViolation
from wallforms.forms import (
    make_morphism,
    make_wall_form,
    standard_form,
    standard_inclusion,
    trivial_parameter,
    z2_parameter,
)
from wallforms.intlinalg import IntMatrix, cyclic


def param_for(H):
    """The desk-scale parameter used throughout the tests for each H."""
    return z2_parameter() if H == cyclic(2) else trivial_parameter(H)


def lambda_two_mutant(H):
    """Standard W^1 with lambda(a, b) = 2 and the forced mu adjustment."""
    p = param_for(H)
    w1 = standard_form(1, p)
    lam = [list(w1.lam.row(0))]
    b = w1.layout.b_index(0)
    lam[0][b] = 2
    mu = [list(r) for r in w1.mu]
    for j, hgen in enumerate(H.gens()):
        t = w1.layout.t_index(0, j)
        mu[t][b] = 2 * hgen
        mu[b][t] = p.epsilon * (2 * hgen)
    return make_wall_form(w1.pair, IntMatrix.from_rows(lam),
                          tuple(tuple(r) for r in mu),
                          w1.alpha_minus, w1.alpha_plus, p)


def det_cofactor(rows):
    n = len(rows)
    if n == 0:
        return 1
    if n == 1:
        return rows[0][0]
    total = 0
    for j in range(n):
        if rows[0][j]:
            minor = [r[:j] + r[j + 1:] for r in rows[1:]]
            total += (-1) ** j * rows[0][j] * det_cofactor(minor)
    return total


def determinantal_divisors(mat):
    """Nonzero invariant factors of an integer matrix, by k x k minor gcds."""
    m, n = mat.rows, mat.cols
    prev = 1
    out = []
    for k in range(1, min(m, n) + 1):
        g = 0
        for rows in itertools.combinations(range(m), k):
            for cols in itertools.combinations(range(n), k):
                sub = [[mat[r, c] for c in cols] for r in rows]
                g = math.gcd(g, det_cofactor(sub))
        if g == 0:
            break
        out.append(g // prev)
        prev = g
    return out


def prime_factors(n):
    out = set()
    p = 2
    while p * p <= n:
        while n % p == 0:
            out.add(p)
            n //= p
        p += 1
    if n > 1:
        out.add(n)
    return out


def d_length_formula(factors):
    """free rank + max over primes of the torsion factors that prime divides."""
    free = sum(1 for f in factors if f == 0)
    tors = [f for f in factors if f]
    primes = set()
    for f in tors:
        primes |= prime_factors(f)
    best = max((sum(1 for f in tors if f % p == 0) for p in primes), default=0)
    return free + best


def subgroup_closure(group, gens):
    seen = {group.zero().coords}
    frontier = [group.zero()]
    while frontier:
        cur = frontier.pop()
        for g in gens:
            for nxt in (cur + g, cur - g):
                if nxt.coords not in seen:
                    seen.add(nxt.coords)
                    frontier.append(nxt)
    return seen


def min_generators_exhaustive(group, limit=3):
    elems = [e for e in group.iter_elements() if not e.is_zero()]
    full = len(elems) + 1
    for size in range(0, limit + 1):
        for combo in itertools.combinations(elems, size):
            if len(subgroup_closure(group, combo)) == full:
                return size
    return None


# ---------------------------------------------------------------------------
# random automorphisms of standard forms


def _gen_swap(form, i, j):
    mg = list(form.minus_gens())
    bg = [form.plus_gens()[form.layout.b_index(t)] for t in range(form.layout.g)]
    mg[i], mg[j] = mg[j], mg[i]
    bg[i], bg[j] = bg[j], bg[i]
    return make_morphism(form, form, mg, bg)


def _gen_negate(form, i):
    mg = list(form.minus_gens())
    bg = [form.plus_gens()[form.layout.b_index(t)] for t in range(form.layout.g)]
    mg[i] = -mg[i]
    bg[i] = -bg[i]
    return make_morphism(form, form, mg, bg)


def _gen_transvection(form, i, j, c):
    # a_j -> a_j - c a_i and b_i -> b_i + c b_j preserve the pairing
    mg = list(form.minus_gens())
    bg = [form.plus_gens()[form.layout.b_index(t)] for t in range(form.layout.g)]
    mg[j] = mg[j] - c * mg[i]
    bg[i] = bg[i] + c * bg[j]
    return make_morphism(form, form, mg, bg)


def _gen_tau_shear(form, i, h):
    mg = list(form.minus_gens())
    bg = [form.plus_gens()[form.layout.b_index(t)] for t in range(form.layout.g)]
    bg[i] = bg[i] + form.tau_at(mg[i], h)
    return make_morphism(form, form, mg, bg)


def random_automorphism(form, rng, steps=4):
    """Compose validated generators: swaps, negations, transvections, shears."""
    g = form.layout.g
    phi = None
    tries = 0
    while (phi is None or steps > 0) and tries < 50 * (steps + 1):
        tries += 1
        kind = rng.choice(["swap", "neg", "trans", "shear"])
        try:
            if kind == "swap" and g >= 2:
                i, j = rng.sample(range(g), 2)
                nxt = _gen_swap(form, i, j)
            elif kind == "neg":
                nxt = _gen_negate(form, rng.randrange(g))
            elif kind == "trans" and g >= 2:
                i, j = rng.sample(range(g), 2)
                nxt = _gen_transvection(form, i, j, rng.randint(-2, 2))
            elif kind == "shear" and form.pair.H.k:
                h = form.pair.H.element(
                    tuple(rng.randrange(max(f, 1)) for f in form.pair.H.factors))
                nxt = _gen_tau_shear(form, rng.randrange(g), h)
            else:
                continue
        except (PreservationViolation, SquareViolation):
            continue
        phi = nxt if phi is None else nxt.compose(phi)
        steps -= 1
    if phi is None:
        phi = make_morphism(form, form, list(form.minus_gens()),
                            [form.plus_gens()[form.layout.b_index(t)]
                             for t in range(form.layout.g)])
    return phi


def random_rank_one_morphism(form, rng, steps=4):
    """A random twist of a random standard block inclusion."""
    g = form.layout.g
    inc = standard_inclusion(1, form, blocks=(rng.randrange(g),))
    return random_automorphism(form, rng, steps).compose(inc)


def twisted_standard_inclusion(k, form, rng, steps=4):
    inc = standard_inclusion(k, form)
    return random_automorphism(form, rng, steps).compose(inc)
