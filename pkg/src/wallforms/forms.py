"""Wall forms: axiom validation, duality, complements, and rank certificates.

A form is a pair (M-, M+) with an integer pairing lambda on M- x M+, an
epsilon-symmetric H-valued pairing mu on M+ x M+, a homomorphism alpha-
into G- and a quadratic function alpha+ into G+ whose defect is the
composite of the boundary map with mu.  All structure is stored on
generators; the quadratic extension law recovers alpha+ everywhere, and
validation on generators plus the polarization identity implies the
axioms on all elements (random-element sampling is available as defense
in depth).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import lru_cache

from .errors import (
    AxiomViolation,
    InvalidInput,
    ParameterMismatch,
    PreservationViolation,
)
from .hpairs import (
    HMap,
    HPair,
    ProbeHoms,
    SubHPair,
    hom_to_probe,
    hpair_direct_sum_with_inclusions,
    make_hpair,
    probe,
)
from .intlinalg import (
    FgAbGroup,
    GroupElement,
    GroupHom,
    IntMatrix,
    congruence_kernel,
    free_group,
    trivial_group,
)

__all__ = [
    "FormParameter",
    "WallForm",
    "WallMorphism",
    "SubWallForm",
    "StandardLayout",
    "make_wall_form",
    "eval_alpha_plus",
    "standard_form",
    "standard_inclusion",
    "duality_hmap",
    "duality_map",
    "Duality",
    "is_nonsingular",
    "make_morphism",
    "sub_wall_form",
    "orthogonal_complement",
    "perp_sum",
    "perp_sum_with_inclusions",
    "PerpSum",
    "RankBudget",
    "RankCertificate",
    "rank_certificate",
    "StableRankCertificate",
    "stable_rank_certificate",
    "sample_axioms",
    "trivial_parameter",
    "z2_parameter",
]


def _binom2(n):
    return n * (n - 1) // 2


@dataclass(frozen=True)
class FormParameter:
    """The 4-tuple (G, boundary, projection, sign) fixing the alpha targets."""

    G: HPair
    partial: GroupHom  # H -> G.plus
    pi: GroupHom       # G.plus -> H
    epsilon: int

    def __post_init__(self):
        if self.epsilon not in (1, -1):
            raise InvalidInput("epsilon must be +1 or -1")
        if self.partial.domain != self.G.H or self.partial.codomain != self.G.plus:
            raise InvalidInput("boundary map must run H -> G+")
        if self.pi.domain != self.G.plus or self.pi.codomain != self.G.H:
            raise InvalidInput("projection map must run G+ -> H")

    @property
    def H(self):
        return self.G.H


def trivial_parameter(H, epsilon=-1):
    """G = 0 with zero boundary and projection."""
    G = make_hpair(H, trivial_group, trivial_group, [])
    return FormParameter(G, GroupHom.zero(H, trivial_group),
                         GroupHom.zero(trivial_group, H), epsilon)


def z2_parameter():
    """H = Z/2, G+ = Z/2, boundary the identity, projection zero, sign -1."""
    Z2 = FgAbGroup((2,))
    G = make_hpair(Z2, trivial_group, Z2, [])
    return FormParameter(G, GroupHom.identity(Z2), GroupHom.zero(Z2, Z2), -1)


@dataclass(frozen=True)
class StandardLayout:
    """Coordinate bookkeeping for the standard form of rank g.

    The plus group lists torsion coordinates first (the j-th coefficient
    generator repeated across the g blocks) and the g free coordinates
    last.
    """

    g: int
    h_factors: tuple

    @property
    def d(self):
        return len(self.h_factors)

    def t_index(self, block, hgen):
        return hgen * self.g + block

    def b_index(self, block):
        return self.d * self.g + block

    def free_coords(self, y):
        return tuple(y.coords[self.b_index(i)] for i in range(self.g))

    def torsion_coords(self, y):
        return tuple(y.coords[: self.d * self.g])

    def plus_gen_kind(self, idx):
        """('t', block, hgen) or ('b', block) for a plus generator index."""
        if idx < self.d * self.g:
            return ("t", idx % self.g, idx // self.g)
        return ("b", idx - self.d * self.g)


@dataclass(frozen=True)
class WallForm:
    pair: HPair
    lam: IntMatrix       # lambda on (minus gens) x (plus gens)
    mu: tuple            # H-elements on (plus gens) x (plus gens)
    alpha_minus: tuple   # G- elements per minus gen
    alpha_plus: tuple    # G+ elements per plus gen
    param: FormParameter
    layout: StandardLayout | None = field(default=None, compare=False)

    def lambda_at(self, x, y):
        total = 0
        for i, xi in enumerate(x.coords):
            if xi:
                row = self.lam.row(i)
                for j, yj in enumerate(y.coords):
                    if yj:
                        total += xi * yj * row[j]
        return total

    def mu_at(self, y, yp):
        H = self.param.H
        acc = [0] * H.k
        for i, yi in enumerate(y.coords):
            if yi:
                row = self.mu[i]
                for j, yj in enumerate(yp.coords):
                    if yj:
                        c = yi * yj
                        vc = row[j].coords
                        for t in range(H.k):
                            acc[t] += c * vc[t]
        return H.element(acc)

    def alpha_minus_at(self, x):
        gm = self.param.G.minus
        acc = [0] * gm.k
        for i, xi in enumerate(x.coords):
            if xi:
                vc = self.alpha_minus[i].coords
                for t in range(gm.k):
                    acc[t] += xi * vc[t]
        return gm.element(acc)

    def alpha_plus_at(self, y):
        """Quadratic extension of the stored generator values.

        The boundary map is linear, so the mu contribution is accumulated
        in the coefficient group and pushed through it once.
        """
        gp = self.param.G.plus
        H = self.param.H
        acc = [0] * gp.k
        hacc = [0] * H.k
        nz = [(i, c) for i, c in enumerate(y.coords) if c]
        for i, c in nz:
            vc = self.alpha_plus[i].coords
            for t in range(gp.k):
                acc[t] += c * vc[t]
            b = _binom2(c)
            if b:
                mc = self.mu[i][i].coords
                for t in range(H.k):
                    hacc[t] += b * mc[t]
        for (i, ci), (j, cj) in itertools.combinations(nz, 2):
            c = ci * cj
            mc = self.mu[i][j].coords
            for t in range(H.k):
                hacc[t] += c * mc[t]
        defect = self.param.partial(H.element(hacc))
        return gp.element(tuple(a + b for a, b in zip(acc, defect.coords)))

    def tau_at(self, x, h):
        return self.pair.tau_at(x, h)

    def is_standard(self):
        return self.layout is not None

    def minus_gens(self):
        return self.pair.minus.gens()

    def plus_gens(self):
        return self.pair.plus.gens()


def eval_alpha_plus(form, y):
    """alpha+ at an arbitrary element of M+."""
    return form.alpha_plus_at(y)


def _check(condition, axiom, witness):
    if not condition:
        raise AxiomViolation(axiom, witness)


def make_wall_form(pair, lambda_values, mu_values, alpha_minus_values,
                   alpha_plus_values, param, layout=None):
    """Validate every form invariant and build the form.

    Checks run in a fixed order and fail fast with the first offending
    label: well-definedness of lambda, mu, alpha- and alpha+ over the
    group relations, epsilon-symmetry of mu, then the pairing axioms
    (i, ii, v, vi) on generators, then the polarization identity
    pi(boundary(mu)) = (1 + epsilon) mu which extends axiom v to sums.
    """
    if param.H != pair.H:
        raise InvalidInput("form parameter and pair disagree on the coefficient group")
    km, kp = pair.minus.k, pair.plus.k
    lam = lambda_values if isinstance(lambda_values, IntMatrix) else \
        IntMatrix.from_rows(lambda_values) if km else IntMatrix.zeros(0, kp)
    if (lam.rows, lam.cols) != (km, kp):
        raise InvalidInput("lambda matrix has wrong shape")
    H = param.H
    mu = tuple(tuple(v if isinstance(v, GroupElement) else H.element(v) for v in row)
               for row in mu_values)
    if len(mu) != kp or any(len(r) != kp for r in mu):
        raise InvalidInput("mu table has wrong shape")
    am = tuple(v if isinstance(v, GroupElement) else param.G.minus.element(v)
               for v in alpha_minus_values)
    ap = tuple(v if isinstance(v, GroupElement) else param.G.plus.element(v)
               for v in alpha_plus_values)
    if len(am) != km or len(ap) != kp:
        raise InvalidInput("alpha value lists have wrong length")

    eps = param.epsilon
    par, pi = param.partial, param.pi

    # well-definedness over the group relations
    for i, d in enumerate(pair.minus.factors):
        if d:
            for j in range(kp):
                _check(lam[i, j] == 0, "well-definedness",
                       f"lambda(minus gen {i} of order {d}, plus gen {j}) = {lam[i, j]} != 0")
            _check((d * am[i]).is_zero(), "well-definedness",
                   f"{d} * alpha-(minus gen {i}) != 0")
    for j, d in enumerate(pair.plus.factors):
        if d:
            for i in range(km):
                _check(lam[i, j] == 0, "well-definedness",
                       f"lambda(minus gen {i}, plus gen {j} of order {d}) = {lam[i, j]} != 0")
            for t in range(kp):
                _check((d * mu[j][t]).is_zero(), "well-definedness",
                       f"{d} * mu(plus gen {j}, plus gen {t}) != 0")
    # epsilon-symmetry of mu on generators
    for i in range(kp):
        for j in range(i, kp):
            _check(mu[j][i] == eps * mu[i][j], "symmetry",
                   f"mu({j},{i}) != {eps} * mu({i},{j})")
    # alpha+ is well defined over the plus relations
    for j, d in enumerate(pair.plus.factors):
        if d:
            v = d * ap[j] + _binom2(d) * par(mu[j][j])
            _check(v.is_zero(), "well-definedness",
                   f"{d}*alpha+(plus gen {j}) + C({d},2)*boundary(mu({j},{j})) = {v.coords} != 0")

    form = WallForm(pair, lam, mu, am, ap, param, layout)
    hg = H.gens()
    mg = pair.minus.gens()
    pg = pair.plus.gens()
    # axiom i: lambda(x, tau(x', h)) = 0
    for i, x in enumerate(mg):
        for i2 in range(km):
            for k in range(len(hg)):
                v = form.lambda_at(x, pair.tau[i2][k])
                _check(v == 0, "i",
                       f"lambda(minus gen {i}, tau(minus gen {i2}, h{k})) = {v}")
    # axiom ii: mu(tau(x, h), y) = lambda(x, y) * h
    for i in range(km):
        for k, h in enumerate(hg):
            tv = pair.tau[i][k]
            for j in range(kp):
                lhs = form.mu_at(tv, pg[j])
                rhs = lam[i, j] * h
                _check(lhs == rhs, "ii",
                       f"mu(tau(minus gen {i}, h{k}), plus gen {j}) = {lhs.coords} "
                       f"!= lambda*h = {rhs.coords}")
    # axiom v: mu(y, y) = pi(alpha+(y)) on generators
    for j in range(kp):
        lhs, rhs = mu[j][j], pi(ap[j])
        _check(lhs == rhs, "v",
               f"mu(plus gen {j}, plus gen {j}) = {lhs.coords} != pi(alpha+) = {rhs.coords}")
    # axiom vi: alpha+(tau(x, h)) = tau_G(alpha-(x), h)
    for i in range(km):
        for k, h in enumerate(hg):
            lhs = form.alpha_plus_at(pair.tau[i][k])
            rhs = param.G.tau_at(am[i], h)
            _check(lhs == rhs, "vi",
                   f"alpha+(tau(minus gen {i}, h{k})) = {lhs.coords} != {rhs.coords}")
    # polarization: pi(boundary(mu)) = (1 + epsilon) mu, the sum rule for axiom v
    for i in range(kp):
        for j in range(kp):
            lhs = pi(par(mu[i][j]))
            rhs = (1 + eps) * mu[i][j]
            _check(lhs == rhs, "polarization",
                   f"pi(boundary(mu({i},{j}))) = {lhs.coords} != (1+eps)*mu = {rhs.coords}")
    return form


@lru_cache(maxsize=None)
def standard_form(g, param):
    """The rank-g standard form: lambda(a_i, b_j) = delta, mu and alpha zero.

    The plus group carries the g-fold sum of the coefficient torsion first
    and the free generators b_1..b_g last.
    """
    if g < 0:
        raise InvalidInput("rank must be non-negative")
    H = param.H
    layout = StandardLayout(g, H.factors)
    d = layout.d
    minus = free_group(g)
    plus_factors = tuple(H.factors[j] for j in range(d) for _ in range(g)) + (0,) * g
    plus = FgAbGroup(plus_factors)
    tau = tuple(
        tuple(plus.element(tuple(int(t == layout.t_index(i, j)) for t in range(plus.k)))
              for j in range(d))
        for i in range(g))
    pair = make_hpair(H, minus, plus, tau)
    lam_rows = [[0] * plus.k for _ in range(g)]
    for i in range(g):
        lam_rows[i][layout.b_index(i)] = 1
    mu = [[H.zero() for _ in range(plus.k)] for _ in range(plus.k)]
    hg = H.gens()
    for i in range(g):
        for j in range(d):
            ti = layout.t_index(i, j)
            bi = layout.b_index(i)
            mu[ti][bi] = hg[j]
            mu[bi][ti] = param.epsilon * hg[j]
    am = tuple(param.G.minus.zero() for _ in range(g))
    ap = tuple(param.G.plus.zero() for _ in range(plus.k))
    lam = IntMatrix.from_rows(lam_rows) if g else IntMatrix.zeros(0, plus.k)
    return make_wall_form(pair, lam, tuple(tuple(r) for r in mu), am, ap, param,
                          layout=layout)


@dataclass(frozen=True)
class WallMorphism:
    """A structure-preserving map of forms over a shared parameter."""

    source: WallForm
    target: WallForm
    hmap: HMap

    def apply_minus(self, x):
        return self.hmap.f_minus(x)

    def apply_plus(self, y):
        return self.hmap.f_plus(y)

    def compose(self, other):
        """self after other."""
        if other.target != self.source:
            raise InvalidInput("morphism composition mismatch")
        return WallMorphism(other.source, self.target, self.hmap.compose(other.hmap))

    def inverse(self):
        return WallMorphism(self.target, self.source, self.hmap.inverse())

    def is_bijective(self):
        return (self.hmap.f_minus.is_bijective()
                and self.hmap.f_plus.is_bijective())

    def minus_images(self):
        return tuple(self.apply_minus(g) for g in self.source.minus_gens())

    def plus_images(self):
        return tuple(self.apply_plus(g) for g in self.source.plus_gens())

    def image_subform(self):
        gens_m = tuple(g for g in self.minus_images() if not g.is_zero())
        gens_p = tuple(g for g in self.plus_images() if not g.is_zero())
        return SubWallForm(self.target, SubHPair(self.target.pair, gens_m, gens_p))

    @classmethod
    def identity(cls, form):
        return cls(form, form, HMap.identity(form.pair))


@dataclass(frozen=True)
class SubWallForm:
    """A sub-form given by generators in ambient coordinates.

    The restricted structure maps automatically satisfy the axioms, so no
    data beyond the generating sets is stored.
    """

    form: WallForm
    sub: SubHPair

    @property
    def minus_gens(self):
        return self.sub.minus_gens

    @property
    def plus_gens(self):
        return self.sub.plus_gens

    def minus_contains(self, x):
        return self.sub.minus_contains(x)

    def plus_contains(self, y):
        return self.sub.plus_contains(y)

    def is_zero(self):
        return self.sub.is_zero()

    def same_span(self, other):
        """Do two sub-forms of the same ambient carry equal spans?"""
        return (all(other.minus_contains(g) for g in self.minus_gens)
                and all(other.plus_contains(g) for g in self.plus_gens)
                and all(self.minus_contains(g) for g in other.minus_gens)
                and all(self.plus_contains(g) for g in other.plus_gens))


def sub_wall_form(form, minus_gens, plus_gens):
    sub = SubHPair(form.pair, tuple(minus_gens), tuple(plus_gens)).verify_tau_closed()
    return SubWallForm(form, sub)


def make_morphism(source, target, minus_images, plus_images):
    """Build and validate a morphism from generator images.

    ``plus_images`` lists images of all plus generators; for a standard
    source it may instead list only the images of b_1..b_g, the torsion
    images being forced by the commuting square.
    """
    if source.param != target.param:
        raise ParameterMismatch("morphisms require a shared form parameter")
    minus_images = tuple(minus_images)
    plus_images = tuple(plus_images)
    if len(minus_images) != source.pair.minus.k:
        raise InvalidInput("need one image per minus generator")
    if len(plus_images) != source.pair.plus.k:
        lay = source.layout
        if lay is None or len(plus_images) != lay.g:
            raise InvalidInput("need one image per plus generator")
        hg = source.param.H.gens()
        full = [None] * source.pair.plus.k
        for idx in range(source.pair.plus.k):
            kind = lay.plus_gen_kind(idx)
            if kind[0] == "b":
                full[idx] = plus_images[kind[1]]
            else:
                _, block, hgen = kind
                full[idx] = target.tau_at(minus_images[block], hg[hgen])
        plus_images = tuple(full)
    f_minus = GroupHom(source.pair.minus, target.pair.minus,
                       IntMatrix.from_cols([x.coords for x in minus_images],
                                           rows_hint=target.pair.minus.k))
    f_plus = GroupHom(source.pair.plus, target.pair.plus,
                      IntMatrix.from_cols([y.coords for y in plus_images],
                                          rows_hint=target.pair.plus.k))
    hmap = HMap(source.pair, target.pair, f_minus, f_plus)
    mor = WallMorphism(source, target, hmap)
    _validate_preservation(mor)
    return mor


def _validate_preservation(mor):
    src, tgt = mor.source, mor.target
    mi = mor.minus_images()
    pi_ = mor.plus_images()
    for i, x in enumerate(src.minus_gens()):
        for j, y in enumerate(src.plus_gens()):
            got = tgt.lambda_at(mi[i], pi_[j])
            want = src.lam[i, j]
            if got != want:
                raise PreservationViolation(
                    "lambda", f"on (minus gen {i}, plus gen {j}): {got} != {want}")
    for i in range(len(pi_)):
        for j in range(len(pi_)):
            got = tgt.mu_at(pi_[i], pi_[j])
            want = src.mu[i][j]
            if got != want:
                raise PreservationViolation(
                    "mu", f"on (plus gens {i},{j}): {got.coords} != {want.coords}")
    for i in range(len(mi)):
        got = tgt.alpha_minus_at(mi[i])
        if got != src.alpha_minus[i]:
            raise PreservationViolation(
                "alpha-", f"on minus gen {i}: {got.coords} != {src.alpha_minus[i].coords}")
    for j in range(len(pi_)):
        got = tgt.alpha_plus_at(pi_[j])
        if got != src.alpha_plus[j]:
            raise PreservationViolation(
                "alpha+", f"on plus gen {j}: {got.coords} != {src.alpha_plus[j].coords}")


def standard_inclusion(k, target, blocks=None):
    """The morphism W^k -> target hitting the given standard blocks."""
    if target.layout is None:
        raise InvalidInput("target must be a standard form")
    if blocks is None:
        blocks = tuple(range(k))
    g = target.layout.g
    if len(blocks) != k or any(b < 0 or b >= g for b in blocks):
        raise InvalidInput("bad block list")
    src = standard_form(k, target.param)
    mg = target.minus_gens()
    pg = target.plus_gens()
    minus_images = [mg[blocks[t]] for t in range(k)]
    plus_images = [pg[target.layout.b_index(blocks[t])] for t in range(k)]
    return make_morphism(src, target, minus_images, plus_images)


# ---------------------------------------------------------------------------
# duality and non-singularity


def duality_hmap(form, nu, elem):
    """The concrete H-map T(nu)(elem): M -> P(nu)."""
    pair = form.pair
    p = probe(nu, pair.H)
    if nu == 0:
        fm = GroupHom.zero(pair.minus, trivial_group)
        row = [form.lambda_at(elem, y) for y in pair.plus.gens()]
        fp = GroupHom(pair.plus, p.plus,
                      IntMatrix.from_rows([row]) if row else IntMatrix.zeros(1, 0))
        return HMap(pair, p, fm, fp)
    if nu == 1:
        row = [form.lambda_at(x, elem) for x in pair.minus.gens()]
        fm = GroupHom(pair.minus, p.minus,
                      IntMatrix.from_rows([row]) if row else IntMatrix.zeros(1, 0))
        cols = [form.mu_at(y, elem).coords for y in pair.plus.gens()]
        fp = GroupHom(pair.plus, p.plus,
                      IntMatrix.from_cols(cols, rows_hint=pair.H.k))
        return HMap(pair, p, fm, fp)
    raise InvalidInput("probe index must be 0 or 1")


@dataclass(frozen=True)
class Duality:
    nu: int
    hom: GroupHom      # M-(nu=0) or M+(nu=1) into the Hom group
    homs: ProbeHoms


def duality_map(form, nu):
    """T(0): M- -> Hom(M, P0) or T(1): M+ -> Hom(M, P1) in Hom coordinates."""
    homs = hom_to_probe(form.pair, nu)
    src = form.pair.minus if nu == 0 else form.pair.plus
    cols = [homs.to_coords(duality_hmap(form, nu, g)).coords for g in src.gens()]
    hom = GroupHom(src, homs.group,
                   IntMatrix.from_cols(cols, rows_hint=homs.group.k))
    return Duality(nu, hom, homs)


def is_nonsingular(form):
    """Both duality maps bijective; returns (flag, certificate).

    The certificate records, per probe, the Hom-group invariant factors,
    the kernel generators and the cokernel factors that witnessed the
    decision.
    """
    cert = {}
    ok = True
    for nu in (0, 1):
        dual = duality_map(form, nu)
        ker = dual.hom.kernel_subgroup_gens()
        coker, _ = dual.hom.cokernel()
        cert[nu] = {
            "hom_group": dual.homs.group.factors,
            "kernel_gens": tuple(k.coords for k in ker),
            "cokernel": coker.factors,
        }
        ok = ok and not ker and coker.is_trivial()
    return ok, cert


# ---------------------------------------------------------------------------
# orthogonal complements and sums


def orthogonal_complement(form, sub):
    """Generators of the sub-form orthogonal to ``sub``, solved exactly.

    The minus part solves lambda(x, w) = 0 against the plus generators of
    ``sub``; the plus part solves lambda(v, y) = 0 and mu(y, w) = 0 as an
    integer/congruence system.  Tau-closure of the result is re-verified.
    """
    pair = form.pair
    km, kp = pair.minus.k, pair.plus.k
    mg, pg = pair.minus.gens(), pair.plus.gens()
    rows = []
    for w in sub.plus_gens:
        rows.append([form.lambda_at(mg[s], w) for s in range(km)])
    if rows:
        sol = congruence_kernel(IntMatrix.from_rows(rows), (0,) * len(rows))
    else:
        sol = IntMatrix.identity(km)
    minus_gens = _lattice_to_elements(sol, pair.minus)

    rows = []
    moduli = []
    for v in sub.minus_gens:
        rows.append([form.lambda_at(v, pg[t]) for t in range(kp)])
        moduli.append(0)
    hf = pair.H.factors
    for w in sub.plus_gens:
        vals = [form.mu_at(pg[t], w) for t in range(kp)]
        for r, f in enumerate(hf):
            rows.append([vals[t].coords[r] for t in range(kp)])
            moduli.append(f)
    if rows:
        sol = congruence_kernel(IntMatrix.from_rows(rows), tuple(moduli))
    else:
        sol = IntMatrix.identity(kp)
    plus_gens = _lattice_to_elements(sol, pair.plus)
    return sub_wall_form(form, minus_gens, plus_gens)


def _lattice_to_elements(lattice, group):
    out = []
    seen = set()
    for j in range(lattice.cols):
        e = group.element(lattice.col(j))
        if not e.is_zero() and e.coords not in seen:
            seen.add(e.coords)
            out.append(e)
    return tuple(out)


@dataclass(frozen=True)
class PerpSum:
    form: WallForm
    inc_left: WallMorphism
    inc_right: WallMorphism


def perp_sum(a, b):
    """Orthogonal direct sum: block lambda and mu, additive alpha."""
    return perp_sum_with_inclusions(a, b).form


def perp_sum_with_inclusions(a, b):
    if a.param != b.param:
        raise ParameterMismatch("orthogonal sums require a shared parameter")
    s_pair, (inc_a, inc_b, dm, dp) = hpair_direct_sum_with_inclusions(a.pair, b.pair)
    km, kp = s_pair.minus.k, s_pair.plus.k
    mpre = [(a.pair.minus.element(za), b.pair.minus.element(zb))
            for (za, zb) in dm.preimages]
    ppre = [(a.pair.plus.element(za), b.pair.plus.element(zb))
            for (za, zb) in dp.preimages]
    lam_rows = []
    for (ua, ub) in mpre:
        lam_rows.append([a.lambda_at(ua, va) + b.lambda_at(ub, vb)
                         for (va, vb) in ppre])
    mu = tuple(tuple(a.mu_at(ua, va) + b.mu_at(ub, vb) for (va, vb) in ppre)
               for (ua, ub) in ppre)
    am = tuple(a.alpha_minus_at(ua) + b.alpha_minus_at(ub) for (ua, ub) in mpre)
    ap = tuple(a.alpha_plus_at(ua) + b.alpha_plus_at(ub) for (ua, ub) in ppre)
    lam = IntMatrix.from_rows(lam_rows) if lam_rows else IntMatrix.zeros(0, kp)
    form = make_wall_form(s_pair, lam, mu, am, ap, a.param)
    mor_a = make_morphism(a, form,
                          [inc_a.f_minus(g) for g in a.pair.minus.gens()],
                          [inc_a.f_plus(g) for g in a.pair.plus.gens()])
    mor_b = make_morphism(b, form,
                          [inc_b.f_minus(g) for g in b.pair.minus.gens()],
                          [inc_b.f_plus(g) for g in b.pair.plus.gens()])
    return PerpSum(form, mor_a, mor_b)


# ---------------------------------------------------------------------------
# rank certificates


@dataclass(frozen=True)
class RankBudget:
    """Search bounds: coefficient box half-width and a node-count cap."""

    coeff_bound: int = 1
    max_nodes: int = 200_000

    def __post_init__(self):
        if self.coeff_bound < 1 or self.max_nodes < 1:
            raise InvalidInput("budget must be positive")


@dataclass(frozen=True)
class RankCertificate:
    k: int
    upper: int
    witness: WallMorphism
    exact: bool
    exhausted: bool
    nodes_used: int


def _box_by_norm(k, bound):
    """Coordinate vectors of length k ordered by (L1 norm, lex), nonzero."""
    if k == 0:
        return
    for n in range(1, k * bound + 1):
        yield from _norm_slice(k, n, bound)


def _norm_slice(k, n, bound):
    if k == 0:
        if n == 0:
            yield ()
        return
    for v in range(-bound, bound + 1):
        rest = n - abs(v)
        if 0 <= rest <= (k - 1) * bound:
            for tail in _norm_slice(k - 1, rest, bound):
                yield (v,) + tail


def rank_certificate(form, budget=RankBudget()):
    """A certified lower bound on the rank, with a validated witness.

    Greedy hyperbolic splitting: find a pair (x, y) inside the coefficient
    box with lambda(x, y) = 1, mu(y, y) = 0 and vanishing alphas,
    orthogonal to the pairs found so far (searching inside the running
    orthogonal complement), then repeat.  The upper bound is the free rank
    of M-, since a split injection of a rank-g standard form forces that
    much free rank; the result is EXACT when the two meet.
    """
    pair = form.pair
    upper = pair.minus.free_rank
    pairs = []
    nodes = 0
    exhausted = False
    while len(pairs) < upper and not exhausted:
        found = None
        seen_x = set()
        for xv in _box_by_norm(pair.minus.k, budget.coeff_bound):
            if nodes >= budget.max_nodes:
                exhausted = True
                break
            nodes += 1
            x = pair.minus.element(xv)
            if x.coords in seen_x or x.is_zero():
                continue
            seen_x.add(x.coords)
            if not form.alpha_minus_at(x).is_zero():
                continue
            if any(form.lambda_at(x, yp) != 0 for (_, yp) in pairs):
                continue
            lam_x = [form.lambda_at(x, g) for g in pair.plus.gens()]
            seen_y = set()
            for yv in _box_by_norm(pair.plus.k, budget.coeff_bound):
                if nodes >= budget.max_nodes:
                    exhausted = True
                    break
                nodes += 1
                y = pair.plus.element(yv)
                if y.coords in seen_y:
                    continue
                seen_y.add(y.coords)
                if sum(c * lam_x[t] for t, c in enumerate(y.coords) if c) != 1:
                    continue
                if any(form.lambda_at(xp, y) != 0 for (xp, _) in pairs):
                    continue
                if not form.mu_at(y, y).is_zero():
                    continue
                if any(not form.mu_at(y, yp).is_zero() for (_, yp) in pairs):
                    continue
                if not form.alpha_plus_at(y).is_zero():
                    continue
                found = (x, y)
                break
            if found is not None or exhausted:
                break
        if found is None:
            break
        pairs.append(found)
    witness = make_morphism(standard_form(len(pairs), form.param), form,
                            [x for x, _ in pairs], [y for _, y in pairs])
    k = len(pairs)
    return RankCertificate(k, upper, witness, exact=(k == upper),
                           exhausted=exhausted, nodes_used=nodes)


@dataclass(frozen=True)
class StableRankCertificate:
    k: int
    j_used: int
    witness: WallMorphism  # into form perp W^j_used
    padded: WallForm
    exhausted: bool


def stable_rank_certificate(form, j_max=2, budget=RankBudget()):
    """max over j <= j_max of rank(form perp W^j) - j, with its witness."""
    best = None
    exhausted = False
    for j in range(j_max + 1):
        padded = form if j == 0 else perp_sum(form, standard_form(j, form.param))
        cert = rank_certificate(padded, budget)
        exhausted = exhausted or cert.exhausted
        val = cert.k - j
        if best is None or val > best[0]:
            best = (val, j, cert.witness, padded)
    return StableRankCertificate(best[0], best[1], best[2], best[3], exhausted)


# ---------------------------------------------------------------------------
# randomized defense in depth


def _random_element(group, rng, bound):
    return group.element(tuple(rng.randint(-bound, bound) for _ in range(group.k)))


def sample_axioms(form, samples=100, seed=0, coeff_bound=3):
    """Check the six axioms and epsilon-symmetry on random elements.

    Returns a list of failure descriptions; an empty list means every
    sampled identity held exactly.
    """
    rng = random.Random(seed)
    pair = form.pair
    par, pi, eps = form.param.partial, form.param.pi, form.param.epsilon
    failures = []

    def note(name, detail):
        failures.append({"axiom": name, "detail": detail})

    for _ in range(samples):
        x = _random_element(pair.minus, rng, coeff_bound)
        x2 = _random_element(pair.minus, rng, coeff_bound)
        y = _random_element(pair.plus, rng, coeff_bound)
        y2 = _random_element(pair.plus, rng, coeff_bound)
        h = _random_element(pair.H, rng, coeff_bound)
        if form.lambda_at(x, pair.tau_at(x2, h)) != 0:
            note("i", (x.coords, x2.coords, h.coords))
        if form.mu_at(pair.tau_at(x, h), y) != form.lambda_at(x, y) * h:
            note("ii", (x.coords, h.coords, y.coords))
        if form.alpha_minus_at(x + x2) != form.alpha_minus_at(x) + form.alpha_minus_at(x2):
            note("iii", (x.coords, x2.coords))
        lhs = form.alpha_plus_at(y + y2)
        rhs = form.alpha_plus_at(y) + form.alpha_plus_at(y2) + par(form.mu_at(y, y2))
        if lhs != rhs:
            note("iv", (y.coords, y2.coords))
        if form.mu_at(y, y) != pi(form.alpha_plus_at(y)):
            note("v", (y.coords,))
        if form.alpha_plus_at(pair.tau_at(x, h)) != form.param.G.tau_at(form.alpha_minus_at(x), h):
            note("vi", (x.coords, h.coords))
        if form.mu_at(y, y2) != eps * form.mu_at(y2, y):
            note("symmetry", (y.coords, y2.coords))
    return failures
