"""The additive category of H-pairs.

An H-pair is a pair of finitely generated abelian groups (M-, M+) with a
bilinear map tau: M- (x) H -> M+, stored by its values on generator
pairs.  Maps of pairs are pairs of homomorphisms commuting with tau.
The two probe pairs P0 = (0, Z) and P1 = (Z, H) are the targets of the
duality theory; Hom groups into them are computed exactly as solution
groups of the commuting-square congruence system.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import BilinearityViolation, HMismatch, InvalidInput, SquareViolation
from .intlinalg import (
    FgAbGroup,
    GroupElement,
    GroupHom,
    IntMatrix,
    congruence_kernel,
    direct_sum_groups,
    free_group,
    group_from_presentation,
    kernel_basis,
    solve,
    trivial_group,
)

__all__ = [
    "HPair",
    "HMap",
    "SubHPair",
    "make_hpair",
    "sub_hpair",
    "probe",
    "hpair_direct_sum",
    "hpair_direct_sum_with_inclusions",
    "hmap_kernel",
    "hom_to_probe",
    "ProbeHoms",
]


@dataclass(frozen=True)
class HPair:
    """Groups (minus, plus) with tau stored on generator pairs.

    ``tau[i][j]`` is the value on (i-th minus generator, j-th H generator),
    an element of ``plus``.
    """

    H: FgAbGroup
    minus: FgAbGroup
    plus: FgAbGroup
    tau: tuple  # tuple of tuples of GroupElement

    def tau_at(self, x, h):
        """Bilinear extension of the stored generator values."""
        acc = [0] * self.plus.k
        for i, xi in enumerate(x.coords):
            if xi == 0:
                continue
            row = self.tau[i]
            for j, hj in enumerate(h.coords):
                if hj:
                    c = xi * hj
                    vc = row[j].coords
                    for t in range(self.plus.k):
                        acc[t] += c * vc[t]
        return self.plus.element(acc)

    def is_zero_pair(self):
        return self.minus.is_trivial() and self.plus.is_trivial()


def make_hpair(H, minus, plus, tau_values):
    """Validate bilinear well-definedness and build the pair.

    Raises BilinearityViolation naming the offending generator and
    relation when some torsion order fails to kill a tau value.
    """
    tau = tuple(tuple(v if isinstance(v, GroupElement) else plus.element(v)
                      for v in row) for row in tau_values)
    if H.k == 0 and not tau:
        tau = ((),) * minus.k
    if len(tau) != minus.k or any(len(row) != H.k for row in tau):
        raise InvalidInput("tau value table has wrong shape")
    for i, row in enumerate(tau):
        for v in row:
            if v.group != plus:
                raise InvalidInput("tau values must live in the plus group")
    for i, d in enumerate(minus.factors):
        if d:
            for j in range(H.k):
                if not (d * tau[i][j]).is_zero():
                    raise BilinearityViolation(
                        f"minus generator {i} has order {d} but "
                        f"{d}*tau({i},{j}) = {(d * tau[i][j]).coords} != 0")
    for j, d in enumerate(H.factors):
        if d:
            for i in range(minus.k):
                if not (d * tau[i][j]).is_zero():
                    raise BilinearityViolation(
                        f"H generator {j} has order {d} but "
                        f"{d}*tau({i},{j}) = {(d * tau[i][j]).coords} != 0")
    return HPair(H, minus, plus, tau)


def probe(nu, H):
    """The probe pairs: P0 = (0, Z, tau = 0) and P1 = (Z, H, tau(t,h) = t*h)."""
    if nu == 0:
        return HPair(H, trivial_group, free_group(1), ())
    if nu == 1:
        gens = H.gens()
        return HPair(H, free_group(1), H, (tuple(gens),) if H.k else ((),))
    raise InvalidInput("probe index must be 0 or 1")


@dataclass(frozen=True)
class HMap:
    """A map of H-pairs; the square with tau commutes on generators."""

    source: HPair
    target: HPair
    f_minus: GroupHom
    f_plus: GroupHom

    def __post_init__(self):
        if self.source.H != self.target.H:
            raise HMismatch("H-maps require a common coefficient group")
        if (self.f_minus.domain != self.source.minus
                or self.f_minus.codomain != self.target.minus
                or self.f_plus.domain != self.source.plus
                or self.f_plus.codomain != self.target.plus):
            raise InvalidInput("component homs do not match the pairs")
        hg = self.source.H.gens()
        for i, x in enumerate(self.source.minus.gens()):
            for j, h in enumerate(hg):
                lhs = self.f_plus(self.source.tau[i][j])
                rhs = self.target.tau_at(self.f_minus(x), h)
                if lhs != rhs:
                    raise SquareViolation(
                        f"square fails on (minus gen {i}, H gen {j}): "
                        f"{lhs.coords} != {rhs.coords}")

    def compose(self, other):
        """self after other."""
        if other.target != self.source:
            raise InvalidInput("H-map composition mismatch")
        return HMap(other.source, self.target,
                    self.f_minus.compose(other.f_minus),
                    self.f_plus.compose(other.f_plus))

    @classmethod
    def identity(cls, pair):
        return cls(pair, pair, GroupHom.identity(pair.minus), GroupHom.identity(pair.plus))

    @classmethod
    def zero(cls, source, target):
        return cls(source, target, GroupHom.zero(source.minus, target.minus),
                   GroupHom.zero(source.plus, target.plus))

    def is_zero(self):
        return self.f_minus.matrix.is_zero() and self.f_plus.matrix.is_zero()

    def inverse(self):
        return HMap(self.target, self.source,
                    self.f_minus.inverse(), self.f_plus.inverse())


def _span_contains(gens, target):
    """Is ``target`` an integer combination of ``gens`` in its group?"""
    group = target.group
    cols = [g.coords for g in gens]
    mat = IntMatrix.from_cols(cols, rows_hint=group.k).hstack(group.relation_columns())
    return solve(mat, target.coords) is not None


def _span_coefficients(gens, target):
    """Coefficients expressing ``target`` in ``gens`` modulo relations."""
    group = target.group
    cols = [g.coords for g in gens]
    mat = IntMatrix.from_cols(cols, rows_hint=group.k).hstack(group.relation_columns())
    sol = solve(mat, target.coords)
    if sol is None:
        return None
    return sol[:len(gens)]


@dataclass(frozen=True)
class SubHPair:
    """A sub-pair stored by generators in ambient coordinates."""

    ambient: HPair
    minus_gens: tuple
    plus_gens: tuple

    def minus_contains(self, x):
        return _span_contains(self.minus_gens, x)

    def plus_contains(self, y):
        return _span_contains(self.plus_gens, y)

    def plus_coefficients(self, y):
        return _span_coefficients(self.plus_gens, y)

    def verify_tau_closed(self):
        for x in self.minus_gens:
            for h in self.ambient.H.gens():
                v = self.ambient.tau_at(x, h)
                if not self.plus_contains(v):
                    raise BilinearityViolation(
                        f"sub-pair not tau-closed: tau({x.coords}, {h.coords}) "
                        f"= {v.coords} escapes the plus span")
        return self

    def is_zero(self):
        return (all(g.is_zero() for g in self.minus_gens)
                and all(g.is_zero() for g in self.plus_gens))


def sub_hpair(ambient, minus_gens, plus_gens):
    """Build a sub-pair and verify tau-closure."""
    return SubHPair(ambient, tuple(minus_gens), tuple(plus_gens)).verify_tau_closed()


def hpair_direct_sum(a, b):
    """Componentwise direct sum, renormalized; tau is block diagonal."""
    s, inc = hpair_direct_sum_with_inclusions(a, b)
    return s


def hpair_direct_sum_with_inclusions(a, b):
    if a.H != b.H:
        raise HMismatch("direct sum requires a common coefficient group")
    dm = direct_sum_groups(a.minus, b.minus)
    dp = direct_sum_groups(a.plus, b.plus)
    hg = a.H.gens()
    tau = []
    for (za, zb) in dm.preimages:
        ea = a.minus.element(za)
        eb = b.minus.element(zb)
        row = []
        for j, h in enumerate(hg):
            row.append(dp.inc_left(a.tau_at(ea, h)) + dp.inc_right(b.tau_at(eb, h)))
        tau.append(tuple(row))
    s = HPair(a.H, dm.group, dp.group, tuple(tau))
    inc_a = HMap(a, s, dm.inc_left, dp.inc_left)
    inc_b = HMap(b, s, dm.inc_right, dp.inc_right)
    return s, (inc_a, inc_b, dm, dp)


def hmap_kernel(f):
    """Kernel sub-pair, formed componentwise and re-verified tau-closed."""
    minus = f.f_minus.kernel_subgroup_gens()
    plus = f.f_plus.kernel_subgroup_gens()
    return SubHPair(f.source, minus, plus).verify_tau_closed()


# ---------------------------------------------------------------------------
# Hom groups into the probes


@dataclass(frozen=True)
class ProbeHoms:
    """The abelian group of H-maps M -> P(nu), with evaluation both ways.

    ``group`` is the Hom group in normal form; ``hom_at`` realizes a group
    element as a concrete H-map and ``to_coords`` expresses a concrete
    H-map in the group's coordinates.
    """

    pair: HPair
    nu: int
    group: FgAbGroup
    _sol: IntMatrix        # columns generate the solution lattice (unknown vector u)
    _ident: IntMatrix      # columns span the identification lattice
    _quot: GroupHom        # Z^sol-cols -> group

    def _unknown_split(self, u):
        m = self.pair
        p = probe(self.nu, m.H)
        nm = p.minus.k * m.minus.k
        fm = IntMatrix(p.minus.k, m.minus.k, tuple(u[:nm]))
        fp = IntMatrix(p.plus.k, m.plus.k, tuple(u[nm:]))
        return fm, fp

    def hom_at(self, elem):
        """Realize a Hom-group element as a validated H-map."""
        if elem.group != self.group:
            raise InvalidInput("element of the wrong Hom group")
        z = self._quot.preimage(elem)
        if z is None:
            raise InvalidInput("unliftable Hom-group element (internal)")
        u = self._sol.apply(z.coords) if self._sol.cols else (0,) * self._sol.rows
        fm, fp = self._unknown_split(u)
        p = probe(self.nu, self.pair.H)
        return HMap(self.pair, p,
                    GroupHom(self.pair.minus, p.minus, fm),
                    GroupHom(self.pair.plus, p.plus, fp))

    def to_coords(self, hmap):
        """Coordinates of a concrete H-map M -> P(nu) in the Hom group."""
        u = tuple(hmap.f_minus.matrix.entries) + tuple(hmap.f_plus.matrix.entries)
        mat = self._sol.hstack(self._ident)
        sol = solve(mat, u)
        if sol is None:
            raise InvalidInput("H-map does not satisfy the probe constraints")
        return self._quot(sol[:self._sol.cols])

    def zero(self):
        return self.group.zero()


@lru_cache(maxsize=None)
def hom_to_probe(pair, nu):
    """Hom group of H-maps ``pair`` -> P(nu), solved exactly.

    The commuting-square and well-definedness conditions form a linear
    congruence system in the matrix entries of (f-, f+); its solution
    lattice modulo the identification lattice (entries that differ by
    codomain relations give equal maps) is the Hom group.
    """
    if nu not in (0, 1):
        raise InvalidInput("probe index must be 0 or 1")
    m = pair
    p = probe(nu, m.H)
    km, kp = m.minus.k, m.plus.k
    lm, lp = p.minus.k, p.plus.k
    n_unknowns = lm * km + lp * kp

    def im(r, c):
        return r * km + c

    def ip(r, c):
        return lm * km + r * kp + c

    rows = []
    moduli = []
    # well-definedness of f- over domain torsion
    for j, d in enumerate(m.minus.factors):
        if d:
            for r, e in enumerate(p.minus.factors):
                row = [0] * n_unknowns
                row[im(r, j)] = d
                rows.append(row)
                moduli.append(e)
    # well-definedness of f+ over domain torsion
    for j, d in enumerate(m.plus.factors):
        if d:
            for r, e in enumerate(p.plus.factors):
                row = [0] * n_unknowns
                row[ip(r, j)] = d
                rows.append(row)
                moduli.append(e)
    # commuting square: f+(tau_M(x_i, h_j)) = tau_P(f-(x_i), h_j)
    hg = m.H.gens()
    for i in range(km):
        for j in range(len(hg)):
            tv = m.tau[i][j]
            for r, e in enumerate(p.plus.factors):
                row = [0] * n_unknowns
                for t, c in enumerate(tv.coords):
                    if c:
                        row[ip(r, t)] += c
                for s in range(lm):
                    tp = p.tau[s][j]
                    if tp.coords[r]:
                        row[im(s, i)] -= tp.coords[r]
                rows.append(row)
                moduli.append(e)
    if rows:
        system = IntMatrix.from_rows(rows)
        sol = congruence_kernel(system, tuple(moduli))
    else:
        sol = IntMatrix.identity(n_unknowns)
    # identification lattice: columns worth zero maps
    ident_cols = []
    for r, e in enumerate(p.minus.factors):
        if e:
            for j in range(km):
                col = [0] * n_unknowns
                col[im(r, j)] = e
                ident_cols.append(col)
    for r, e in enumerate(p.plus.factors):
        if e:
            for j in range(kp):
                col = [0] * n_unknowns
                col[ip(r, j)] = e
                ident_cols.append(col)
    ident = IntMatrix.from_cols(ident_cols, rows_hint=n_unknowns)

    m_gens = sol.cols
    ker = kernel_basis(sol)
    rel_cols = [list(ker.col(j)) for j in range(ker.cols)]
    for j in range(ident.cols):
        x = solve(sol, ident.col(j))
        if x is None:
            raise InvalidInput("identification escapes the solution lattice (internal)")
        rel_cols.append(list(x))
    group, quot = group_from_presentation(
        IntMatrix.from_cols(rel_cols, rows_hint=m_gens), m_gens)
    return ProbeHoms(pair, nu, group, sol, ident, quot)
