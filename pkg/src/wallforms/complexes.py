"""Finite truncations of the orthogonality complex, with exact homology.

Vertices are rank-one morphisms into a form whose generator images lie in
a coefficient box; edges join morphisms with orthogonal images, and the
complex is the flag (clique) complex of that graph.  The truncation bound
is part of every report: finite windows can only support, never prove,
connectivity statements, so all conclusions are labeled as evidence at
the bound.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import InvalidInput, SimplexNotFound
from .forms import make_morphism, standard_form
from .intlinalg import IntMatrix, smith_normal_form

__all__ = [
    "CliqueComplex",
    "HomologyReport",
    "enumerate_vertices",
    "build_complex",
    "homology",
    "link",
    "lcm_report",
    "connectivity_report",
    "ConnectivityReport",
    "LcmReport",
]


class CliqueComplex:
    """A flag complex: simplices are exactly the cliques of the graph.

    Immutable after construction; ``max_dim`` is the build ceiling for
    simplex enumeration.
    """

    def __init__(self, vertices, neighbor_sets, max_dim):
        self.vertices = tuple(vertices)
        self.nbrs = tuple(frozenset(s) for s in neighbor_sets)
        if len(self.nbrs) != len(self.vertices):
            raise InvalidInput("neighbor set count mismatch")
        for i, s in enumerate(self.nbrs):
            if i in s or any(j < 0 or j >= len(self.vertices) for j in s):
                raise InvalidInput("bad adjacency data")
            for j in s:
                if i not in self.nbrs[j]:
                    raise InvalidInput("adjacency must be symmetric")
        self.max_dim = max_dim
        self._levels = None

    @classmethod
    def from_graph(cls, n, edges, max_dim=2):
        nbrs = [set() for _ in range(n)]
        for (i, j) in edges:
            if i != j:
                nbrs[i].add(j)
                nbrs[j].add(i)
        return cls(tuple(range(n)), nbrs, max_dim)

    @property
    def n(self):
        return len(self.vertices)

    def edge_count(self):
        if self.max_dim < 1:
            return 0
        return sum(len(s) for s in self.nbrs) // 2

    def edges(self):
        if self.max_dim < 1:
            return []
        return sorted((i, j) for i in range(self.n) for j in self.nbrs[i] if i < j)

    def _build_levels(self):
        if self._levels is not None:
            return self._levels
        levels = []
        cands = []
        level0 = [(i,) for i in range(self.n)]
        cand0 = [frozenset(j for j in self.nbrs[i] if j > i) for i in range(self.n)]
        levels.append(level0)
        cands.append(cand0)
        for dim in range(1, self.max_dim + 1):
            cur = []
            curc = []
            for s, cand in zip(levels[-1], cands[-1]):
                for w in sorted(cand):
                    cur.append(s + (w,))
                    curc.append(frozenset(j for j in cand & self.nbrs[w] if j > w))
            levels.append(cur)
            cands.append(curc)
        self._levels = levels
        return levels

    def simplices(self, dim):
        """Lex-ordered list of dim-simplices (vertex index tuples)."""
        if dim < 0 or dim > self.max_dim:
            raise InvalidInput(f"dimension {dim} outside the build ceiling {self.max_dim}")
        return list(self._build_levels()[dim])

    def has_simplex(self, simplex):
        s = tuple(sorted(set(simplex)))
        if len(s) != len(simplex) or len(s) - 1 > self.max_dim:
            return False
        if any(v < 0 or v >= self.n for v in s):
            return False
        return all(b in self.nbrs[a] for a, b in itertools.combinations(s, 2))

    def components(self):
        if self.max_dim < 1:
            return self.n
        parent = list(range(self.n))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for i in range(self.n):
            for j in self.nbrs[i]:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[ri] = rj
        return len({find(i) for i in range(self.n)})


@dataclass(frozen=True)
class HomologyReport:
    """Exact integral homology of a truncation, degree by degree."""

    betti: tuple
    torsion: tuple          # per degree: invariant factors > 1
    simplex_counts: tuple   # counts in dimensions 0 .. max_degree + 1
    max_degree: int


def _boundary_matrix(lower, upper):
    index = {s: i for i, s in enumerate(lower)}
    cols = []
    for s in upper:
        col = [0] * len(lower)
        for i in range(len(s)):
            face = s[:i] + s[i + 1:]
            col[index[face]] += (-1) ** i
        cols.append(col)
    return IntMatrix.from_cols(cols, rows_hint=len(lower))


def homology(x, max_degree):
    """Betti numbers and torsion via boundary Smith forms.

    Homology of the *truncated* complex: simplices above the build ceiling
    do not exist, so the boundary out of dimension max_dim + 1 is zero.
    When max_degree equals the ceiling, the top Betti number is therefore
    an upper bound for the untruncated flag complex (missing fillers can
    only lower it).  Degree 0 is handled combinatorially (component
    count; its torsion is always trivial); higher boundaries are reduced
    exactly.
    """
    if max_degree > x.max_dim:
        raise InvalidInput("max_degree must not exceed the build ceiling")
    if max_degree < 0:
        raise InvalidInput("max_degree must be non-negative")
    counts = [len(x.simplices(d)) if d <= x.max_dim else 0
              for d in range(max_degree + 2)]
    if x.n == 0:
        return HomologyReport((0,) * (max_degree + 1),
                              ((),) * (max_degree + 1), tuple(counts), max_degree)
    comps = x.components()
    ranks = [0] * (max_degree + 2)   # rank of boundary_k for k = 0 .. max_degree+1
    tors = [()] * (max_degree + 2)   # invariant factors > 1 of boundary_k
    if max_degree + 1 >= 1 and counts[1]:
        ranks[1] = x.n - comps
    for k in range(2, max_degree + 2):
        if counts[k] == 0:
            continue
        mat = _boundary_matrix(x.simplices(k - 1), x.simplices(k))
        _, d, _ = smith_normal_form(mat)
        diag = [v for v in d.diagonal() if v]
        ranks[k] = len(diag)
        tors[k] = tuple(v for v in diag if v > 1)
    betti = []
    torsion = []
    for k in range(max_degree + 1):
        betti.append(counts[k] - ranks[k] - ranks[k + 1])
        torsion.append(tors[k + 1])
    return HomologyReport(tuple(betti), tuple(torsion), tuple(counts), max_degree)


def link(x, simplex):
    """The induced flag complex on the common neighbors of a simplex."""
    s = tuple(sorted(set(simplex)))
    if not s:
        return x
    if not x.has_simplex(s):
        raise SimplexNotFound(f"{simplex} is not a simplex of the complex")
    common = set(range(x.n))
    for v in s:
        common &= x.nbrs[v]
    keep = sorted(common)
    pos = {v: i for i, v in enumerate(keep)}
    nbrs = [set(pos[w] for w in (x.nbrs[v] & common)) for v in keep]
    return CliqueComplex(tuple(x.vertices[v] for v in keep), nbrs,
                         max(x.max_dim - len(s), 0))


# ---------------------------------------------------------------------------
# vertex enumeration and adjacency for the orthogonality complex


def _box(k, bound):
    return itertools.product(range(-bound, bound + 1), repeat=k)


def enumerate_vertices(form, bound):
    """All rank-one morphisms with generator images inside the box.

    This is a finite window on a generally infinite vertex set; vertices
    are deduplicated on the canonical generator-image pair and returned in
    lexicographic order of those images.
    """
    if bound < 1:
        raise InvalidInput("bound must be at least 1")
    pair = form.pair
    mk, pk = pair.minus.k, pair.plus.k
    w1 = standard_form(1, form.param)
    xs = []
    seen = set()
    for raw in _box(mk, bound):
        x = pair.minus.element(raw)
        if x.coords in seen or x.is_zero():
            continue
        seen.add(x.coords)
        if form.alpha_minus_at(x).is_zero():
            xs.append(x)
    found = set()
    for x in xs:
        lam_x = [form.lambda_at(x, g) for g in pair.plus.gens()]
        seen_y = set()
        for raw in _box(pk, bound):
            y = pair.plus.element(raw)
            if y.coords in seen_y:
                continue
            seen_y.add(y.coords)
            if sum(c * lam_x[t] for t, c in enumerate(y.coords) if c) != 1:
                continue
            if not form.mu_at(y, y).is_zero():
                continue
            if not form.alpha_plus_at(y).is_zero():
                continue
            found.add((x.coords, y.coords))
    out = []
    for (xc, yc) in sorted(found):
        out.append(make_morphism(w1, form,
                                 [pair.minus.element(xc)], [pair.plus.element(yc)]))
    return out


def _parallel(u, v):
    for (a, b), (c, d) in itertools.combinations(zip(u, v), 2):
        if a * d - b * c:
            return False
    return True


def _intersection_trivial(group, gens_a, gens_b):
    """Is span(gens_a) intersect span(gens_b) zero inside ``group``?"""
    from .intlinalg import kernel_basis

    na = len(gens_a)
    cols = ([list(g.coords) for g in gens_a]
            + [[-c for c in g.coords] for g in gens_b])
    for i, d in enumerate(group.factors):
        if d:
            col = [0] * group.k
            col[i] = d
            cols.append(col)
    mat = IntMatrix.from_cols(cols, rows_hint=group.k)
    ker = kernel_basis(mat)
    for j in range(ker.cols):
        coeffs = ker.col(j)[:na]
        common = group.zero()
        for c, g in zip(coeffs, gens_a):
            if c:
                common = common + c * g
        if not common.is_zero():
            return False
    return True


def _vertex_data(form, morphisms):
    data = []
    pg = form.pair.plus.gens()
    for f in morphisms:
        x = f.apply_minus(f.source.minus_gens()[0])
        y = f.apply_plus(f.source.plus_gens()[f.source.layout.b_index(0)])
        plus_gens = tuple(g for g in f.plus_images() if not g.is_zero())
        lam_x = tuple(form.lambda_at(x, g) for g in pg)
        data.append((x, y, plus_gens, lam_x))
    return data


def _orthogonal(form, va, vb, minus_free, plus_single):
    xa, ya, pa, la = va
    xb, yb, pb, lb = vb
    if sum(c * la[t] for t, c in enumerate(yb.coords) if c) != 0:
        return False
    if sum(c * lb[t] for t, c in enumerate(ya.coords) if c) != 0:
        return False
    if not form.param.H.is_trivial():
        if not form.mu_at(ya, yb).is_zero():
            return False
    # trivial intersections of the image spans
    if minus_free:
        if _parallel(xa.coords, xb.coords):
            return False
    elif not _intersection_trivial(form.pair.minus, (xa,), (xb,)):
        return False
    if plus_single:
        if _parallel(ya.coords, yb.coords):
            return False
    elif not _intersection_trivial(form.pair.plus, pa, pb):
        return False
    return True


def build_complex(vertices, form, max_dim=2, threads=1):
    """The flag complex on pairwise-orthogonal rank-one images.

    Adjacency requires mutual orthogonality of the image sub-forms and
    trivial intersection, decided by exact integer and congruence solves.
    Rows of the adjacency matrix may be evaluated on a thread pool; the
    ordered merge keeps the result deterministic.
    """
    data = _vertex_data(form, vertices)
    minus_free = form.pair.minus.torsion_count == 0
    plus_single = form.param.H.is_trivial() and form.pair.plus.torsion_count == 0
    n = len(vertices)

    def upper_row(i):
        di = data[i]
        return [j for j in range(i + 1, n)
                if _orthogonal(form, di, data[j], minus_free, plus_single)]

    if threads > 1 and n > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as ex:
            rows = list(ex.map(upper_row, range(n)))
    else:
        rows = [upper_row(i) for i in range(n)]
    nbrs = [set() for _ in range(n)]
    for i, row in enumerate(rows):
        for j in row:
            nbrs[i].add(j)
            nbrs[j].add(i)
    return CliqueComplex(tuple(vertices), nbrs, max_dim)


# ---------------------------------------------------------------------------
# evidence reports


@dataclass(frozen=True)
class LcmEntry:
    level: int
    simplex: tuple | None
    required: int          # homology connectivity required of the link
    betti: tuple | None
    passed: bool
    note: str


@dataclass(frozen=True)
class LcmReport:
    """Link-connectivity evidence; homology cannot certify pi_1."""

    n: int
    label: str
    entries: tuple
    auto_passed_levels: tuple
    weakly_cm_pass: bool
    locally_cm_pass: bool


def _connectivity_ok(cx, required):
    """Homology evidence that a complex is ``required``-connected.

    A pass at the build ceiling is sound: truncation can only inflate the
    top Betti number, so vanishing there still vanishes untruncated.
    """
    if required < -1:
        return True, None, ""
    if required == -1:
        return cx.n > 0, None, "" if cx.n else "empty link"
    if cx.max_dim < required:
        return False, None, "insufficient build depth"
    note = "top degree at build ceiling (upper bound)" if cx.max_dim == required else ""
    rep = homology(cx, required)
    ok = rep.betti[0] == 1 and all(b == 0 for b in rep.betti[1:]) \
        and all(not t for t in rep.torsion)
    return ok, rep.betti, note


def lcm_report(x, n):
    """Check (n-l-2)-connectivity evidence for every link, plus the whole.

    The level -1 entry is the complex itself at connectivity n-1 (the
    global half of the weakly Cohen-Macaulay condition); levels with a
    vacuous requirement are aggregated.  All conclusions are EVIDENCE at
    the build bound: positive homology findings do not certify homotopy
    connectivity.
    """
    entries = []
    auto = []
    ok_all, betti, note = _connectivity_ok(x, n - 1)
    entries.append(LcmEntry(-1, None, n - 1, betti, ok_all, note))
    for l in range(0, x.max_dim + 1):
        req = n - l - 2
        if req < -1:
            auto.append(l)
            continue
        for s in x.simplices(l):
            lk = link(x, s)
            ok, betti, note = _connectivity_ok(lk, req)
            entries.append(LcmEntry(l, s, req, betti, ok, note))
    weakly = all(e.passed for e in entries)
    locally = all(e.passed for e in entries if e.level >= 0)
    return LcmReport(n, "EVIDENCE", tuple(entries), tuple(auto), weakly, locally)


@dataclass(frozen=True)
class ConnectivityReport:
    """Evidence-at-bound summary for the connectivity statement."""

    bound: int
    g: int
    d: int
    label: str
    vertex_count: int
    edge_count: int
    nonempty: bool
    nonempty_threshold: int       # nonempty expected once stable rank >= 2 + d
    connected_threshold: int      # connected expected once stable rank >= 4 + d
    target_degree: int            # reduced homology should vanish through this
    betti: tuple | None
    torsion: tuple | None


def connectivity_report(form, g, d, bound=1, max_degree=0):
    """Build the truncation and summarize the connectivity evidence."""
    verts = enumerate_vertices(form, bound)
    x = build_complex(verts, form, max_dim=max_degree + 1)
    betti = torsion = None
    if x.n:
        rep = homology(x, max_degree)
        betti, torsion = rep.betti, rep.torsion
    return ConnectivityReport(
        bound=bound, g=g, d=d, label=f"EVIDENCE-AT-BOUND-{bound}",
        vertex_count=x.n, edge_count=x.edge_count(),
        nonempty=x.n > 0,
        nonempty_threshold=2 + d,
        connected_threshold=4 + d,
        target_degree=(g - 4 - d) // 2,
        betti=betti, torsion=torsion)
