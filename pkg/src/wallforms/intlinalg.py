"""Exact integer matrix algebra and finitely generated abelian groups.

Everything runs on arbitrary-precision Python ints: no floating point, no
modular shortcuts.  Smith normal form is the universal subroutine behind
kernels, cokernels, solvability tests and group normalization.  Matrices
are immutable and row-major; desk scale is assumed (hundreds of rows, not
millions), so the algorithms favour determinism and exactness over
asymptotics.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import InvalidInput

__all__ = [
    "IntMatrix",
    "smith_normal_form",
    "kernel_basis",
    "solve",
    "congruence_kernel",
    "FgAbGroup",
    "GroupElement",
    "GroupHom",
    "group_from_presentation",
    "generating_set_length",
    "tensor_product",
    "TensorProduct",
    "direct_sum_groups",
    "DirectSum",
    "trivial_group",
    "free_group",
    "cyclic",
]


@dataclass(frozen=True)
class IntMatrix:
    """Immutable integer matrix; ``entries`` is row-major.

    >>> IntMatrix.identity(2) @ IntMatrix.from_rows([[1, 2], [3, 4]])
    IntMatrix.from_rows([[1, 2], [3, 4]])
    """

    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise InvalidInput("negative matrix dimensions")
        if len(self.entries) != self.rows * self.cols:
            raise InvalidInput("entry count does not match dimensions")

    @classmethod
    def from_rows(cls, rows):
        rows = [list(r) for r in rows]
        n = len(rows[0]) if rows else 0
        if any(len(r) != n for r in rows):
            raise InvalidInput("ragged rows")
        return cls(len(rows), n, tuple(int(x) for r in rows for x in r))

    @classmethod
    def from_cols(cls, cols, rows_hint=None):
        cols = [list(c) for c in cols]
        if cols:
            m = len(cols[0])
        else:
            m = 0 if rows_hint is None else rows_hint
        if any(len(c) != m for c in cols):
            raise InvalidInput("ragged columns")
        return cls(m, len(cols), tuple(int(cols[j][i]) for i in range(m) for j in range(len(cols))))

    @classmethod
    def identity(cls, n):
        return cls(n, n, tuple(int(i == j) for i in range(n) for j in range(n)))

    @classmethod
    def zeros(cls, m, n):
        return cls(m, n, (0,) * (m * n))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i):
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j):
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def row_lists(self):
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self):
        return IntMatrix(self.cols, self.rows,
                         tuple(self[i, j] for j in range(self.cols) for i in range(self.rows)))

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise InvalidInput("shape mismatch in matrix product")
        out = []
        for i in range(self.rows):
            ri = self.row(i)
            for j in range(other.cols):
                out.append(sum(ri[k] * other[k, j] for k in range(self.cols)))
        return IntMatrix(self.rows, other.cols, tuple(out))

    def __add__(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise InvalidInput("shape mismatch in matrix sum")
        return IntMatrix(self.rows, self.cols,
                         tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __neg__(self):
        return IntMatrix(self.rows, self.cols, tuple(-a for a in self.entries))

    def scale(self, c):
        return IntMatrix(self.rows, self.cols, tuple(c * a for a in self.entries))

    def hstack(self, other):
        if self.rows != other.rows:
            raise InvalidInput("row mismatch in hstack")
        rows = [list(self.row(i)) + list(other.row(i)) for i in range(self.rows)]
        return IntMatrix(self.rows, self.cols + other.cols,
                         tuple(x for r in rows for x in r))

    def apply(self, vec):
        """Matrix times column vector, returned as a tuple."""
        if len(vec) != self.cols:
            raise InvalidInput("vector length mismatch")
        return tuple(sum(self.row(i)[k] * vec[k] for k in range(self.cols))
                     for i in range(self.rows))

    def is_zero(self):
        return all(x == 0 for x in self.entries)

    def diagonal(self):
        return tuple(self[i, i] for i in range(min(self.rows, self.cols)))

    def det(self):
        """Exact determinant by fraction-free (Bareiss) elimination."""
        if self.rows != self.cols:
            raise InvalidInput("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        a = self.row_lists()
        sign = 1
        prev = 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k] != 0:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
                a[i][k] = 0
            prev = a[k][k]
        return sign * a[n - 1][n - 1]

    def inverse_unimodular(self):
        """Inverse of a unimodular matrix (integer entries, |det| = 1)."""
        u, d, v = smith_normal_form(self)
        if list(d.diagonal()) != [1] * self.rows or self.rows != self.cols:
            raise InvalidInput("matrix is not unimodular")
        return v @ u

    def __repr__(self):
        return f"IntMatrix.from_rows({self.row_lists()!r})"


def _swap_rows(a, i, j):
    a[i], a[j] = a[j], a[i]


def _swap_cols(a, i, j):
    for row in a:
        row[i], row[j] = row[j], row[i]


def _row_axpy(a, dst, src, c):
    # a[dst] += c * a[src]
    rs = a[src]
    rd = a[dst]
    for k in range(len(rd)):
        rd[k] += c * rs[k]


def _col_axpy(a, dst, src, c):
    for row in a:
        row[dst] += c * row[src]


def smith_normal_form(mat):
    """Return (U, D, V) with U @ mat @ V = D, U and V unimodular.

    D is diagonal with non-negative entries forming a divisibility chain
    d1 | d2 | ...; pivots are chosen with minimal absolute value to keep
    coefficient growth in check.

    >>> u, d, v = smith_normal_form(IntMatrix.from_rows([[2, 4], [6, 8]]))
    >>> d.diagonal()
    (2, 4)
    """
    m, n = mat.rows, mat.cols
    a = mat.row_lists()
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    v = [[int(i == j) for j in range(n)] for i in range(n)]
    t = 0
    while t < min(m, n):
        # minimal-absolute-value pivot in the trailing submatrix
        piv = None
        best = None
        for i in range(t, m):
            row = a[i]
            for j in range(t, n):
                e = row[j]
                if e != 0 and (best is None or abs(e) < best):
                    best = abs(e)
                    piv = (i, j)
        if piv is None:
            break
        _swap_rows(a, t, piv[0]); _swap_rows(u, t, piv[0])
        _swap_cols(a, t, piv[1]); _swap_cols(v, t, piv[1])
        while True:
            if a[t][t] < 0:
                for k in range(n):
                    a[t][k] = -a[t][k]
                for k in range(m):
                    u[t][k] = -u[t][k]
            dirty = False
            for i in range(t + 1, m):
                if a[i][t]:
                    q = a[i][t] // a[t][t]
                    _row_axpy(a, i, t, -q); _row_axpy(u, i, t, -q)
                    if a[i][t]:
                        # remainder is a strictly smaller pivot
                        _swap_rows(a, t, i); _swap_rows(u, t, i)
                        dirty = True
            for j in range(t + 1, n):
                if a[t][j]:
                    q = a[t][j] // a[t][t]
                    _col_axpy(a, j, t, -q); _col_axpy(v, j, t, -q)
                    if a[t][j]:
                        _swap_cols(a, t, j); _swap_cols(v, t, j)
                        dirty = True
            if dirty:
                continue
            if any(a[i][t] for i in range(t + 1, m)):
                continue
            # row/col t clear; enforce divisibility of the rest
            p = a[t][t]
            bad = None
            for i in range(t + 1, m):
                if any(x % p for x in a[i][t + 1:n]):
                    bad = i
                    break
            if bad is None:
                break
            _row_axpy(a, t, bad, 1); _row_axpy(u, t, bad, 1)
        t += 1
    U = IntMatrix.from_rows(u) if m else IntMatrix.zeros(0, 0)
    V = IntMatrix.from_rows(v) if n else IntMatrix.zeros(0, 0)
    D = IntMatrix.from_rows(a) if m and n else IntMatrix.zeros(m, n)
    return U, D, V


def _sign_normalize(col):
    for x in col:
        if x > 0:
            return tuple(col)
        if x < 0:
            return tuple(-y for y in col)
    return tuple(col)


def kernel_basis(mat):
    """Columns form a basis of the integer kernel {x : mat @ x = 0}.

    Returns an IntMatrix with ``mat.cols`` rows; zero columns never occur
    (an empty matrix means the kernel is trivial).

    >>> kernel_basis(IntMatrix.from_rows([[1, 0]])).col(0)
    (0, 1)
    """
    u, d, v = smith_normal_form(mat)
    r = sum(1 for x in d.diagonal() if x != 0)
    cols = [_sign_normalize(v.col(j)) for j in range(r, mat.cols)]
    return IntMatrix.from_cols(cols, rows_hint=mat.cols)


def solve(mat, b):
    """One integer solution of mat @ x = b, or None if unsolvable."""
    if len(b) != mat.rows:
        raise InvalidInput("rhs length mismatch")
    u, d, v = smith_normal_form(mat)
    ub = u.apply(tuple(b))
    y = [0] * mat.cols
    r = min(mat.rows, mat.cols)
    for i in range(mat.rows):
        di = d[i, i] if i < r else 0
        if di == 0:
            if ub[i] != 0:
                return None
        else:
            if ub[i] % di:
                return None
            if i < mat.cols:
                y[i] = ub[i] // di
    return v.apply(tuple(y))


def congruence_kernel(mat, moduli):
    """Generators of {x : (mat @ x)_r = 0 mod moduli_r for every row r}.

    A modulus of 0 means the row is an exact equation.  The returned
    matrix has ``mat.cols`` rows; its columns generate the full solution
    lattice (they need not be independent).
    """
    if len(moduli) != mat.rows:
        raise InvalidInput("modulus count mismatch")
    aug_cols = [list(mat.col(j)) for j in range(mat.cols)]
    for r, mr in enumerate(moduli):
        if mr:
            col = [0] * mat.rows
            col[r] = mr
            aug_cols.append(col)
    aug = IntMatrix.from_cols(aug_cols, rows_hint=mat.rows)
    ker = kernel_basis(aug)
    seen = set()
    cols = []
    for j in range(ker.cols):
        c = _sign_normalize(ker.col(j)[:mat.cols])
        if any(c) and c not in seen:
            seen.add(c)
            cols.append(c)
    return IntMatrix.from_cols(cols, rows_hint=mat.cols)


# ---------------------------------------------------------------------------
# finitely generated abelian groups


@dataclass(frozen=True)
class FgAbGroup:
    """A group in invariant-factor normal form.

    ``factors`` lists the invariant factors: no factor equals 1, every
    nonzero factor divides the next nonzero one, and zeros (free factors)
    come last.  The generating-set length d(G) is exactly the number of
    factors.

    >>> FgAbGroup((2, 4, 0)).free_rank
    1
    """

    factors: tuple

    def __post_init__(self):
        f = tuple(int(x) for x in self.factors)
        object.__setattr__(self, "factors", f)
        if any(x < 0 or x == 1 for x in f):
            raise InvalidInput(f"bad invariant factors {f}")
        seen_zero = False
        prev = None
        for x in f:
            if x == 0:
                seen_zero = True
            else:
                if seen_zero:
                    raise InvalidInput("free factors must come last")
                if prev is not None and x % prev:
                    raise InvalidInput(f"divisibility chain broken in {f}")
                prev = x

    @property
    def k(self):
        return len(self.factors)

    @property
    def free_rank(self):
        return sum(1 for x in self.factors if x == 0)

    @property
    def torsion_count(self):
        return self.k - self.free_rank

    def is_trivial(self):
        return not self.factors

    def canonicalize(self, coords):
        if len(coords) != self.k:
            raise InvalidInput("coordinate length mismatch")
        return tuple(int(c) % d if d else int(c)
                     for c, d in zip(coords, self.factors))

    def element(self, coords):
        return GroupElement(self, self.canonicalize(coords))

    def zero(self):
        return self.element((0,) * self.k)

    def gens(self):
        return tuple(self.element(tuple(int(i == j) for j in range(self.k)))
                     for i in range(self.k))

    def relation_columns(self):
        """Columns d_i * e_i for each finite factor; presents the group."""
        cols = []
        for i, d in enumerate(self.factors):
            if d:
                col = [0] * self.k
                col[i] = d
                cols.append(col)
        return IntMatrix.from_cols(cols, rows_hint=self.k)

    def iter_elements(self):
        if self.free_rank:
            raise InvalidInput("cannot enumerate an infinite group")
        for coords in itertools.product(*(range(d) for d in self.factors)):
            yield self.element(coords)

    def order(self):
        if self.free_rank:
            return None
        n = 1
        for d in self.factors:
            n *= d
        return n

    def __repr__(self):
        return f"FgAbGroup({self.factors!r})"


trivial_group = FgAbGroup(())


def free_group(n):
    return FgAbGroup((0,) * n)


def cyclic(d):
    return FgAbGroup(()) if d == 1 else FgAbGroup((d,))


@dataclass(frozen=True)
class GroupElement:
    group: FgAbGroup
    coords: tuple

    def __add__(self, other):
        if self.group != other.group:
            raise InvalidInput("elements of different groups")
        return self.group.element(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return self.group.element(tuple(-a for a in self.coords))

    def __rmul__(self, c):
        return self.group.element(tuple(int(c) * a for a in self.coords))

    def is_zero(self):
        return all(a == 0 for a in self.coords)

    def __repr__(self):
        return f"GroupElement({self.group.factors!r}, {self.coords!r})"


@dataclass(frozen=True)
class GroupHom:
    """Homomorphism given by a matrix whose column j is the image of the
    j-th domain generator in codomain coordinates."""

    domain: FgAbGroup
    codomain: FgAbGroup
    matrix: IntMatrix

    def __post_init__(self):
        if self.matrix.rows != self.codomain.k or self.matrix.cols != self.domain.k:
            raise InvalidInput("hom matrix shape mismatch")
        # canonicalize entries modulo the codomain factors so that equal
        # homomorphisms (e.g. arising from matrix products) compare equal
        cf = self.codomain.factors
        if any(cf):
            ent = list(self.matrix.entries)
            k = self.matrix.cols
            for i, d in enumerate(cf):
                if d:
                    for j in range(k):
                        ent[i * k + j] %= d
            object.__setattr__(self, "matrix",
                               IntMatrix(self.matrix.rows, k, tuple(ent)))
        for j, d in enumerate(self.domain.factors):
            if d and not self.codomain.element(tuple(d * x for x in self.matrix.col(j))).is_zero():
                raise InvalidInput(f"hom not well defined on generator {j} (order {d})")

    @classmethod
    def identity(cls, group):
        return cls(group, group, IntMatrix.identity(group.k))

    @classmethod
    def zero(cls, domain, codomain):
        return cls(domain, codomain, IntMatrix.zeros(codomain.k, domain.k))

    def __call__(self, x):
        coords = x.coords if isinstance(x, GroupElement) else tuple(x)
        return self.codomain.element(self.matrix.apply(coords))

    def compose(self, other):
        """self after other."""
        if other.codomain != self.domain:
            raise InvalidInput("hom composition mismatch")
        return GroupHom(other.domain, self.codomain, self.matrix @ other.matrix)

    def is_zero(self):
        return all(self(g).is_zero() for g in self.domain.gens())

    def _with_relations(self):
        return self.matrix.hstack(self.codomain.relation_columns())

    def preimage(self, y):
        """Some x with self(x) = y, or None."""
        sol = solve(self._with_relations(), y.coords)
        if sol is None:
            return None
        return self.domain.element(sol[:self.domain.k])

    def kernel_subgroup_gens(self):
        """Elements generating {x in domain : self(x) = 0}."""
        ker = congruence_kernel(self.matrix, self.codomain.factors)
        out = []
        seen = set()
        for j in range(ker.cols):
            e = self.domain.element(ker.col(j))
            if not e.is_zero() and e.coords not in seen:
                seen.add(e.coords)
                out.append(e)
        # ambient relations are solutions too but are zero once canonicalized
        return tuple(out)

    def is_injective(self):
        return not self.kernel_subgroup_gens()

    def cokernel(self):
        rel = self._with_relations()
        return group_from_presentation(rel, self.codomain.k)

    def is_surjective(self):
        group, _ = self.cokernel()
        return group.is_trivial()

    def is_bijective(self):
        return self.is_injective() and self.is_surjective()

    def inverse(self):
        cols = []
        for g in self.codomain.gens():
            x = self.preimage(g)
            if x is None:
                raise InvalidInput("hom is not surjective")
            cols.append(x.coords)
        inv = GroupHom(self.codomain, self.domain,
                       IntMatrix.from_cols(cols, rows_hint=self.domain.k))
        for g in self.domain.gens():
            if inv(self(g)) != g:
                raise InvalidInput("hom is not injective")
        return inv


def group_from_presentation(relations, num_generators):
    """Cokernel of Z^cols -> Z^num_generators in invariant-factor form.

    ``relations`` has one row per generator; each column is a relator.
    Returns the group together with the quotient hom from the free group
    on the given generators.

    >>> g, q = group_from_presentation(IntMatrix.from_cols([[2, 0], [0, 4]]), 2)
    >>> g.factors
    (2, 4)
    """
    if relations.rows != num_generators:
        raise InvalidInput("presentation must have one row per generator")
    u, d, _ = smith_normal_form(relations)
    diag = list(d.diagonal()) + [0] * (num_generators - min(relations.rows, relations.cols))
    kept = [i for i in range(num_generators) if diag[i] != 1]
    group = FgAbGroup(tuple(diag[i] for i in kept))
    rows = [u.row(i) for i in kept]
    qmat = IntMatrix(len(kept), num_generators,
                     tuple(x for r in rows for x in r))
    quot = GroupHom(free_group(num_generators), group, qmat)
    return group, quot


def generating_set_length(group):
    """d(G): the number of invariant factors."""
    return group.k


@dataclass(frozen=True)
class TensorProduct:
    """A tensor product A (x) B with the canonical bilinear map."""

    left: FgAbGroup
    right: FgAbGroup
    group: FgAbGroup
    quotient: GroupHom  # from the free group on generator pairs

    def pure(self, a, b):
        """The class of a (x) b in normal-form coordinates."""
        ka, kb = self.left.k, self.right.k
        coords = [0] * (ka * kb)
        for i in range(ka):
            for j in range(kb):
                coords[i * kb + j] = a.coords[i] * b.coords[j]
        return self.quotient(tuple(coords))


def tensor_product(a, b):
    """Tensor product with the canonical bilinear embedding.

    >>> t = tensor_product(cyclic(2), cyclic(4))
    >>> t.group.factors
    (2,)
    """
    ka, kb = a.k, b.k
    n = ka * kb
    cols = []
    for i, d in enumerate(a.factors):
        if d:
            for j in range(kb):
                col = [0] * n
                col[i * kb + j] = d
                cols.append(col)
    for j, d in enumerate(b.factors):
        if d:
            for i in range(ka):
                col = [0] * n
                col[i * kb + j] = d
                cols.append(col)
    group, quot = group_from_presentation(IntMatrix.from_cols(cols, rows_hint=n), n)
    return TensorProduct(a, b, group, quot)


@dataclass(frozen=True)
class DirectSum:
    """A (+) B renormalized, with the inclusions and generator preimages."""

    left: FgAbGroup
    right: FgAbGroup
    group: FgAbGroup
    inc_left: GroupHom
    inc_right: GroupHom
    # per normal-form generator: a preimage split into (left, right) coords
    preimages: tuple

    def embed(self, a, b):
        return self.inc_left(a) + self.inc_right(b)


def direct_sum_groups(a, b):
    """Direct sum in normal form; concatenation then SNF renormalization."""
    ka, kb = a.k, b.k
    n = ka + kb
    cols = []
    for i, d in enumerate(a.factors + b.factors):
        if d:
            col = [0] * n
            col[i] = d
            cols.append(col)
    group, quot = group_from_presentation(IntMatrix.from_cols(cols, rows_hint=n), n)
    inc_left = GroupHom(a, group, IntMatrix.from_cols(
        [quot.matrix.col(j) for j in range(ka)], rows_hint=group.k))
    inc_right = GroupHom(b, group, IntMatrix.from_cols(
        [quot.matrix.col(ka + j) for j in range(kb)], rows_hint=group.k))
    pres = []
    for g in group.gens():
        z = quot.preimage(g)
        if z is None:
            raise InvalidInput("quotient not surjective (internal error)")
        pres.append((z.coords[:ka], z.coords[ka:]))
    return DirectSum(a, b, group, inc_left, inc_right, tuple(pres))


if __name__ == "__main__":
    import doctest

    doctest.testmod()
