"""Exact integer linear algebra: normal forms, lattices, quotients, distances.

Everything is arbitrary-precision (Python int, Fraction).  No floating point:
dilations like (d!)^N overflow fixed-width types almost immediately and the
whole point of the engine is exact certification.

Vectors are tuples of ints, matrices are tuples of row vectors.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .errors import DimensionMismatchError, UnitriError

IntVector = tuple
IntMatrix = tuple


def identity_matrix(n: int) -> IntMatrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def mat_mul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    if a and b and len(a[0]) != len(b):
        raise DimensionMismatchError("matrix product shape mismatch")
    bt = tuple(zip(*b)) if b else ()
    return tuple(
        tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a
    )


def vec_mat(v, m: IntMatrix):
    """Row vector times matrix."""
    if len(v) != len(m):
        raise DimensionMismatchError("vector/matrix shape mismatch")
    cols = tuple(zip(*m)) if m else ()
    return tuple(sum(x * y for x, y in zip(v, col)) for col in cols)


def transpose(m: IntMatrix) -> IntMatrix:
    return tuple(zip(*m)) if m else ()


def content(v) -> int:
    g = 0
    for x in v:
        g = gcd(g, abs(x))
    return g


def primitive_vector(v) -> IntVector:
    """Divide an integer vector by its content; zero stays zero."""
    g = content(v)
    if g == 0:
        return tuple(v)
    return tuple(x // g for x in v)


# ---------------------------------------------------------------------------
# Normal forms
# ---------------------------------------------------------------------------

def hermite_normal_form(m: IntMatrix) -> tuple[IntMatrix, IntMatrix]:
    """Row-style Hermite normal form.

    Returns (h, u) with u unimodular and u*m == h.  Pivots are positive,
    entries above a pivot are reduced into [0, pivot), zero rows sink to the
    bottom.  Pivot candidates are chosen by smallest absolute value, ties by
    lowest row index, which keeps the reduction reproducible.
    """
    rows = [list(r) for r in m]
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    u = [list(r) for r in identity_matrix(nrows)]
    r = 0
    pivots = []
    for col in range(ncols):
        while True:
            cand = [i for i in range(r, nrows) if rows[i][col] != 0]
            if not cand:
                break
            piv = min(cand, key=lambda i: (abs(rows[i][col]), i))
            if len(cand) == 1:
                if piv != r:
                    rows[r], rows[piv] = rows[piv], rows[r]
                    u[r], u[piv] = u[piv], u[r]
                break
            for i in cand:
                if i == piv:
                    continue
                q = rows[i][col] // rows[piv][col]
                if q:
                    rows[i] = [a - q * b for a, b in zip(rows[i], rows[piv])]
                    u[i] = [a - q * b for a, b in zip(u[i], u[piv])]
        if r < nrows and rows[r][col] != 0:
            if rows[r][col] < 0:
                rows[r] = [-a for a in rows[r]]
                u[r] = [-a for a in u[r]]
            pivots.append((r, col))
            r += 1
    # Reduce entries above each pivot into [0, pivot).
    for pr, pc in reversed(pivots):
        for i in range(pr):
            q = rows[i][pc] // rows[pr][pc]
            if q:
                rows[i] = [a - q * b for a, b in zip(rows[i], rows[pr])]
                u[i] = [a - q * b for a, b in zip(u[i], u[pr])]
    return tuple(tuple(r_) for r_ in rows), tuple(tuple(r_) for r_ in u)


def rank(m: IntMatrix) -> int:
    h, _ = hermite_normal_form(m)
    return sum(1 for row in h if any(row))


class _SmithWorker:
    """Mutable state for the Smith reduction, tracking u, v and v^-1."""

    def __init__(self, m: IntMatrix):
        self.rows = [list(r) for r in m]
        self.nrows = len(self.rows)
        self.ncols = len(self.rows[0]) if self.nrows else 0
        self.u = [list(r) for r in identity_matrix(self.nrows)]
        self.v = [list(r) for r in identity_matrix(self.ncols)]
        self.v_inv = [list(r) for r in identity_matrix(self.ncols)]

    def row_sub(self, i, j, q):  # row_i -= q * row_j
        self.rows[i] = [a - q * b for a, b in zip(self.rows[i], self.rows[j])]
        self.u[i] = [a - q * b for a, b in zip(self.u[i], self.u[j])]

    def row_swap(self, i, j):
        self.rows[i], self.rows[j] = self.rows[j], self.rows[i]
        self.u[i], self.u[j] = self.u[j], self.u[i]

    def row_neg(self, i):
        self.rows[i] = [-a for a in self.rows[i]]
        self.u[i] = [-a for a in self.u[i]]

    def col_sub(self, i, j, q):  # col_i -= q * col_j
        for rw in self.rows:
            rw[i] -= q * rw[j]
        for rw in self.v:
            rw[i] -= q * rw[j]
        # (v * E)^-1 = E^-1 * v^-1 : adding q*row_i to row_j of v_inv.
        self.v_inv[j] = [a + q * b for a, b in zip(self.v_inv[j], self.v_inv[i])]

    def col_swap(self, i, j):
        for rw in self.rows:
            rw[i], rw[j] = rw[j], rw[i]
        for rw in self.v:
            rw[i], rw[j] = rw[j], rw[i]
        self.v_inv[i], self.v_inv[j] = self.v_inv[j], self.v_inv[i]

    def clear_position(self, t):
        """Diagonalize position (t, t) against the trailing submatrix."""
        rows = self.rows
        while True:
            entries = [
                (abs(rows[i][j]), i, j)
                for i in range(t, self.nrows)
                for j in range(t, self.ncols)
                if rows[i][j] != 0
            ]
            if not entries:
                return
            _, bi, bj = min(entries)
            if bi != t:
                self.row_swap(t, bi)
            if bj != t:
                self.col_swap(t, bj)
            dirty = False
            for i in range(t + 1, self.nrows):
                if rows[i][t]:
                    self.row_sub(i, t, rows[i][t] // rows[t][t])
                    if rows[i][t]:
                        dirty = True
            for j in range(t + 1, self.ncols):
                if rows[t][j]:
                    self.col_sub(j, t, rows[t][j] // rows[t][t])
                    if rows[t][j]:
                        dirty = True
            if not dirty:
                if rows[t][t] < 0:
                    self.row_neg(t)
                return


def _smith_full(m: IntMatrix):
    """Smith normal form with all transforms.

    Returns (d, u, v, v_inv) with u, v unimodular, u*m*v == d diagonal,
    nonnegative entries in a divisibility chain, and v*v_inv == identity.
    """
    w = _SmithWorker(m)
    n = min(w.nrows, w.ncols)
    for t in range(n):
        w.clear_position(t)
    # Enforce the divisibility chain d1 | d2 | ...
    changed = True
    while changed:
        changed = False
        for i in range(n - 1):
            a, b = w.rows[i][i], w.rows[i + 1][i + 1]
            if a and b % a:
                changed = True
                w.col_sub(i, i + 1, -1)  # col_i += col_{i+1}
                for t in range(i, n):
                    w.clear_position(t)
                break
    d = tuple(tuple(r_) for r_ in w.rows)
    return (
        d,
        tuple(tuple(r_) for r_ in w.u),
        tuple(tuple(r_) for r_ in w.v),
        tuple(tuple(r_) for r_ in w.v_inv),
    )


def smith_normal_form(m: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Returns (d, u, v) with u*m*v == d diagonal and d1 | d2 | ..."""
    d, u, v, _ = _smith_full(m)
    return d, u, v


def invariant_factors(m: IntMatrix) -> tuple[int, ...]:
    d, _, _ = smith_normal_form(m)
    n = min(len(d), len(d[0]) if d else 0)
    return tuple(d[i][i] for i in range(n) if d[i][i] != 0)


def solve_left(m: IntMatrix, x) -> IntVector | None:
    """Find an integer row vector y with y*m == x, or None."""
    h, u = hermite_normal_form(m)
    pivots = []
    for i, row in enumerate(h):
        nz = next((j for j, a in enumerate(row) if a), None)
        if nz is not None:
            pivots.append((i, nz))
    res = list(x)
    coeff = [0] * len(h)
    for i, pc in pivots:
        if res[pc] % h[i][pc]:
            return None
        q = res[pc] // h[i][pc]
        coeff[i] = q
        if q:
            res = [a - q * b for a, b in zip(res, h[i])]
    if any(res):
        return None
    return vec_mat(tuple(coeff), u)


def solve_left_rational(m, x):
    """Find a rational row vector y with y*m == x, or None.

    m may have int or Fraction entries; x likewise.
    """
    nrows = len(m)
    ncols = len(m[0]) if nrows else len(x)
    if len(x) != ncols:
        raise DimensionMismatchError("right-hand side has wrong length")
    # Row-reduce the transposed system m^T y^T = x^T.
    aug = [
        [Fraction(m[i][j]) for i in range(nrows)] + [Fraction(x[j])]
        for j in range(ncols)
    ]
    piv = []
    r = 0
    for c in range(nrows):
        pr = next((i for i in range(r, ncols) if aug[i][c] != 0), None)
        if pr is None:
            continue
        aug[r], aug[pr] = aug[pr], aug[r]
        pv = aug[r][c]
        aug[r] = [a / pv for a in aug[r]]
        for i in range(ncols):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        piv.append((r, c))
        r += 1
    for row in aug[r:]:
        if row[-1] != 0:
            return None
    y = [Fraction(0)] * nrows
    for rr, cc in piv:
        y[cc] = aug[rr][-1]
    return tuple(y)


def int_row_kernel(m: IntMatrix) -> IntMatrix:
    """Basis rows for the left kernel { y : y*m == 0 }."""
    h, u = hermite_normal_form(m)
    return tuple(u[i] for i, row in enumerate(h) if not any(row))


def matrix_rank_rational(m) -> int:
    """Rank over the rationals; accepts int or Fraction entries."""
    rows = [[Fraction(a) for a in row] for row in m]
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        pv = rows[r][c]
        for i in range(r + 1, nrows):
            if rows[i][c] != 0:
                f = rows[i][c] / pv
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        r += 1
    return r


def inverse_unimodular(v: IntMatrix) -> IntMatrix:
    """Exact inverse of a unimodular integer matrix."""
    h, u = hermite_normal_form(v)
    if h != identity_matrix(len(v)):
        raise UnitriError("matrix is not unimodular")
    return u


# ---------------------------------------------------------------------------
# Lattices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntLattice:
    """Sublattice of Z^d, canonically represented by its row-HNF basis."""

    ambient_dim: int
    basis: IntMatrix  # HNF, positive pivots, no zero rows

    @staticmethod
    def from_rows(ambient_dim: int, rows) -> "IntLattice":
        for row in rows:
            if len(row) != ambient_dim:
                raise DimensionMismatchError(
                    f"generator length {len(row)} != ambient {ambient_dim}"
                )
        h, _ = hermite_normal_form(tuple(tuple(r) for r in rows))
        basis = tuple(row for row in h if any(row))
        return IntLattice(ambient_dim, basis)

    @staticmethod
    def standard(ambient_dim: int) -> "IntLattice":
        return IntLattice(ambient_dim, identity_matrix(ambient_dim))

    @staticmethod
    def zero(ambient_dim: int) -> "IntLattice":
        return IntLattice(ambient_dim, ())

    @property
    def rank(self) -> int:
        return len(self.basis)

    def contains(self, vec) -> bool:
        if len(vec) != self.ambient_dim:
            raise DimensionMismatchError("vector has wrong length")
        if not self.basis:
            return not any(vec)
        return self.coordinates(vec) is not None

    def coordinates(self, vec) -> IntVector | None:
        """Integer coordinates of vec in the canonical basis, or None."""
        if not self.basis:
            return () if not any(vec) else None
        res = list(vec)
        coeff = []
        for row in self.basis:
            pc = next(j for j, a in enumerate(row) if a)
            if res[pc] % row[pc]:
                return None
            q = res[pc] // row[pc]
            coeff.append(q)
            if q:
                res = [a - q * b for a, b in zip(res, row)]
        return tuple(coeff) if not any(res) else None

    def sum(self, other: "IntLattice") -> "IntLattice":
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatchError("lattice sum across ambient spaces")
        return IntLattice.from_rows(self.ambient_dim, self.basis + other.basis)

    def intersection(self, other: "IntLattice") -> "IntLattice":
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatchError("lattice meet across ambient spaces")
        b1, b2 = self.basis, other.basis
        if not b1 or not b2:
            return IntLattice.zero(self.ambient_dim)
        kern = int_row_kernel(b1 + b2)
        rows = [vec_mat(k[: len(b1)], b1) for k in kern]
        return IntLattice.from_rows(self.ambient_dim, rows)

    def is_sublattice_of(self, other: "IntLattice") -> bool:
        return all(other.contains(row) for row in self.basis)


def saturation(lat: IntLattice) -> IntLattice:
    """Span_R(L) intersected with Z^d, as a lattice containing L."""
    if not lat.basis:
        return lat
    _, _, _, v_inv = _smith_full(lat.basis)
    return IntLattice.from_rows(lat.ambient_dim, v_inv[: lat.rank])


def index(lat: IntLattice) -> int:
    """Normalized index [saturation(L) : L]; 1 for the zero lattice."""
    if not lat.basis:
        return 1
    out = 1
    for f in invariant_factors(lat.basis):
        out *= f
    return out


@dataclass(frozen=True)
class QuotientGroup:
    """Finite abelian quotient N/L for a finite-index pair of lattices.

    Elements are addressed by residue tuples, one modulus per invariant
    factor > 1.  ``to_quotient`` and ``section`` are exact mutual inverses
    on residues.
    """

    ambient_dim: int
    invariant_factors: tuple[int, ...]
    _n_basis: IntMatrix = field(repr=False)
    _v: IntMatrix = field(repr=False)
    _v_inv: IntMatrix = field(repr=False)
    _kept: tuple[int, ...] = field(repr=False)
    _diag: tuple[int, ...] = field(repr=False)

    @property
    def order(self) -> int:
        out = 1
        for f in self.invariant_factors:
            out *= f
        return out

    def to_quotient(self, vec) -> tuple[int, ...]:
        if not self._n_basis:
            if any(vec):
                raise UnitriError("vector is not in the ambient lattice N")
            return ()
        y = solve_left(self._n_basis, vec)
        if y is None:
            raise UnitriError("vector is not in the ambient lattice N")
        t = vec_mat(y, self._v)
        return tuple(t[i] % self._diag[i] for i in self._kept)

    def section(self, residues) -> IntVector:
        if len(residues) != len(self._kept):
            raise UnitriError("residue tuple has wrong length")
        if not self._n_basis:
            return tuple(0 for _ in range(self.ambient_dim))
        t = [0] * len(self._v)
        for pos, res in zip(self._kept, residues):
            t[pos] = res % self._diag[pos]
        y = vec_mat(tuple(t), self._v_inv)
        return vec_mat(y, self._n_basis)

    def elements(self):
        """All residue tuples, zero first, in lexicographic order."""
        return itertools.product(*(range(f) for f in self.invariant_factors))

    def nonzero_elements(self):
        return (e for e in self.elements() if any(e))


def quotient(n_lat: IntLattice, l_lat: IntLattice) -> QuotientGroup:
    """The group N/L; requires L a finite-index sublattice of N."""
    if n_lat.ambient_dim != l_lat.ambient_dim:
        raise DimensionMismatchError("quotient across ambient spaces")
    if n_lat.rank != l_lat.rank:
        raise UnitriError("quotient requires equal ranks")
    if not l_lat.is_sublattice_of(n_lat):
        raise UnitriError("L is not a sublattice of N")
    r = n_lat.rank
    if r == 0:
        return QuotientGroup(n_lat.ambient_dim, (), (), (), (), (), ())
    coords = tuple(solve_left(n_lat.basis, row) for row in l_lat.basis)
    d, _, v, v_inv = _smith_full(coords)
    diag = tuple(d[i][i] for i in range(r))
    if any(x == 0 for x in diag):
        raise UnitriError("quotient is infinite")
    kept = tuple(i for i in range(r) if diag[i] > 1)
    return QuotientGroup(
        n_lat.ambient_dim,
        tuple(diag[i] for i in kept),
        n_lat.basis,
        v,
        v_inv,
        kept,
        diag,
    )


def lattice_distance(x, f_point, f_dirs, n_lat: IntLattice):
    """Lattice distance |phi(x) - phi(F)| measured in the lattice N.

    phi is the primitive integral functional on N vanishing on the direction
    space of F, which must be a hyperplane of Span(N).  x and f_point must
    lie in one affine coset of Span(N).
    """
    basis = n_lat.basis
    r = len(basis)
    if r == 0:
        raise UnitriError("zero lattice has no hyperplanes")
    dir_coords = []
    for dvec in f_dirs:
        y = solve_left_rational(basis, dvec)
        if y is None:
            raise UnitriError("facet direction outside Span(N)")
        dir_coords.append(y)
    if matrix_rank_rational(dir_coords) != r - 1:
        raise UnitriError("direction space is not codimension 1 in Span(N)")
    int_rows = []
    for row in dir_coords:
        den = 1
        for a in row:
            den = den * a.denominator // gcd(den, a.denominator)
        int_rows.append(tuple(int(a * den) for a in row))
    m_t = tuple(tuple(row[i] for row in int_rows) for i in range(r))
    kern = [k for k in int_row_kernel(m_t) if any(k)]
    if len(kern) != 1:
        raise UnitriError("functional is not unique; rank defect")
    g = primitive_vector(kern[0])
    diff = tuple(a - b for a, b in zip(x, f_point))
    y = solve_left_rational(basis, diff)
    if y is None:
        raise UnitriError("x - F is outside Span(N)")
    val = abs(sum(a * b for a, b in zip(g, y)))
    if isinstance(val, Fraction) and val.denominator == 1:
        return int(val)
    return val
