"""Exact polytopes with integer (or rational) vertices.

Face enumeration runs over the rationals by supporting-hyperplane search in
affine-hull coordinates; that is entirely adequate for the small cells this
engine manipulates (d <= 4, a couple dozen vertices).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

from .errors import DimensionMismatchError, UnitriError
from .lattice import (
    IntLattice,
    index,
    matrix_rank_rational,
    saturation,
    solve_left_rational,
)


def _norm_coord(x):
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return int(x)
        return x
    return x


def norm_point(p) -> tuple:
    return tuple(_norm_coord(x) for x in p)


def vadd(a, b):
    return tuple(_norm_coord(x + y) for x, y in zip(a, b))


def vsub(a, b):
    return tuple(_norm_coord(x - y) for x, y in zip(a, b))


def vscale(k, a):
    return tuple(_norm_coord(k * x) for x in a)


def vdot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _rational_kernel_vector(rows, n):
    """A nonzero rational vector orthogonal to the given rows (n columns),
    or None if the kernel is not one-dimensional."""
    mat = [[Fraction(a) for a in row] for row in rows]
    # Gauss-Jordan; track pivot columns.
    piv_cols = []
    r = 0
    for c in range(n):
        pr = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        pv = mat[r][c]
        mat[r] = [a / pv for a in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        piv_cols.append(c)
        r += 1
    free = [c for c in range(n) if c not in piv_cols]
    if len(free) != 1:
        return None
    fc = free[0]
    vec = [Fraction(0)] * n
    vec[fc] = Fraction(1)
    for rr, cc in enumerate(piv_cols):
        vec[cc] = -mat[rr][fc]
    return tuple(vec)


class AffineFrame:
    """Base point plus direction basis spanning the affine hull of a point
    set; converts ambient points to exact affine coordinates."""

    def __init__(self, points):
        self.base = points[0]
        dirs = []
        rank = 0
        for p in points[1:]:
            d = vsub(p, self.base)
            if matrix_rank_rational(dirs + [d]) > rank:
                dirs.append(d)
                rank += 1
        self.dirs = tuple(dirs)
        self.dim = rank

    def coords(self, point):
        """Affine coordinates, or None if the point is off the hull."""
        if self.dim == 0:
            return () if vsub(point, self.base) == tuple(
                0 for _ in self.base
            ) else None
        return solve_left_rational(self.dirs, vsub(point, self.base))


@dataclass(frozen=True)
class Polytope:
    """Convex hull stored by its exact, canonically sorted vertex list."""

    vertices: tuple

    def __post_init__(self):
        if not self.vertices:
            raise UnitriError("a polytope is a nonempty hull")

    @property
    def ambient_dim(self) -> int:
        return len(self.vertices[0])

    @property
    def dim(self) -> int:
        return _frame(self).dim

    def key(self):
        return ("P", self.vertices)

    def face_list(self):
        return faces(self)

    def realize(self):
        return (self,)

    def contains(self, point) -> bool:
        if len(point) != self.ambient_dim:
            raise DimensionMismatchError("point has wrong ambient dimension")
        frame = _frame(self)
        c = frame.coords(norm_point(point))
        if c is None:
            return False
        for normal, offset, sense in _facet_ineqs(self):
            val = vdot(normal, c)
            if sense > 0 and val < offset:
                return False
            if sense < 0 and val > offset:
                return False
        return True

    def is_simplex(self) -> bool:
        return len(self.vertices) == self.dim + 1

    def translate(self, vec) -> "Polytope":
        return Polytope(tuple(sorted(vadd(v, vec) for v in self.vertices)))

    def dilate(self, k) -> "Polytope":
        if k == 0:
            raise UnitriError("dilation factor must be positive")
        return Polytope(tuple(sorted(vscale(k, v) for v in self.vertices)))

    def edge_rows(self):
        v0 = self.vertices[0]
        return tuple(vsub(v, v0) for v in self.vertices[1:])

    def __repr__(self):
        return f"Polytope({list(self.vertices)})"


def hull(points) -> Polytope:
    """Convex hull; keeps extreme points only, sorted lexicographically."""
    pts = sorted(set(norm_point(p) for p in points))
    if not pts:
        raise UnitriError("hull of an empty point set")
    if len(pts) == 1:
        return Polytope(tuple(pts))
    frame = AffineFrame(pts)
    if len(pts) == frame.dim + 1:
        return Polytope(tuple(pts))
    coords = [frame.coords(p) for p in pts]
    facet_sets = _supporting_facets(coords)
    verts = _vertex_indices(coords, facet_sets)
    return Polytope(tuple(pts[i] for i in sorted(verts)))


def _supporting_facets(coords):
    """Index sets of points lying on each supporting hyperplane (facet) of
    the configuration, in its own affine dimension t = len(coords[0])."""
    t = len(coords[0])
    n = len(coords)
    if t == 0:
        return []
    found = {}
    for combo in itertools.combinations(range(n), t):
        base = coords[combo[0]]
        diffs = [vsub(coords[i], base) for i in combo[1:]]
        normal = _rational_kernel_vector(diffs, t)
        if normal is None:
            continue
        offset = vdot(normal, base)
        pos = neg = False
        onset = []
        for i, c in enumerate(coords):
            val = vdot(normal, c)
            if val > offset:
                pos = True
            elif val < offset:
                neg = True
            else:
                onset.append(i)
            if pos and neg:
                break
        if pos and neg:
            continue
        found[frozenset(onset)] = None
    return list(found.keys())


def _vertex_indices(coords, facet_sets):
    """Vertices = minimal nonempty intersections of facet point sets."""
    n = len(coords)
    if not facet_sets:
        return set(range(n))
    faces_seen = {frozenset(range(n))}
    work = [frozenset(range(n))]
    while work:
        cur = work.pop()
        for f in facet_sets:
            nxt = cur & f
            if nxt and nxt not in faces_seen:
                faces_seen.add(nxt)
                work.append(nxt)
    verts = set()
    for fs in faces_seen:
        pts = [coords[i] for i in fs]
        if len(pts) == 1 or matrix_rank_rational(
            [vsub(p, pts[0]) for p in pts[1:]]
        ) == 0:
            verts.update(fs)
    return verts


@lru_cache(maxsize=None)
def _frame(poly: Polytope) -> AffineFrame:
    return AffineFrame(poly.vertices)


@lru_cache(maxsize=None)
def _facet_ineqs(poly: Polytope):
    """Facet inequalities in affine-hull coordinates: (normal, offset, sense)
    with sense +1 for >= and -1 for <=."""
    frame = _frame(poly)
    if frame.dim == 0:
        return ()
    coords = [frame.coords(v) for v in poly.vertices]
    out = []
    for fs in _supporting_facets(coords):
        idx = sorted(fs)
        base = coords[idx[0]]
        diffs = [vsub(coords[i], base) for i in idx[1:]]
        normal = _rational_kernel_vector(diffs, frame.dim)
        if normal is None:
            raise UnitriError("degenerate facet")
        offset = vdot(normal, base)
        sense = 0
        for c in coords:
            val = vdot(normal, c)
            if val > offset:
                sense = 1
                break
            if val < offset:
                sense = -1
                break
        out.append((normal, offset, sense))
    return tuple(out)


@lru_cache(maxsize=None)
def faces(poly: Polytope):
    """All nonempty faces of the polytope, including itself."""
    frame = _frame(poly)
    n = len(poly.vertices)
    if frame.dim == 0:
        return (poly,)
    coords = [frame.coords(v) for v in poly.vertices]
    facet_sets = _supporting_facets(coords)
    seen = {frozenset(range(n))}
    work = [frozenset(range(n))]
    while work:
        cur = work.pop()
        for f in facet_sets:
            nxt = cur & f
            if nxt and nxt not in seen:
                seen.add(nxt)
                work.append(nxt)
    out = []
    for fs in sorted(seen, key=lambda s: (len(s), sorted(s))):
        out.append(Polytope(tuple(sorted(poly.vertices[i] for i in fs))))
    return tuple(out)


def facets(poly: Polytope):
    """Codimension-one faces."""
    d = poly.dim
    return tuple(f for f in faces(poly) if f.dim == d - 1)


@lru_cache(maxsize=None)
def _triangulate(poly: Polytope):
    """Simplex vertex tuples tiling the polytope (pulling from the lowest
    vertex)."""
    if poly.is_simplex():
        return (poly.vertices,)
    v0 = poly.vertices[0]
    out = []
    for f in facets(poly):
        if v0 in f.vertices:
            continue
        for simplex in _triangulate(f):
            out.append((v0,) + simplex)
    return tuple(out)


def _simplex_norm_volume(verts, n_lat: IntLattice) -> int:
    rows = [n_lat.coordinates(vsub(v, verts[0])) for v in verts[1:]]
    if any(r is None for r in rows):
        raise UnitriError("simplex edges leave the measuring lattice")
    return abs(_int_det([list(r) for r in rows]))


def _int_det(m) -> int:
    """Fraction-free Gaussian elimination (Bareiss)."""
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            pr = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if pr is None:
                return 0
            m[k], m[pr] = m[pr], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def lattice_of(poly: Polytope) -> IntLattice:
    """L(P): the lattice generated by vertex differences."""
    return IntLattice.from_rows(poly.ambient_dim, poly.edge_rows())


def normalized_volume(poly: Polytope) -> int:
    """Lattice-normalized volume: (dim P)! times the Euclidean volume,
    measured in the saturated lattice N(P).  Integer; 1 for unimodular
    simplices; additive over triangulations; 1 for a point."""
    t = poly.dim
    if t == 0:
        return 1
    n_lat = saturation(lattice_of(poly))
    total = 0
    for simplex in _triangulate(poly):
        total += _simplex_norm_volume(simplex, n_lat)
    return total


def affine_volume(poly: Polytope, frame: AffineFrame) -> Fraction:
    """Euclidean-proportional volume of the polytope measured in the given
    frame's coordinates; Fraction, consistent across one frame."""
    t = frame.dim
    coords = {v: frame.coords(v) for v in poly.vertices}
    if any(c is None for c in coords.values()):
        raise UnitriError("polytope leaves the frame's affine hull")
    if poly.dim < t:
        return Fraction(0)
    total = Fraction(0)
    for simplex in _triangulate(poly):
        rows = [
            [Fraction(a) for a in vsub(coords[v], coords[simplex[0]])]
            for v in simplex[1:]
        ]
        det = _frac_det(rows)
        total += abs(det)
    return total / factorial(t)


def _frac_det(m) -> Fraction:
    n = len(m)
    if n == 0:
        return Fraction(1)
    det = Fraction(1)
    for c in range(n):
        pr = next((i for i in range(c, n) if m[i][c] != 0), None)
        if pr is None:
            return Fraction(0)
        if pr != c:
            m[c], m[pr] = m[pr], m[c]
            det = -det
        det *= m[c][c]
        inv = 1 / Fraction(m[c][c])
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] * inv
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return det


def minkowski_sum(p: Polytope, q: Polytope) -> Polytope:
    if p.ambient_dim != q.ambient_dim:
        raise DimensionMismatchError("Minkowski sum across ambient spaces")
    return hull([vadd(a, b) for a in p.vertices for b in q.vertices])


def minkowski_sum_all(polys) -> Polytope:
    polys = list(polys)
    if not polys:
        raise UnitriError("empty Minkowski sum")
    out = polys[0]
    for p in polys[1:]:
        out = minkowski_sum(out, p)
    return out


# ---------------------------------------------------------------------------
# Ordered simplices and tuples
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _affinely_independent(diffs) -> bool:
    return matrix_rank_rational(diffs) == len(diffs)


@dataclass(frozen=True)
class OrderedSimplex:
    """Simplex with a significant total order on its vertices."""

    vertices: tuple

    def __post_init__(self):
        verts = tuple(norm_point(v) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if not verts:
            raise UnitriError("a simplex needs at least one vertex")
        v0 = verts[0]
        diffs = tuple(vsub(v, v0) for v in verts[1:])
        if not _affinely_independent(diffs):
            raise UnitriError("vertices are not affinely independent")

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1

    @property
    def ambient_dim(self) -> int:
        return len(self.vertices[0])

    @property
    def first_vertex(self):
        return self.vertices[0]

    def key(self):
        return self.vertices

    def is_point(self) -> bool:
        return len(self.vertices) == 1

    def facet_opposite(self, i: int) -> "OrderedSimplex":
        """The facet dropping vertex i, with the induced order."""
        return OrderedSimplex(self.vertices[:i] + self.vertices[i + 1:])

    def faces(self):
        """All nonempty faces with induced orders."""
        out = []
        n = len(self.vertices)
        for r in range(1, n + 1):
            for combo in itertools.combinations(range(n), r):
                out.append(
                    OrderedSimplex(tuple(self.vertices[i] for i in combo))
                )
        return out

    def translate(self, vec) -> "OrderedSimplex":
        return OrderedSimplex(tuple(vadd(v, vec) for v in self.vertices))

    def dilate(self, k) -> "OrderedSimplex":
        return OrderedSimplex(tuple(vscale(k, v) for v in self.vertices))

    def poly(self) -> Polytope:
        return Polytope(tuple(sorted(self.vertices)))

    def edge_rows(self):
        v0 = self.vertices[0]
        return tuple(vsub(v, v0) for v in self.vertices[1:])

    def lattice_l(self) -> IntLattice:
        return IntLattice.from_rows(self.ambient_dim, self.edge_rows())

    def lattice_n(self) -> IntLattice:
        return saturation(self.lattice_l())

    def simplex_index(self) -> int:
        return index(self.lattice_l())

    def __repr__(self):
        return f"OrderedSimplex({list(self.vertices)})"


def ordered_simplex_lex(points) -> OrderedSimplex:
    """Ordered simplex from unordered data, vertex order lexicographic."""
    return OrderedSimplex(tuple(sorted(set(norm_point(p) for p in points))))


@lru_cache(maxsize=None)
def _independent_edges(rows, total) -> bool:
    return matrix_rank_rational(rows) == total


@dataclass(frozen=True)
class SimplexTuple:
    """Tuple of independent ordered simplices (a polysimplex with factors)."""

    entries: tuple

    def __post_init__(self):
        if not all(isinstance(s, OrderedSimplex) for s in self.entries):
            raise UnitriError("entries must be ordered simplices")
        dims = [s.dim for s in self.entries]
        rows = tuple(r for s in self.entries for r in s.edge_rows())
        if rows and not _independent_edges(rows, sum(dims)):
            raise UnitriError("simplices are not independent")

    def edge_key(self):
        """Translation-invariant token: the per-entry edge matrices."""
        return tuple(s.edge_rows() for s in self.entries)

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def key(self):
        return tuple(s.key() for s in self.entries)

    @property
    def total_dim(self) -> int:
        return sum(s.dim for s in self.entries)

    @property
    def ambient_dim(self) -> int:
        return self.entries[0].ambient_dim if self.entries else 0

    def lattice_l(self) -> IntLattice:
        if not self.entries:
            raise UnitriError("empty tuple has no ambient dimension")
        lat = IntLattice.zero(self.ambient_dim)
        for s in self.entries:
            lat = lat.sum(s.lattice_l())
        return lat

    def lattice_n(self) -> IntLattice:
        if not self.entries:
            raise UnitriError("empty tuple has no ambient dimension")
        lat = IntLattice.zero(self.ambient_dim)
        for s in self.entries:
            lat = lat.sum(s.lattice_n())
        return lat

    def replace(self, j: int, s: OrderedSimplex) -> "SimplexTuple":
        return SimplexTuple(self.entries[:j] + (s,) + self.entries[j + 1:])

    def drop(self, j: int) -> "SimplexTuple":
        return SimplexTuple(self.entries[:j] + self.entries[j + 1:])

    def face_tuples(self):
        """All entrywise face combinations (independence makes every
        combination a face of the tuple)."""
        choices = [s.faces() for s in self.entries]
        return [SimplexTuple(tuple(c)) for c in itertools.product(*choices)]


@dataclass(frozen=True)
class FaceTuple:
    """Entrywise argmax faces of a polytope tuple under one functional."""

    entries: tuple
    witness: tuple

    def key(self):
        return tuple(p.vertices for p in self.entries)


def face_tuple_under(phi, polys) -> FaceTuple:
    """Entrywise faces maximizing the rational functional phi."""
    polys = tuple(polys)
    if not polys:
        raise UnitriError("empty polytope tuple")
    entries = []
    for p in polys:
        best = max(vdot(phi, v) for v in p.vertices)
        entries.append(
            Polytope(tuple(sorted(v for v in p.vertices
                                  if vdot(phi, v) == best)))
        )
    return FaceTuple(tuple(entries), tuple(Fraction(x) for x in phi))


def simplex_facet_choices(s: SimplexTuple):
    """(j, vertex index) pairs describing the polysimplex facets: replace
    entry j by the facet opposite that vertex, keep the others."""
    out = []
    for j, simp in enumerate(s.entries):
        if simp.dim >= 1:
            for vi in range(len(simp.vertices)):
                out.append((j, vi))
    return out


def facet_witness(s: SimplexTuple, j: int, vi: int):
    """A rational functional maximized on the facet of sum(S) obtained by
    dropping vertex vi from entry j."""
    d = s.ambient_dim
    rows = []
    rhs = []
    simp = s.entries[j]
    kept = [v for i, v in enumerate(simp.vertices) if i != vi]
    base = kept[0]
    for v in kept[1:]:
        rows.append(vsub(v, base))
        rhs.append(0)
    rows.append(vsub(simp.vertices[vi], base))
    rhs.append(-1)
    for i, other in enumerate(s.entries):
        if i != j:
            for r in other.edge_rows():
                rows.append(r)
                rhs.append(0)
    phi = solve_left_rational(tuple(zip(*rows)), rhs)
    if phi is None:
        raise UnitriError("no witness functional; tuple not independent?")
    return phi


def facets_of_polysimplex(s: SimplexTuple):
    """Facet tuples of the Minkowski sum of an independent simplex tuple:
    one per (entry, dropped vertex)."""
    if s.total_dim < 1:
        return []
    out = []
    for j, vi in simplex_facet_choices(s):
        phi = facet_witness(s, j, vi)
        entries = []
        for i, simp in enumerate(s.entries):
            if i == j:
                entries.append(simp.facet_opposite(vi).poly())
            else:
                entries.append(simp.poly())
        out.append(FaceTuple(tuple(entries), tuple(phi)))
    return out


# ---------------------------------------------------------------------------
# Ambient H-representation and exact intersection
# ---------------------------------------------------------------------------

def rational_nullspace(rows, n):
    """Basis of { a in Q^n : row . a == 0 for all rows }."""
    mat = [[Fraction(x) for x in row] for row in rows]
    piv_cols = []
    r = 0
    for c in range(n):
        pr = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        pv = mat[r][c]
        mat[r] = [a / pv for a in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        piv_cols.append(c)
        r += 1
    free = [c for c in range(n) if c not in piv_cols]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * n
        vec[fc] = Fraction(1)
        for rr, cc in enumerate(piv_cols):
            vec[cc] = -mat[rr][fc]
        basis.append(tuple(vec))
    return basis


def _solve_square(rows, rhs):
    """Unique rational solution x of rows . x = rhs, or None."""
    n = len(rows)
    mat = [[Fraction(a) for a in row] + [Fraction(b)]
           for row, b in zip(rows, rhs)]
    for c in range(n):
        pr = next((i for i in range(c, n) if mat[i][c] != 0), None)
        if pr is None:
            return None
        mat[c], mat[pr] = mat[pr], mat[c]
        pv = mat[c][c]
        mat[c] = [a / pv for a in mat[c]]
        for i in range(n):
            if i != c and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[c])]
    return tuple(mat[i][n] for i in range(n))


@lru_cache(maxsize=None)
def ambient_hrep(poly: Polytope):
    """(equations, inequalities) in ambient coordinates: pairs (a, b) with
    a . x == b, respectively a . x >= b, describing the polytope exactly."""
    frame = _frame(poly)
    d = poly.ambient_dim
    eqs = []
    for a in rational_nullspace(frame.dirs, d):
        eqs.append((a, vdot(a, frame.base)))
    ineqs = []
    if frame.dim > 0:
        # Rational right-inverse of the direction matrix: coords(x) =
        # (x - base) . g where g = dirs^T (dirs dirs^T)^-1.
        k = frame.dim
        gram = [[vdot(r1, r2) for r2 in frame.dirs] for r1 in frame.dirs]
        cols = []
        for j in range(k):
            rhs = [Fraction(1) if i == j else Fraction(0) for i in range(k)]
            cols.append(_solve_square(gram, rhs))
        # g[i][j] = sum_t dirs[t][i] * gram_inv[t][j]
        g = tuple(
            tuple(
                sum(frame.dirs[t][i] * cols[j][t] for t in range(k))
                for j in range(k)
            )
            for i in range(d)
        )
        for normal, offset, sense in _facet_ineqs(poly):
            a = tuple(
                sum(g[i][j] * normal[j] for j in range(k)) for i in range(d)
            )
            b = offset + vdot(a, frame.base)
            if sense >= 0:
                ineqs.append((a, b))
            else:
                ineqs.append((tuple(-x for x in a), -b))
    return tuple(eqs), tuple(ineqs)


def polytope_intersection(p: Polytope, q: Polytope):
    """Exact intersection of two polytopes, or None when empty.

    Vertex enumeration over the combined constraint set; intended for the
    small cells of this engine, not for large-scale geometry."""
    if p.ambient_dim != q.ambient_dim:
        raise DimensionMismatchError("intersection across ambient spaces")
    d = p.ambient_dim
    eqs = list(ambient_hrep(p)[0]) + list(ambient_hrep(q)[0])
    ineqs = list(ambient_hrep(p)[1]) + list(ambient_hrep(q)[1])

    def feasible(x):
        for a, b in eqs:
            if vdot(a, x) != b:
                return False
        for a, b in ineqs:
            if vdot(a, x) < b:
                return False
        return True

    candidates = set()
    eq_rows = [a for a, _ in eqs]
    eq_rhs = [b for _, b in eqs]
    need = d - matrix_rank_rational(eq_rows) if eq_rows else d
    for r in range(0, min(need, len(ineqs)) + 1):
        for combo in itertools.combinations(range(len(ineqs)), r):
            rows = eq_rows + [ineqs[i][0] for i in combo]
            rhs = eq_rhs + [ineqs[i][1] for i in combo]
            if len(rows) < d:
                continue
            if matrix_rank_rational(rows) != d:
                continue
            # Reduce to a square solvable system by picking independent rows.
            sq_rows, sq_rhs = [], []
            rk = 0
            for row, b in zip(rows, rhs):
                if matrix_rank_rational(sq_rows + [row]) > rk:
                    sq_rows.append(row)
                    sq_rhs.append(b)
                    rk += 1
                if rk == d:
                    break
            x = _solve_square(sq_rows, sq_rhs)
            if x is None:
                continue
            # All chosen rows (including dependent ones) must agree.
            if all(vdot(a, x) == b for a, b in zip(rows, rhs)) and feasible(x):
                candidates.add(norm_point(x))
    if not candidates:
        return None
    return hull(candidates)


def in_cayley_position(polys) -> bool:
    """True iff the tuple can be affinely collapsed to independent points:
    dim conv(union) == dim(sum of direction spaces) + m - 1."""
    polys = tuple(polys)
    if not polys:
        raise UnitriError("empty tuple")
    m = len(polys)
    all_verts = [v for p in polys for v in p.vertices]
    base = all_verts[0]
    joint = matrix_rank_rational([vsub(v, base) for v in all_verts[1:]])
    dir_rows = [r for p in polys for r in p.edge_rows()]
    dir_dim = matrix_rank_rational(dir_rows)
    return joint == dir_dim + m - 1
