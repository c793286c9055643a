"""Cell complexes over relative posets.

A *cell* is any object with three capabilities:

  - ``face_list()``: every cell below it in its poset, itself included;
  - ``realize()``: its image as a tuple of n polytopes (n = 1 for plain
    polytope-like posets, 2 for the mixed pipeline);
  - ``key()``: a hashable, totally ordered canonical token.

Cells are deduplicated and merged by key everywhere, which is what makes
gluing subdivisions across neighbouring cells work: two construction paths
that reach the same poset element produce identical keys.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import FrameworkViolationError, InvalidComplexError, UnitriError
from .geometry import (
    AffineFrame,
    Polytope,
    affine_volume,
    hull,
    minkowski_sum,
    minkowski_sum_all,
    polytope_intersection,
)


class NonConvexSupport:
    """Marker returned by ``support`` when the union is not convex."""

    def __repr__(self):
        return "NonConvexSupport()"

    def __eq__(self, other):
        return isinstance(other, NonConvexSupport)

    def __hash__(self):
        return hash("NonConvexSupport")


def realize_sum(cell) -> Polytope:
    """The summed realization of a cell (Minkowski sum of its components)."""
    parts = cell.realize()
    if len(parts) == 1:
        return parts[0]
    return minkowski_sum_all(parts)


class CellComplex:
    """A finite face-closed cell set, stored by canonical key."""

    def __init__(self, cells_by_key: dict):
        self.cells = dict(sorted(cells_by_key.items()))
        self._max = None

    @staticmethod
    def closure(cells) -> "CellComplex":
        out = {}
        work = list(cells)
        while work:
            c = work.pop()
            k = c.key()
            if k in out:
                continue
            out[k] = c
            work.extend(c.face_list())
        return CellComplex(out)

    def __len__(self):
        return len(self.cells)

    def __iter__(self):
        return iter(self.cells.values())

    def __contains__(self, cell):
        return cell.key() in self.cells

    def __eq__(self, other):
        return isinstance(other, CellComplex) and set(self.cells) == set(
            other.cells
        )

    def max_cells(self):
        """Cells not strictly below another cell of the complex."""
        if self._max is None:
            non_max = set()
            for c in self.cells.values():
                ck = c.key()
                for f in c.face_list():
                    fk = f.key()
                    if fk != ck and fk in self.cells:
                        non_max.add(fk)
            self._max = tuple(
                c for k, c in self.cells.items() if k not in non_max
            )
        return self._max

    def n_components(self) -> int:
        any_cell = next(iter(self.cells.values()))
        return len(any_cell.realize())

    def support(self):
        """The union of summed realizations as a Polytope if convex, else a
        NonConvexSupport marker.

        Convexity is decided exactly: the candidate hull's volume must be
        matched by the top-dimensional max cells (interiors are disjoint in
        a valid complex, so volumes add)."""
        maxes = self.max_cells()
        polys = [realize_sum(c) for c in maxes]
        all_vertices = [v for p in polys for v in p.vertices]
        cand = hull(all_vertices)
        frame = AffineFrame(cand.vertices)
        t = frame.dim
        if any(p.dim != t for p in polys):
            return NonConvexSupport()
        total = 0
        for p in polys:
            total += affine_volume(p, frame)
        if total != affine_volume(cand, frame):
            return NonConvexSupport()
        return cand

    def n_support(self):
        """Componentwise supports (Q_1, ..., Q_n); requires |X| convex."""
        sup = self.support()
        if isinstance(sup, NonConvexSupport):
            raise InvalidComplexError(
                "n-support undefined: total support is not convex"
            )
        n = self.n_components()
        comps = []
        for k in range(n):
            pts = []
            for c in self.max_cells():
                pts.extend(c.realize()[k].vertices)
            comps.append(hull(pts))
        total = comps[0]
        for p in comps[1:]:
            total = minkowski_sum(total, p)
        if total != sup:
            raise InvalidComplexError(
                "component supports do not sum to the total support"
            )
        return tuple(comps)


@dataclass(frozen=True)
class Subdivision:
    """A complex presented by its maximal cells, with support one polytope."""

    max_cells: tuple

    def __post_init__(self):
        cells = tuple(
            sorted(
                {c.key(): c for c in self.max_cells}.values(),
                key=lambda c: c.key(),
            )
        )
        object.__setattr__(self, "max_cells", cells)
        if not cells:
            raise UnitriError("a subdivision needs at least one cell")

    def key_set(self):
        return frozenset(c.key() for c in self.max_cells)

    def complex(self) -> CellComplex:
        return CellComplex.closure(self.max_cells)

    def is_trivial_for(self, cell) -> bool:
        return len(self.max_cells) == 1 and self.max_cells[0].key() == cell.key()

    def n_support(self):
        if len(self.max_cells) == 1:
            return self.max_cells[0].realize()
        return self.complex().n_support()

    def support(self):
        parts = self.n_support()
        if len(parts) == 1:
            return parts[0]
        return minkowski_sum_all(parts)


def trivial_subdivision(cell) -> Subdivision:
    return Subdivision((cell,))


def make_subdivision(candidates) -> Subdivision:
    """Subdivision from candidate max cells, dropping any candidate that is
    a proper face of another (rule constructions occasionally produce such
    degenerate members)."""
    by_key = {c.key(): c for c in candidates}
    drop = set()
    items = list(by_key.items())
    for k, c in items:
        for k2, c2 in items:
            if k == k2 or k2 in drop:
                continue
            if k in (f.key() for f in c2.face_list()):
                drop.add(k)
                break
    return Subdivision(tuple(c for k, c in items if k not in drop))


def closure(cells) -> CellComplex:
    return CellComplex.closure(cells)


def restriction(subdivision: Subdivision, face_cell) -> Subdivision:
    """The unique subcomplex of the subdivision supported on the face's
    realization; raises FrameworkViolationError when it does not exist
    (which signals a rule bug, not user error)."""
    target_parts = face_cell.realize()
    target_sum = realize_sum(face_cell)
    comp = subdivision.complex()
    picked = []
    for c in comp:
        s = realize_sum(c)
        if all(target_sum.contains(v) for v in s.vertices):
            picked.append(c)
    if not picked:
        raise FrameworkViolationError("restriction is empty")
    sub = CellComplex({c.key(): c for c in picked})
    maxes = sub.max_cells()
    result = Subdivision(maxes)
    got = result.n_support()
    if tuple(got) != tuple(target_parts):
        raise FrameworkViolationError(
            "restriction support mismatch: "
            f"{[p.vertices for p in got]} != "
            f"{[p.vertices for p in target_parts]}"
        )
    return result


def refine(sigma, x: CellComplex) -> CellComplex:
    """Union of sigma over the cells of a complex.

    sigma maps each cell to a Subdivision of it; canonicity makes the union
    of closures glue into a complex.  Since sigma is a poset map it is
    enough to expand the maximal cells."""
    out = {}
    for cell in sorted(x.max_cells(), key=lambda c: c.key()):
        sub = sigma(cell)
        for c in sub.complex():
            out[c.key()] = c
    return CellComplex(out)


def validate_complex(x: CellComplex, check_interiors: bool = False) -> None:
    """Debug validation of the complex axioms; raises InvalidComplexError.

    Face closure and realize-injectivity are cheap; the pairwise disjoint
    interior check is O(n^2) exact volume work, only for tests."""
    keys = set(x.cells)
    for c in x:
        for f in c.face_list():
            if f.key() not in keys:
                raise InvalidComplexError(
                    f"face closure violated at {c.key()} -> {f.key()}"
                )
    by_realization = {}
    for c in x:
        r = tuple(p.vertices for p in c.realize())
        if r in by_realization and by_realization[r] != c.key():
            raise InvalidComplexError(
                f"realize collision: {by_realization[r]} vs {c.key()}"
            )
        by_realization[r] = c.key()
    if check_interiors:
        maxes = [realize_sum(c) for c in x.max_cells()]
        for i in range(len(maxes)):
            for j in range(i + 1, len(maxes)):
                _check_disjoint_interiors(maxes[i], maxes[j])


def _check_disjoint_interiors(p: Polytope, q: Polytope) -> None:
    # For face-closed cell sets, pairwise disjointness of relative interiors
    # across the whole complex is equivalent to maximal cells meeting in
    # common faces; check the latter, it is the sharper diagnostic.
    from .geometry import faces

    meet = polytope_intersection(p, q)
    if meet is None:
        return
    if meet not in faces(p) or meet not in faces(q):
        raise InvalidComplexError(
            f"cells do not meet face-to-face: {p.vertices} and {q.vertices}"
        )
