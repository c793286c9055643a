"""Two classical canonical subdivisions: pulling triangulations over ordered
point configurations, and dicing by a hyperplane arrangement.

Pulling doubles as the initial-triangulation provider for the pipelines."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .complexes import Subdivision, make_subdivision
from .errors import InapplicableRuleError, UnitriError
from .geometry import (
    Polytope,
    faces,
    facets,
    hull,
    matrix_rank_rational,
    norm_point,
    vdot,
    vsub,
)
from .lattice import primitive_vector
from .rewrite import RuleFamily, SubdivisionRule, canonical_subdivision


@dataclass(frozen=True)
class PointConfig:
    """A totally ordered finite point set; faces are the subsets induced by
    faces of the hull, with the inherited order."""

    points: tuple

    def __post_init__(self):
        pts = tuple(norm_point(p) for p in self.points)
        object.__setattr__(self, "points", pts)
        if len(set(pts)) != len(pts):
            raise UnitriError("configuration points must be distinct")
        if not pts:
            raise UnitriError("empty configuration")

    def key(self):
        return ("A", self.points)

    def hull(self) -> Polytope:
        return hull(self.points)

    def realize(self):
        return (self.hull(),)

    def face_list(self):
        out = {}
        for f in faces(self.hull()):
            sub = tuple(p for p in self.points if f.contains(p))
            cfg = PointConfig(sub)
            out[cfg.key()] = cfg
        return tuple(out.values())

    def induced(self, subset) -> "PointConfig":
        chosen = set(norm_point(p) for p in subset)
        return PointConfig(tuple(p for p in self.points if p in chosen))

    @property
    def dim(self) -> int:
        base = self.points[0]
        return matrix_rank_rational([vsub(p, base) for p in self.points[1:]])

    def is_affinely_independent(self) -> bool:
        return len(self.points) == self.dim + 1

    def covectors(self):
        """Points whose removal drops the affine dimension."""
        out = []
        for x in self.points:
            rest = [p for p in self.points if p != x]
            if not rest:
                out.append(x)
                continue
            base = rest[0]
            if matrix_rank_rational(
                [vsub(p, base) for p in rest[1:]]
            ) < self.dim:
                out.append(x)
        return out


def pull_rule(config: PointConfig) -> Subdivision:
    """One pulling step: cone the first non-covector over the faces that
    avoid it."""
    if config.is_affinely_independent():
        raise InapplicableRuleError("configuration is already a simplex")
    covs = set(config.covectors())
    x = next(p for p in config.points if p not in covs)
    cells = []
    for f in facets(config.hull()):
        if f.contains(x):
            continue
        b = tuple(p for p in config.points if f.contains(p))
        cells.append(config.induced(b + (x,)))
    return make_subdivision(cells)


class PullFamily(RuleFamily):
    rules = (
        SubdivisionRule(
            name=("pull",),
            applies_to=lambda c: not c.is_affinely_independent(),
            apply=pull_rule,
        ),
    )


_PULL_FAMILY = PullFamily()


def pulling_family() -> PullFamily:
    return _PULL_FAMILY


def pulling_triangulation(config: PointConfig,
                          fuel: int = 10 ** 6) -> Subdivision:
    """Normalize under the pulling rule; every cell is affinely independent."""
    return canonical_subdivision(config, _PULL_FAMILY, fuel=fuel)


def initial_triangulation(poly: Polytope) -> list:
    """A triangulation of a polytope into integral simplices: the pulling
    triangulation of its vertex set in lexicographic order."""
    cfg = PointConfig(tuple(sorted(poly.vertices)))
    sub = pulling_triangulation(cfg)
    return [cell.points for cell in sub.max_cells]


def lattice_points(poly: Polytope) -> list:
    """All integer points of an integral polytope (bounding box filter)."""
    d = poly.ambient_dim
    lows = [min(v[i] for v in poly.vertices) for i in range(d)]
    highs = [max(v[i] for v in poly.vertices) for i in range(d)]
    out = []
    for pt in itertools.product(
        *(range(lo, hi + 1) for lo, hi in zip(lows, highs))
    ):
        if poly.contains(pt):
            out.append(pt)
    return out


def fine_initial_triangulation(poly: Polytope) -> list:
    """A triangulation of the polytope into empty integral simplices
    (no lattice points besides the vertices).

    Starts from the vertex pulling triangulation and repeatedly re-pulls any
    cell that still contains extra lattice points, listing those first so
    they become apexes.  Extra points on a shared facet are extra for both
    neighbours and the induced orders agree, so the refinements glue
    face-to-face.  Keeping the starting simplices empty shortens the
    dilation pipelines considerably (in the plane they are unimodular
    outright)."""
    work = list(initial_triangulation(poly))
    out = []
    while work:
        cellpts = work.pop()
        cell = hull(cellpts)
        extra = sorted(set(lattice_points(cell)) - set(cellpts))
        if not extra:
            out.append(tuple(sorted(cellpts)))
            continue
        cfg = PointConfig(tuple(extra) + tuple(sorted(cellpts)))
        for sub_cell in pulling_triangulation(cfg).max_cells:
            work.append(sub_cell.points)
    return out


# ---------------------------------------------------------------------------
# Dicing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Hyperplane:
    """normal . x == offset with a primitive integer normal."""

    normal: tuple
    offset: int

    def __post_init__(self):
        if not any(self.normal):
            raise UnitriError("hyperplane normal must be nonzero")
        prim = primitive_vector(self.normal)
        if prim != tuple(self.normal):
            raise UnitriError("hyperplane normal must be primitive")

    def value(self, point):
        return vdot(self.normal, point) - self.offset

    def strictly_crosses(self, poly: Polytope) -> bool:
        vals = [self.value(v) for v in poly.vertices]
        return any(v > 0 for v in vals) and any(v < 0 for v in vals)


def halfspace_slice(poly: Polytope, plane: Hyperplane, keep_sign: int):
    """poly intersected with the closed half-space sign(value) >= 0 or <= 0;
    None when empty.  New vertices may be rational."""
    keep = []
    for v in poly.vertices:
        val = plane.value(v)
        if (keep_sign > 0 and val >= 0) or (keep_sign < 0 and val <= 0):
            keep.append(v)
    cut = []
    for edge in faces(poly):
        if edge.dim != 1:
            continue
        a, b = edge.vertices
        va, vb = plane.value(a), plane.value(b)
        if (va > 0 > vb) or (va < 0 < vb):
            t = Fraction(-va, vb - va)
            cut.append(tuple(x + t * (y - x) for x, y in zip(a, b)))
    pts = keep + cut
    if not pts:
        return None
    return hull(pts)


def dice_rule(poly: Polytope, plane: Hyperplane) -> Subdivision:
    if not plane.strictly_crosses(poly):
        raise InapplicableRuleError("hyperplane misses the interior")
    hi = halfspace_slice(poly, plane, +1)
    lo = halfspace_slice(poly, plane, -1)
    return make_subdivision([hi, lo])


class DiceFamily(RuleFamily):
    def __init__(self, planes):
        self.planes = tuple(
            sorted(planes, key=lambda h: (h.normal, h.offset))
        )
        self.rules = tuple(
            SubdivisionRule(
                name=("dice", h.normal, h.offset),
                applies_to=(lambda h: lambda c: h.strictly_crosses(c))(h),
                apply=(lambda h: lambda c: dice_rule(c, h))(h),
            )
            for h in self.planes
        )


def dicing(poly: Polytope, planes, fuel: int = 10 ** 6) -> Subdivision:
    """Normalize under one dicing rule per hyperplane: the subdivision of the
    polytope by the arrangement's closed regions."""
    family = DiceFamily(planes)
    return canonical_subdivision(poly, family, fuel=fuel)
