"""Independent certification of triangulations and mixed supports.

Everything here re-derives its facts from raw vertex data through the exact
geometry layer; it never trusts engine-internal bookkeeping, so it can be
pointed at external certificates.  Checks report violations instead of
raising."""

from __future__ import annotations

from dataclasses import dataclass, field

from .complexes import CellComplex
from .errors import UnitriError
from .geometry import (
    Polytope,
    ambient_hrep,
    faces,
    hull,
    matrix_rank_rational,
    normalized_volume,
    polytope_intersection,
    vdot,
    vsub,
)
from .lattice import IntLattice, index

EXHAUSTIVE_CELL_LIMIT = 400


@dataclass
class Report:
    checked: int = 0
    violations: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, kind: str, message: str):
        self.violations.append((kind, message))

    def summary(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        out = [f"{status}: {self.checked} cells checked,"
               f" {len(self.violations)} violations"]
        for kind, msg in self.violations[:20]:
            out.append(f"  [{kind}] {msg}")
        if len(self.violations) > 20:
            out.append(f"  ... and {len(self.violations) - 20} more")
        return "\n".join(out)


def _as_vertex_tuples(cells):
    out = []
    for cell in cells:
        if isinstance(cell, Polytope):
            out.append(cell.vertices)
        elif hasattr(cell, "vertices"):
            out.append(tuple(cell.vertices))
        else:
            out.append(tuple(tuple(v) for v in cell))
    return out


def _is_integral(verts) -> bool:
    return all(isinstance(x, int) for v in verts for x in v)


def _is_simplex(verts) -> bool:
    base = verts[0]
    diffs = [vsub(v, base) for v in verts[1:]]
    return matrix_rank_rational(diffs) == len(diffs)


def verify_unimodular(cells) -> Report:
    """Every cell must be an integral simplex of lattice index 1."""
    report = Report()
    for verts in _as_vertex_tuples(cells):
        report.checked += 1
        if not _is_integral(verts):
            report.add("non-integral", f"cell {verts} has rational vertices")
            continue
        if not _is_simplex(verts):
            report.add("non-simplex", f"cell {verts} is degenerate")
            continue
        lat = IntLattice.from_rows(
            len(verts[0]), [vsub(v, verts[0]) for v in verts[1:]]
        )
        idx = index(lat)
        if idx != 1:
            report.add("non-unimodular", f"cell {verts} has index {idx}")
    return report


def verify_triangulation(poly: Polytope, cells,
                         exhaustive: bool | None = None) -> Report:
    """Covering, containment and face-to-face certification.

    Face-to-face is certified by facet pairing (every interior facet shared
    by exactly two cells, boundary facets on the hull boundary) plus vertex
    incidence; for small inputs (or on request) the exact pairwise
    intersection-is-a-common-face oracle runs as well."""
    report = Report()
    cell_verts = _as_vertex_tuples(cells)
    report.checked = len(cell_verts)
    if not cell_verts:
        report.add("covering", "no cells")
        return report
    d = poly.dim
    seen = set()
    usable = []
    for verts in cell_verts:
        if not _is_integral(verts):
            report.add("non-integral", f"cell {verts}")
            continue
        if not _is_simplex(verts) or len(verts) != d + 1:
            report.add("non-simplex",
                       f"cell {verts} is not a full-dimensional simplex")
            continue
        key = tuple(sorted(verts))
        if key in seen:
            report.add("duplicate", f"cell {key} appears twice")
            continue
        seen.add(key)
        bad = [v for v in verts if not poly.contains(v)]
        if bad:
            report.add("containment",
                       f"cell {verts} has vertices outside: {bad}")
            continue
        usable.append(key)
    total = 0
    for key in usable:
        total += normalized_volume(hull(key))
    expected = normalized_volume(poly)
    if total != expected:
        report.add(
            "covering",
            f"normalized volumes sum to {total}, polytope has {expected}"
        )
    _check_facet_pairing(poly, usable, report)
    _check_vertex_incidence(usable, report)
    if exhaustive is None:
        exhaustive = len(usable) <= EXHAUSTIVE_CELL_LIMIT
    if exhaustive:
        _check_pairwise_faces(usable, report)
    else:
        report.notes.append(
            "pairwise intersection oracle skipped at this size; facet "
            "pairing and vertex incidence certify face-to-faceness"
        )
    return report


def _check_facet_pairing(poly: Polytope, cell_keys, report: Report):
    counts = {}
    for key in cell_keys:
        for i in range(len(key)):
            facet = tuple(sorted(key[:i] + key[i + 1:]))
            counts[facet] = counts.get(facet, 0) + 1
    eqs, ineqs = ambient_hrep(poly)
    for facet, count in counts.items():
        if count == 2:
            continue
        if count > 2:
            report.add("overlap",
                       f"facet {facet} is shared by {count} cells")
            continue
        on_boundary = any(
            all(vdot(a, v) == b for v in facet) for a, b in ineqs
        )
        if not on_boundary:
            report.add(
                "facet-pairing",
                f"interior facet {facet} belongs to only one cell"
            )


def _floor_coord(x) -> int:
    return x if isinstance(x, int) else int(x) - (1 if x < int(x) else 0)


def _check_vertex_incidence(cell_keys, report: Report):
    # unit-grid index over bounding boxes keeps this near-linear
    import itertools

    grid = {}
    for key in cell_keys:
        lo, hi = _bounding_box(key)
        ranges = [range(_floor_coord(a), _floor_coord(b) + 1)
                  for a, b in zip(lo, hi)]
        for box in itertools.product(*ranges):
            grid.setdefault(box, []).append(key)
    all_vertices = sorted({v for key in cell_keys for v in key})
    polys = {}
    for v in all_vertices:
        box = tuple(_floor_coord(x) for x in v)
        for key in grid.get(box, ()):
            if v in key:
                continue
            if key not in polys:
                polys[key] = hull(key)
            if polys[key].contains(v):
                report.add(
                    "vertex-incidence",
                    f"vertex {v} lies in cell {key} without being one of"
                    " its vertices"
                )


def _bounding_box(key):
    d = len(key[0])
    return (
        tuple(min(v[i] for v in key) for i in range(d)),
        tuple(max(v[i] for v in key) for i in range(d)),
    )


def _boxes_touch(b1, b2) -> bool:
    (lo1, hi1), (lo2, hi2) = b1, b2
    return all(lo1[i] <= hi2[i] and lo2[i] <= hi1[i]
               for i in range(len(lo1)))


def _check_pairwise_faces(cell_keys, report: Report):
    boxes = {key: _bounding_box(key) for key in cell_keys}
    polys = {key: hull(key) for key in cell_keys}
    keys = list(cell_keys)
    for i in range(len(keys)):
        for j in range(i + 1, len(keys)):
            k1, k2 = keys[i], keys[j]
            if not _boxes_touch(boxes[k1], boxes[k2]):
                continue
            meet = polytope_intersection(polys[k1], polys[k2])
            if meet is None:
                continue
            if meet not in faces(polys[k1]) or meet not in faces(polys[k2]):
                report.add(
                    "common-face",
                    f"cells {k1} and {k2} meet in {meet.vertices}, not a"
                    " common face"
                )


def verify_mixed_support(cells, expected_pair) -> Report:
    """Recompute the two component supports of a pair complex and compare
    them (and their Minkowski sum) against the expected pair."""
    report = Report()
    cells = list(cells)
    report.checked = len(cells)
    try:
        comp = CellComplex.closure(cells)
        got = comp.n_support()
    except UnitriError as exc:
        report.add("support", f"support recomputation failed: {exc}")
        return report
    expected = tuple(
        p if isinstance(p, Polytope) else hull(p) for p in expected_pair
    )
    if len(got) != len(expected):
        report.add("support", f"{len(got)} components, expected"
                   f" {len(expected)}")
        return report
    for k, (g, e) in enumerate(zip(got, expected)):
        if g != e:
            report.add(
                "support",
                f"component {k}: got {g.vertices}, expected {e.vertices}"
            )
    return report
