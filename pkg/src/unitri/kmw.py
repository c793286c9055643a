"""The factorial-dilation pipeline: iteratively dilate a triangulation by d!
and break every simplex carrying a chosen box point into lower-index cells,
until every cell is unimodular.

Round structure: view each maximal simplex S of the current triangulation as
the Cayley cell ((0), (S), (d!)), pick a full-dimensional lattice of maximal
index and a nonzero class x of Z^d modulo it, then normalize under the gamma
rules (on cells without the box point) plus the stellar-shell rule (on cells
of the special single-entry form carrying it)."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial

from .boxpoints import BoxPoint, is_box_point_of, shell_cells
from .cayley import (
    CayleyElt,
    cay,
    gamma_rule,
    lattice_of_elt,
    make_cayley,
)
from .complexes import Subdivision
from .errors import FrameworkViolationError, UnitriError
from .geometry import (
    OrderedSimplex,
    Polytope,
    SimplexTuple,
    ordered_simplex_lex,
)
from .lattice import IntLattice, index, quotient
from .rewrite import DEFAULT_FUEL, RuleFamily, SubdivisionRule
from .classic import initial_triangulation


def in_bullet(elt: CayleyElt, full_lattice: IntLattice, class_rep,
              d: int) -> bool:
    """Single base point, single entry, matrix (d!), carrying the class as a
    box point."""
    if elt.m != 1 or elt.n != 1:
        return False
    if elt.a[0][0] != factorial(d):
        return False
    return is_box_point_of(full_lattice, class_rep, elt.simplices) is not None


def in_circ(elt: CayleyElt, full_lattice: IntLattice, class_rep) -> bool:
    if elt.n == 0:
        return True
    return is_box_point_of(full_lattice, class_rep, elt.simplices) is None


def stell_apply(elt: CayleyElt, bp: BoxPoint, d: int) -> Subdivision:
    """Concentric stellar shells filling p + d! S, peeling toward the focus.

    d!/c shells, one slab per box-point-free facet; every output cell drops
    the box point and has strictly smaller index."""
    c = bp.c_tuple[0]
    n_shells = factorial(d) // c
    base = elt.p[0]
    cells = [e for _, _, e in shell_cells(bp, base, (factorial(d),),
                                          n_shells)]
    return Subdivision(tuple(cells))


def stell_rule(full_lattice: IntLattice, class_rep, d: int):
    def applies(cell: CayleyElt) -> bool:
        return in_bullet(cell, full_lattice, class_rep, d)

    def apply(cell: CayleyElt) -> Subdivision:
        bp = is_box_point_of(full_lattice, class_rep, cell.simplices)
        if bp is None:
            raise FrameworkViolationError("stellar rule on a circ cell")
        return stell_apply(cell, bp, d)

    return SubdivisionRule(name=("stell",), applies_to=applies, apply=apply)


class StellGammaFamily(RuleFamily):
    """Gamma rules restricted to cells without the box point, plus the
    stellar rule on the special bullet cells.  A cell with the box point in
    any other shape means a rule produced an element outside the poset."""

    def __init__(self, full_lattice: IntLattice, class_rep, d: int):
        self.full_lattice = full_lattice
        self.class_rep = tuple(class_rep)
        self.d = d
        self._stell = stell_rule(full_lattice, self.class_rep, d)

    def rules_for(self, cell: CayleyElt):
        if cell.n == 0:
            return ()
        if in_bullet(cell, self.full_lattice, self.class_rep, self.d):
            return (self._stell,)
        if in_circ(cell, self.full_lattice, self.class_rep):
            return tuple(
                sorted(
                    (gamma_rule(s) for s in cell.simplices.entries),
                    key=lambda r: r.name,
                )
            )
        raise FrameworkViolationError(
            f"cell escaped the pipeline poset: {cell!r}"
        )

    def is_terminal(self, cell: CayleyElt) -> bool:
        return cell.n == 0


def Gamma_x(elt: CayleyElt, full_lattice: IntLattice, class_rep, d: int,
            fuel: int = DEFAULT_FUEL) -> Subdivision:
    """Canonical subdivision for one fixed (lattice, class) pair: plain
    Gamma on cells without the box point, index-lowering on the rest."""
    family = StellGammaFamily(full_lattice, class_rep, d)
    return family.canonical(elt, fuel=fuel)


# ---------------------------------------------------------------------------
# Pipeline
# ---------------------------------------------------------------------------

@dataclass
class KmwResult:
    rounds: int                      # N
    dilation: int                    # (d!)^N
    simplices: list                  # OrderedSimplex cells of the output
    lattice_trace: list = field(default_factory=list)

    def cells_as_vertex_tuples(self):
        return [s.vertices for s in self.simplices]


def choose_class(lattices):
    """Deterministic pick: a maximal-index lattice (ties by basis), then the
    nonzero quotient class with lexicographically smallest residues."""
    by_index = sorted(lattices, key=lambda l: (-index(l), l.basis))
    lat = by_index[0]
    g = quotient(IntLattice.standard(lat.ambient_dim), lat)
    res = next(iter(g.nonzero_elements()))
    return lat, g.section(res)


def choose_class_covering(pairs):
    """Deterministic pick of (lattice, class) maximizing the number of bad
    lattices whose every owning cell carries the class as a box point.

    ``pairs`` holds (cell lattice, cell simplex tuple) for the maximal cells
    of the current complex.  Rounds are expensive (each dilates the whole
    complex), so covering several bad lattices at once matters more than the
    simplest-possible choice; ties fall back to highest index, smallest
    basis, smallest residues."""
    lat_by_basis = {}
    for lat, _ in pairs:
        lat_by_basis[lat.basis] = lat
    bad = sorted(
        (l for l in lat_by_basis.values() if index(l) > 1),
        key=lambda l: (-index(l), l.basis),
    )
    if not bad:
        return None
    reps = {}
    for lat, s in pairs:
        if index(lat) > 1:
            reps.setdefault((lat.basis, s.edge_key()), (lat, s))
    d = bad[0].ambient_dim
    std = IntLattice.standard(d)
    best = None
    for lat in bad:
        g = quotient(std, lat)
        for res in g.nonzero_elements():
            z = g.section(res)
            ok = {l.basis: True for l in bad}
            for (basis, _), (_, s) in reps.items():
                if ok[basis] and is_box_point_of(lat, z, s) is None:
                    ok[basis] = False
            covered = sum(ok.values())
            cand = (-covered, -index(lat), lat.basis, res)
            if best is None or cand < best[0]:
                best = (cand, lat, z)
    return best[1], best[2]


def kmw_pipeline(poly: Polytope, fuel: int = DEFAULT_FUEL,
                 dim_cap: int = 3, max_rounds: int = 64) -> KmwResult:
    """Dilate by d! and reduce until every cell lattice is Z^d.

    Returns the number of rounds N and a unimodular triangulation of
    (d!)^N * poly as lexicographically ordered simplices."""
    d = poly.ambient_dim
    if poly.dim != d:
        raise UnitriError("input polytope must be full-dimensional")
    if d > dim_cap:
        raise UnitriError(
            f"dimension {d} above the cap {dim_cap}; raise dim_cap to force"
            " (cell counts grow like (d!)^(d N))"
        )
    simplices = [
        ordered_simplex_lex(pts) for pts in initial_triangulation(poly)
    ]
    trace = []
    rounds = 0
    dfac = factorial(d)
    while True:
        lattices = {}
        for s in simplices:
            lat = s.lattice_l()
            lattices[lat.basis] = lat
        trace.append(sorted(index(l) for l in lattices.values()))
        if all(index(l) == 1 for l in lattices.values()):
            break
        if rounds >= max_rounds:
            raise UnitriError("round cap exceeded")
        lat, class_rep = choose_class_covering(
            [(s.lattice_l(), SimplexTuple((s,))) for s in simplices]
        )
        family = StellGammaFamily(lat, class_rep, d)
        zero = tuple(0 for _ in range(d))
        new_simplices = {}
        for s in simplices:
            seed = make_cayley((zero,), SimplexTuple((s,)), ((dfac,),))
            sub = family.canonical(seed, fuel=fuel)
            for cell in sub.max_cells:
                simplex = ordered_simplex_lex(cay(cell).vertices)
                new_simplices[simplex.key()] = simplex
        simplices = list(new_simplices.values())
        rounds += 1
    return KmwResult(
        rounds=rounds,
        dilation=dfac ** rounds,
        simplices=simplices,
        lattice_trace=trace,
    )
