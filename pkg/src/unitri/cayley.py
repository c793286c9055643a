"""The poset of Cayley tuples (p, S, a) and the canonical subdivision that
breaks dilated simplices into lattice-preserving pieces.

An element holds base points p (m >= 1), a tuple S of independent ordered
integral simplices (n >= 0), and an m x n matrix a of nonnegative integers;
its realization is the Cayley sum of the summands p_i + sum_j a_ij S_j.
Elements are stored in standard form: no point entries in S and no all-zero
columns in a (absorbing either kind into the base points is the defining
equivalence)."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .complexes import Subdivision
from .errors import InapplicableRuleError, UnitriError
from .geometry import (
    OrderedSimplex,
    Polytope,
    SimplexTuple,
    hull,
    in_cayley_position,
    norm_point,
    vadd,
    vscale,
)
from .lattice import IntLattice, index
from .rewrite import DEFAULT_FUEL, RuleFamily, SubdivisionRule


@dataclass(frozen=True)
class CayleyElt:
    """A Cayley tuple in standard form.  Construct via make_cayley."""

    p: tuple
    simplices: SimplexTuple
    a: tuple

    @property
    def m(self) -> int:
        return len(self.p)

    @property
    def n(self) -> int:
        return len(self.simplices)

    @property
    def ambient_dim(self) -> int:
        return len(self.p[0])

    def key(self):
        return ("C", self.p, self.simplices.key(), self.a)

    def face_list(self):
        return cayley_faces(self)

    def realize(self):
        return (cay(self),)

    def summands(self):
        """Vertex lists of the polytopes p_i + sum_j a_ij S_j."""
        out = []
        for i in range(self.m):
            pts = [self.p[i]]
            for j, simp in enumerate(self.simplices.entries):
                coef = self.a[i][j]
                pts = [
                    vadd(q, vscale(coef, v))
                    for q in pts
                    for v in simp.vertices
                ]
                pts = list(dict.fromkeys(pts))
            out.append(pts)
        return out

    def __repr__(self):
        return (
            f"CayleyElt(p={list(self.p)}, "
            f"S={[list(s.vertices) for s in self.simplices.entries]}, "
            f"a={[list(r) for r in self.a]})"
        )


def make_cayley(p, simplices, a, validate: bool = False) -> CayleyElt:
    """Reduce a raw tuple to standard form.

    The defining relations absorb any point entry of S, and any entry whose
    a-column is all zero, into the base points."""
    pts = [norm_point(q) for q in p]
    if not pts:
        raise UnitriError("at least one base point required")
    entries = list(
        simplices.entries if isinstance(simplices, SimplexTuple)
        else simplices
    )
    mat = [list(row) for row in a]
    if len(mat) != len(pts) or any(len(r) != len(entries) for r in mat):
        raise UnitriError("matrix shape does not match (p, S)")
    for row in mat:
        for x in row:
            if x < 0:
                raise UnitriError("matrix entries must be nonnegative")
    changed = True
    while changed:
        changed = False
        for j, simp in enumerate(entries):
            col_zero = all(row[j] == 0 for row in mat)
            if simp.is_point() or col_zero:
                v = simp.vertices[0]
                for i in range(len(pts)):
                    if mat[i][j]:
                        pts[i] = vadd(pts[i], vscale(mat[i][j], v))
                del entries[j]
                for row in mat:
                    del row[j]
                changed = True
                break
    elt = CayleyElt(
        tuple(pts), SimplexTuple(tuple(entries)),
        tuple(tuple(row) for row in mat),
    )
    if validate:
        polys = [hull(pl) for pl in elt.summands()]
        if not in_cayley_position(polys):
            raise UnitriError("summands are not in Cayley position")
    return elt


@lru_cache(maxsize=None)
def _cay_cached(elt: CayleyElt) -> Polytope:
    return hull([v for pl in elt.summands() for v in pl])


def cay(elt: CayleyElt) -> Polytope:
    """The realization: convex hull of all summands."""
    return _cay_cached(elt)


@lru_cache(maxsize=None)
def _faces_cached(elt: CayleyElt):
    m = elt.m
    face_choices = [s.faces() for s in elt.simplices.entries]
    out = {}
    for r in range(1, m + 1):
        for subset in itertools.combinations(range(m), r):
            for combo in itertools.product(*face_choices):
                f = make_cayley(
                    tuple(elt.p[i] for i in subset),
                    SimplexTuple(tuple(combo)),
                    tuple(elt.a[i] for i in subset),
                )
                out.setdefault(f.key(), f)
    return tuple(out.values())


def cayley_faces(elt: CayleyElt):
    """All faces (p_I, S', a_I) with induced vertex orders, standardized."""
    return _faces_cached(elt)


def s0_and_lattice(elt: CayleyElt) -> tuple[OrderedSimplex, IntLattice]:
    """The first-vertex simplex S0 and the lattice L = L(S0) + sum L(S_j)."""
    s0_vertices = []
    for i in range(elt.m):
        w = elt.p[i]
        for j, simp in enumerate(elt.simplices.entries):
            w = vadd(w, vscale(elt.a[i][j], simp.first_vertex))
        s0_vertices.append(w)
    s0 = OrderedSimplex(tuple(s0_vertices))
    lat = IntLattice.from_rows(
        elt.ambient_dim,
        s0.edge_rows()
        + tuple(r for s in elt.simplices.entries for r in s.edge_rows()),
    )
    return s0, lat


def lattice_of_elt(elt: CayleyElt) -> IntLattice:
    return s0_and_lattice(elt)[1]


def elt_index(elt: CayleyElt) -> int:
    return index(lattice_of_elt(elt))


# ---------------------------------------------------------------------------
# The gamma rule
# ---------------------------------------------------------------------------

def gamma_pieces(elt: CayleyElt, j: int):
    """The two cells splitting off the first vertex of entry j.

    Returns (a_prime, a_dprime, degenerate) where degenerate means a_prime
    is a face of a_dprime and the subdivision has the single maximal cell
    a_dprime."""
    simp = elt.simplices.entries[j]
    if simp.dim < 1:
        raise InapplicableRuleError("gamma needs a positive-dimensional entry")
    col = [row[j] for row in elt.a]
    top = max(col)
    i = col.index(top)
    v = simp.first_vertex
    f = simp.facet_opposite(0)

    p_prime = list(elt.p)
    p_prime[i] = vadd(p_prime[i], v)
    a_prime = [list(row) for row in elt.a]
    a_prime[i][j] -= 1
    elt_prime = make_cayley(tuple(p_prime), elt.simplices,
                            tuple(tuple(r) for r in a_prime))

    p_dprime = elt.p[:i] + (vadd(elt.p[i], v),) + elt.p[i:]
    f_tuple = elt.simplices.replace(j, f)
    new_row = tuple(a_prime[i])
    a_dprime = elt.a[:i] + (new_row,) + elt.a[i:]
    elt_dprime = make_cayley(p_dprime, f_tuple, a_dprime)

    degenerate = top == 1 and all(
        x == 0 for k, x in enumerate(col) if k != i
    )
    return elt_prime, elt_dprime, degenerate


def gamma_apply(elt: CayleyElt, j: int) -> Subdivision:
    a_prime, a_dprime, degenerate = gamma_pieces(elt, j)
    if degenerate:
        return Subdivision((a_dprime,))
    return Subdivision((a_prime, a_dprime))


def gamma_rule(t: OrderedSimplex) -> SubdivisionRule:
    """The rule splitting dilations of the ordered simplex t."""
    tkey = t.key()

    def applies(c: CayleyElt) -> bool:
        return any(s.key() == tkey for s in c.simplices.entries)

    def apply(c: CayleyElt) -> Subdivision:
        for j, s in enumerate(c.simplices.entries):
            if s.key() == tkey:
                return gamma_apply(c, j)
        raise InapplicableRuleError("simplex is not an entry")

    return SubdivisionRule(name=("gamma", tkey), applies_to=applies,
                           apply=apply)


class GammaFamily(RuleFamily):
    """One gamma rule per simplex entry; terminal cells have no entries."""

    def rules_for(self, cell: CayleyElt):
        return tuple(
            sorted(
                (gamma_rule(s) for s in cell.simplices.entries),
                key=lambda r: r.name,
            )
        )

    def is_terminal(self, cell: CayleyElt) -> bool:
        return cell.n == 0


_GAMMA_FAMILY = GammaFamily()


def gamma_family() -> GammaFamily:
    return _GAMMA_FAMILY


def Gamma(elt: CayleyElt, fuel: int = DEFAULT_FUEL) -> Subdivision:
    """Canonical subdivision under the gamma family: every maximal cell has
    an empty simplex tuple and the same lattice as the input."""
    return _GAMMA_FAMILY.canonical(elt, fuel=fuel)


def termination_metric(elt: CayleyElt):
    """Strictly lexicographically decreasing along nontrivial gamma moves."""
    return (
        sum(s.dim for s in elt.simplices.entries),
        sum(sum(row) for row in elt.a),
    )
