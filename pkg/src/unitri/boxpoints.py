"""Box points of independent simplex tuples and the index-lowering
constructions built on them: shell decompositions and the kappa rule.

A box point of a tuple S is a nonzero element of G(S) = N(S)/L(S).  Its
canonical data: fractional coordinates in the edge basis, the c-tuple of
per-entry ceilings, and the focus (the unique integral representative in
the c-dilated polysimplex anchored at the first vertices)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import ceil, floor

from .complexes import Subdivision, make_subdivision
from .errors import InapplicableRuleError, UnitriError
from .geometry import (
    FaceTuple,
    OrderedSimplex,
    SimplexTuple,
    facet_witness,
    simplex_facet_choices,
    vadd,
    vscale,
    vsub,
)
from .lattice import (
    IntLattice,
    quotient,
    saturation,
    solve_left,
    solve_left_rational,
)
from .cayley import CayleyElt, gamma_apply, make_cayley


@dataclass(frozen=True)
class BoxPoint:
    """A nonzero element of G(S) with its derived data."""

    host: SimplexTuple
    frac: tuple          # per entry: tuple of Fractions in the edge basis
    rep: tuple           # the canonical integral representative in N(S)
    c_tuple: tuple       # per entry: ceil of the fractional coordinate sum
    focus: tuple         # rep + sum_j c_j * (first vertex of S_j)

    def key(self):
        return ("B", self.host.key(),
                tuple(tuple((f.numerator, f.denominator) for f in fs)
                      for fs in self.frac))

    @property
    def c_support(self):
        return tuple(j for j, c in enumerate(self.c_tuple) if c)


def _edge_rows(s: SimplexTuple):
    return tuple(r for simp in s.entries for r in simp.edge_rows())


def _entry_slices(s: SimplexTuple):
    out = []
    pos = 0
    for simp in s.entries:
        out.append((pos, pos + simp.dim))
        pos += simp.dim
    return out


@lru_cache(maxsize=None)
def _canonical_frac(edge_rows, slices, rep):
    """(frac per entry, canonical rep, c per entry) for a representative,
    all translation-invariant."""
    coeff = solve_left_rational(edge_rows, rep)
    if coeff is None:
        raise UnitriError("representative is outside Span L(S)")
    reduced = tuple(c - floor(c) for c in coeff)
    if not any(reduced):
        raise UnitriError("representative lies in L(S): not a box point")
    w = tuple(0 for _ in rep)
    for c, row in zip(reduced, edge_rows):
        w = vadd(w, vscale(c, row))
    w = tuple(int(x) for x in w)
    frac = tuple(tuple(reduced[a:b]) for a, b in slices)
    c_tuple = tuple(ceil(sum(fs, start=Fraction(0))) for fs in frac)
    return frac, w, c_tuple


def boxpoint_from_rep(s: SimplexTuple, rep) -> BoxPoint:
    """Canonicalize a representative in N(S) to its box point, reducing the
    edge-basis coordinates into [0, 1)."""
    frac, w, c_tuple = _canonical_frac(
        _edge_rows(s), tuple(_entry_slices(s)), tuple(rep)
    )
    focus = w
    for j, simp in enumerate(s.entries):
        focus = vadd(focus, vscale(c_tuple[j], simp.first_vertex))
    return BoxPoint(s, frac, w, c_tuple, focus)


@lru_cache(maxsize=None)
def _box_points_cached(s: SimplexTuple):
    zero = tuple(0 for _ in range(s.ambient_dim))
    partial = [zero]
    for simp in s.entries:
        g = quotient(simp.lattice_n(), simp.lattice_l())
        entry_reps = [g.section(res) for res in g.elements()]
        partial = [vadd(w, e) for w in partial for e in entry_reps]
    out = {}
    for w in partial:
        try:
            bp = boxpoint_from_rep(s, w)  # raises on the zero class
        except UnitriError:
            continue
        out.setdefault(bp.key(), bp)
    return tuple(sorted(out.values(), key=lambda b: b.key()))


def box_points(s: SimplexTuple):
    """All box points of an independent tuple: the nonzero classes of the
    direct sum of the per-entry quotient groups."""
    if not s.entries:
        return ()
    return _box_points_cached(s)


def group_order(s: SimplexTuple) -> int:
    out = 1
    for simp in s.entries:
        from .lattice import index

        out *= index(simp.lattice_l())
    return out


def rep_in_sublattice_sum(rep, sub: IntLattice, modulus: IntLattice) -> bool:
    """Does rep lie in sub + modulus?"""
    gens = sub.basis + modulus.basis
    if not gens:
        return not any(rep)
    return solve_left(gens, rep) is not None


def has_rep_in(bp_rep, face: SimplexTuple, host_l: IntLattice) -> bool:
    """Whether the class of bp_rep modulo L(host) has a representative in
    N(face), i.e. lies in the image of G(face) -> G(host)."""
    if not face.entries:
        return False
    return rep_in_sublattice_sum(bp_rep, face.lattice_n(), host_l)


def _reconstruct(edge_key, ambient_dim) -> SimplexTuple:
    """Origin-anchored tuple with the given per-entry edge matrices."""
    zero = tuple(0 for _ in range(ambient_dim))
    return SimplexTuple(
        tuple(OrderedSimplex((zero,) + tuple(rows)) for rows in edge_key)
    )


@lru_cache(maxsize=None)
def _identify_rep(lattice_basis, ambient_dim, class_rep, edge_key):
    """Translation-invariant core of the global box-point test: a canonical
    representative of the class inside N(S), or None.

    The witness face is searched from the largest faces down; the first
    match fixes the identification deterministically."""
    full_lattice = IntLattice(ambient_dim, lattice_basis)
    s = _reconstruct(edge_key, ambient_dim)
    faces_desc = sorted(
        s.face_tuples(),
        key=lambda f: (-f.total_dim, f.key()),
    )
    for face in faces_desc:
        if not face.entries:
            continue
        n_face = face.lattice_n()
        l_face = face.lattice_l()
        if full_lattice.intersection(n_face) != l_face:
            continue
        gens = n_face.basis + full_lattice.basis
        y = solve_left(gens, class_rep) if gens else None
        if y is None:
            continue
        w = tuple(0 for _ in class_rep)
        for coef, row in zip(y[: len(n_face.basis)], n_face.basis):
            w = vadd(w, vscale(coef, row))
        frac, w_canon, _ = _canonical_frac(
            _edge_rows(s), tuple(_entry_slices(s)), w
        )
        return w_canon
    return None


def is_box_point_of(full_lattice: IntLattice, class_rep,
                    s: SimplexTuple):
    """Global box-point test: for x nonzero in Z^d / L (L full-dimensional),
    decide whether x is a box point of S; on success return its
    identification as a BoxPoint of S."""
    if full_lattice.rank != full_lattice.ambient_dim:
        raise UnitriError("the reference lattice must be full-dimensional")
    if full_lattice.contains(class_rep):
        raise UnitriError("class representative is zero in Z^d / L")
    w = _identify_rep(full_lattice.basis, full_lattice.ambient_dim,
                      tuple(class_rep), s.edge_key())
    if w is None:
        return None
    return boxpoint_from_rep(s, w)


def frak_F(s: SimplexTuple, bp: BoxPoint):
    """The facet tuples of the polysimplex that drop the box point, as
    FaceTuples with witness functionals."""
    out = []
    for j, vi, face in _frak_tuples(s, bp):
        phi = facet_witness(s, j, vi)
        out.append(
            FaceTuple(tuple(simp.poly() for simp in face.entries),
                      tuple(phi))
        )
    return out


@lru_cache(maxsize=None)
def _frak_selection(edge_key, ambient_dim, rep):
    s = _reconstruct(edge_key, ambient_dim)
    host_l = s.lattice_l()
    out = []
    for j, vi in simplex_facet_choices(s):
        face = s.replace(j, s.entries[j].facet_opposite(vi))
        if not has_rep_in(rep, face, host_l):
            out.append((j, vi))
    return tuple(out)


def _frak_tuples(s: SimplexTuple, bp: BoxPoint):
    """(j, dropped vertex index, facet tuple) triples for the facets of the
    polysimplex on which x is not a box point."""
    sel = _frak_selection(s.edge_key(), s.ambient_dim, bp.rep)
    return [
        (j, vi, s.replace(j, s.entries[j].facet_opposite(vi)))
        for j, vi in sel
    ]


def shell_cells(bp: BoxPoint, base, a_row, n_shells: int):
    """Concentric-shell Cayley cells peeling a dilated polysimplex.

    For the polysimplex base + sum_j a_j S_j with a_j >= n_shells * c_j,
    returns the cells (r, F, elt) for r = 1..n_shells and F in the
    box-point-free facet family; elt realizes the r-th shell slab over
    facet F."""
    s = bp.host
    if len(a_row) != len(s.entries):
        raise UnitriError("a-row length mismatch")
    for a, c in zip(a_row, bp.c_tuple):
        if a < n_shells * c:
            raise UnitriError("need a_j >= N * c_j for all j")
    x0 = bp.focus
    cells = []
    for r in range(1, n_shells + 1):
        p_out = vadd(base, vscale(r, x0))
        p_in = vadd(base, vscale(r - 1, x0))
        row_out = tuple(a - r * c for a, c in zip(a_row, bp.c_tuple))
        row_in = tuple(a - (r - 1) * c for a, c in zip(a_row, bp.c_tuple))
        for j, vi, face in _frak_tuples(s, bp):
            elt = make_cayley((p_out, p_in), face, (row_out, row_in))
            cells.append((r, face, elt))
    return cells


# ---------------------------------------------------------------------------
# The kappa rule
# ---------------------------------------------------------------------------

def kappa_applicable(elt: CayleyElt, full_lattice: IntLattice, class_rep,
                     t_index: int):
    """Membership test; returns the BoxPoint when applicable, else None."""
    s = elt.simplices
    if t_index >= len(s.entries) or s.entries[t_index].dim < 1:
        return None
    bp = is_box_point_of(full_lattice, class_rep, s)
    if bp is None:
        return None
    for row in elt.a:
        for a, c in zip(row, bp.c_tuple):
            if a < c:
                return None
    col = [row[t_index] for row in elt.a]
    if max(col) <= bp.c_tuple[t_index]:
        return None
    return bp


def kappa_apply(elt: CayleyElt, bp: BoxPoint, t_index: int) -> Subdivision:
    """Split a dilated polysimplex cell at the focus of its box point.

    Case 1 (the opposite facet keeps the box point): a plain gamma move.
    Case 2: the first-vertex slab, the two focus slabs, and one extra cell
    per facet-of-facet shared with another box-point-free facet."""
    s = elt.simplices
    j0 = t_index
    simp = s.entries[j0]
    col = [row[j0] for row in elt.a]
    i0 = col.index(max(col))
    v = simp.first_vertex
    f = simp.facet_opposite(0)
    f_tuple = s.replace(j0, f)
    host_l = s.lattice_l()

    if has_rep_in(bp.rep, f_tuple, host_l):
        return gamma_apply(elt, j0)

    x0 = bp.focus
    c = bp.c_tuple
    shrunk_row = tuple(a - cj for a, cj in zip(elt.a[i0], c))

    # gamma pieces at (i0, j0)
    p_prime = list(elt.p)
    p_prime[i0] = vadd(p_prime[i0], v)
    a_prime = [list(row) for row in elt.a]
    a_prime[i0][j0] -= 1
    u_prime = make_cayley(tuple(p_prime), s,
                          tuple(tuple(r) for r in a_prime))

    insert_pt = vadd(elt.p[i0], x0)
    p_sharp = elt.p[:i0] + (insert_pt,) + elt.p[i0:]
    a_sharp = elt.a[:i0] + (shrunk_row,) + elt.a[i0:]
    u_sharp = make_cayley(p_sharp, f_tuple, a_sharp)

    p_flat = tuple(p_prime[:i0]) + (insert_pt,) + tuple(p_prime[i0:])
    a_flat = (
        tuple(tuple(r) for r in a_prime[:i0])
        + (shrunk_row,)
        + tuple(tuple(r) for r in a_prime[i0:])
    )
    u_flat = make_cayley(p_flat, f_tuple, a_flat)

    cells = [u_prime, u_sharp, u_flat]

    p_dprime = elt.p[:i0] + (vadd(elt.p[i0], v),) + elt.p[i0:]
    a_dprime = elt.a[:i0] + (tuple(a_prime[i0]),) + elt.a[i0:]
    for g_tuple in _frak_G(s, bp, f_tuple):
        p_g = p_dprime[:i0] + (insert_pt,) + p_dprime[i0:]
        a_g = a_dprime[:i0] + (shrunk_row,) + a_dprime[i0:]
        cells.append(make_cayley(p_g, g_tuple, a_g))
    return make_subdivision(cells)


def _frak_G(s: SimplexTuple, bp: BoxPoint, f_tuple: SimplexTuple):
    """Facet tuples G of f_tuple shared with another member of the
    box-point-free facet family."""
    others = [
        face for _, _, face in _frak_tuples(s, bp)
        if face.key() != f_tuple.key()
    ]
    out = []
    for j, vi in simplex_facet_choices(f_tuple):
        g = f_tuple.replace(j, f_tuple.entries[j].facet_opposite(vi))
        ok = False
        for other in others:
            if all(
                set(gk.vertices) <= set(ok_.vertices)
                for gk, ok_ in zip(g.entries, other.entries)
            ):
                ok = True
                break
        if ok:
            out.append(g)
    return out


def kappa_rule(t_simplex, full_lattice: IntLattice, class_rep):
    """The kappa subdivision rule for one simplex parameter and one fixed
    nonzero class of Z^d modulo a full-dimensional lattice."""
    from .rewrite import SubdivisionRule

    tkey = t_simplex.key()

    def find_index(cell: CayleyElt):
        for j, simp in enumerate(cell.simplices.entries):
            if simp.key() == tkey:
                return j
        return None

    def applies(cell: CayleyElt) -> bool:
        j = find_index(cell)
        if j is None:
            return False
        return kappa_applicable(cell, full_lattice, class_rep, j) is not None

    def apply(cell: CayleyElt) -> Subdivision:
        j = find_index(cell)
        if j is None:
            raise InapplicableRuleError("simplex is not an entry")
        bp = kappa_applicable(cell, full_lattice, class_rep, j)
        if bp is None:
            raise InapplicableRuleError("cell is outside the kappa domain")
        return kappa_apply(cell, bp, j)

    return SubdivisionRule(name=("kappa", tkey), applies_to=applies,
                           apply=apply)
