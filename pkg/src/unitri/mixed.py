"""The mixed pipeline: coupled subdivisions of polytope pairs.

Cells are triples (p, S, a) x (q, S, b) x k: two Cayley tuples sharing the
simplex tuple S, plus a marker k splitting the columns into a locked block
(j < k, where the two sides move in step or dominate each other) and a free
block (j >= k, unit columns).  Two variants coexist: lockstep cells with
|p| = |q| and constant difference, and dominated cells with |q| = 1.

Six rules normalize any such cell to base form (|p| = 1, k = 0): three
lattice-preserving ones (paired splits, dominated splits, base-simplex
absorption) and three index-lowering ones driven by a fixed box-point class
(shelling, focus replacement, focus insertion).  Iterating base form ->
dilate-by-(c, d!) -> normalize shrinks the lattice multiset to {Z^d}; the
terminal pair complex then yields unimodular triangulations of every
(r c^N + s d!^N)-dilate at once."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import factorial, gcd

from .boxpoints import (
    BoxPoint,
    boxpoint_from_rep,
    has_rep_in,
    is_box_point_of,
)
from .cayley import CayleyElt, cay, lattice_of_elt, make_cayley
from .classic import initial_triangulation
from .complexes import Subdivision, make_subdivision
from .errors import (
    FrameworkViolationError,
    InapplicableRuleError,
    UnitriError,
)
from .geometry import (
    OrderedSimplex,
    Polytope,
    SimplexTuple,
    ordered_simplex_lex,
    vadd,
    vscale,
    vsub,
)
from .lattice import IntLattice, index, quotient, rank as int_rank
from .rewrite import DEFAULT_FUEL, RuleFamily, SubdivisionRule
from .cayley import gamma_family


# ---------------------------------------------------------------------------
# Elements
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DElt:
    """A pair cell in standard form (no point entries, no zero a-columns).
    Construct via make_delt."""

    p: tuple
    simplices: SimplexTuple
    a: tuple
    q: tuple
    b: tuple
    k: int

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
        return ("D", self.p, self.simplices.key(), self.a, self.q, self.b,
                self.k)

    def locked(self) -> SimplexTuple:
        """The first k entries (the block where box points live)."""
        return SimplexTuple(self.simplices.entries[: self.k])

    def side_u(self) -> CayleyElt:
        return CayleyElt(self.p, self.simplices, self.a)

    def side_v(self) -> CayleyElt:
        return make_cayley(self.q, self.simplices, self.b)

    def realize(self):
        return (cay(self.side_u()), cay(self.side_v()))

    def face_list(self):
        return _d_faces_cached(self)

    def in_m(self) -> bool:
        if len(self.p) != len(self.q):
            return False
        diff = vsub(self.p[0], self.q[0])
        if any(vsub(pi, qi) != diff
               for pi, qi in zip(self.p, self.q)):
            return False
        for j in range(self.n):
            acol = [row[j] for row in self.a]
            bcol = [row[j] for row in self.b]
            if j < self.k:
                if acol != bcol:
                    return False
            else:
                if any(x != 1 for x in acol):
                    return False
                if any(x != bcol[0] for x in bcol) or bcol[0] not in (0, 1):
                    return False
        return True

    def in_n(self) -> bool:
        if len(self.q) != 1:
            return False
        for j in range(self.n):
            b1 = self.b[0][j]
            if any(row[j] < b1 for row in self.a):
                return False
            if j >= self.k:
                if any(row[j] != 1 for row in self.a):
                    return False
                if b1 not in (0, 1):
                    return False
        return True

    def is_terminal(self) -> bool:
        return self.m == 1 and self.k == 0

    def __repr__(self):
        return (
            f"DElt(p={list(self.p)}, "
            f"S={[list(s.vertices) for s in self.simplices.entries]}, "
            f"a={[list(r) for r in self.a]}, q={list(self.q)}, "
            f"b={[list(r) for r in self.b]}, k={self.k})"
        )


def make_delt(p, simplices, a, q, b, k, validate: bool = False) -> DElt:
    """Reduce a raw pair triple to standard form.

    Point entries and (for the locked block) zero a-columns are absorbed
    into the base points on both sides; absorbing a locked column also
    decrements k."""
    pts = [tuple(x) for x in p]
    qts = [tuple(x) for x in q]
    entries = list(
        simplices.entries if isinstance(simplices, SimplexTuple)
        else simplices
    )
    amat = [list(row) for row in a]
    bmat = [list(row) for row in b]
    if len(amat) != len(pts) or len(bmat) != len(qts):
        raise UnitriError("matrix row counts do not match point tuples")
    if any(len(r) != len(entries) for r in amat + bmat):
        raise UnitriError("matrix column counts do not match S")
    if not 0 <= k <= len(entries):
        raise UnitriError("marker k out of range")
    changed = True
    while changed:
        changed = False
        for j, simp in enumerate(entries):
            col_zero = all(row[j] == 0 for row in amat)
            if j < k and (simp.is_point() or col_zero):
                if col_zero and any(row[j] != 0 for row in bmat):
                    raise UnitriError(
                        "zero a-column with nonzero b-column in the locked"
                        " block"
                    )
                v = simp.vertices[0]
                for i in range(len(pts)):
                    if amat[i][j]:
                        pts[i] = vadd(pts[i], vscale(amat[i][j], v))
                for i in range(len(qts)):
                    if bmat[i][j]:
                        qts[i] = vadd(qts[i], vscale(bmat[i][j], v))
                del entries[j]
                for row in amat:
                    del row[j]
                for row in bmat:
                    del row[j]
                k -= 1
                changed = True
                break
            if j >= k and simp.is_point():
                v = simp.vertices[0]
                for i in range(len(pts)):
                    if amat[i][j]:
                        pts[i] = vadd(pts[i], vscale(amat[i][j], v))
                for i in range(len(qts)):
                    if bmat[i][j]:
                        qts[i] = vadd(qts[i], vscale(bmat[i][j], v))
                del entries[j]
                for row in amat:
                    del row[j]
                for row in bmat:
                    del row[j]
                changed = True
                break
    elt = DElt(
        tuple(pts),
        SimplexTuple(tuple(entries)),
        tuple(tuple(r) for r in amat),
        tuple(qts),
        tuple(tuple(r) for r in bmat),
        k,
    )
    if not (elt.in_m() or elt.in_n()):
        raise UnitriError(f"element is in neither variant: {elt!r}")
    if validate:
        from .geometry import hull, in_cayley_position

        for side in (elt.side_u(), elt.side_v()):
            polys = [hull(pl) for pl in side.summands()]
            if not in_cayley_position(polys):
                raise UnitriError("summands are not in Cayley position")
    return elt


@lru_cache(maxsize=None)
def _d_faces_cached(elt: DElt):
    import itertools

    face_choices = [s.faces() for s in elt.simplices.entries]
    out = {}
    use_m = elt.in_m()
    for r in range(1, elt.m + 1):
        for subset in itertools.combinations(range(elt.m), r):
            for combo in itertools.product(*face_choices):
                if use_m:
                    f = make_delt(
                        tuple(elt.p[i] for i in subset),
                        SimplexTuple(tuple(combo)),
                        tuple(elt.a[i] for i in subset),
                        tuple(elt.q[i] for i in subset),
                        tuple(elt.b[i] for i in subset),
                        elt.k,
                    )
                else:
                    f = make_delt(
                        tuple(elt.p[i] for i in subset),
                        SimplexTuple(tuple(combo)),
                        tuple(elt.a[i] for i in subset),
                        elt.q,
                        elt.b,
                        elt.k,
                    )
                out.setdefault(f.key(), f)
    return tuple(out.values())


def d_faces(elt: DElt):
    return _d_faces_cached(elt)


def lattice_of_delt(elt: DElt) -> IntLattice:
    """L(A) := the lattice of the first component."""
    return lattice_of_elt(elt.side_u())


def delt_index(elt: DElt) -> int:
    return index(lattice_of_delt(elt))


def _first_vertex_edges(points, mat, entries):
    """Edge rows of the simplex of first-vertex corners."""
    corners = []
    for i, base in enumerate(points):
        w = base
        for j, simp in enumerate(entries):
            w = vadd(w, vscale(mat[i][j], simp.first_vertex))
        corners.append(w)
    return [vsub(w, corners[0]) for w in corners[1:]]


def _sum_dim(elt: DElt) -> int:
    """dim(Cay(U) + Cay(V)), computed combinatorially: the simplex
    directions plus both first-vertex corner simplices span the direction
    space (standard form guarantees the U side uses every entry)."""
    rows = [r for s in elt.simplices.entries for r in s.edge_rows()]
    rows += _first_vertex_edges(elt.p, elt.a, elt.simplices.entries)
    rows += _first_vertex_edges(elt.q, elt.b, elt.simplices.entries)
    if not rows:
        return 0
    return int_rank(tuple(rows))


def _top_dim_subdivision(cells, reference: DElt) -> Subdivision:
    """Subdivision from candidate max cells, keeping the full-dimensional
    ones (lower-dimensional candidates are faces of their neighbours)."""
    want = _sum_dim(reference)
    kept = tuple(c for c in cells if _sum_dim(c) == want)
    return Subdivision(kept)


# ---------------------------------------------------------------------------
# Lattice-preserving rules
# ---------------------------------------------------------------------------

def _gamma_data(p, a, j, entries):
    """Shared gamma bookkeeping on one side: (i, v, prime p, prime a)."""
    col = [row[j] for row in a]
    top = max(col)
    i = col.index(top)
    v = entries[j].first_vertex
    p_prime = list(p)
    p_prime[i] = vadd(p_prime[i], v)
    a_prime = [list(row) for row in a]
    a_prime[i][j] -= 1
    return i, v, tuple(p_prime), tuple(tuple(r) for r in a_prime)


def mu_applicable(elt: DElt, j: int) -> bool:
    return elt.in_m() and j < elt.k


def mu_apply(elt: DElt, j: int) -> Subdivision:
    """Lockstep split: both sides perform the same first-vertex split of
    entry j (the locked columns agree, so the split rows match)."""
    if not mu_applicable(elt, j):
        raise InapplicableRuleError("outside the lockstep domain")
    entries = elt.simplices.entries
    i, v, p_prime, a_prime = _gamma_data(elt.p, elt.a, j, entries)
    i_q, v_q, q_prime, b_prime = _gamma_data(elt.q, elt.b, j, entries)
    assert i == i_q
    f_tuple = elt.simplices.replace(j, entries[j].facet_opposite(0))
    cell_prime = make_delt(p_prime, elt.simplices, a_prime,
                           q_prime, b_prime, elt.k)
    p_dd = elt.p[:i] + (vadd(elt.p[i], v),) + elt.p[i:]
    a_dd = elt.a[:i] + (a_prime[i],) + elt.a[i:]
    q_dd = elt.q[:i] + (vadd(elt.q[i], v),) + elt.q[i:]
    b_dd = elt.b[:i] + (b_prime[i],) + elt.b[i:]
    cell_dd = make_delt(p_dd, f_tuple, a_dd, q_dd, b_dd, elt.k)
    col = [row[j] for row in elt.a]
    degenerate = elt.a[i][j] == 1 and all(
        x == 0 for t, x in enumerate(col) if t != i
    )
    if degenerate:
        return Subdivision((cell_dd,))
    return Subdivision((cell_prime, cell_dd))


def nu_applicable(elt: DElt, j: int) -> bool:
    if not elt.in_n() or j >= elt.k:
        return False
    b1 = elt.b[0][j]
    return any(row[j] > b1 for row in elt.a)


def nu_apply(elt: DElt, j: int) -> Subdivision:
    """Dominated split: the first component splits, the second restricts to
    the matching facet."""
    if not nu_applicable(elt, j):
        raise InapplicableRuleError("outside the dominated-split domain")
    entries = elt.simplices.entries
    i, v, p_prime, a_prime = _gamma_data(elt.p, elt.a, j, entries)
    f_tuple = elt.simplices.replace(j, entries[j].facet_opposite(0))
    cell_prime = make_delt(p_prime, elt.simplices, a_prime,
                           elt.q, elt.b, elt.k)
    p_dd = elt.p[:i] + (vadd(elt.p[i], v),) + elt.p[i:]
    a_dd = elt.a[:i] + (a_prime[i],) + elt.a[i:]
    cell_dd = make_delt(p_dd, f_tuple, a_dd, elt.q, elt.b, elt.k)
    col = [row[j] for row in elt.a]
    degenerate = elt.a[i][j] == 1 and all(
        x == 0 for t, x in enumerate(col) if t != i
    )
    if degenerate:
        return Subdivision((cell_dd,))
    return Subdivision((cell_prime, cell_dd))


def eps_applicable(elt: DElt) -> bool:
    if elt.m <= 1:
        return False
    if elt.in_m():
        return elt.k == 0
    if elt.in_n():
        return all(
            row[j] == elt.b[0][j] for row in elt.a for j in range(elt.k)
        )
    return False


def eps_apply(elt: DElt) -> Subdivision:
    """Absorb the base points into a fresh last entry: the rows all agree,
    so conv(p) is a simplex and the realization is unchanged."""
    if not eps_applicable(elt):
        raise InapplicableRuleError("outside the absorption domain")
    t_new = OrderedSimplex(elt.p)
    zero = tuple(0 for _ in range(elt.ambient_dim))
    new_s = SimplexTuple(elt.simplices.entries + (t_new,))
    a_row = elt.a[0] + (1,)
    if elt.in_m():
        cell = make_delt(
            (zero,), new_s, (a_row,),
            (vsub(elt.q[0], elt.p[0]),), (elt.b[0] + (1,),), elt.k,
        )
    else:
        cell = make_delt(
            (zero,), new_s, (a_row,),
            elt.q, (elt.b[0] + (0,),), elt.k,
        )
    return Subdivision((cell,))


# ---------------------------------------------------------------------------
# Index-lowering rules (fixed full-dimensional lattice and nonzero class)
# ---------------------------------------------------------------------------

def locked_box_point(elt: DElt, full_lattice: IntLattice, class_rep):
    """The box point of the locked block, identified on the full tuple S
    (the extra coordinates get c = 0), or None."""
    if elt.k == 0:
        return None
    bp = is_box_point_of(full_lattice, class_rep, elt.locked())
    if bp is None:
        return None
    if elt.k == elt.n:
        return bp
    return boxpoint_from_rep(elt.simplices, bp.rep)


def tau_applicable(elt: DElt, bp: BoxPoint, dfac: int) -> bool:
    if elt.m != 1:
        return False
    return all(
        elt.a[0][j] == dfac and elt.b[0][j] == dfac for j in range(elt.k)
    )


def tau_apply(elt: DElt, bp: BoxPoint, dfac: int) -> Subdivision:
    """Concentric shells on both sides simultaneously, peeling toward the
    focus; every output drops the box point and its index."""
    from .boxpoints import _frak_tuples

    c = bp.c_tuple
    n_shells = dfac // max(c)
    x0 = bp.focus
    p1, q1 = elt.p[0], elt.q[0]
    cells = []
    for r in range(1, n_shells + 1):
        pu = (vadd(p1, vscale(r, x0)), vadd(p1, vscale(r - 1, x0)))
        qu = (vadd(q1, vscale(r, x0)), vadd(q1, vscale(r - 1, x0)))
        a_out = tuple(x - r * cj for x, cj in zip(elt.a[0], c))
        a_in = tuple(x - (r - 1) * cj for x, cj in zip(elt.a[0], c))
        b_out = tuple(x - r * cj for x, cj in zip(elt.b[0], c))
        b_in = tuple(x - (r - 1) * cj for x, cj in zip(elt.b[0], c))
        for _, _, face in _frak_tuples(elt.simplices, bp):
            cells.append(
                make_delt(pu, face, (a_out, a_in), qu, (b_out, b_in),
                          elt.k)
            )
    return _top_dim_subdivision(cells, elt)


def sigma_applicable(elt: DElt, bp: BoxPoint, dfac: int) -> bool:
    if not elt.in_n():
        return False
    c = bp.c_tuple
    if any(elt.b[0][j] not in (0, dfac) for j in range(elt.k)):
        return False
    saw_shifted = False
    for row in elt.a:
        small = all(row[j] == elt.b[0][j] for j in range(elt.k))
        shifted = all(
            row[j] == elt.b[0][j] + c[j] for j in range(elt.k)
        )
        if shifted:
            saw_shifted = True
        if not (small or shifted):
            return False
    return saw_shifted


def sigma_apply(elt: DElt, bp: BoxPoint, dfac: int) -> Subdivision:
    """Replace the first focus-shifted row by its inner copy at the focus,
    and insert one slab per box-point-free facet."""
    from .boxpoints import _frak_tuples

    c = bp.c_tuple
    x0 = bp.focus
    i = next(
        t for t, row in enumerate(elt.a)
        if all(row[j] == elt.b[0][j] + c[j] for j in range(elt.k))
    )
    shrunk = tuple(x - cj for x, cj in zip(elt.a[i], c))
    insert_pt = vadd(elt.p[i], x0)

    p_star = elt.p[:i] + (insert_pt,) + elt.p[i + 1:]
    a_star = elt.a[:i] + (shrunk,) + elt.a[i + 1:]
    cells = [
        make_delt(p_star, elt.simplices, a_star, elt.q, elt.b, elt.k)
    ]
    p_sharp = elt.p[:i] + (insert_pt,) + elt.p[i:]
    a_sharp = elt.a[:i] + (shrunk,) + elt.a[i:]
    for _, _, face in _frak_tuples(elt.simplices, bp):
        cells.append(
            make_delt(p_sharp, face, a_sharp, elt.q, elt.b, elt.k)
        )
    return _top_dim_subdivision(cells, elt)


def rho_applicable(elt: DElt, bp: BoxPoint, dfac: int):
    """Returns the pivot column j0, or None."""
    if not elt.in_n():
        return None
    c = bp.c_tuple
    if any(elt.b[0][j] not in (0, dfac) for j in range(elt.k)):
        return None
    for row in elt.a:
        for j in range(elt.k):
            if row[j] < elt.b[0][j] + c[j]:
                return None
    for j in range(elt.k):
        if any(row[j] > elt.b[0][j] + c[j] for row in elt.a):
            return j
    return None


def rho_apply(elt: DElt, bp: BoxPoint, dfac: int, j0: int) -> Subdivision:
    """Focus insertion at the dominant row of the pivot column; falls back
    to the dominated split when the opposite facet keeps the box point."""
    from .boxpoints import _frak_tuples

    s = elt.simplices
    simp = s.entries[j0]
    f_tuple = s.replace(j0, simp.facet_opposite(0))
    host_l = s.lattice_l()
    if has_rep_in(bp.rep, f_tuple, host_l):
        return nu_apply(elt, j0)

    entries = s.entries
    i0, v, p_prime, a_prime = _gamma_data(elt.p, elt.a, j0, entries)
    c = bp.c_tuple
    x0 = bp.focus
    shrunk = tuple(x - cj for x, cj in zip(elt.a[i0], c))
    insert_pt = vadd(elt.p[i0], x0)

    cells = [
        make_delt(p_prime, s, a_prime, elt.q, elt.b, elt.k)
    ]
    p_sharp = elt.p[:i0] + (insert_pt,) + elt.p[i0:]
    a_sharp = elt.a[:i0] + (shrunk,) + elt.a[i0:]
    cells.append(make_delt(p_sharp, f_tuple, a_sharp, elt.q, elt.b, elt.k))
    p_flat = p_prime[:i0] + (insert_pt,) + p_prime[i0:]
    a_flat = a_prime[:i0] + (shrunk,) + a_prime[i0:]
    cells.append(make_delt(p_flat, f_tuple, a_flat, elt.q, elt.b, elt.k))

    p_dd = elt.p[:i0] + (vadd(elt.p[i0], v),) + elt.p[i0:]
    a_dd = elt.a[:i0] + (a_prime[i0],) + elt.a[i0:]
    others = [
        face for _, _, face in _frak_tuples(s, bp)
        if face.key() != f_tuple.key()
    ]
    from .geometry import simplex_facet_choices

    for j, vi in simplex_facet_choices(f_tuple):
        g = f_tuple.replace(j, f_tuple.entries[j].facet_opposite(vi))
        shared = any(
            all(
                set(gk.vertices) <= set(ok.vertices)
                for gk, ok in zip(g.entries, other.entries)
            )
            for other in others
        )
        if not shared:
            continue
        p_g = p_dd[:i0] + (insert_pt,) + p_dd[i0:]
        a_g = a_dd[:i0] + (shrunk,) + a_dd[i0:]
        cells.append(make_delt(p_g, g, a_g, elt.q, elt.b, elt.k))
    return _top_dim_subdivision(cells, elt)


# ---------------------------------------------------------------------------
# The rule family
# ---------------------------------------------------------------------------

class MixedFamily(RuleFamily):
    """The six-rule family for one fixed (lattice, class) pair.

    On cells carrying the box point exactly one rule applies (the four
    bullet sets partition); on the rest, absorption plus the dominated and
    lockstep splits apply.  Terminal cells have |p| = 1 and k = 0."""

    def __init__(self, full_lattice: IntLattice, class_rep, d: int):
        self.full_lattice = full_lattice
        self.class_rep = tuple(class_rep)
        self.d = d
        self.dfac = factorial(d)

    def is_terminal(self, cell: DElt) -> bool:
        return cell.is_terminal()

    def _eps_rule(self):
        return SubdivisionRule(
            name=(0, "eps"),
            applies_to=eps_applicable,
            apply=eps_apply,
        )

    def _rho_rule(self):
        def applies(cell):
            bp = locked_box_point(cell, self.full_lattice, self.class_rep)
            return bp is not None and rho_applicable(
                cell, bp, self.dfac
            ) is not None

        def apply(cell):
            bp = locked_box_point(cell, self.full_lattice, self.class_rep)
            j0 = rho_applicable(cell, bp, self.dfac)
            if j0 is None:
                raise InapplicableRuleError("outside the rho domain")
            return rho_apply(cell, bp, self.dfac, j0)

        return SubdivisionRule(name=(1, "rho"), applies_to=applies,
                               apply=apply)

    def _sigma_rule(self):
        def applies(cell):
            bp = locked_box_point(cell, self.full_lattice, self.class_rep)
            return bp is not None and sigma_applicable(cell, bp, self.dfac)

        def apply(cell):
            bp = locked_box_point(cell, self.full_lattice, self.class_rep)
            if bp is None or not sigma_applicable(cell, bp, self.dfac):
                raise InapplicableRuleError("outside the sigma domain")
            return sigma_apply(cell, bp, self.dfac)

        return SubdivisionRule(name=(2, "sigma"), applies_to=applies,
                               apply=apply)

    def _tau_rule(self):
        def applies(cell):
            bp = locked_box_point(cell, self.full_lattice, self.class_rep)
            return bp is not None and tau_applicable(cell, bp, self.dfac)

        def apply(cell):
            bp = locked_box_point(cell, self.full_lattice, self.class_rep)
            if bp is None or not tau_applicable(cell, bp, self.dfac):
                raise InapplicableRuleError("outside the tau domain")
            return tau_apply(cell, bp, self.dfac)

        return SubdivisionRule(name=(3, "tau"), applies_to=applies,
                               apply=apply)

    def _nu_rule(self, j: int, tkey):
        return SubdivisionRule(
            name=(4, "nu", tkey),
            applies_to=lambda c: _find_locked(c, tkey) is not None
            and nu_applicable(c, _find_locked(c, tkey)),
            apply=lambda c: nu_apply(c, _find_locked(c, tkey)),
        )

    def _mu_rule(self, j: int, tkey):
        return SubdivisionRule(
            name=(5, "mu", tkey),
            applies_to=lambda c: _find_locked(c, tkey) is not None
            and mu_applicable(c, _find_locked(c, tkey)),
            apply=lambda c: mu_apply(c, _find_locked(c, tkey)),
        )

    def rules_for(self, cell: DElt):
        if cell.is_terminal():
            return ()
        bp = locked_box_point(cell, self.full_lattice, self.class_rep)
        if bp is not None:
            if not cell.in_n():
                raise FrameworkViolationError(
                    f"box-point cell outside the dominated variant: {cell!r}"
                )
            if any(cell.b[0][j] not in (0, self.dfac)
                   for j in range(cell.k)):
                raise FrameworkViolationError(
                    f"box-point cell with bad locked b-entries: {cell!r}"
                )
            if eps_applicable(cell):
                return (self._eps_rule(),)
            if rho_applicable(cell, bp, self.dfac) is not None:
                return (self._rho_rule(),)
            if sigma_applicable(cell, bp, self.dfac):
                return (self._sigma_rule(),)
            if tau_applicable(cell, bp, self.dfac):
                return (self._tau_rule(),)
            raise FrameworkViolationError(
                f"box-point cell matches no rule: {cell!r}"
            )
        out = []
        if eps_applicable(cell):
            out.append(self._eps_rule())
        for j in range(cell.k):
            if nu_applicable(cell, j):
                out.append(self._nu_rule(j, cell.simplices.entries[j].key()))
        if cell.in_m():
            for j in range(cell.k):
                out.append(self._mu_rule(j, cell.simplices.entries[j].key()))
        return tuple(sorted(out, key=lambda r: r.name))


def _find_locked(cell: DElt, tkey):
    for j in range(cell.k):
        if cell.simplices.entries[j].key() == tkey:
            return j
    return None


def Delta_x(elt: DElt, full_lattice: IntLattice, class_rep, d: int,
            fuel: int = DEFAULT_FUEL) -> Subdivision:
    family = MixedFamily(full_lattice, class_rep, d)
    return family.canonical(elt, fuel=fuel)


# ---------------------------------------------------------------------------
# theta, omega, the pipeline
# ---------------------------------------------------------------------------

def theta(elt: DElt, c: int, d: int) -> DElt:
    """Dilate a base cell by c on the first side and d! on the second, and
    lock every column."""
    if not elt.is_terminal():
        raise UnitriError("theta needs base-form cells (|p| = 1, k = 0)")
    if c < factorial(d) + d:
        raise UnitriError("dilation constant must be at least d! + d")
    dfac = factorial(d)
    return make_delt(
        (vscale(c, elt.p[0]),),
        elt.simplices,
        (tuple(c * x for x in elt.a[0]),),
        (vscale(dfac, elt.q[0]),),
        (tuple(dfac * x for x in elt.b[0]),),
        elt.n,
    )


def omega(elt: DElt, r: int, s: int) -> CayleyElt:
    """Collapse a base cell to the (r, s)-combination of its two sides."""
    if not elt.is_terminal():
        raise UnitriError("omega needs base-form cells")
    if r < 0 or s < 0 or (r == 0 and s == 0):
        raise UnitriError("need nonnegative (r, s), not both zero")
    point = vadd(vscale(r, elt.p[0]), vscale(s, elt.q[0]))
    arow = tuple(r * x + s * y for x, y in zip(elt.a[0], elt.b[0]))
    return make_cayley((point,), elt.simplices, (arow,))


def semigroup_threshold(c_n: int, d_n: int) -> int:
    """Least bound above which every integer is r*c_n + s*d_n (Chicken
    McNugget); requires coprime inputs."""
    if gcd(c_n, d_n) != 1:
        raise UnitriError("threshold needs coprime dilation constants")
    if c_n == 1 or d_n == 1:
        return 0
    return (c_n - 1) * (d_n - 1)


def default_constant(d: int) -> int:
    """Smallest c >= d! + d coprime to d!."""
    c = factorial(d) + d
    while gcd(c, factorial(d)) != 1:
        c += 1
    return c


@dataclass
class DilationFamily:
    """Terminal pair complex of the main pipeline plus everything needed to
    realize unimodular triangulations of (r c^N + s d!^N) P."""

    d: int
    c: int
    rounds: int
    polytope: Polytope
    cells: list
    lattice_trace: list = field(default_factory=list)

    @property
    def pair(self):
        return (self.c ** self.rounds, factorial(self.d) ** self.rounds)

    def threshold(self):
        c_n, d_n = self.pair
        return semigroup_threshold(c_n, d_n)

    def triangulation(self, r: int, s: int,
                      fuel: int = DEFAULT_FUEL) -> list:
        """A unimodular triangulation of (r c^N + s d!^N) P as ordered
        simplices."""
        fam = gamma_family()
        out = {}
        for cell in self.cells:
            w = omega(cell, r, s)
            sub = fam.canonical(w, fuel=fuel)
            for term in sub.max_cells:
                simplex = ordered_simplex_lex(cay(term).vertices)
                out.setdefault(simplex.key(), simplex)
        # omega can collapse cells (notably when r or s is 0); the images of
        # the collapsed ones are faces of full-dimensional neighbours
        return [s_ for s_ in out.values() if s_.dim == self.d]


@lru_cache(maxsize=None)
def _irreducible_key(lattice_basis, ambient_dim, edge_key) -> bool:
    lat = IntLattice(ambient_dim, lattice_basis)
    if index(lat) == 1:
        return False
    s = None
    from .boxpoints import _reconstruct

    s = _reconstruct(edge_key, ambient_dim)
    g = quotient(IntLattice.standard(ambient_dim), lat)
    for res in g.nonzero_elements():
        if is_box_point_of(lat, g.section(res), s) is not None:
            return False
    return True


def irreducible(cell: DElt) -> bool:
    """A cell with a bad lattice none of whose nonzero classes is a box
    point of its tuple can never be reduced by any later round."""
    lat = lattice_of_delt(cell)
    return _irreducible_key(lat.basis, cell.ambient_dim,
                            cell.simplices.edge_key())


def _candidate_classes(cells):
    """(lattice, class representative, residues) for every bad lattice of
    the cell set and every nonzero class, in canonical order."""
    lat_by_basis = {}
    for cell in cells:
        lat = lattice_of_delt(cell)
        lat_by_basis[lat.basis] = lat
    bad = sorted(
        (l for l in lat_by_basis.values() if index(l) > 1),
        key=lambda l: (-index(l), l.basis),
    )
    out = []
    for lat in bad:
        g = quotient(IntLattice.standard(lat.ambient_dim), lat)
        for res in g.nonzero_elements():
            out.append((lat, g.section(res), res))
    return out, {l.basis for l in bad}


def _run_round(cells, c: int, d: int, fuel: int):
    """One dilation round, trying every (lattice, class) candidate and
    keeping the best outcome.

    The freedom of choice is the paper's; rejecting candidates whose output
    contains a permanently stuck cell, then maximizing the number of bad
    lattices removed, keeps the pipeline short and terminating."""
    candidates, bad_in = _candidate_classes(cells)
    best = None
    for lat, z, res in candidates:
        family = MixedFamily(lat, z, d)
        out = {}
        try:
            for cell in cells:
                dilated = theta(cell, c, d)
                for term in family.canonical(dilated, fuel=fuel).max_cells:
                    out.setdefault(term.key(), term)
        except FrameworkViolationError:
            continue
        new_cells = list(out.values())
        stuck = sum(1 for cl in new_cells if irreducible(cl))
        bad_out = {
            lattice_of_delt(cl).basis
            for cl in new_cells
            if index(lattice_of_delt(cl)) > 1
        }
        score = (
            stuck > 0,
            len(bad_out),
            -len(bad_in - bad_out),
            -index(lat),
            lat.basis,
            res,
        )
        if best is None or score < best[0]:
            best = (score, new_cells, stuck)
    if best is None:
        raise FrameworkViolationError("every round candidate failed")
    if best[2]:
        raise FrameworkViolationError(
            "every round candidate leaves a permanently stuck cell; "
            "the chosen input triangulation cannot be completed"
        )
    return best[1]


def main_pipeline(poly: Polytope, c: int | None = None,
                  fuel: int = DEFAULT_FUEL, dim_cap: int = 3,
                  max_rounds: int = 64,
                  fine_start: bool = False) -> DilationFamily:
    """Iterate dilate-and-normalize until the lattice multiset is {Z^d}.

    fine_start seeds from the pulling triangulation of all lattice points
    (smallest available starting indices); turning it off uses the vertex
    pulling triangulation, which exercises more rounds."""
    d = poly.ambient_dim
    if poly.dim != d:
        raise UnitriError("input polytope must be full-dimensional")
    if d > dim_cap:
        raise UnitriError(
            f"dimension {d} above the cap {dim_cap}; raise dim_cap to force"
        )
    if c is None:
        c = default_constant(d)
    if c < factorial(d) + d:
        raise UnitriError("dilation constant must be at least d! + d")
    zero = tuple(0 for _ in range(d))
    from .classic import fine_initial_triangulation

    seeds = (
        fine_initial_triangulation(poly) if fine_start
        else initial_triangulation(poly)
    )
    cells = []
    for pts in seeds:
        t = ordered_simplex_lex(pts)
        cells.append(
            make_delt((zero,), SimplexTuple((t,)), ((1,),),
                      (zero,), ((1,),), 0)
        )
    trace = []
    rounds = 0
    while True:
        lattices = {}
        for cell in cells:
            lat = lattice_of_delt(cell)
            lattices[lat.basis] = lat
        trace.append(sorted(index(l) for l in lattices.values()))
        if all(index(l) == 1 for l in lattices.values()):
            break
        if rounds >= max_rounds:
            raise UnitriError("round cap exceeded")
        cells = _run_round(cells, c, d, fuel)
        rounds += 1
    return DilationFamily(
        d=d, c=c, rounds=rounds, polytope=poly, cells=cells,
        lattice_trace=trace,
    )
