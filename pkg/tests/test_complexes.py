from dataclasses import dataclass

import pytest

from unitri.cayley import Gamma, cay, make_cayley
from unitri.complexes import (
    CellComplex,
    NonConvexSupport,
    Subdivision,
    closure,
    refine,
    restriction,
    trivial_subdivision,
    validate_complex,
)
from unitri.errors import FrameworkViolationError
from unitri.geometry import (
    OrderedSimplex,
    Polytope,
    SimplexTuple,
    hull,
    normalized_volume,
)


def test_closure_counts():
    square = hull([(0, 0), (1, 0), (0, 1), (1, 1)])
    comp = closure([square])
    assert len(comp) == 9

    pt = hull([(7, 7)])
    assert len(closure([pt])) == 1

    t1 = hull([(0, 0), (1, 0), (1, 1)])
    t2 = hull([(0, 0), (0, 1), (1, 1)])
    comp = closure([t1, t2])
    # 2 triangles + 5 edges + 4 vertices
    assert len(comp) == 11
    validate_complex(comp, check_interiors=True)


def test_closure_idempotent():
    square = hull([(0, 0), (1, 0), (0, 1), (1, 1)])
    comp = closure([square])
    again = closure(list(comp))
    assert comp == again


def test_max_cells():
    t1 = hull([(0, 0), (1, 0), (1, 1)])
    t2 = hull([(0, 0), (0, 1), (1, 1)])
    comp = closure([t1, t2])
    assert sorted(c.vertices for c in comp.max_cells()) == sorted(
        [t1.vertices, t2.vertices]
    )


def test_support_trivial():
    square = hull([(0, 0), (1, 0), (0, 1), (1, 1)])
    comp = trivial_subdivision(square).complex()
    assert comp.support() == square


def test_support_two_squares_side_by_side():
    s1 = hull([(0, 0), (1, 0), (0, 1), (1, 1)])
    s2 = hull([(1, 0), (2, 0), (1, 1), (2, 1)])
    comp = closure([s1, s2])
    assert comp.support() == hull([(0, 0), (2, 0), (0, 1), (2, 1)])


def test_support_l_shape_marker():
    s1 = hull([(0, 0), (1, 0), (0, 1), (1, 1)])
    s2 = hull([(1, 0), (2, 0), (1, 1), (2, 1)])
    s3 = hull([(0, 1), (1, 1), (0, 2), (1, 2)])
    comp = closure([s1, s2, s3])
    assert comp.support() == NonConvexSupport()


def test_volume_additivity_over_subdivision():
    tri = hull([(0, 0), (2, 1), (1, 2)])
    e = make_cayley(((0, 0),),
                    SimplexTuple((OrderedSimplex(((0, 0), (2, 1), (1, 2))),)),
                    ((2,),))
    sub = Gamma(e)
    total = sum(normalized_volume(cay(c)) for c in sub.max_cells)
    assert total == normalized_volume(tri.dilate(2))


@dataclass(frozen=True)
class PairCell:
    """Minimal two-component cell for exercising the generic machinery."""

    left: Polytope
    right: Polytope

    def key(self):
        return ("pair", self.left.vertices, self.right.vertices)

    def realize(self):
        return (self.left, self.right)

    def face_list(self):
        from unitri.geometry import faces, minkowski_sum

        out = []
        total_faces = faces(minkowski_sum(self.left, self.right))
        for f1 in faces(self.left):
            for f2 in faces(self.right):
                if minkowski_sum(f1, f2) in total_faces:
                    out.append(PairCell(f1, f2))
        return out


def test_n_support_single_max_cell():
    seg = hull([(0,), (1,)])
    pt = hull([(1,)])
    cell = PairCell(seg, pt)
    sub = Subdivision((cell,))
    assert sub.n_support() == (seg, pt)


def test_n_support_mixed_subdivision_of_segment_pair():
    seg01 = hull([(0,), (1,)])
    cells = [
        PairCell(seg01, hull([(1,)])),
        PairCell(hull([(0,)]), seg01),
    ]
    comp = CellComplex.closure(cells)
    assert comp.n_support() == (seg01, seg01)
    assert comp.support() == hull([(0,), (2,)])


def test_restriction_examples():
    t1 = hull([(0, 0), (1, 0), (1, 1)])
    t2 = hull([(0, 0), (0, 1), (1, 1)])
    sub = Subdivision((t1, t2))
    # restriction to the whole support is the subdivision itself
    square = hull([(0, 0), (1, 0), (0, 1), (1, 1)])
    whole = restriction(sub, square)
    assert whole.key_set() == sub.key_set()
    # restriction to the uncut bottom edge is trivial
    bottom = hull([(0, 0), (1, 0)])
    res = restriction(sub, bottom)
    assert res.key_set() == {bottom.key()}
    # restriction to a vertex
    v = hull([(1, 1)])
    assert restriction(sub, v).key_set() == {v.key()}


def test_restriction_missing_raises():
    t1 = hull([(0, 0), (1, 0), (1, 1)])
    sub = Subdivision((t1,))
    outside = hull([(5, 5)])
    with pytest.raises(FrameworkViolationError):
        restriction(sub, outside)


def test_refine_trivial_sigma_is_identity():
    t1 = hull([(0, 0), (1, 0), (1, 1)])
    t2 = hull([(0, 0), (0, 1), (1, 1)])
    comp = closure([t1, t2])
    refined = refine(trivial_subdivision, comp)
    assert refined == comp


def test_refine_gluing_of_adjacent_dilated_segments():
    seg = OrderedSimplex(((0,), (1,)))
    e1 = make_cayley(((0,),), SimplexTuple((seg,)), ((2,),))
    e2 = make_cayley(((2,),), SimplexTuple((seg,)), ((2,),))
    comp = closure([e1, e2])
    refined = refine(Gamma, comp)
    validate_complex(refined)
    sups = sorted(cay(c).vertices for c in refined.max_cells())
    assert sups == [((0,), (1,)), ((1,), (2,)), ((2,), (3,)), ((3,), (4,))]
    # the shared vertex cell appears exactly once
    shared = [c for c in refined if cay(c).vertices == ((2,),)]
    assert len(shared) == 1
    assert refined.support() == hull([(0,), (4,)])


def test_refine_single_cell_is_sigma():
    seg = OrderedSimplex(((0,), (1,)))
    e = make_cayley(((0,),), SimplexTuple((seg,)), ((3,),))
    comp = closure([e])
    refined = refine(Gamma, comp)
    assert refined == Gamma(e).complex()


def test_restriction_commutes_with_refine():
    seg = OrderedSimplex(((0,), (1,)))
    e = make_cayley(((0,),), SimplexTuple((seg,)), ((3,),))
    sub = Gamma(e)
    for face in e.face_list():
        if face.key() == e.key():
            continue
        restricted = restriction(sub, face)
        direct = Gamma(face)
        assert restricted.key_set() == direct.key_set()
