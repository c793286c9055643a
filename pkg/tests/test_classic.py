import itertools
import random
from fractions import Fraction

import pytest

from unitri.classic import (
    DiceFamily,
    Hyperplane,
    PointConfig,
    dicing,
    fine_initial_triangulation,
    initial_triangulation,
    pull_rule,
    pulling_family,
    pulling_triangulation,
)
from unitri.errors import InapplicableRuleError, UnitriError
from unitri.geometry import hull, normalized_volume, vdot
from unitri.lattice import IntLattice, index
from unitri.rewrite import (
    check_facial_compatibility,
    check_local_confluence,
)
from unitri.verify import verify_triangulation, verify_unimodular


def test_pull_rule_square():
    cfg = PointConfig(((0, 0), (0, 1), (1, 0), (1, 1)))
    sub = pull_rule(cfg)
    cells = sorted(c.points for c in sub.max_cells)
    assert cells == [
        ((0, 0), (0, 1), (1, 1)),
        ((0, 0), (1, 0), (1, 1)),
    ]


def test_pull_rule_inapplicable_on_simplex():
    cfg = PointConfig(((0, 0), (1, 0), (0, 1)))
    with pytest.raises(InapplicableRuleError):
        pull_rule(cfg)


def test_pull_rule_collinear():
    # With the order (0), (1), (2) the first point whose removal keeps the
    # dimension is the endpoint (0): the pull cones it over the far vertex
    # and the interior point is simply not used.
    cfg = PointConfig(((0,), (1,), (2,)))
    sub = pull_rule(cfg)
    assert sorted(c.points for c in sub.max_cells) == [((0,), (2,))]

    # Listing the interior point first pulls at it and produces the two
    # unit segments.
    cfg2 = PointConfig(((1,), (0,), (2,)))
    sub2 = pull_rule(cfg2)
    assert sorted(tuple(sorted(c.points)) for c in sub2.max_cells) == [
        ((0,), (1,)), ((1,), (2,)),
    ]


def test_pulling_square():
    cfg = PointConfig(((0, 0), (0, 1), (1, 0), (1, 1)))
    sub = pulling_triangulation(cfg)
    assert len(sub.max_cells) == 2
    for c in sub.max_cells:
        assert c.is_affinely_independent()


def test_pulling_cube_six_unimodular_tetrahedra():
    pts = tuple(sorted(itertools.product((0, 1), repeat=3)))
    sub = pulling_triangulation(PointConfig(pts))
    cells = [c.points for c in sub.max_cells]
    assert len(cells) == 6
    rep = verify_unimodular(cells)
    assert rep.ok
    cube = hull(pts)
    rep2 = verify_triangulation(cube, cells)
    assert rep2.ok, rep2.summary()


def test_pulling_simplex_trivial():
    cfg = PointConfig(((0, 0), (1, 0), (0, 1)))
    sub = pulling_triangulation(cfg)
    assert sub.is_trivial_for(cfg)


def test_pulling_cells_use_input_points_only():
    rng = random.Random(12)
    for _ in range(10):
        pts = {tuple(rng.randint(0, 3) for _ in range(2))
               for _ in range(rng.randint(4, 7))}
        cfg = PointConfig(tuple(sorted(pts)))
        sub = pulling_triangulation(cfg)
        for cell in sub.max_cells:
            assert set(cell.points) <= pts
            assert cell.is_affinely_independent()


def test_hyperplane_validation():
    with pytest.raises(UnitriError):
        Hyperplane((0, 0), 1)
    with pytest.raises(UnitriError):
        Hyperplane((2, 4), 1)


def test_dicing_examples():
    box = hull([(0, 0), (2, 0), (0, 2), (2, 2)])
    one = dicing(box, [Hyperplane((1, 0), 1)])
    assert sorted(c.vertices for c in one.max_cells) == [
        ((0, 0), (0, 2), (1, 0), (1, 2)),
        ((1, 0), (1, 2), (2, 0), (2, 2)),
    ]

    four = dicing(box, [Hyperplane((1, 0), 1), Hyperplane((0, 1), 1)])
    assert len(four.max_cells) == 4

    missed = dicing(box, [Hyperplane((1, 0), 5)])
    assert missed.is_trivial_for(box)


def test_dicing_rational_cuts():
    tri = hull([(0, 0), (2, 0), (0, 2)])
    sub = dicing(tri, [Hyperplane((1, 0), 1)])
    cells = sorted(c.vertices for c in sub.max_cells)
    assert cells == [
        ((0, 0), (0, 2), (1, 0), (1, 1)),
        ((1, 0), (1, 1), (2, 0)),
    ]


def region_count_oracle(poly, planes, steps=4):
    """Count arrangement regions meeting the interior by sampling a fine
    rational grid and collecting strict sign vectors."""
    d = poly.ambient_dim
    lows = [min(v[i] for v in poly.vertices) for i in range(d)]
    highs = [max(v[i] for v in poly.vertices) for i in range(d)]
    signs = set()
    axes = [
        [Fraction(lo) + Fraction(k, steps) * (hi - lo)
         for k in range(steps + 1)]
        for lo, hi in zip(lows, highs)
    ]
    for pt in itertools.product(*axes):
        if not poly.contains(pt):
            continue
        vec = []
        for h in planes:
            val = vdot(h.normal, pt) - h.offset
            vec.append(0 if val == 0 else (1 if val > 0 else -1))
        if 0 in vec:
            continue
        signs.add(tuple(vec))
    return len(signs)


def test_dicing_region_count_oracle():
    rng = random.Random(21)
    for _ in range(8):
        d = rng.randint(2, 3)
        k = rng.randint(2, 4)
        corner = tuple(k for _ in range(d))
        box = hull(list(itertools.product(*[(0, k)] * d)))
        planes = []
        for _ in range(rng.randint(1, 2)):
            normal = [0] * d
            normal[rng.randrange(d)] = 1
            planes.append(Hyperplane(tuple(normal), rng.randint(1, k - 1)))
        planes = list({(h.normal, h.offset): h for h in planes}.values())
        sub = dicing(box, planes)
        assert len(sub.max_cells) == region_count_oracle(box, planes, 2 * k)


def test_dicing_cells_avoid_hyperplanes():
    box = hull([(0, 0), (2, 0), (0, 2), (2, 2)])
    planes = [Hyperplane((1, 0), 1), Hyperplane((1, 1), 2)]
    sub = dicing(box, planes)
    for cell in sub.max_cells:
        for h in planes:
            assert not h.strictly_crosses(cell)
    # supports add up
    from unitri.geometry import AffineFrame, affine_volume

    frame = AffineFrame(box.vertices)
    total = sum(affine_volume(c, frame) for c in sub.max_cells)
    assert total == affine_volume(box, frame)


def test_classic_families_health():
    rng = random.Random(31)
    pull_samples = []
    for _ in range(8):
        pts = {tuple(rng.randint(0, 2) for _ in range(2))
               for _ in range(rng.randint(4, 6))}
        if len(pts) >= 4:
            pull_samples.append(PointConfig(tuple(sorted(pts))))
    rep = check_local_confluence(pulling_family(), pull_samples)
    assert rep.ok
    rep = check_facial_compatibility(pulling_family(), pull_samples[:4])
    assert rep.ok

    box = hull([(0, 0), (2, 0), (0, 2), (2, 2)])
    fam = DiceFamily([Hyperplane((1, 0), 1), Hyperplane((0, 1), 1)])
    rep = check_local_confluence(fam, [box])
    assert rep.ok and rep.joinable >= 1
    rep = check_facial_compatibility(fam, [box])
    assert rep.ok


def test_initial_triangulation_integral():
    tri = hull([(0, 0), (2, 1), (1, 2)])
    cells = initial_triangulation(tri)
    rep = verify_triangulation(tri, cells)
    assert rep.ok, rep.summary()


def test_fine_initial_triangulation_is_empty_simplices():
    from unitri.classic import lattice_points

    tri = hull([(0, 0), (2, 1), (1, 2)])
    cells = fine_initial_triangulation(tri)
    assert len(cells) == 3
    rep = verify_triangulation(tri, cells)
    assert rep.ok, rep.summary()
    assert verify_unimodular(cells).ok
    for verts in cells:
        assert sorted(lattice_points(hull(verts))) == sorted(verts)

    spike = hull([(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 3)])
    cells3 = fine_initial_triangulation(spike)
    rep3 = verify_triangulation(spike, cells3)
    assert rep3.ok, rep3.summary()
    for verts in cells3:
        assert sorted(lattice_points(hull(verts))) == sorted(verts)
