import random

import pytest

from unitri.cayley import Gamma, cay, elt_index, gamma_family, make_cayley
from unitri.complexes import Subdivision, trivial_subdivision
from unitri.errors import FuelExhaustedError, InapplicableRuleError
from unitri.geometry import OrderedSimplex, SimplexTuple, hull
from unitri.rewrite import (
    RuleFamily,
    SubdivisionRule,
    canonical_subdivision,
    check_facial_compatibility,
    check_local_confluence,
    is_terminal,
    move,
    normalize,
)

from conftest import random_cayley


def seg_cell(base, coeff):
    seg = OrderedSimplex(((0,), (1,)))
    return make_cayley(((base,),), SimplexTuple((seg,)), ((coeff,),))


def test_move_gamma_on_dilated_segment():
    e = seg_cell(0, 2)
    fam = gamma_family()
    rule = fam.rules_for(e)[0]
    cells = {e.key(): e}
    out = move(cells, e, rule)
    realized = sorted(cay(c).vertices for c in out.values())
    assert realized == [((0,), (1,)), ((1,), (2,))]


def test_move_single_max_for_unit_coefficient():
    e = seg_cell(0, 1)
    fam = gamma_family()
    rule = fam.rules_for(e)[0]
    out = move({e.key(): e}, e, rule)
    assert len(out) == 1
    assert cay(next(iter(out.values()))).vertices == ((0,), (1,))


def test_move_requires_membership():
    e = seg_cell(0, 2)
    other = seg_cell(5, 2)
    fam = gamma_family()
    rule = fam.rules_for(e)[0]
    with pytest.raises(InapplicableRuleError):
        move({e.key(): e}, other, rule)


def test_trivial_rule_keeps_set():
    e = seg_cell(0, 2)
    rule = SubdivisionRule(
        name=("idle",),
        applies_to=lambda c: True,
        apply=trivial_subdivision,
    )
    out = move({e.key(): e}, e, rule)
    assert out == {e.key(): e}


def test_is_terminal():
    fam = gamma_family()
    point_cell = make_cayley(((3, 4),), SimplexTuple(()), ((),))
    assert is_terminal(point_cell, fam)
    assert not is_terminal(seg_cell(0, 2), fam)

    class Empty(RuleFamily):
        rules = ()

    assert is_terminal(seg_cell(0, 2), Empty())


def test_terminal_via_trivial_rule():
    e = seg_cell(0, 2)

    class Idle(RuleFamily):
        rules = (
            SubdivisionRule(("idle",), lambda c: True, trivial_subdivision),
        )

    assert is_terminal(e, Idle())
    assert normalize(e, Idle()) == {e.key(): e}


def test_normalize_examples():
    term = normalize(seg_cell(0, 3), gamma_family())
    assert sorted(cay(c).vertices for c in term.values()) == [
        ((0,), (1,)), ((1,), (2,)), ((2,), (3,)),
    ]

    tri = OrderedSimplex(((0, 0), (1, 0), (0, 1)))
    e = make_cayley(((0, 0),), SimplexTuple((tri,)), ((2,),))
    term = normalize(e, gamma_family())
    assert len(term) == 4
    assert all(elt_index(c) == 1 for c in term.values())


def test_canonical_subdivision_terminal_is_trivial():
    pt = make_cayley(((1,),), SimplexTuple(()), ((),))
    sub = canonical_subdivision(pt, gamma_family())
    assert sub.is_trivial_for(pt)


def test_fuel_exhaustion():
    with pytest.raises(FuelExhaustedError):
        normalize(seg_cell(0, 50), gamma_family(), fuel=3)


def test_strategy_independence(rng):
    fam = gamma_family()
    sampler = random.Random(99)
    for _ in range(40):
        e = random_cayley(sampler)
        base = frozenset(normalize(e, fam))
        for seed in (1, 2, 3):
            r = random.Random(seed)
            assert frozenset(normalize(e, fam, rng=r)) == base


def test_local_confluence_gamma(rng):
    sampler = random.Random(5)
    samples = [random_cayley(sampler) for _ in range(15)]
    report = check_local_confluence(gamma_family(), samples)
    assert report.ok
    assert report.inconclusive == []


def test_facial_compatibility_gamma():
    sampler = random.Random(6)
    samples = [random_cayley(sampler, max_coeff=2) for _ in range(8)]
    report = check_facial_compatibility(gamma_family(), samples)
    assert report.ok


def test_single_rule_vacuous_confluence():
    e = seg_cell(0, 2)

    class One(RuleFamily):
        def rules_for(self, cell):
            fam = gamma_family()
            rules = fam.rules_for(cell)
            return rules[:1]

    report = check_local_confluence(One(), [e])
    # only one move exists: nothing to join
    assert report.checked == 0 and report.ok
