import itertools
import random
from fractions import Fraction
from math import gcd

import pytest

from unitri.lattice import (
    IntLattice,
    hermite_normal_form,
    index,
    int_row_kernel,
    invariant_factors,
    inverse_unimodular,
    lattice_distance,
    mat_mul,
    matrix_rank_rational,
    quotient,
    rank,
    saturation,
    smith_normal_form,
    solve_left,
    solve_left_rational,
)
from unitri.errors import UnitriError


# --- independent oracles ----------------------------------------------------

def det(m):
    n = len(m)
    if n == 0:
        return 1
    total = 0
    for perm in itertools.permutations(range(n)):
        sign = 1
        seen = list(perm)
        for i in range(n):
            for j in range(i + 1, n):
                if seen[i] > seen[j]:
                    sign = -sign
        term = sign
        for i in range(n):
            term *= m[i][perm[i]]
        total += term
    return total


def minor_gcd_invariant_factors(m):
    """Invariant factors via gcds of k x k minors (classical oracle)."""
    nrows, ncols = len(m), len(m[0]) if m else 0
    facs = []
    prev = 1
    for k in range(1, min(nrows, ncols) + 1):
        g = 0
        for ris in itertools.combinations(range(nrows), k):
            for cis in itertools.combinations(range(ncols), k):
                sub = [[m[i][j] for j in cis] for i in ris]
                g = gcd(g, abs(det(sub)))
        if g == 0:
            break
        facs.append(g // prev)
        prev = g
    return tuple(facs)


def is_unimodular(m):
    return abs(det(m)) == 1


def random_matrix(rng, nrows, ncols, bound=5):
    return tuple(
        tuple(rng.randint(-bound, bound) for _ in range(ncols))
        for _ in range(nrows)
    )


# --- Hermite ----------------------------------------------------------------

def test_hnf_example():
    h, u = hermite_normal_form(((2, 1), (1, 2)))
    assert h == ((1, 2), (0, 3))
    assert mat_mul(u, ((2, 1), (1, 2))) == h
    assert is_unimodular(u)


def test_hnf_identity():
    h, u = hermite_normal_form(((1, 0), (0, 1)))
    assert h == ((1, 0), (0, 1))


def test_hnf_zero_row():
    h, u = hermite_normal_form(((0, 0, 0),))
    assert h == ((0, 0, 0),)
    assert rank(((0, 0, 0),)) == 0


def test_hnf_random_roundtrip():
    rng = random.Random(7)
    for _ in range(60):
        m = random_matrix(rng, rng.randint(1, 4), rng.randint(1, 4))
        h, u = hermite_normal_form(m)
        assert mat_mul(u, m) == h
        assert is_unimodular(u)
        # pivot structure: positive pivots, zeros below, reduced above
        pivots = []
        for row in h:
            nz = next((j for j, a in enumerate(row) if a), None)
            if nz is not None:
                assert row[nz] > 0
                pivots.append(nz)
        assert pivots == sorted(pivots) and len(set(pivots)) == len(pivots)


# --- Smith ------------------------------------------------------------------

def test_snf_examples():
    d, u, v = smith_normal_form(((2, 0), (0, 3)))
    assert (d[0][0], d[1][1]) == (1, 6)
    assert invariant_factors(((2, 0), (0, 3))) == minor_gcd_invariant_factors(
        ((2, 0), (0, 3))
    )

    d, u, v = smith_normal_form(((1, 0), (0, 1)))
    assert d == ((1, 0), (0, 1))

    assert invariant_factors(((2, 1), (1, 2))) == (1, 3)
    assert minor_gcd_invariant_factors(((2, 1), (1, 2))) == (1, 3)


def test_snf_random_roundtrip_and_oracle():
    rng = random.Random(11)
    for _ in range(60):
        m = random_matrix(rng, rng.randint(1, 4), rng.randint(1, 4))
        d, u, v = smith_normal_form(m)
        assert mat_mul(mat_mul(u, m), v) == d
        assert is_unimodular(u) and is_unimodular(v)
        diag = [d[i][i] for i in range(min(len(d), len(d[0])))]
        for i in range(len(diag) - 1):
            assert diag[i] >= 0
            if diag[i] and diag[i + 1]:
                assert diag[i + 1] % diag[i] == 0
        assert invariant_factors(m) == minor_gcd_invariant_factors(m)


def test_inverse_unimodular():
    rng = random.Random(3)
    for _ in range(20):
        m = random_matrix(rng, 3, 3, 3)
        if not is_unimodular(m):
            continue
        inv = inverse_unimodular(m)
        assert mat_mul(inv, m) == ((1, 0, 0), (0, 1, 0), (0, 0, 1))


# --- solving / kernels --------------------------------------------------------

def test_solve_left():
    m = ((2, 1), (1, 2))
    y = solve_left(m, (3, 3))
    assert y is not None and tuple(
        sum(a * b for a, b in zip(y, col)) for col in zip(*m)
    ) == (3, 3)
    assert solve_left(m, (1, 0)) is None


def test_solve_left_rational():
    m = ((2, 0), (0, 3))
    y = solve_left_rational(m, (1, 1))
    assert y == (Fraction(1, 2), Fraction(1, 3))
    assert solve_left_rational(((1, 0),), (0, 1)) is None


def test_int_row_kernel():
    m = ((1, 2), (2, 4), (0, 0))
    kern = int_row_kernel(m)
    assert len(kern) == 2
    for k in kern:
        assert tuple(sum(a * b for a, b in zip(k, col)) for col in zip(*m)) == (
            0,
            0,
        )


# --- lattices -----------------------------------------------------------------

def test_saturation_examples():
    line = IntLattice.from_rows(2, ((2, 0),))
    assert saturation(line).basis == ((1, 0),)

    full = IntLattice.standard(2)
    assert saturation(full) == full

    skew = IntLattice.from_rows(2, ((2, 1), (1, 2)))
    assert saturation(skew) == IntLattice.standard(2)


def test_saturation_contains_and_same_rank():
    rng = random.Random(5)
    for _ in range(40):
        d = rng.randint(1, 3)
        rows = random_matrix(rng, rng.randint(1, d), d, 4)
        lat = IntLattice.from_rows(d, rows)
        sat = saturation(lat)
        assert lat.rank == sat.rank
        assert lat.is_sublattice_of(sat)
        assert index(sat) == 1


def test_index_examples():
    assert index(IntLattice.from_rows(2, ((2, 1), (1, 2)))) == 3
    assert index(IntLattice.standard(3)) == 1
    assert (
        index(IntLattice.from_rows(3, ((1, 0, 0), (0, 1, 0), (1, 1, 99)))) == 99
    )


def test_index_det_oracle():
    rng = random.Random(13)
    for _ in range(40):
        d = rng.randint(1, 3)
        rows = random_matrix(rng, d, d, 5)
        if det(rows) == 0:
            continue
        lat = IntLattice.from_rows(d, rows)
        assert index(lat) == abs(det(rows))


def test_index_one_iff_saturated():
    rng = random.Random(17)
    for _ in range(40):
        d = rng.randint(1, 3)
        rows = random_matrix(rng, rng.randint(1, d), d, 4)
        lat = IntLattice.from_rows(d, rows)
        assert index(lat) >= 1
        assert (index(lat) == 1) == (lat == saturation(lat))


def test_quotient_examples():
    n = IntLattice.standard(2)
    l = IntLattice.from_rows(2, ((2, 1), (1, 2)))
    g = quotient(n, l)
    assert g.invariant_factors == (3,)
    assert g.order == 3

    g0 = quotient(n, n)
    assert g0.order == 1 and g0.invariant_factors == ()

    reeve = IntLattice.from_rows(3, ((1, 0, 0), (0, 1, 0), (1, 1, 2)))
    g2 = quotient(IntLattice.standard(3), reeve)
    assert g2.invariant_factors == (2,)


def test_quotient_roundtrip_and_membership():
    rng = random.Random(23)
    checked = 0
    while checked < 30:
        d = rng.randint(1, 3)
        rows = random_matrix(rng, d, d, 5)
        if det(rows) == 0:
            continue
        checked += 1
        l = IntLattice.from_rows(d, rows)
        n = saturation(l)
        g = quotient(n, l)
        assert g.order == index(l) == minor_gcd_product(rows)
        for res in g.elements():
            w = g.section(res)
            assert g.to_quotient(w) == res
            # to_quotient(v) == 0 iff v in L
            assert (not any(res)) == l.contains(w)


def minor_gcd_product(rows):
    out = 1
    for f in minor_gcd_invariant_factors(rows):
        out *= f
    return out


def test_quotient_rejects():
    n = IntLattice.from_rows(2, ((1, 0),))
    l = IntLattice.from_rows(2, ((0, 2),))
    with pytest.raises(UnitriError):
        quotient(n, l)  # not a sublattice
    with pytest.raises(UnitriError):
        quotient(IntLattice.standard(2), IntLattice.from_rows(2, ((1, 0),)))


def test_lattice_distance_examples():
    n = IntLattice.standard(2)
    # x = origin, F the line x1 = 1 (point (1,0), direction (0,1))
    assert lattice_distance((0, 0), (1, 0), ((0, 1),), n) == 1
    # x on F
    assert lattice_distance((1, 5), (1, 0), ((0, 1),), n) == 0


def test_lattice_distance_reeve_facet():
    # 2 * (Reeve q=2) has facet conv{(2,0,0),(0,2,0),(2,2,4)}; the interior
    # point (1,1,1) must be strictly closer to the facet plane than the
    # opposite vertex (0,0,0).
    n = IntLattice.standard(3)
    f0 = (2, 0, 0)
    dirs = ((-2, 2, 0), (0, 2, 4))
    h_point = lattice_distance((1, 1, 1), f0, dirs, n)
    h_vertex = lattice_distance((0, 0, 0), f0, dirs, n)
    assert 0 < h_point < h_vertex


def test_lattice_distance_translation_invariance():
    rng = random.Random(31)
    n = IntLattice.standard(3)
    for _ in range(20):
        x = tuple(rng.randint(-4, 4) for _ in range(3))
        f0 = tuple(rng.randint(-4, 4) for _ in range(3))
        d1 = tuple(rng.randint(-3, 3) for _ in range(3))
        d2 = tuple(rng.randint(-3, 3) for _ in range(3))
        if matrix_rank_rational((d1, d2)) != 2:
            continue
        t = tuple(rng.randint(-5, 5) for _ in range(3))
        base = lattice_distance(x, f0, (d1, d2), n)
        shifted = lattice_distance(
            tuple(a + b for a, b in zip(x, t)),
            tuple(a + b for a, b in zip(f0, t)),
            (d1, d2),
            n,
        )
        assert base == shifted


def test_lattice_distance_codim_check():
    n = IntLattice.standard(3)
    with pytest.raises(UnitriError):
        lattice_distance((0, 0, 0), (1, 0, 0), ((0, 1, 0),), n)
