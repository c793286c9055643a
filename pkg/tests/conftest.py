import random

import pytest

from unitri.cayley import CayleyElt, make_cayley
from unitri.errors import UnitriError
from unitri.geometry import OrderedSimplex, SimplexTuple, hull


def random_cayley(rng, max_ambient=3, max_entries=2, max_coeff=3,
                  max_points=2) -> CayleyElt:
    """Random valid Cayley tuple with small data, by rejection."""
    for _ in range(500):
        d = rng.randint(1, max_ambient)
        m = rng.randint(1, max_points)
        n = rng.randint(0, max_entries)
        try:
            entries = []
            for _ in range(n):
                dim = rng.randint(1, 2)
                v0 = tuple(rng.randint(-2, 2) for _ in range(d))
                verts = [v0]
                for _ in range(dim):
                    verts.append(
                        tuple(x + rng.randint(-2, 2) for x in v0)
                    )
                entries.append(OrderedSimplex(tuple(verts)))
            s = SimplexTuple(tuple(entries))
            p = [tuple(rng.randint(-3, 3) for _ in range(d))
                 for _ in range(m)]
            a = [
                [rng.randint(0, max_coeff) for _ in range(n)]
                for _ in range(m)
            ]
            elt = make_cayley(tuple(p), s, tuple(tuple(r) for r in a),
                              validate=True)
        except UnitriError:
            continue
        return elt
    raise RuntimeError("could not sample a Cayley tuple")


@pytest.fixture(scope="session")
def rng():
    return random.Random(20240817)


@pytest.fixture(scope="session")
def unit_square():
    return hull([(0, 0), (1, 0), (0, 1), (1, 1)])


@pytest.fixture(scope="session")
def index3_triangle():
    return hull([(0, 0), (2, 1), (1, 2)])


@pytest.fixture(scope="session")
def reeve_simplex():
    return hull([(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 2)])


@pytest.fixture(scope="session")
def mixed_sample_pool():
    """Intermediate pair cells collected from real pipeline normalizations:
    honest samples of the mixed poset for the harness tests."""
    from unitri.classic import initial_triangulation
    from unitri.geometry import ordered_simplex_lex
    from unitri.kmw import choose_class_covering
    from unitri.mixed import (
        MixedFamily,
        lattice_of_delt,
        make_delt,
        theta,
    )

    pool = {}
    families = []
    for verts, c in [
        ([(0,), (2,)], 3),
        ([(0, 0), (2, 1), (1, 2)], 5),
    ]:
        poly = hull(verts)
        d = poly.ambient_dim
        zero = tuple(0 for _ in range(d))
        cells = []
        for pts in initial_triangulation(poly):
            t = ordered_simplex_lex(pts)
            cells.append(
                make_delt((zero,), SimplexTuple((t,)), ((1,),),
                          (zero,), ((1,),), 0)
            )
        pick = choose_class_covering(
            [(lattice_of_delt(cl), cl.simplices) for cl in cells]
        )
        fam = MixedFamily(pick[0], pick[1], d)
        families.append(fam)
        work = [theta(cl, c, d) for cl in cells]
        seen = set()
        while work:
            x = work.pop()
            if x.key() in seen:
                continue
            seen.add(x.key())
            pool.setdefault(x.key(), (x, fam))
            for rule in fam.rules_for(x):
                sub = rule.apply(x)
                if not sub.is_trivial_for(x):
                    work.extend(sub.max_cells)
                    break
    return list(pool.values()), families
