import numpy as np
import pytest
from hypothesis import given, strategies as st

from asptk.weyl import (
    coords,
    in_fundamental_domain,
    normalize_dominant,
    orbit,
    orbit_sum,
    random_fundamental_points,
    root_system,
)


@pytest.mark.parametrize("kind,order", [("A1", 2), ("A2", 6), ("C2", 8)])
def test_group_orders(kind, order):
    rs = root_system(kind)
    assert rs.order == order
    assert all(abs(round(np.linalg.det(S))) == 1 for S in rs.elements)


def test_unknown_kind():
    with pytest.raises(ValueError):
        root_system("G2")


@pytest.mark.parametrize("kind", ["A2", "C2"])
@given(lam=st.tuples(st.integers(-6, 6), st.integers(-6, 6)))
def test_dominant_representative(kind, lam):
    rs = root_system(kind)
    d = normalize_dominant(rs, lam)
    assert min(d) >= 0
    assert d in orbit(rs, lam)
    assert normalize_dominant(rs, d) == d


def test_orbit_of_fundamental_weight_sizes():
    assert len(set(orbit(root_system("A2"), (1, 0)))) == 3
    assert len(set(orbit(root_system("C2"), (1, 0)))) == 4
    assert len(set(orbit(root_system("C2"), (0, 1)))) == 4


@pytest.mark.parametrize("kind", ["A2", "C2"])
def test_random_points_inside_domain(kind):
    rs = root_system(kind)
    pts = random_fundamental_points(rs, 200, np.random.default_rng(0))
    assert all(in_fundamental_domain(rs, c) for c in pts)


def test_coords_at_origin_and_outside():
    rs = root_system("C2")
    assert np.allclose(coords(rs, (0.0, 0.0)), [1, 1])
    with pytest.raises(ValueError):
        coords(rs, (2.0, 0.0))


@pytest.mark.parametrize("kind", ["A2", "C2"])
def test_orbit_sum_is_weyl_invariant(kind):
    rs = root_system(kind)
    c = random_fundamental_points(rs, 1, np.random.default_rng(1))[0]
    for lam in [(1, 0), (2, 1), (0, 3)]:
        vals = {round(orbit_sum(rs, mu, c).real, 12) for mu in orbit(rs, lam)}
        assert len(vals) == 1


def test_c2_coordinates_are_real():
    rs = root_system("C2")
    for c in random_fundamental_points(rs, 20, np.random.default_rng(3)):
        assert np.abs(coords(rs, c).imag).max() < 1e-14
