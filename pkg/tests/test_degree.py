from fractions import Fraction

import numpy as np
import pytest

from hambif import degree
from hambif.degree import (
    PlanarMap,
    RadiiDisagree,
    ZeroOnCircle,
    admissibility_scan,
    circle_point,
    h_map,
    index_of,
    quadrant,
    winding_at_radius,
    winding_index,
)
from hambif.polyalg import parse_poly

V = ["l1", "l2"]


def P(s):
    return parse_poly(s, V)


def pmap(u, v):
    return PlanarMap(P(u), P(v))


def sampled_winding(m: PlanarMap, r: float, n: int = 20000) -> int:
    """Independent oracle: unwrapped argument on a dense float circle."""
    t = np.linspace(0.0, 2 * np.pi, n + 1)
    x, y = r * np.cos(t), r * np.sin(t)
    u, _ = m.u.eval_float(x, y)
    v, _ = m.v.eval_float(x, y)
    ang = np.unwrap(np.arctan2(v, u))
    return int(round((ang[-1] - ang[0]) / (2 * np.pi)))


def test_circle_points_are_exact():
    r = Fraction(1, 50)
    for k in range(16):
        x, y = circle_point(Fraction(k, 4), r)
        assert x * x + y * y == r * r


def test_quadrant_half_open():
    assert [quadrant(1, 1), quadrant(-1, 1), quadrant(-1, -1), quadrant(1, -1)] == [0, 1, 2, 3]
    # a point on an axis belongs to exactly one quadrant
    assert [quadrant(1, 0), quadrant(0, 1), quadrant(-1, 0), quadrant(0, -1)] == [0, 1, 2, 3]
    with pytest.raises(ZeroOnCircle):
        quadrant(0, 0)


@pytest.mark.parametrize(
    "u,v,expected",
    [
        ("l1", "l2", 1),
        ("l1", "-l2", -1),
        ("l1^2 - l2^2", "2*l1*l2", 2),
        ("l1^3 - 3*l1*l2^2", "-(3*l1^2*l2 - l2^3)", -3),
        ("l1^2 + l2^2", "l1 + 1/2", 0),
        ("l1 + l2^3", "l2 - l1^5", 1),
    ],
)
def test_known_indices(u, v, expected):
    m = pmap(u, v)
    res = winding_index(m)
    assert res.value == expected
    assert [val for _, val in res.radii_agreeing] == [expected] * 3
    assert sampled_winding(m, 0.02) == expected


def test_tangential_high_order_map():
    # zero set components hug each other; interval certification must still decide
    m = pmap("l1^3 - 2*l2^8", "l2^2 - l1^7")
    assert winding_index(m).value == sampled_winding(m, 0.01, 200000)


def test_radii_disagree_when_another_zero_is_close():
    m = pmap("l1 - 3/100", "l2")
    with pytest.raises(RadiiDisagree) as info:
        winding_index(m)
    assert {v for _, v in info.value.values} == {0, 1}


def test_zero_on_circle_is_nudged():
    m = pmap("l1 - 1/100", "l2")
    res = winding_at_radius(m, Fraction(1, 100))
    assert res.radius != Fraction(1, 100)


def test_zero_on_every_circle():
    # the whole l2-axis is a zero set, so no radius avoids it
    m = pmap("l1", "l1^2")
    with pytest.raises(ZeroOnCircle):
        winding_at_radius(m, Fraction(1, 100))


def test_h_map_and_test_functions():
    F = P("l1^2 - l2^2")
    h = h_map(degree.test_function("g1"), F)
    assert h.u == P("-8*l1*l2") and h.v == F
    # two branches through the origin cross transversally: b(F) = 4 = 2 * ind
    assert index_of(degree.test_function("g1"), F).value == 2
    with pytest.raises(ValueError):
        degree.test_function("g9")


def test_shifted_center():
    m = PlanarMap(P("l1 - 1/10"), P("l2 + 1/5"), (Fraction(1, 10), Fraction(-1, 5)))
    assert winding_index(m).value == 1


def test_admissibility_scan():
    assert admissibility_scan(P("l1^2 - l2^3"), 0.3, resolution=48).origin_isolated
    # an isolated real point at (1/10, 0) is a singular zero away from the origin
    rep = admissibility_scan(P("(l1 - 1/10)^2 + l2^2"), 0.3, resolution=48)
    assert not rep.origin_isolated
    assert any(abs(x - 0.1) < 1e-4 and abs(y) < 1e-4 for x, y in rep.singular_points_found)
