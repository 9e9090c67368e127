from fractions import Fraction

import numpy as np
import pytest

from hambif.branches import (
    BranchCounts,
    BranchError,
    LineTestError,
    axis_condition,
    branch_count,
    classify_disk,
    cone_check,
    cone_check_details,
    counts_from_indices,
    eta_index,
    period_label,
    quadrant_counts,
    sign_change_on_line,
    solve_quadrants,
    sphere_sign_check,
)
from hambif.detect import constant_model, model_from_dict
from hambif.polyalg import parse_poly

V2 = ["l1", "l2"]
V3 = ["l1", "l2", "l3"]


def P(s, v=V2):
    return parse_poly(s, v)


def test_period_labels():
    assert [period_label(j) for j in range(6)] == ["stationary", "2π", "π", "2π/3", "π/2", "2π/5"]


class TestCountAlgebra:
    def test_solve_quadrants_inverts_index_relations(self):
        # b1..b4 -> indices -> b1..b4
        for b in [(1, 1, 1, 1), (1, 0, 0, 1), (1, 3, 0, 2), (0, 2, 2, 0), (2, 0, 1, 3)]:
            b1, b2, b3, b4 = b
            i1 = (b1 + b2 + b3 + b4) // 2
            i2 = (b1 - b2 - b3 + b4) // 2
            i3 = (b1 + b2 - b3 - b4) // 2
            i4 = (b1 - b2 + b3 - b4) // 2
            if (b1 + b2 + b3 + b4) % 2:
                continue
            assert solve_quadrants(i1, i2, i3, i4) == b

    def test_inconsistent_indices_raise(self):
        with pytest.raises(BranchError):
            solve_quadrants(0, 3, 0, 0)

    def test_counts_from_indices(self):
        bc = counts_from_indices({"g1": 3, "g2": 0, "g3": 1, "g4": -2})
        assert bc.total == 6
        assert bc.per_quadrant == (1, 3, 0, 2)
        assert bc.signed["g4"] == (1, 5)
        with pytest.raises(BranchError):
            counts_from_indices({"g1": -1})

    def test_branch_counts_check(self):
        with pytest.raises(BranchError):
            BranchCounts(4, (1, 1, 1, 0)).check()


class TestPlanarCounts:
    def test_crossing_lines(self):
        F = P("l1^2 - l2^2")
        assert branch_count(F) == 4
        assert quadrant_counts(F) == (1, 1, 1, 1)

    def test_parabola(self):
        # one smooth curve through the origin, tangent to the l1-axis, opening upwards
        assert quadrant_counts(P("l2 - l1^2")) == (1, 1, 0, 0)

    def test_cusp(self):
        # l2^2 = l1^3: two half-branches in quadrants 1 and 4
        F = P("l2^2 - l1^3")
        assert branch_count(F) == 2
        assert quadrant_counts(F) == (1, 0, 0, 1)

    def test_isolated_point_has_no_branches(self):
        assert branch_count(P("l1^2 + l2^4")) == 0

    def test_axis_condition(self):
        assert axis_condition(P("l1^2 - l2^3"), Fraction(1, 2))
        assert not axis_condition(P("l1*(l1 - 1/10) + l2^2"), Fraction(1, 2))
        assert axis_condition(P("l1*(l1 - 1/10) + l2^2"), Fraction(1, 20))
        assert not axis_condition(P("l1*l2"), Fraction(1, 2))


class TestLineTests:
    def test_sign_change(self):
        assert sign_change_on_line(P("l1 - l2"), [0, 0], [1, 0])
        assert not sign_change_on_line(P("l1^2 + l2"), [0, 0], [1, 0])

    def test_identically_zero_on_line(self):
        with pytest.raises(LineTestError):
            sign_change_on_line(P("l2"), [0, 0], [1, 0])

    def test_eta_index_for_a_crossing_pair(self):
        # A = [[4 + l1]], B = [[1]]: F_2 = l1, and an eigenvalue pair of Q_2 crosses at l1 = 0
        m = model_from_dict({"model": {"n": 1, "k": 2}, "blocks": {"A": [["4 + l1"]], "B": [["1"]]}})
        eta = eta_index(m, 2, [0, 0], [1, 0])
        assert (eta.morse_left, eta.morse_right) == (2, 4)
        assert eta.value == 1
        assert eta_index(m, 1, [0, 0], [1, 0]).value == 0


class TestSpatialChecks:
    def test_cone_condition(self):
        cone = P("l1^2 + l2^2 - l3^2", V3)
        t = np.linspace(0.05, 0.3, 10)
        pts = np.stack([t * np.cos(t * 20), t * np.sin(t * 20), t], axis=1)
        assert cone_check(cone, pts)
        sphere = P("l1^2 + l2^2 + l3^2 - 1/100", V3)
        ok, worst, _ = cone_check_details(sphere, [[0.1, 0.0, 0.0], [0.0, 0.06, 0.08]])
        assert not ok and worst < 1e-12

    def test_sphere_sign_check(self):
        assert sphere_sign_check(P("l1^2 - l2^2 + l3^3", V3))
        assert not sphere_sign_check(P("l1^2 + l2^2 + l3^4", V3))
        with pytest.raises(ValueError):
            sphere_sign_check(P("l1"))


def test_classify_without_candidates():
    rep = classify_disk(constant_model([[3]], [[1]], name="none"))
    data = rep.to_json()
    assert data["candidates"] == [] and data["frequencies"] == []
    assert data["symmetry_breaking"] is False
    assert rep.consistent
