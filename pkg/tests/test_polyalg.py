from fractions import Fraction

import numpy as np
import pytest

from hambif.polyalg import (
    MultiPoly,
    PolyMatrix,
    PolySyntaxError,
    count_real_roots,
    exact_divide,
    interval_eval,
    interval_eval_float,
    jacobian2,
    parse_poly,
    poly_det,
    sign_grid,
    sign_points,
    sturm_sequence,
    univariate_restriction,
)

V = ["l1", "l2"]


def P(s, v=V):
    return parse_poly(s, v)


class TestParser:
    def test_simple(self):
        p = P("3*l1^2 - l1*l2 + 1/2")
        assert p.terms == {(2, 0): Fraction(3), (1, 1): Fraction(-1), (0, 0): Fraction(1, 2)}

    def test_power_binds_tighter_than_unary_minus(self):
        assert P("-l1^2") == -(P("l1") ** 2)
        assert P("-2^2") == MultiPoly.constant(2, -4)

    def test_parentheses_and_powers(self):
        assert P("(l1 + l2)^2") == P("l1^2 + 2*l1*l2 + l2^2")
        assert P("((l1))^0") == MultiPoly.constant(2, 1)

    def test_rational_coefficients(self):
        assert P("9/40*l1^11").terms == {(11, 0): Fraction(9, 40)}

    def test_division_only_in_rational_literals(self):
        with pytest.raises(PolySyntaxError):
            P("l1/4")

    @pytest.mark.parametrize(
        "text",
        ["", "l1 +", "2 l1", "l1^l2", "l1^-1", "l3", "x", "1/0", "(l1", "l1)", "l1^1.5", "l1 ** 2", "l1 # 2"],
    )
    def test_rejects(self, text):
        with pytest.raises(PolySyntaxError):
            P(text)

    def test_error_reports_position(self):
        with pytest.raises(PolySyntaxError) as info:
            P("l1 + * l2")
        assert info.value.position == 5
        assert "^" in str(info.value)

    def test_variable_names_validated(self):
        with pytest.raises(ValueError):
            parse_poly("x", ["x"])

    def test_round_trip(self):
        p = P("-2304*l2^24 + 288*l1^6*l2^12 - 9/5*l1^5*l2^12 + 1")
        assert P(p.to_string()) == p
        assert p.to_string().startswith("-2304*l2^24")


class TestArithmetic:
    def test_ring_identities(self):
        a, b = P("l1 + 2*l2"), P("l1^2 - 1/3")
        assert (a + b) - b == a
        assert a * (b + 1) == a * b + a
        assert a**3 == a * a * a
        assert (a - a).is_zero()

    def test_degrees(self):
        p = P("l1^3*l2 + l2^5 - 1")
        assert p.total_degree() == 5
        assert p.degree_in(0) == 3
        assert p.leading_term() == ((0, 5), Fraction(1))

    def test_diff_and_gradient(self):
        p = P("l1^3*l2^2 + 5*l2")
        assert p.diff(0) == P("3*l1^2*l2^2")
        assert p.gradient()[1] == P("2*l1^3*l2 + 5")

    def test_evaluate_exact_and_sign(self):
        p = P("l1^2 - 2")
        assert p.evaluate([Fraction(3, 2), 0]) == Fraction(1, 4)
        assert p.sign_at([Fraction(7, 5), 0]) == -1
        assert p.sign_at([Fraction(3, 2), 0]) == 1
        assert P("l1 - l2").sign_at([Fraction(1, 3), Fraction(1, 3)]) == 0

    def test_eval_float_returns_abs_sum(self):
        p = P("l1 - l2")
        val, mag = p.eval_float(np.array([1.0, 2.0]), np.array([3.0, -1.0]))
        assert np.allclose(val, [-2.0, 3.0])
        assert np.allclose(mag, [4.0, 3.0])

    def test_substitute_and_line_restriction(self):
        p = P("l1^2 + l2")
        assert p.substitute({1: Fraction(2)}) == P("l1^2 + 2")
        # p(t, 1 + 2t) = 1 + 2t + t^2
        assert p.restrict_to_line([0, 1], [1, 2]) == [1, 2, 1]

    def test_hash_and_equality(self):
        assert hash(P("l1 + l2")) == hash(P("l2 + l1"))
        assert P("l1") != P("l2")

    def test_pickle(self):
        import pickle

        p = P("3/7*l1^4*l2 - l2")
        assert pickle.loads(pickle.dumps(p)) == p


class TestMatrices:
    def test_det_matches_hand_expansion(self):
        m = PolyMatrix.from_strings([["l1", "1"], ["l2", "l1"]], V)
        assert poly_det(m) == P("l1^2 - l2")

    def test_det_bareiss_matches_cofactor_on_5x5(self):
        rng = np.random.default_rng(7)
        rows = [[str(int(x)) for x in rng.integers(-4, 5, 5)] for _ in range(5)]
        rows[0][0] = "l1"
        rows[2][3] = "l2^2"
        m = PolyMatrix.from_strings(rows, V)
        for point in ([Fraction(1, 2), Fraction(-3)], [Fraction(2), Fraction(5, 7)]):
            num = np.array([[float(x) for x in r] for r in m.evaluate(point)])
            assert float(poly_det(m).evaluate(point)) == pytest.approx(np.linalg.det(num), rel=1e-9, abs=1e-9)

    def test_symmetric_and_products(self):
        a = PolyMatrix.from_strings([["l1", "l2"], ["l2", "1"]], V)
        assert a.is_symmetric()
        assert (a @ PolyMatrix.identity(2, 2)) == a
        assert a.transpose() == a

    def test_jacobian2(self):
        assert jacobian2(P("l1*l2"), P("l1 + l2^2")) == P("2*l2^2 - l1")

    def test_exact_divide(self):
        assert exact_divide(P("l1^2 - l2^2"), P("l1 - l2")) == P("l1 + l2")
        with pytest.raises(ValueError):
            exact_divide(P("l1^2 + 1"), P("l1 - l2"))


class TestIntervalsAndSigns:
    def test_interval_encloses_samples(self):
        p = P("l1^3 - 2*l1*l2 + l2^2 - 1/3")
        lo, hi = interval_eval(p, [(Fraction(-1, 2), Fraction(1, 3)), (Fraction(0), Fraction(1))])
        rng = np.random.default_rng(0)
        for _ in range(200):
            x = Fraction(float(rng.uniform(-0.5, 1 / 3)))
            y = Fraction(float(rng.uniform(0, 1)))
            assert lo <= p.evaluate([x, y]) <= hi

    def test_float_interval_encloses_exact(self):
        p = P("l1^2*l2 - 3*l2^3 + 1/7")
        lo, hi = interval_eval_float(p, [np.array([-0.2]), np.array([0.1])], [np.array([0.3]), np.array([0.4])])
        elo, ehi = interval_eval(p, [(Fraction(-0.2), Fraction(0.3)), (Fraction(0.1), Fraction(0.4))])
        assert lo[0] <= float(elo) and hi[0] >= float(ehi)

    def test_sign_grid_exact_zero(self):
        p = P("l1 - l2")
        axes = [[Fraction(k, 4) for k in range(-2, 3)]] * 2
        s = sign_grid(p, axes)
        assert np.all(np.diag(s) == 0)
        assert s[4, 0] == 1 and s[0, 4] == -1

    def test_sign_points_resolves_cancellation(self):
        # F = (l1 - l2)^8 near the diagonal: float evaluation cancels, the exact fallback does not
        p = P("(l1 - l2)^8")
        x = np.array([0.1, 0.1])
        y = np.array([0.1, 0.1 + 2.0**-40])
        assert sign_points(p, x, y).tolist() == [0, 1]


class TestUnivariate:
    def test_count_real_roots(self):
        # (t - 1)(t + 2)(t - 1/2)
        a = [1, -Fraction(5, 2), Fraction(1, 2), 1]
        assert count_real_roots(a, -3, 3) == 3
        assert count_real_roots(a, 0, 1) == 2  # (0, 1] contains 1/2 and 1
        assert count_real_roots(a, 1, 3) == 0

    def test_sturm_length(self):
        assert len(sturm_sequence([0, 0, 1])) >= 2

    def test_axis_restriction(self):
        p = P("l1^3 + l1*l2 + 2*l2^2")
        assert univariate_restriction(p, 0) == [0, 0, 0, 1]
        assert univariate_restriction(p, 1) == [0, 0, 2]
