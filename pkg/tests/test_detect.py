from fractions import Fraction

import numpy as np
import pytest

from hambif.detect import (
    Box,
    ModelError,
    candidate_js,
    constant_model,
    detecting_poly,
    detecting_value_general,
    load_model,
    local_index_at,
    model_from_dict,
    necessary_filter,
    ratio_factor,
    zero_model,
)
from hambif.polyalg import parse_poly

BLOCK_MODEL = """
[model]
name = "tiny"
n = 1
k = 2
form = "block-diagonal"

[blocks]
A = [["4 + l1"]]
B = [["1 + l2^2"]]
"""


def write(tmp_path, text, name="m.toml"):
    p = tmp_path / name
    p.write_text(text)
    return p


class TestLoading:
    @pytest.mark.parametrize("name,k", [("exdeg", 2), ("exstat", 2), ("surfdeg", 3), ("surfstat", 3)])
    def test_bundled_models(self, name, k):
        m = load_model(name)
        assert m.k == k and m.n == 3 and m.is_block
        assert m.default_box() == Box.cube(Fraction(31, 100), k)

    def test_file_model(self, tmp_path):
        m = load_model(write(tmp_path, BLOCK_MODEL))
        assert m.name == "tiny"
        assert detecting_poly(m, 1) == parse_poly("(4 + l1)*(1 + l2^2) - 1", ["l1", "l2"])
        assert m.local_index is None

    def test_missing_file(self, tmp_path):
        with pytest.raises(ModelError, match="cannot read"):
            load_model(tmp_path / "nope.toml")

    def test_malformed_toml(self, tmp_path):
        with pytest.raises(ModelError, match="malformed"):
            load_model(write(tmp_path, "[model\nn=1"))

    def test_bad_expression_is_located(self, tmp_path):
        text = BLOCK_MODEL.replace('"1 + l2^2"', '"1 + l2 l1"')
        with pytest.raises(ModelError) as info:
            load_model(write(tmp_path, text))
        assert "[blocks].B[0][0]" in str(info.value)

    def test_asymmetric_block(self):
        data = {
            "model": {"n": 2, "k": 2},
            "blocks": {"A": [["1", "l1"], ["0", "1"]], "B": [["1", "0"], ["0", "1"]]},
        }
        with pytest.raises(ModelError, match="not symmetric"):
            model_from_dict(data)

    def test_wrong_shape_and_flags(self):
        base = {"model": {"n": 1, "k": 2}, "blocks": {"A": [["1"]], "B": [["1", "2"]]}}
        with pytest.raises(ModelError):
            model_from_dict(base)
        ok = {"model": {"n": 1, "k": 2}, "blocks": {"A": [["1"]], "B": [["1"]]}, "flags": {"local_index": "two"}}
        with pytest.raises(ModelError, match="local_index"):
            model_from_dict(ok)

    def test_unknown_variable(self):
        data = {"model": {"n": 1, "k": 1}, "blocks": {"A": [["l2"]], "B": [["1"]]}}
        with pytest.raises(ModelError):
            model_from_dict(data)


class TestDetectingFunctions:
    def test_f0_identically_zero_for_singular_block(self):
        assert detecting_poly(load_model("exdeg"), 0).is_zero()
        assert not detecting_poly(load_model("exstat"), 0).is_zero()

    def test_constant_model(self):
        m = constant_model([[4]], [[1]])
        assert [detecting_poly(m, j).constant_term() for j in range(4)] == [4, 3, 0, -5]

    def test_general_value_matches_block_formula(self):
        # eigenvalue half-product of Q_j(diag(A, B)) equals F_j / (1 + j^2)^(2n)
        m = load_model("exstat")
        rng = np.random.default_rng(3)
        for _ in range(5):
            pt = [Fraction(float(x)).limit_denominator(1000) for x in rng.uniform(-0.3, 0.3, 2)]
            for j in (0, 1, 2, 3):
                exact = float(detecting_poly(m, j).evaluate(pt) * ratio_factor(m, j))
                got = detecting_value_general(m, j, pt)
                assert got == pytest.approx(exact, rel=1e-8, abs=1e-12)

    def test_local_index_from_flag_when_degenerate(self):
        m = load_model("exdeg")
        assert local_index_at(m, [0, 0]) == 1  # det A = 0 there, so the flag decides


class TestCandidates:
    def test_zero_model(self):
        cs = candidate_js(zero_model())
        assert cs.candidates == [0] and cs.f0_identically_zero

    def test_constant_model_single_frequency(self):
        cs = candidate_js(constant_model([[4]], [[1]]))
        assert cs.candidates == [2]
        assert not cs.uncertified

    def test_empty_candidate_set(self):
        cs = candidate_js(constant_model([[3]], [[1]]))
        assert cs.candidates == []
        assert all(v.startswith("certified") for v in cs.evidence.values())

    def test_block_model_candidates(self, tmp_path):
        m = load_model(write(tmp_path, BLOCK_MODEL))
        # F_0, F_1 > 0 on the box; F_2 = l1 + 4 l2^2 + l1 l2^2 vanishes at the origin
        cs = candidate_js(m, Box.cube(Fraction(1, 10), 2))
        assert cs.candidates == [2]
        assert cs.evidence[1].startswith("certified")

    def test_bounds_ordered(self):
        cs = candidate_js(load_model("exdeg"))
        assert cs.n_cert >= cs.n_grid >= max(cs.candidates)

    def test_degenerate_box(self):
        with pytest.raises(ValueError):
            candidate_js(load_model("exdeg"), Box(((0, 0), (0, 1))))

    def test_necessary_filter_at_origin(self):
        nc = necessary_filter(load_model("exdeg"), [0, 0])
        assert nc.frequencies == [0, 3, 5]
        assert nc.stationary
        assert nc.solution_frequencies == [1, 3, 5]
