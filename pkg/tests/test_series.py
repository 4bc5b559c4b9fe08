"""Gambler's-ruin function and the stationary-mass series."""

import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cookiewalk import series
from cookiewalk.analysis import pgf_eval


class TestRuin:
    def test_symmetric_is_linear(self):
        assert series.ruin(0.5, 10, 0, 3) == pytest.approx(0.3)
        assert series.ruin(Fraction(1, 2), 10, 0, 3) == Fraction(3, 10)

    def test_one_step_case(self):
        # from 0 with barriers -1 and 1, hitting 1 first means stepping right
        assert series.ruin(0.8, 1, -1, 0) == pytest.approx(0.8)

    def test_boundaries(self):
        assert series.ruin(0.7, 5, -2, 5) == pytest.approx(1.0)
        assert series.ruin(0.7, 5, -2, -2) == pytest.approx(0.0)

    def test_continuity_at_half(self):
        # truncation is O(eps); roundoff in (1 - r^k) is O(1e-16 / eps)
        eps = 1e-10
        for x, y, z in [(10, 0, 3), (4, -1, 2), (7, -3, 0)]:
            lim = series.ruin(0.5, x, y, z)
            near = series.ruin(0.5 + eps, x, y, z)
            assert abs(near - lim) < 1e-6

    @pytest.mark.parametrize("p,x,y,z", [
        (0.0, 1, -1, 0), (1.0, 1, -1, 0),      # degenerate bias
        (0.5, 1, 1, 1),                        # x = y
        (0.5, 1, -1, 2), (0.5, 1, -1, -2),     # z outside [y, x]
        (0.5, -1, 1, 0),                       # barriers swapped
    ])
    def test_validation(self, p, x, y, z):
        with pytest.raises(ValueError):
            series.ruin(p, x, y, z)

    @given(st.floats(min_value=0.55, max_value=0.95),
           st.integers(min_value=1, max_value=12))
    def test_monotone_in_start(self, p, x):
        vals = [series.ruin(p, x, -1, z) for z in range(-1, x + 1)]
        assert all(a < b for a, b in zip(vals, vals[1:]))


class TestPi0Product:
    def test_reference_value(self):
        res = series.pi0_product(0.8, 0.9, tol=1e-12)
        assert res.converged and res.method == "product_A2"
        assert res.value == pytest.approx(0.8716968285, abs=1e-8)

    def test_matches_pgf_at_zero(self):
        for p0, p1 in [(0.7, 0.8), (0.8, 0.9), (0.9, 0.99)]:
            g0 = pgf_eval(p0, p1, 0.0, tol=1e-13).value
            assert series.pi0_product(p0, p1, tol=1e-13).value == \
                pytest.approx(g0, abs=1e-10)

    def test_p0_one_degenerates(self):
        res = series.pi0_product(1.0, 0.9)
        assert res.value == 0.9 and res.tail_bound == 0.0

    def test_truncation_sound(self):
        coarse = series.pi0_product(0.7, 0.8, tol=1e-4)
        fine = series.pi0_product(0.7, 0.8, tol=1e-13)
        assert abs(coarse.value - fine.value) <= coarse.tail_bound + 1e-13
        assert coarse.terms_used < fine.terms_used

    def test_monotone_in_parameters(self):
        grid = [0.6, 0.7, 0.8, 0.9, 0.99]
        vals = [series.pi0_product(p0, 0.9).value for p0 in grid]
        assert all(a < b for a, b in zip(vals, vals[1:]))
        vals = [series.pi0_product(0.8, p1).value for p1 in grid]
        assert all(a < b for a, b in zip(vals, vals[1:]))

    @given(st.floats(min_value=0.55, max_value=0.99),
           st.floats(min_value=0.05, max_value=0.99))
    def test_is_probability(self, p0, p1):
        res = series.pi0_product(p0, p1, tol=1e-10)
        assert 0 < res.value < 1
        assert res.tail_bound >= 0

    def test_validation(self):
        with pytest.raises(ValueError):
            series.pi0_product(0.5, 0.9)
        with pytest.raises(ValueError):
            series.pi0_product(0.8, 0.9, tol=0)


class TestPi1Sum:
    def test_variant_a_diverges(self):
        a, b = series.pi1_sum(0.8, 0.9)
        assert not a.converged and a.value == math.inf
        assert b.converged and 0 < b.value < 1

    def test_reference_value(self):
        _, b = series.pi1_sum(0.8, 0.9, tol=1e-12)
        assert b.value == pytest.approx(0.0988469899, abs=1e-8)

    def test_p1_one_gives_zero(self):
        a, b = series.pi1_sum(0.8, 1.0)
        assert a.value == 0.0 and b.value == 0.0

    def test_p0_one_limit(self):
        a, b = series.pi1_sum(1.0, 0.9)
        assert not a.converged
        assert b.value == pytest.approx(0.1)

    def test_truncation_sound(self):
        _, coarse = series.pi1_sum(0.7, 0.8, tol=1e-4)
        _, fine = series.pi1_sum(0.7, 0.8, tol=1e-13)
        assert abs(coarse.value - fine.value) <= coarse.tail_bound + 1e-13

    def test_masses_below_one(self):
        for p0, p1 in [(0.6, 0.3), (0.7, 0.8), (0.9, 0.99)]:
            pi0 = series.pi0_product(p0, p1).value
            _, b = series.pi1_sum(p0, p1)
            assert pi0 + b.value < 1

    def test_to_dict_is_json_safe(self):
        import json

        a, b = series.pi1_sum(0.8, 0.9)
        text = json.dumps({"A": a.to_dict(), "B": b.to_dict()})
        assert "Infinity" not in text


class TestPi1Report:
    def test_report_shape_and_verdicts(self):
        rep = series.pi1_report(0.8, 0.9, paths=20_000, barrier=120, seed=7)
        assert rep["variant_A"]["converged"] is False
        assert "diverges" in rep["verdicts"]["sum_A6_variantA"]
        assert rep["variant_B"]["tail_bound"] < 1e-10
        assert 0 < rep["mc_estimate"] < 1 and rep["mc_se"] > 0
        assert rep["selected_variant"] in ("sum_A6_variantB", None)
