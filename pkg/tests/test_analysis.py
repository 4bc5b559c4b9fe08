"""Exact speed formula, PGF evaluation, and the monotonicity constructions."""

import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cookiewalk import analysis
from cookiewalk.params import constant_cookies, delta
from cookiewalk.series import pi0_product

rationals_half_one = st.fractions(min_value=Fraction(51, 100),
                                  max_value=Fraction(99, 100),
                                  max_denominator=200)


class TestExactSpeed:
    def test_worked_value(self):
        assert analysis.exact_speed_earw("0.8", "0.9") == Fraction(3, 4)

    def test_float_inputs(self):
        assert analysis.exact_speed_earw(0.8, 0.9) == pytest.approx(0.75)

    @given(rationals_half_one, rationals_half_one)
    def test_formula_identity(self, p0, p1):
        v = analysis.exact_speed_earw(p0, p1)
        assert v == (2 * p0 - 1) / (2 * p0 - 1 + 2 * (1 - p1))
        assert 0 < v < 1

    def test_degenerate_p1_one(self):
        # with a sure first step right the walk never revisits: speed 1
        assert analysis.exact_speed_earw("0.8", "1") == 1

    @pytest.mark.parametrize("p0,p1", [(0.5, 0.9), (1.1, 0.9), (0.8, 0.0)])
    def test_domain(self, p0, p1):
        with pytest.raises(ValueError):
            analysis.exact_speed_earw(p0, p1)

    def test_monotone_in_each_argument(self):
        grid = [Fraction(k, 20) for k in range(11, 20)]
        for p1 in (Fraction(4, 5), Fraction(9, 10)):
            vals = [analysis.exact_speed_earw(p0, p1) for p0 in grid]
            assert all(a < b for a, b in zip(vals, vals[1:]))
        for p0 in (Fraction(3, 5), Fraction(4, 5)):
            vals = [analysis.exact_speed_earw(p0, p1) for p1 in grid]
            assert all(a < b for a, b in zip(vals, vals[1:]))


class TestExpectedZ0:
    def test_worked_value(self):
        assert analysis.expected_Z0("0.8", "0.9") == Fraction(1, 6)

    @given(rationals_half_one, rationals_half_one)
    def test_speed_identity(self, p0, p1):
        ez = analysis.expected_Z0(p0, p1)
        assert analysis.exact_speed_earw(p0, p1) == 1 / (1 + 2 * ez)


class TestPgf:
    def test_value_at_one_is_exact(self):
        assert analysis.pgf_eval(0.8, 0.9, 1.0).value == 1.0

    def test_value_at_zero_matches_pi0(self):
        g0 = analysis.pgf_eval(0.8, 0.9, 0.0, tol=1e-12).value
        assert g0 == pytest.approx(pi0_product(0.8, 0.9, tol=1e-13).value,
                                   abs=1e-10)

    def test_monotone_in_s(self):
        vals = [analysis.pgf_eval(0.8, 0.9, s).value
                for s in (0.0, 0.25, 0.5, 0.75, 1.0)]
        assert all(a < b for a, b in zip(vals, vals[1:]))
        assert all(0 < v <= 1 for v in vals)

    def test_tail_bound_sound(self):
        coarse = analysis.pgf_eval(0.7, 0.8, 0.5, tol=1e-4)
        fine = analysis.pgf_eval(0.7, 0.8, 0.5, tol=1e-13)
        assert abs(coarse.value - fine.value) <= coarse.tail_bound + 1e-13

    @pytest.mark.parametrize("p0,p1", [(0.7, 0.8), (0.8, 0.9), (0.9, 0.99)])
    def test_derivative_matches_mean(self, p0, p1):
        num = analysis.pgf_derivative_at_one(p0, p1)
        exact = float(analysis.expected_Z0(p0, p1))
        assert num == pytest.approx(exact, abs=1e-4)

    def test_s_domain(self):
        with pytest.raises(ValueError):
            analysis.pgf_eval(0.8, 0.9, 1.5)


class TestWeakenedStrengths:
    def test_worked_value(self):
        assert analysis.p_i_strength(3, "0.99", 8) == Fraction(697, 1100)

    def test_delta_preserved_exactly(self):
        base = delta(constant_cookies(3, "0.9"))
        for i in range(51):
            pi = analysis.p_i_strength(3, "0.9", i)
            assert delta(constant_cookies(3 + i, pi)) == base

    def test_strengths_decrease_to_half(self):
        vals = [analysis.p_i_strength(3, "0.9", i) for i in range(40)]
        assert all(a > b for a, b in zip(vals, vals[1:]))
        assert all(v > Fraction(1, 2) for v in vals)

    def test_domain(self):
        with pytest.raises(ValueError):
            analysis.p_i_strength(2, "0.9", 1)  # construction needs M >= 3
        with pytest.raises(ValueError):
            analysis.p_i_strength(3, "0.5", 1)


class TestSpeedLowerBound:
    def test_positive_on_domain(self):
        for k in range(1, 20):
            q = Fraction(5, 6) + Fraction(k, 121)
            if q > 1:
                break
            f = analysis.speed_lower_bound_3cookie(q)
            assert 0 < f < 1

    def test_closure_variant_agrees(self):
        q = Fraction(17, 20)
        assert analysis.speed_lower_bound_3cookie(q) == \
            analysis.speed_lower_bound_3cookie_closure(q)

    def test_domain(self):
        with pytest.raises(ValueError):
            analysis.speed_lower_bound_3cookie(Fraction(4, 5))


class TestCorollaryThreshold:
    def test_worked_value(self):
        assert analysis.corollary_threshold_N("0.99", "0.85") == 7

    def test_ceiling_of_quoted_expression(self):
        # recompute the bound with an independent Horner evaluation in exact
        # arithmetic and check N is its ceiling
        p, q = Fraction("0.99"), Fraction("0.85")
        N = analysis.corollary_threshold_N(p, q)
        D = (((24 * q - 42) * q - 3) * q + 28) * q - 9
        E = (((-6 * q + 9) * q + 5) * q - 8) * q + 1
        bound = 6 * (p * D + 2 * E) / ((6 * q - 5) * ((q - 2) * q - 1))
        assert N - 1 < bound <= N

    def test_grid(self):
        # any 5/6 < q < p < 1
        for p, q in [(Fraction(9, 10), Fraction(17, 20)),
                     (Fraction(99, 100), Fraction(9, 10)),
                     (Fraction(95, 100), Fraction(86, 100))]:
            assert analysis.corollary_threshold_N(p, q) >= 1


class TestPropositionBounds:
    def test_worked_values(self):
        eps_max, m = analysis.proposition_bounds("0.99", "0.85", "0.0045")
        assert Fraction("0.0045") < eps_max
        assert m == 115

    def test_epsilon_upper_bound_alone(self):
        eps_max = analysis.epsilon_upper_bound("0.99", "0.85")
        assert float(eps_max) == pytest.approx(0.0045475, abs=1e-6)

    def test_epsilon_beyond_bound_rejected(self):
        eps_max = analysis.epsilon_upper_bound("0.99", "0.85")
        with pytest.raises(ValueError):
            analysis.proposition_bounds("0.99", "0.85", eps_max * 2)

    def test_minimal_m_is_minimal(self):
        # delta of (p, 1/2+eps x (M-1)) = (2p-1) + (M-1) 2 eps must first
        # exceed 2 at M = minimal_M
        p, q, eps = Fraction("0.99"), Fraction("0.85"), Fraction("0.0045")
        _, m = analysis.proposition_bounds(p, q, eps)
        assert (2 * p - 1) + (m - 1) * 2 * eps > 2
        assert not (2 * p - 1) + (m - 2) * 2 * eps > 2


class TestOrderCounterexample:
    def test_zero_at_half(self):
        assert analysis.order_counterexample_gap(Fraction(1, 2)) == 0

    def test_positive_elsewhere(self):
        for p in (Fraction(3, 4), Fraction("0.99"), 0.6):
            assert analysis.order_counterexample_gap(p) > 0

    @given(rationals_half_one)
    def test_dual_forms_agree_exactly(self, p):
        # order_counterexample_gap raises internally if the factored and the
        # direct evaluation disagree
        assert analysis.order_counterexample_gap(p) > 0

    def test_domain(self):
        with pytest.raises(ValueError):
            analysis.order_counterexample_gap(Fraction(1, 4))


class TestFigure3Rows:
    def test_shape_and_grid(self):
        rows = analysis.figure3_rows()
        assert len(rows) == 3 * 99
        p0_first = [r[0] for r in rows[:99]]
        assert p0_first[0] == pytest.approx(0.505)
        assert p0_first[-1] == pytest.approx(0.995)

    def test_matches_exact_formula(self):
        for p0, p1, v in analysis.figure3_rows():
            assert v == pytest.approx(float(analysis.exact_speed_earw(p0, p1)),
                                      abs=1e-15)

    def test_strictly_increasing_per_curve(self):
        rows = analysis.figure3_rows()
        for c in range(3):
            curve = [r[2] for r in rows[99 * c:99 * (c + 1)]]
            assert all(a < b for a, b in zip(curve, curve[1:]))
