import math

import numpy as np
import pytest

from pqbaskakov import (
    ConfigurationError,
    DomainError,
    EvaluationError,
    Grid,
    PQParams,
    convergence_study,
    eval_king,
    modulus,
    modulus2,
    parse_schedule,
    rebase_point,
    smoothness_radius,
    smoothness_bound_report,
    composed_modulus_bound,
    weighted_norm,
)

PQ = PQParams(0.9, 0.8)
MOD_GRID = Grid(0.0, 10.0, 0.01)

# frozen from the closed-form root evaluated on the [0,50] step 0.01 grid,
# cross-checked against a 50-digit re-computation of the same supremum
CANONICAL_SCHEDULE = "p=1-1/(n+1)^2,q=1-1/(n+1)"
NORM_E1_FROZEN = {
    4: 0.1422433699214947,
    16: 0.05057454507884387,
    64: 0.014262112066142727,
    256: 0.003686972111631753,
}

# smoothness-bound radius at n=2, x=1, (0.9, 0.8): 3*coeff + p/(p^2/q + [2])
DELTA_2_AT_1 = 0.66300185401680288


class TestGrid:
    def test_inclusive_right_endpoint(self):
        grid = Grid(0.0, 2.0, 0.01)
        assert len(grid) == 201
        assert grid.points[0] == 0.0
        assert grid.points[-1] == pytest.approx(2.0, abs=1e-12)

    def test_non_integral_span_stays_inside(self):
        grid = Grid(0.0, 2.0, 0.3)
        assert len(grid) == 7
        assert grid.points[-1] <= 2.0

    def test_uniform_spacing(self):
        grid = Grid(0.5, 3.0, 0.125)
        gaps = np.diff(grid.points)
        assert np.all(np.abs(gaps - 0.125) < 1e-12)

    @pytest.mark.parametrize("args", [(-1.0, 2.0, 0.1), (1.0, 1.0, 0.1), (0.0, 1.0, 0.0)])
    def test_rejects_bad_specs(self, args):
        with pytest.raises(DomainError):
            Grid(*args)


class TestModulus:
    def test_constant_is_zero(self):
        assert modulus(lambda t: 4.0, 1.0, MOD_GRID) == 0.0

    def test_zero_delta_is_zero(self):
        assert modulus(lambda t: math.sin(t), 0.0, MOD_GRID) == 0.0

    def test_linear_function(self):
        assert modulus(lambda t: t, 0.5, MOD_GRID) == pytest.approx(0.5, abs=0.01)

    def test_negative_delta_rejected(self):
        with pytest.raises(DomainError):
            modulus(lambda t: t, -0.1, MOD_GRID)

    def test_non_finite_rejected(self):
        with pytest.raises(EvaluationError):
            modulus(lambda t: 1.0 / (t - 5.0) if t != 5.0 else float("inf"), 0.5, MOD_GRID)

    def test_nondecreasing_in_delta(self):
        f = lambda t: math.sin(t * t)
        values = [modulus(f, d, MOD_GRID) for d in (0.0, 0.1, 0.2, 0.5, 1.0)]
        assert all(b >= a for a, b in zip(values, values[1:]))

    def test_subadditive_up_to_grid_slack(self):
        f = lambda t: abs(math.sin(t))  # Lipschitz constant 1
        d1, d2 = 0.3, 0.45
        slack = 2.0 * MOD_GRID.step * 1.0
        assert modulus(f, d1 + d2, MOD_GRID) <= modulus(f, d1, MOD_GRID) + modulus(f, d2, MOD_GRID) + slack


class TestModulus2:
    def test_affine_vanishes(self):
        assert modulus2(lambda t: 3.0 * t - 1.0, 0.7, MOD_GRID) == pytest.approx(0.0, abs=1e-12)

    def test_constant_vanishes(self):
        assert modulus2(lambda t: 2.0, 0.7, MOD_GRID) == 0.0

    def test_square_gives_twice_delta(self):
        # second difference of x^2 is exactly 2h^2; the shift range [0, sqrt(delta)]
        # makes the supremum 2*delta
        assert modulus2(lambda t: t * t, 0.25, MOD_GRID) == pytest.approx(0.5, abs=0.02)

    def test_nondecreasing_in_delta(self):
        f = lambda t: math.sin(t * t)
        values = [modulus2(f, d, MOD_GRID) for d in (0.0, 0.05, 0.2, 0.8)]
        assert all(b >= a for a, b in zip(values, values[1:]))


class TestWeightedNorm:
    def test_constant(self):
        assert weighted_norm(lambda t: 1.0, 2, MOD_GRID) == 1.0

    def test_identity_peaks_at_one(self):
        fine = Grid(0.0, 10.0, 0.001)
        assert weighted_norm(lambda t: t, 2, fine) == pytest.approx(0.5, abs=1e-3)

    def test_square_saturates_from_below(self):
        wide = Grid(0.0, 50.0, 0.01)
        value = weighted_norm(lambda t: t * t, 2, wide)
        assert 0.999 < value < 1.0

    def test_absolute_homogeneity_exact(self):
        f = lambda t: math.sin(t) + 0.25 * t
        a = weighted_norm(lambda t: -3.0 * f(t), 2, MOD_GRID)
        b = 3.0 * weighted_norm(f, 2, MOD_GRID)
        assert a == b


class TestConvergenceStudy:
    def test_canonical_schedule_frozen_values(self):
        rows = convergence_study(parse_schedule(CANONICAL_SCHEDULE), [4, 16, 64, 256])
        assert [r.n for r in rows] == [4, 16, 64, 256]
        for row in rows:
            assert row.norm_e0 == 0.0
            assert row.norm_e2 == 0.0
            assert row.norm_e1 == pytest.approx(NORM_E1_FROZEN[row.n], abs=1e-10)
        norms = [r.norm_e1 for r in rows]
        assert all(b < a for a, b in zip(norms, norms[1:]))
        assert norms[-1] < 0.05

    def test_second_builtin_schedule(self):
        rows = convergence_study(parse_schedule("p=1,q=1-1/(n+1)"), [4, 16])
        assert rows[0].p_n == 1.0
        assert rows[0].norm_e1 > rows[1].norm_e1

    def test_schedule_violation_names_n(self):
        with pytest.raises(ConfigurationError) as err:
            convergence_study(lambda n: (0.5, 0.9), [7])
        assert "n=7" in str(err.value)

    def test_bracket_column(self):
        rows = convergence_study(parse_schedule(CANONICAL_SCHEDULE), [4])
        pq = PQParams(1 - 1 / 25, 1 - 1 / 5)
        assert rows[0].bracket_n == pytest.approx(2.748416, rel=1e-12)


class TestParseSchedule:
    def test_expressions_in_n(self):
        sched = parse_schedule("p=1-1/(n+1)^2,q=1-1/(n+1)")
        p, q = sched(4)
        assert p == pytest.approx(0.96)
        assert q == pytest.approx(0.8)

    @pytest.mark.parametrize("text", ["p=1", "q=0.5,q=0.6", "p=,q=0.5", "nonsense"])
    def test_malformed_rejected(self, text):
        with pytest.raises(ConfigurationError):
            parse_schedule(text)


class TestSmoothnessBound:
    def test_delta_zero_at_origin(self):
        assert smoothness_radius(2, 0.0, PQ) == 0.0

    def test_delta_frozen_value(self):
        assert smoothness_radius(2, 1.0, PQ) == pytest.approx(DELTA_2_AT_1, rel=1e-12)

    def test_claimed_variant_drops_square(self):
        # both versions agree at x=1 and split elsewhere
        assert smoothness_radius(2, 1.0, PQ, as_claimed=True) == pytest.approx(DELTA_2_AT_1, rel=1e-12)
        assert smoothness_radius(2, 2.0, PQ, as_claimed=True) < smoothness_radius(2, 2.0, PQ)

    def test_report_constant_function(self):
        # lhs is pure series truncation noise for constants and must not be
        # attributed to the bound
        rep = smoothness_bound_report(lambda t: 3.0, 2, PQ, Grid(0.0, 1.0, 0.25))
        assert all(row.lhs == pytest.approx(0.0, abs=1e-9) for row in rep.rows)
        assert rep.max_m_required == 0.0

    def test_report_identity_lhs_matches_closed_form(self):
        rep = smoothness_bound_report(lambda t: t, 2, PQ, Grid(0.0, 1.0, 0.25))
        for row in rep.rows:
            assert row.lhs == pytest.approx(row.x - rebase_point(row.x, 2, PQ), abs=1e-8)

    def test_report_oscillatory_regression(self):
        # recorded baseline for the comparison function, not ground truth
        rep = smoothness_bound_report(lambda t: math.sin(t * t), 2, PQ, Grid(0.0, 2.0, 0.05))
        assert math.isfinite(rep.max_m_required)
        assert rep.max_m_required == pytest.approx(1.2102703980562907e-05, rel=1e-6)


class TestComposedModulusBound:
    def test_constant_function_zero(self):
        assert composed_modulus_bound(lambda t: 5.0, 2, 1.0, PQ, MOD_GRID) == 0.0

    def test_origin_radicand_reduces_to_linear_term(self):
        # radicand at x=0 is p^(n-1)/(p^n/q + [n]) = 0.9/2.7125
        f = lambda t: t
        want = 2.0 * modulus(lambda z: f(z * z), math.sqrt(0.33179723502304147), MOD_GRID)
        assert composed_modulus_bound(f, 2, 0.0, PQ, MOD_GRID) == pytest.approx(want, rel=1e-12)

    def test_two_step_oracle_near_one(self):
        pq = PQParams(0.99, 0.98)
        # radicand by direct substitution at n=10, x=1 equals the claimed
        # second-moment bound evaluated there
        radicand = 0.49150712236289478506
        f = lambda t: t
        want = 2.0 * modulus(lambda z: f(z * z), math.sqrt(radicand), MOD_GRID)
        assert composed_modulus_bound(f, 10, 1.0, pq, MOD_GRID) == pytest.approx(want, rel=1e-9)

    def test_negative_radicand_reported_not_clamped(self):
        # at n=1 the coefficient goes negative, so large x flips the sign
        with pytest.raises(DomainError):
            composed_modulus_bound(lambda t: t, 1, 8.0, PQ, MOD_GRID)

    def test_dominates_true_error_in_regime(self):
        pq = PQParams(1 - 1 / 121, 1 - 1 / 11)
        f = lambda t: 1.0 / (1.0 + t * t)
        for x in (0.5, 1.0, 2.0):
            lhs = abs(eval_king(f, 10, x, pq).value - f(x))
            assert lhs <= composed_modulus_bound(f, 10, x, pq, MOD_GRID)
