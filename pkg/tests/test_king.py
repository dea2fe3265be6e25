import math

import pytest

from pqbaskakov import (
    DomainError,
    PQParams,
    auxiliary_operator,
    bound_audit,
    central_moments,
    eval_king,
    king_moment_closed,
    pq_integer,
    rebase_point,
)

PQ = PQParams(0.9, 0.8)
PQ_NEAR1 = PQParams(0.99, 0.98)

# frozen from a 50-digit direct-substitution oracle (quadratic root with
# residual check); claimed-bound values by direct substitution as well
R2_AT_1 = 0.64295888655907400865
R10_AT_1 = 0.90486501776415474345
AUDIT_N2 = dict(
    first_abs=0.35704111344092599135,
    first_bound=0.11040153966458713583,
    second=0.71408222688185198270,
    second_bound=0.55260031435221574632,
)
AUDIT_N10 = dict(
    first_abs=0.09513498223584525655,
    first_bound=0.19843952439714680619,
    second=0.19026996447169051310,
    second_bound=0.49150712236289478506,
)


def _direct_root(x, n, pq):
    bracket = pq_integer(n, pq)
    a = bracket + pq.p**n / pq.q
    b = pq.p ** (n - 1)
    return (-b + math.sqrt(b * b + 4.0 * a * bracket * x * x)) / (2.0 * a)


def _rationalized_root(x, n, pq):
    bracket = pq_integer(n, pq)
    a = bracket + pq.p**n / pq.q
    b = pq.p ** (n - 1)
    return 2.0 * bracket * x * x / (b + math.sqrt(b * b + 4.0 * a * bracket * x * x))


class TestRn:
    def test_zero(self):
        assert rebase_point(0.0, 2, PQ) == 0.0
        assert rebase_point(0.0, 7, PQ_NEAR1) == 0.0

    def test_frozen_values(self):
        assert rebase_point(1.0, 2, PQ) == pytest.approx(R2_AT_1, rel=1e-13)
        assert rebase_point(1.0, 10, PQ_NEAR1) == pytest.approx(R10_AT_1, rel=1e-13)

    def test_negative_rejected(self):
        with pytest.raises(DomainError):
            rebase_point(-0.1, 2, PQ)

    @pytest.mark.parametrize("pq", [PQ, PQ_NEAR1, PQParams(1.0, 0.9)])
    @pytest.mark.parametrize("n", [1, 2, 5, 10])
    def test_bounded_by_x_and_quadratic_residual(self, n, pq):
        bracket = pq_integer(n, pq)
        a = bracket + pq.p**n / pq.q
        b = pq.p ** (n - 1)
        for i in range(0, 21):
            x = 0.25 * i
            r = rebase_point(x, n, pq)
            assert 0.0 <= r <= x
            residual = a * r * r + b * r - bracket * x * x
            assert abs(residual) <= 1e-10 * max(bracket * x * x, 1e-30)

    def test_matches_stable_form_everywhere(self):
        # the rationalized root is well-conditioned at every scale, so the
        # branch selection must track it to full precision
        for n in (1, 2, 10):
            for x in (1e-8, 1e-4, 0.01, 0.3, 1.0, 7.0, 50.0):
                assert rebase_point(x, n, PQ) == pytest.approx(_rationalized_root(x, n, PQ), rel=1e-12)

    def test_matches_direct_root_where_it_is_conditioned(self):
        # the direct formula only cancels for small x; away from there the
        # two algebraic forms and the implementation must all coincide
        for n in (1, 2, 10):
            for x in (0.5, 1.0, 3.0, 20.0):
                assert rebase_point(x, n, PQ) == pytest.approx(_direct_root(x, n, PQ), rel=1e-12)


class TestKingSeries:
    def test_preserves_square_example(self):
        res = eval_king(lambda t: t * t, 2, 1.0, PQ)
        assert res.value == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize("pq", [PQ, PQ_NEAR1, PQParams(1.0, 0.9)])
    @pytest.mark.parametrize("n", [1, 2, 5, 10])
    def test_preserves_square_on_dense_grid(self, n, pq):
        from pqbaskakov import TruncationPolicy

        policy = TruncationPolicy(tail_tolerance=1e-14)
        for i in range(0, 21):
            x = 0.25 * i
            res = eval_king(lambda t: t * t, n, x, pq, policy)
            assert res.value == pytest.approx(x * x, abs=1e-8)

    def test_first_moment_is_rebased_point(self):
        res = eval_king(lambda t: t, 2, 1.0, PQ)
        assert res.value == pytest.approx(R2_AT_1, abs=1e-8)

    def test_partition_of_unity(self):
        for n in (1, 2, 5):
            res = eval_king(lambda t: 1.0, n, 2.0, PQ)
            assert res.value == pytest.approx(1.0, abs=1e-9)

    def test_moment_closed(self):
        assert king_moment_closed(0, 2, 1.0, PQ) == 1.0
        assert king_moment_closed(1, 2, 1.0, PQ) == pytest.approx(R2_AT_1, rel=1e-13)
        assert king_moment_closed(2, 5, 3.7, PQ) == pytest.approx(13.69, rel=1e-14)
        with pytest.raises(DomainError):
            king_moment_closed(3, 2, 1.0, PQ)


class TestCentralMoments:
    def test_zero_point(self):
        cm = central_moments(2, 0.0, PQ)
        assert cm.first == 0.0
        assert cm.second == 0.0

    def test_frozen_desk_scale_point(self):
        cm = central_moments(2, 1.0, PQ)
        assert abs(cm.first) == pytest.approx(AUDIT_N2["first_abs"], rel=1e-12)
        assert cm.first_bound_claimed == pytest.approx(AUDIT_N2["first_bound"], rel=1e-12)
        assert cm.second == pytest.approx(AUDIT_N2["second"], rel=1e-12)
        assert cm.second_bound_claimed == pytest.approx(AUDIT_N2["second_bound"], rel=1e-12)

    def test_frozen_near_one_point(self):
        cm = central_moments(10, 1.0, PQ_NEAR1)
        assert abs(cm.first) == pytest.approx(AUDIT_N10["first_abs"], rel=1e-12)
        assert cm.first_bound_claimed == pytest.approx(AUDIT_N10["first_bound"], rel=1e-12)
        assert cm.second == pytest.approx(AUDIT_N10["second"], rel=1e-12)
        assert cm.second_bound_claimed == pytest.approx(AUDIT_N10["second_bound"], rel=1e-12)

    def test_second_moment_nonnegative_on_grid(self):
        for n in (1, 2, 5, 10):
            for i in range(0, 21):
                cm = central_moments(n, 0.25 * i, PQ)
                assert cm.second >= -1e-12


class TestBoundAudit:
    def test_desk_scale_violation_and_near_one_satisfaction(self):
        rows = bound_audit([2, 10], [PQ, PQ_NEAR1], [0.0, 1.0])
        by_key = {(r.n, r.p, r.q, r.x): r for r in rows}
        bad = by_key[(2, 0.9, 0.8, 1.0)]
        assert bad.first_violated and bad.second_violated
        good = by_key[(10, 0.99, 0.98, 1.0)]
        assert not good.first_violated and not good.second_violated

    def test_origin_rows_never_flag(self):
        rows = bound_audit([2, 10], [PQ, PQ_NEAR1], [0.0])
        for row in rows:
            assert row.x == 0.0
            assert not row.first_violated and not row.second_violated

    def test_row_count_is_product(self):
        rows = bound_audit([1, 2, 3], [PQ, PQ_NEAR1], [0.0, 0.5, 1.0, 2.0])
        assert len(rows) == 3 * 2 * 4


class TestAuxiliaryOperator:
    def test_fixed_points(self):
        assert auxiliary_operator(lambda t: 1.0, 2, 1.0, PQ) == pytest.approx(1.0, abs=1e-9)
        for x in (0.5, 1.0, 2.0):
            assert auxiliary_operator(lambda t: t, 2, x, PQ) == pytest.approx(x, abs=1e-8)

    def test_square_shifts_by_rebase_gap(self):
        # x^2 + x^2 - rebase_point(x)^2 at x = 1
        want = 2.0 - R2_AT_1 * R2_AT_1
        assert auxiliary_operator(lambda t: t * t, 2, 1.0, PQ) == pytest.approx(want, abs=1e-8)
