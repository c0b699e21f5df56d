import math
import pickle

import numpy as np
import pytest
from scipy.integrate import quad

from adiaprep import (
    DIVERGING,
    DomainError,
    MonotonicityError,
    beta_schedule,
    gap_informed_schedule,
    linear_schedule,
    measure_boundary_order,
    piecewise_schedule,
    smooth_transition_inf,
    sqrt_schedule,
    truncated_cosine,
)
from adiaprep.schedules import schedule_table, write_schedule_csv

D = 0.1


def all_test_schedules():
    lin = linear_schedule()
    out = [lin, beta_schedule(1), beta_schedule(3), sqrt_schedule(lin, D),
           sqrt_schedule(lin, 0.25)]
    for n in range(4):
        out.append(piecewise_schedule(beta_schedule(n), lin, D))
    out.append(piecewise_schedule(beta_schedule(1), beta_schedule(1), 0.05))
    return out


class TestEndpointAndMonotonicity:
    @pytest.mark.parametrize("sched", all_test_schedules(), ids=lambda s: s.label)
    def test_exact_endpoints(self, sched):
        assert sched(0.0) == 0.0
        assert sched(1.0) == 1.0

    @pytest.mark.parametrize("sched", all_test_schedules(), ids=lambda s: s.label)
    def test_nondecreasing_on_grid(self, sched):
        grid = np.linspace(0.0, 1.0, 10_001)
        vals = sched(grid)
        assert np.all(np.diff(vals) >= -1e-14)

    @pytest.mark.parametrize("sched", all_test_schedules(), ids=lambda s: s.label)
    def test_continuity_on_grid(self, sched):
        grid = np.linspace(0.0, 1.0, 10_001)
        vals = sched(grid)
        # No jumps; the sqrt onset contributes increments of order sqrt(d*dx).
        assert np.max(np.diff(vals)) < 0.02

    @pytest.mark.parametrize("sched", all_test_schedules(), ids=lambda s: s.label)
    def test_scalar_matches_vector_path(self, sched):
        for x in (0.0, 0.01, D / 2, 0.3, 0.5, 0.93, 1.0 - D / 2, 1.0):
            assert sched.scalar(x) == pytest.approx(sched(x), abs=1e-15)

    @pytest.mark.parametrize("sched", all_test_schedules(), ids=lambda s: s.label)
    def test_picklable(self, sched):
        clone = pickle.loads(pickle.dumps(sched))
        xs = np.linspace(0, 1, 7)
        assert np.allclose(clone(xs), sched(xs), atol=0)


class TestLinearAndBeta:
    def test_linear_values(self):
        lin = linear_schedule()
        assert lin(0.3) == 0.3
        assert lin.order == 0

    def test_beta0_is_identity(self):
        b0 = beta_schedule(0)
        xs = np.linspace(0, 1, 101)
        assert np.allclose(b0(xs), xs, atol=1e-14)

    def test_beta1_quarter(self):
        assert beta_schedule(1)(0.25) == pytest.approx(0.15625, abs=1e-14)

    @pytest.mark.parametrize("n", range(6))
    def test_beta_midpoint_symmetry(self, n):
        assert beta_schedule(n)(0.5) == pytest.approx(0.5, abs=1e-13)

    @pytest.mark.parametrize("n", range(4))
    def test_beta_derivative_formula(self, n):
        sched = beta_schedule(n)
        xs = np.linspace(0.05, 0.95, 19)
        h = 1e-6
        central = (sched(xs + h) - sched(xs - h)) / (2 * h)
        assert np.max(np.abs(central - sched.derivative(xs))) < 1e-8

    def test_beta_rejects_negative_n(self):
        with pytest.raises(DomainError):
            beta_schedule(-1)


class TestPiecewise:
    def test_equals_reference_in_bulk(self):
        lin = linear_schedule()
        s = piecewise_schedule(beta_schedule(1), lin, D)
        xs = np.linspace(D, 1.0 - D, 401)
        assert np.max(np.abs(s(xs) - lin(xs))) == 0.0

    def test_left_branch_value(self):
        # Direct evaluation of the boundary blend at x = d/2: the weight and
        # the squeezed ramp both evaluate sigma at 1/2.
        s = piecewise_schedule(beta_schedule(1), linear_schedule(), D)
        a = beta_schedule(1)(0.5)
        expected = (1 - a) * (D * a) + a * (D / 2)
        assert s(D / 2) == pytest.approx(expected, abs=1e-15)

    def test_right_branch_mirrors_left_for_linear_reference(self):
        s = piecewise_schedule(beta_schedule(2), linear_schedule(), D)
        xs = np.linspace(0.0, 1.0, 1001)
        assert np.max(np.abs(1.0 - s(1.0 - xs) - s(xs))) < 1e-14

    @staticmethod
    def _derivative(s, x, k, h):
        if k == 1:
            return (s(x + h) - s(x - h)) / (2 * h)
        if k == 2:
            return (s(x + h) - 2 * s(x) + s(x - h)) / h ** 2
        return (s(x + 2 * h) - 2 * s(x + h) + 2 * s(x - h) - s(x - 2 * h)) / (2 * h ** 3)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_joint_smoothness(self, n):
        # Derivatives up to n are continuous across the joints: the mismatch
        # of one-sided values shrinks linearly with the probing distance
        # (a genuine jump would leave it constant).
        s = piecewise_schedule(beta_schedule(n), linear_schedule(), D)
        h = 1e-4
        for joint in (D, 1.0 - D):
            for k in range(1, min(n, 3) + 1):
                jumps = []
                for delta in (8e-3, 4e-3, 2e-3):
                    left = self._derivative(s.scalar, joint - delta, k, h)
                    right = self._derivative(s.scalar, joint + delta, k, h)
                    jumps.append(abs(right - left))
                floor = 1e-6 * max(jumps[0], 1.0)
                assert jumps[2] < 0.6 * jumps[0] + floor

    def test_d_domain(self):
        with pytest.raises(DomainError):
            piecewise_schedule(beta_schedule(1), linear_schedule(), 0.5)
        with pytest.raises(DomainError):
            piecewise_schedule(beta_schedule(1), linear_schedule(), 0.0)


class TestSqrt:
    def test_bulk_branch(self):
        lin = linear_schedule()
        s = sqrt_schedule(lin, D)
        assert s(0.5) == 0.5

    def test_left_branch_formula(self):
        lin = linear_schedule()
        s = sqrt_schedule(lin, D)
        x = 0.01
        w = smooth_transition_inf(x / (2 * D))
        expected = (1 - w) * D * math.sqrt(x / D) + w * x
        assert s(x) == pytest.approx(expected, abs=1e-15)

    def test_d_domain(self):
        with pytest.raises(DomainError):
            sqrt_schedule(linear_schedule(), 0.3)

    def test_divergent_quotient(self):
        s = sqrt_schedule(linear_schedule(), D)
        q1 = s(1e-4) / 1e-4
        q2 = s(1e-6) / 1e-6
        assert q2 > 5 * q1


class TestTransitionFunctions:
    def test_smooth_transition_endpoints(self):
        assert smooth_transition_inf(0.0) == 0.0
        assert smooth_transition_inf(1.0) == 1.0
        assert smooth_transition_inf(0.5) == pytest.approx(0.5, abs=1e-15)

    def test_smooth_transition_symmetry_and_range(self):
        xs = np.linspace(0, 1, 101)
        vals = smooth_transition_inf(xs)
        assert np.all((vals >= 0) & (vals <= 1))
        assert np.max(np.abs(vals + smooth_transition_inf(1 - xs) - 1)) < 1e-14

    def test_truncated_cosine_values(self):
        assert truncated_cosine(0.0) == pytest.approx(0.0, abs=1e-15)
        assert truncated_cosine(1.0) == pytest.approx(1.0, abs=1e-15)
        # (0.75 pi - 1) / (1.5 pi - 2) is exactly one half.
        assert truncated_cosine(0.5) == pytest.approx(0.5, abs=1e-15)

    def test_truncated_cosine_nonnegative_monotone(self):
        xs = np.linspace(0, 1, 1001)
        vals = truncated_cosine(xs)
        assert np.all(vals >= -1e-15)
        assert np.all(np.diff(vals) > 0)


class TestGapInformed:
    def test_constant_gap_constant_g_identity(self):
        s = gap_informed_schedule(lambda x: 1.0, lambda x: np.ones_like(np.asarray(x, float)))
        xs = np.linspace(0, 1, 101)
        assert np.max(np.abs(s(xs) - xs)) < 1e-8

    def test_constant_gap_truncated_cosine_matches_antiderivative(self):
        # With a flat gap the solution is the normalized antiderivative of g.
        s = gap_informed_schedule(lambda x: 1.0, truncated_cosine)
        total, _ = quad(truncated_cosine, 0.0, 1.0, epsabs=1e-13)
        for x in (0.1, 0.25, 0.5, 0.8):
            part, _ = quad(truncated_cosine, 0.0, x, epsabs=1e-13)
            assert s(x) == pytest.approx(part / total, abs=5e-6)

    def test_slows_where_gap_small(self):
        gap = lambda y: 0.2 + 3.0 * (y - 0.6) ** 2
        s = gap_informed_schedule(gap, lambda x: np.ones_like(np.asarray(x, float)))
        xs = np.linspace(0.01, 0.99, 301)
        ds = s.derivative(xs)
        ratio = ds / gap(s(xs))
        # d s / dx is proportional to gap(s) when g is constant, up to the
        # degree-10 fit residual.
        assert np.std(ratio) / np.mean(ratio) < 5e-3

    def test_rejects_nonpositive_gap(self):
        with pytest.raises(DomainError):
            gap_informed_schedule(lambda x: x - 0.5, truncated_cosine)

    def test_rejects_zero_g(self):
        with pytest.raises(DomainError):
            gap_informed_schedule(lambda x: 1.0, lambda x: np.zeros_like(np.asarray(x, float)))

    def test_coefficients_export(self):
        s = gap_informed_schedule(lambda x: 1.0, truncated_cosine, degree=8)
        payload = s.coefficients_json()
        assert '"coefficients"' in payload
        assert len(s.coefficients) == 9


class TestBoundaryOrder:
    def test_linear_order(self):
        assert measure_boundary_order(linear_schedule()) == 0

    def test_beta2_order(self):
        assert measure_boundary_order(beta_schedule(2)) == 2

    @pytest.mark.parametrize("n", [0, 1, 2, 3])
    def test_smoothed_schedules(self, n):
        s = piecewise_schedule(beta_schedule(n), linear_schedule(), D)
        assert measure_boundary_order(s, tol=1e-6) == n

    def test_sqrt_diverging(self):
        assert measure_boundary_order(sqrt_schedule(linear_schedule(), D)) == DIVERGING

    def test_gap_informed_order(self):
        s = gap_informed_schedule(lambda x: 0.5 + (x - 0.4) ** 2,
                                  lambda x: 0.2 + 0.8 * np.asarray(x, float))
        assert measure_boundary_order(s) == 0

    def test_mixed_orders_take_minimum(self):
        # Smooth only at the left end: 1 - (1 - x)^1... use an asymmetric ramp.
        class Asym(linear_schedule().__class__):
            def _evaluate(self, arr):
                return arr ** 2 * (2 - arr) / 1.0  # s'(0)=0, s'(1)=1

        assert measure_boundary_order(Asym()) == 0


class TestExport:
    def test_schedule_table_shapes(self):
        x, s, ds = schedule_table(beta_schedule(1), 101)
        assert len(x) == len(s) == len(ds) == 101
        assert s[0] == 0.0 and s[-1] == 1.0

    def test_csv_write(self, tmp_path):
        out = tmp_path / "sched.csv"
        write_schedule_csv(beta_schedule(1), out, n_points=11,
                           header_lines=["kind: beta", "n: 1"])
        text = out.read_text()
        assert text.startswith("# kind: beta")
        assert "x,s,ds_dx" in text
        assert len(text.strip().splitlines()) == 2 + 1 + 11
