import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from signed_dynamics import (
    DivergenceError,
    GainEvaluationError,
    GainFunction,
    IntegratorConfig,
    IntegratorInstability,
    InvalidParameter,
    NonlinearitySpec,
    Schedule,
    Trajectory,
    cubic_linear,
    gauge_schedule,
    gauge_transform,
    identity,
    integrate,
    integrate_gain_flow,
    integrate_nonlinear_additive,
    laplacian,
    make_nonlinearity,
    tabulated,
)
from signed_dynamics.dynamics import arctan_linear, divided_difference, effective_gain, rhs_linear

from conftest import ANTAGONISTIC, CHAIN, EXAMPLE1, T0, example2_schedule, schedules, signed_matrices, states

COARSE = IntegratorConfig(step=0.01)


def antagonistic_closed_form(x0, t):
    """exp(-L t) = I - L (1 - e^{-2t}) / 2 for the hostile pair."""
    L = laplacian(ANTAGONISTIC)
    return (np.eye(2) - L * (1 - math.exp(-2 * t)) / 2) @ x0


def expm_oracle(schedule, x0, t):
    x = np.array(x0, dtype=float)
    for lo, hi, m in schedule.pieces(0.0, t):
        x = scipy.linalg.expm(-laplacian(m.entries) * (hi - lo)) @ x
    return x


class TestRhs:
    def test_zero_state(self):
        assert not rhs_linear(EXAMPLE1, np.zeros(3)).any()

    def test_hostile_equilibrium(self):
        assert np.array_equal(rhs_linear(ANTAGONISTIC, [1.0, -1.0]), [0, 0])

    def test_example2_first_segment(self):
        a = example2_schedule().matrix_at(0.0)
        assert np.allclose(rhs_linear(a, [1, -1, -0.5]), [0, 0, 1.5])

    @given(signed_matrices(max_n=8), st.data())
    def test_equals_minus_laplacian(self, a, data):
        x = data.draw(states(len(a), 5.0))
        assert np.allclose(rhs_linear(a, x, check=True), -laplacian(a) @ x, rtol=1e-12, atol=1e-9)


class TestIntegrate:
    def test_antagonistic_limit(self):
        traj = integrate(ANTAGONISTIC, [0.7, 0.1], 30.0)
        assert np.allclose(traj.final, [0.3, -0.3], atol=1e-6)

    def test_antagonistic_transient(self):
        traj = integrate(ANTAGONISTIC, [1.0, 0.0], 2.0)
        for t in (0.5, 1.0, 2.0):
            assert np.allclose(traj.at(t), antagonistic_closed_form([1.0, 0.0], t), atol=1e-10)

    def test_example2_periodic_orbit(self):
        traj = integrate(example2_schedule(), [1.0, -1.0, -0.5], 2 * T0)
        assert traj.at(T0)[2] == pytest.approx(0.5, abs=1e-9)
        assert traj.at(2 * T0)[2] == pytest.approx(-0.5, abs=1e-9)
        assert np.array_equal(traj.x[:, 0], np.ones(len(traj)))
        assert np.array_equal(traj.x[:, 1], -np.ones(len(traj)))

    def test_steps_land_on_switches(self):
        traj = integrate(example2_schedule(), [1.0, -1.0, -0.5], 3 * T0, COARSE)
        for k in (1, 2, 3):
            assert np.min(np.abs(traj.t - k * T0)) < 1e-12

    def test_chain_gauge_average(self):
        x0 = np.array([0.3, -0.8, 0.5])
        c = (-x0[0] + x0[1] + x0[2]) / 3
        traj = integrate(CHAIN, x0, 40.0)
        assert np.allclose(traj.final, [-c, c, c], atol=1e-6)

    def test_zero_state_stays_zero(self):
        traj = integrate(example2_schedule(), np.zeros(3), 5.0, COARSE)
        assert not traj.x.any()

    def test_against_matrix_exponential(self):
        s = example2_schedule()
        traj = integrate(s, [0.2, 0.9, -0.4], 5.0)
        assert np.allclose(traj.final, expm_oracle(s, [0.2, 0.9, -0.4], 5.0), atol=1e-10)

    def test_bad_inputs(self):
        with pytest.raises(InvalidParameter):
            integrate(EXAMPLE1, [1, 2, 3], 0.0)
        with pytest.raises(ValueError):
            integrate(EXAMPLE1, [1, 2], 1.0)
        with pytest.raises(ValueError):
            integrate(EXAMPLE1, [1, np.nan, 3], 1.0)

    def test_record_every_keeps_endpoint(self):
        traj = integrate(ANTAGONISTIC, [1.0, 0.0], 1.0, IntegratorConfig(step=0.01, record_every=7))
        assert traj.t[-1] == 1.0
        assert len(traj) < 20

    def test_deterministic(self):
        a = integrate(example2_schedule(), [1.0, -1.0, -0.5], 3.0, COARSE)
        b = integrate(example2_schedule(), [1.0, -1.0, -0.5], 3.0, COARSE)
        assert a.to_csv() == b.to_csv()


class TestGauge:
    def test_identity_signs(self):
        assert gauge_transform([1, 1, 1], EXAMPLE1).entries.tolist() == EXAMPLE1.tolist()

    def test_camp_gauge_makes_positive(self):
        assert np.all(gauge_transform([1, -1], ANTAGONISTIC).entries >= 0)

    @settings(max_examples=30, deadline=None)
    @given(schedules(max_n=4), st.data())
    def test_trajectory_conjugation(self, s, data):
        d = np.array(data.draw(st.lists(st.sampled_from([-1.0, 1.0]), min_size=s.n, max_size=s.n)))
        x0 = data.draw(states(s.n))
        plain = integrate(s, x0, 3.0, COARSE)
        gauged = integrate(gauge_schedule(d, s), d * x0, 3.0, COARSE)
        assert np.array_equal(plain.t, gauged.t)
        assert np.allclose(gauged.x, plain.x * d, atol=1e-12)


class TestNonlinearities:
    def test_divided_difference_examples(self):
        h = cubic_linear(1.0)
        assert divided_difference(identity(), 0.3, -2.0) == pytest.approx(1.0)
        assert divided_difference(h, 1.0, -1.0) == pytest.approx(2.0)
        assert divided_difference(h, 0.4, 0.4) == pytest.approx(1 + 3 * 0.16)

    def test_divided_difference_continuous(self):
        h = arctan_linear(0.5)
        near = divided_difference(h, 0.7, 0.7 + 1e-9)
        assert near == pytest.approx(divided_difference(h, 0.7, 0.7), rel=1e-8)

    @pytest.mark.parametrize("alpha", [-1.0, -2.0])
    def test_arctan_parameter_range(self, alpha):
        with pytest.raises(InvalidParameter):
            arctan_linear(alpha)

    def test_cubic_parameter_range(self):
        with pytest.raises(InvalidParameter):
            cubic_linear(-0.1)

    def test_tabulated_must_be_increasing_through_zero(self):
        with pytest.raises(InvalidParameter):
            tabulated([-1, 0, 1], [-1, 0.5, 1])
        with pytest.raises(InvalidParameter):
            tabulated([-1, 0, 1], [1, 0, -1])

    def test_tabulated_extends_linearly(self):
        h = tabulated([-1, 0, 1], [-2, 0, 2])
        assert float(h.func(np.array(3.0))) == pytest.approx(6.0)
        assert float(h.deriv(np.array(3.0))) > 0

    def test_registry(self):
        assert make_nonlinearity("cubic", beta=2.0).params == {"beta": 2.0}
        with pytest.raises(InvalidParameter):
            make_nonlinearity("sigmoid")


class TestNonlinearProtocols:
    @pytest.mark.parametrize("variant", ["node", "edge"])
    def test_identity_bit_compatible(self, variant):
        s = example2_schedule()
        lin = integrate(s, [0.3, -0.2, 0.9], 4.0, COARSE)
        nl, _ = integrate_nonlinear_additive(s, identity(), [0.3, -0.2, 0.9], 4.0, COARSE, variant)
        assert np.array_equal(lin.t, nl.t)
        assert np.array_equal(lin.x, nl.x)

    @pytest.mark.parametrize("variant", ["node", "edge"])
    def test_gain_signs_and_tech2(self, variant):
        s = Schedule.periodic([CHAIN, -CHAIN.T], [0.5, 0.5])
        traj, gains = integrate_nonlinear_additive(s, cubic_linear(1.0), [0.8, -0.3, 0.1], 3.0, COARSE, variant)
        for t, g in zip(gains.t, gains.gains):
            assert np.array_equal(np.sign(g), np.sign(s.matrix_at(t).entries))
        assert traj.meta["tech2_residual"] < 1e-8

    @pytest.mark.parametrize("variant", ["node", "edge"])
    def test_effective_gain_reproduces_rhs(self, variant):
        spec = NonlinearitySpec(cubic_linear(0.5), {(2, 0): arctan_linear(1.0)})
        a = EXAMPLE1
        x = np.array([0.4, -1.2, 0.7])
        g = effective_gain(a, x, spec, variant)
        _, gains = integrate_nonlinear_additive(a, spec, x, 0.01, IntegratorConfig(step=0.01), variant)
        assert np.allclose(gains.gains[0], g)
        assert np.all((g == 0) == (a == 0))

    @pytest.mark.parametrize("variant", ["node", "edge"])
    def test_finite_difference_slope(self, variant):
        from signed_dynamics.dynamics import _edge_rhs, _node_rhs

        rhs = _node_rhs if variant == "node" else _edge_rhs
        spec = NonlinearitySpec(cubic_linear(1.0))
        x0 = np.array([0.5, -0.9, 0.2])
        f0 = rhs(np.abs(CHAIN), np.sign(CHAIN), x0, spec)
        errs = []
        for delta in (1e-2, 5e-3):
            traj, _ = integrate_nonlinear_additive(CHAIN, spec, x0, delta, IntegratorConfig(step=delta / 4), variant)
            errs.append(np.abs((traj.final - x0) / delta - f0).max())
        # first-order slope error: halving delta roughly halves the error
        assert errs[1] < 0.6 * errs[0]

    def test_unknown_variant(self):
        with pytest.raises(InvalidParameter):
            integrate_nonlinear_additive(CHAIN, identity(), [1, 0, 0], 1.0, variant="both")


class TestGainFlow:
    def test_constant_gain_matches_linear(self):
        lin = integrate(CHAIN, [0.3, -0.8, 0.5], 3.0, COARSE)
        flow, gains = integrate_gain_flow(lambda t, x: CHAIN, [0.3, -0.8, 0.5], 3.0, COARSE)
        assert np.array_equal(lin.x, flow.x)
        assert len(gains.gains) == len(flow) - 1

    def test_non_finite_gain(self):
        with pytest.raises(GainEvaluationError):
            integrate_gain_flow(lambda t, x: CHAIN * np.nan, [1, 0, 0], 1.0, COARSE)

    def test_declared_bound(self):
        F = GainFunction(lambda t, x: 3 * CHAIN, bound=2.0)
        with pytest.raises(GainEvaluationError):
            integrate_gain_flow(F, [1, 0, 0], 1.0, COARSE)

    def test_state_dependent_sign_runs(self):
        base = np.ones((3, 3)) - np.eye(3)
        traj, gains = integrate_gain_flow(
            lambda t, x: base * np.cos(x[:, None] - x[None, :]), [2.0, -1.0, 0.5], 5.0, COARSE
        )
        assert np.all(np.isfinite(traj.x))
        assert gains.to_schedule(5.0).horizon == pytest.approx(5.0)

    def test_large_step_is_caught(self):
        big = 50 * (np.ones((3, 3)) - np.eye(3))
        with pytest.raises(IntegratorInstability, match="reduce the step"):
            integrate(big, [1.0, -1.0, 0.5], 5.0, IntegratorConfig(step=0.2))

    def test_unmonitored_blowup_is_divergence(self):
        big = 1e5 * (np.ones((3, 3)) - np.eye(3))
        with pytest.raises(DivergenceError), np.errstate(over="ignore", invalid="ignore"):
            integrate(big, [1.0, -1.0, 0.5], 20.0, IntegratorConfig(step=0.5, monitor=False))


class TestTrajectoryIO:
    def test_csv_round_trip(self):
        traj = integrate(ANTAGONISTIC, [1 / 3, 0.1], 0.05, COARSE)
        text = traj.to_csv()
        assert text.splitlines()[0] == "t,x1,x2"
        again = Trajectory.from_csv(text)
        assert np.array_equal(again.x, traj.x) and np.array_equal(again.t, traj.t)

    def test_json_round_trip(self):
        traj = integrate(ANTAGONISTIC, [1 / 3, 0.1], 0.05, COARSE)
        again = Trajectory.from_json(traj.to_json())
        assert np.array_equal(again.x, traj.x)
        assert again.meta["scenario_hash"] == traj.meta["scenario_hash"]

    def test_timestamps_increase(self):
        with pytest.raises(ValueError):
            Trajectory([0.0, 0.0], [[1.0], [1.0]])
