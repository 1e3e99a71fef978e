import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from signed_dynamics import (
    IntegratorConfig,
    Outcome,
    OutcomeKind,
    Trajectory,
    classify,
    integrate,
    limit_functional,
    reconcile,
    static_predict,
)
from signed_dynamics.classification import compatible, predicted_outcome
from signed_dynamics.errors import TrajectoryTooShort
from signed_dynamics.topology import smallest_positive_rate

from conftest import ANTAGONISTIC, EXAMPLE1, NEG_CYCLE, example2_schedule, signed_matrices

K = OutcomeKind
COARSE = IntegratorConfig(step=0.01)


class TestOutcome:
    def test_consensus_needs_constant_rho(self):
        with pytest.raises(ValueError):
            Outcome(K.CONSENSUS, 1.0, (1, -1))

    def test_polarization_needs_both_signs(self):
        with pytest.raises(ValueError):
            Outcome(K.POLARIZATION, 1.0, (1, 1))

    def test_stabilizing_limit_is_zero(self):
        with pytest.raises(ValueError):
            Outcome(K.STABILIZING, 0.3)

    def test_camps_are_one_based(self):
        assert Outcome(K.POLARIZATION, 0.5, (1, -1, 1)).to_dict()["camps"] == [[1, 3], [2]]


class TestClassify:
    def test_antagonistic_polarization(self):
        out = classify(integrate(ANTAGONISTIC, [1.0, 0.0], 30.0))
        assert out.kind is K.POLARIZATION
        assert out.x_star == pytest.approx(0.5, abs=1e-9)
        assert out.rho == (1, -1)

    def test_example1_no_modulus_consensus(self):
        out = classify(integrate(EXAMPLE1, [1.0, -1.0, 0.3], 30.0))
        assert out.kind is K.NO_MODULUS_CONSENSUS

    def test_example2_persistent_oscillation(self):
        traj = integrate(example2_schedule(), [1.0, -1.0, -0.5], 40.0, COARSE)
        out = classify(traj)
        assert out.kind is K.NO_MODULUS_CONSENSUS
        assert out.diagnostics["persistent_oscillation"]
        assert np.all(np.abs(traj.x[:, 2]) <= 0.5 + 1e-9)

    def test_stabilizing(self):
        out = classify(integrate(NEG_CYCLE, [1.0, -0.5, 0.2], 60.0, COARSE))
        assert out.kind is K.STABILIZING and out.x_star == 0.0

    def test_slow_drift_is_inconclusive(self):
        t = np.linspace(0, 10, 500)
        x = np.column_stack([np.exp(-0.01 * t), 2 * np.exp(-0.01 * t)])
        assert classify(Trajectory(t, x)).kind is K.INCONCLUSIVE

    def test_too_short(self):
        traj = integrate(ANTAGONISTIC, [1.0, 0.0], 0.1, COARSE)
        with pytest.raises(TrajectoryTooShort):
            classify(traj)

    def test_bad_tail_fraction(self):
        traj = integrate(ANTAGONISTIC, [1.0, 0.0], 1.0)
        with pytest.raises(ValueError):
            classify(traj, tail_fraction=1.0)

    @settings(max_examples=20, deadline=None)
    @given(st.lists(st.floats(-2, 2, allow_nan=False), min_size=3, max_size=3).filter(lambda v: abs(v[0] - v[1] - v[2]) > 0.1))
    def test_global_flip(self, x0):
        a = np.array([[0, -1, 0], [-1, 0, 1], [0, 1, 0]], dtype=float)
        plus = classify(integrate(a, x0, 30.0, COARSE))
        minus = classify(integrate(a, -np.array(x0), 30.0, COARSE))
        assert plus.kind is minus.kind
        assert plus.rho == tuple(-r for r in minus.rho)


class TestLimitFunctional:
    def test_antagonistic(self):
        lf = limit_functional(ANTAGONISTIC)
        assert np.allclose(lf.v, [0.5, -0.5])
        assert np.allclose(lf.limit([1.0, 0.0]), [0.5, -0.5])

    def test_average_consensus(self):
        sym = np.ones((3, 3)) - np.eye(3)
        lf = limit_functional(sym)
        assert np.array_equal(lf.rho, [1, 1, 1])
        assert np.allclose(lf.v, 1 / 3)

    def test_example1_has_none(self):
        lf = limit_functional(EXAMPLE1)
        assert lf.kind is K.NO_MODULUS_CONSENSUS
        with pytest.raises(ValueError):
            lf.limit([1, 2, 3])

    @settings(max_examples=12, deadline=None)
    @given(signed_matrices(min_n=2, max_n=8, values=(-1.0, 0.0, 1.0), digon=True), st.integers(0, 2**32 - 1))
    def test_simulated_limit_matches(self, a, seed):
        p = static_predict(a)
        if not p.outcome.is_bipartite:
            return
        rate = smallest_positive_rate(a)
        t_end = 40.0 / rate
        rng = np.random.default_rng(seed)
        for x0 in rng.uniform(-1, 1, size=(20, len(a))):
            traj = integrate(a, x0, t_end, IntegratorConfig(step=0.01, record_every=50))
            assert np.allclose(traj.final, p.limit(x0), atol=1e-5)


class TestReconcile:
    def test_global_flip_agrees(self):
        r = reconcile(predicted_outcome(K.POLARIZATION, [1, -1]), Outcome(K.POLARIZATION, 0.5, (-1, 1)))
        assert r.verdict == "agree" and r.diff["global_flip"]

    def test_refine_modulus(self):
        r = reconcile(predicted_outcome(K.MODULUS_CONSENSUS), Outcome(K.STABILIZING, 0.0))
        assert r.verdict == "refine"

    def test_exclusive_kinds_conflict(self):
        r = reconcile(predicted_outcome(K.STABILIZING), Outcome(K.POLARIZATION, 0.5, (1, -1)))
        assert r.verdict == "conflict"
        assert r.diff["kind"] == {"predicted": "Stabilizing", "observed": "Polarization"}

    def test_camps_differ_conflict(self):
        r = reconcile(predicted_outcome(K.POLARIZATION, [1, -1, 1]), Outcome(K.POLARIZATION, 0.5, (1, -1, -1)))
        assert r.verdict == "conflict"

    @given(st.sampled_from(list(K)), st.sampled_from(list(K)))
    def test_conflict_only_for_exclusive(self, p, o):
        pred = predicted_outcome(p, [1, -1] if p is K.POLARIZATION else [1, 1] if p is K.CONSENSUS else None)
        x_star = 0.0 if o is K.STABILIZING else 0.5
        rho = (1, -1) if o is K.POLARIZATION else (1, 1) if o is K.CONSENSUS else None
        r = reconcile(pred, Outcome(o, x_star if o.is_modulus_consensus else None, rho))
        assert (r.verdict == "conflict") == (not compatible(p, o))

    def test_stable_and_consensus_exclusive(self):
        assert not compatible(K.STABILIZING, K.CONSENSUS)
        assert compatible(K.INCONCLUSIVE, K.NO_MODULUS_CONSENSUS)
        assert compatible(K.CONSENSUS, K.CONSENSUS)
