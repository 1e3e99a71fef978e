"""Reading outcomes off trajectories and reconciling them with predictions."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import Trajectory
from .errors import TrajectoryTooShort
from .outcome import Outcome, OutcomeKind
from .topology import static_predict

MIN_TAIL_SAMPLES = 100


def _slopes(t: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Least-squares slope of each column of ``y`` against ``t``."""
    tc = t - t.mean()
    return (tc @ (y - y.mean(axis=0))) / (tc @ tc)


def classify(traj: Trajectory, tol: float = 1e-6, tail_fraction: float = 0.2) -> Outcome:
    """Decide which outcome a trajectory shows over its trailing samples.

    Moduli that stop drifting and coincide give modulus consensus, refined by
    the limit size and the tail sign pattern.  Moduli that settle apart give
    NoModulusConsensus, and so does a bounded oscillation whose moduli spread
    neither grows nor shrinks (a limit cycle).  Anything else is Inconclusive.
    """
    if not 0 < tail_fraction < 1:
        raise ValueError("tail_fraction must lie in (0, 1)")
    start = int(np.floor((1.0 - tail_fraction) * len(traj)))
    t = traj.t[start:]
    x = traj.x[start:]
    if t.size < MIN_TAIL_SAMPLES:
        raise TrajectoryTooShort(f"tail has {t.size} samples, need at least {MIN_TAIL_SAMPLES}")
    mod = np.abs(x)
    drift = float(np.abs(_slopes(t, mod)).max())
    final = mod[-1]
    spread = float(final.max() - final.min())
    x_star = float(mod.mean())
    diag = {"drift": drift, "spread": spread, "x_star_measured": x_star, "tail_samples": int(t.size)}

    if drift < tol and spread < tol:
        if x_star < tol:
            return Outcome(OutcomeKind.STABILIZING, 0.0, diagnostics=diag)
        signs = np.sign(x)
        rho = signs[-1]
        stable = bool(np.all(signs == rho)) and bool(np.all(rho != 0))
        diag["signs_stable"] = stable
        if not stable:
            return Outcome(OutcomeKind.MODULUS_CONSENSUS, x_star, diagnostics=diag)
        kind = OutcomeKind.CONSENSUS if len(set(rho.tolist())) == 1 else OutcomeKind.POLARIZATION
        return Outcome(kind, x_star, tuple(int(r) for r in rho), diagnostics=diag)
    if drift < tol:
        return Outcome(OutcomeKind.NO_MODULUS_CONSENSUS, diagnostics=diag)

    # limit cycle: largest modulus settled, spread bounded away from zero with a steady floor
    spread_t = mod.max(axis=1) - mod.min(axis=1)
    half = t.size // 2
    floor_change = abs(float(spread_t[half:].min() - spread_t[:half].min()))
    max_drift = abs(float(_slopes(t, mod.max(axis=1)[:, None])[0]))
    diag.update(
        spread_floor=float(spread_t.min()), spread_floor_change=floor_change, max_modulus_drift=max_drift
    )
    if max_drift < tol and floor_change < tol and spread_t.min() > tol:
        diag["persistent_oscillation"] = True
        return Outcome(OutcomeKind.NO_MODULUS_CONSENSUS, diagnostics=diag)
    return Outcome(OutcomeKind.INCONCLUSIVE, diagnostics=diag)


@dataclass(frozen=True)
class LimitFunctional:
    kind: OutcomeKind
    rho: np.ndarray | None = field(default=None, compare=False)
    v: np.ndarray | None = field(default=None, compare=False)

    def limit(self, x0) -> np.ndarray:
        """``rho (v . x0)`` for bipartite cases, zero when stabilizing."""
        x0 = np.asarray(x0, dtype=float)
        if self.kind is OutcomeKind.STABILIZING:
            return np.zeros_like(x0)
        if self.rho is None:
            raise ValueError(f"no limit functional when the outcome is {self.kind}")
        return self.rho * float(self.v @ x0)


def limit_functional(a) -> LimitFunctional:
    pred = static_predict(a)
    return LimitFunctional(pred.outcome, pred.rho, pred.v)


def predicted_outcome(kind: OutcomeKind, rho=None) -> Outcome:
    rho = None if rho is None else tuple(int(r) for r in np.sign(rho))
    x_star = 0.0 if kind is OutcomeKind.STABILIZING else None
    return Outcome(kind, x_star, rho if kind.is_bipartite else None)


_COMPATIBLE = {
    OutcomeKind.STABILIZING: {OutcomeKind.STABILIZING, OutcomeKind.MODULUS_CONSENSUS},
    OutcomeKind.CONSENSUS: {OutcomeKind.CONSENSUS, OutcomeKind.MODULUS_CONSENSUS},
    OutcomeKind.POLARIZATION: {OutcomeKind.POLARIZATION, OutcomeKind.MODULUS_CONSENSUS},
    OutcomeKind.MODULUS_CONSENSUS: {
        OutcomeKind.STABILIZING,
        OutcomeKind.CONSENSUS,
        OutcomeKind.POLARIZATION,
        OutcomeKind.MODULUS_CONSENSUS,
    },
    OutcomeKind.NO_MODULUS_CONSENSUS: {OutcomeKind.NO_MODULUS_CONSENSUS},
}


def compatible(a: OutcomeKind, b: OutcomeKind) -> bool:
    if OutcomeKind.INCONCLUSIVE in (a, b):
        return True
    return b in _COMPATIBLE[a]


@dataclass(frozen=True)
class Reconciliation:
    predicted: Outcome
    observed: Outcome
    verdict: str
    diff: dict

    def to_dict(self) -> dict:
        return {
            "predicted": self.predicted.to_dict(),
            "observed": self.observed.to_dict(),
            "verdict": self.verdict,
            "diff": self.diff,
        }


def reconcile(predicted: Outcome, observed: Outcome) -> Reconciliation:
    """agree, refine (one side is less specific), or conflict (mutually exclusive)."""
    p, o = predicted.kind, observed.kind
    diff: dict = {}
    if p == o:
        if p.is_bipartite and predicted.rho is not None and observed.rho is not None:
            pr, ob = np.array(predicted.rho), np.array(observed.rho)
            if not (np.array_equal(pr, ob) or np.array_equal(pr, -ob)):
                diff["rho"] = {"predicted": list(predicted.rho), "observed": list(observed.rho)}
                return Reconciliation(predicted, observed, "conflict", diff)
            if np.array_equal(pr, -ob) and not np.array_equal(pr, ob):
                diff["global_flip"] = True
        return Reconciliation(predicted, observed, "agree", diff)
    diff["kind"] = {"predicted": p.value, "observed": o.value}
    if not compatible(p, o):
        return Reconciliation(predicted, observed, "conflict", diff)
    diff["refined_by"] = "observation" if p in (OutcomeKind.MODULUS_CONSENSUS, OutcomeKind.INCONCLUSIVE) else "prediction"
    return Reconciliation(predicted, observed, "refine", diff)
