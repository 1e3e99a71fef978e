"""Analyzers and predictors for piecewise-constant schedules."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import CapExceeded, InvalidParameter, NotApplicable
from .outcome import OutcomeKind
from .signed_graph import Schedule, SignedMatrix, window_integral
from .topology import (
    CampPartition,
    Condensation,
    common_camps,
    hostile_camps,
    is_quasi_strongly_connected,
    is_strongly_connected,
    strongly_connected_components,
    topology_report,
)

DIVERGENCE_TOL = 1e-12
MAX_CUT_NODES = 20
_CHUNK = 1 << 15


def _is_sc(w: np.ndarray) -> bool:
    return is_strongly_connected(w)


def _is_qsc(w: np.ndarray) -> bool:
    return is_quasi_strongly_connected(w)[0]


@dataclass(frozen=True)
class WindowCheck:
    ok: bool
    T: float
    eps: float
    failing_window: tuple[float, float] | None = None

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "T": self.T,
            "eps": self.eps,
            "failing_window": None if self.failing_window is None else list(self.failing_window),
        }


def _window_starts(schedule: Schedule, T: float) -> tuple[list[float], float]:
    """Breakpoints of ``t -> window_integral(schedule, t, T)`` on the start domain."""
    bounds = [s.t_start for s in schedule.segments] + [schedule.horizon]
    if schedule.period is not None:
        p = schedule.period
        pts = {math.fmod(b, p) for b in bounds} | {math.fmod(b - T, p) % p for b in bounds}
        pts |= {0.0, p}
        top = p
    else:
        top = schedule.horizon
        pts = {b for b in bounds} | {b - T for b in bounds if 0 <= b - T <= top} | {0.0}
    return sorted(x for x in pts if 0.0 <= x <= top), top


def _check_windows(
    schedule: Schedule,
    T: float,
    eps: float,
    connected: Callable[[np.ndarray], bool],
    sample_step: float | None = None,
) -> WindowCheck:
    if not T > 0 or not eps > 0:
        raise InvalidParameter("window length and epsilon must be positive")
    base, top = _window_starts(schedule, T)
    if sample_step is not None:
        if not sample_step > 0:
            raise InvalidParameter("sample step must be positive")
        base = sorted(set(base) | set(np.arange(0.0, top, sample_step).tolist()))
    values = {t: window_integral(schedule, t, T) for t in base}
    # entries are affine between base points; add the points where one crosses eps
    points = set(base)
    for p, q in zip(base[:-1], base[1:]):
        wp, wq = values[p], values[q]
        delta = wq - wp
        with np.errstate(divide="ignore", invalid="ignore"):
            frac = (eps - wp) / delta
        inside = (delta != 0) & (frac > 0) & (frac < 1)
        for f in np.unique(frac[inside]):
            points.add(p + float(f) * (q - p))
    pts = sorted(points)
    probes = pts + [0.5 * (a + b) for a, b in zip(pts[:-1], pts[1:])]
    for t in sorted(probes):
        w = values.get(t)
        if w is None:
            w = window_integral(schedule, t, T)
        if not connected(np.where(w >= eps, w, 0.0)):
            return WindowCheck(False, T, eps, (t, t + T))
    return WindowCheck(True, T, eps)


def check_usc(schedule: Schedule, T: float, eps: float, sample_step: float | None = None) -> WindowCheck:
    """Is the eps-skeleton of every length-T window integral strongly connected?"""
    return _check_windows(schedule, T, eps, _is_sc, sample_step)


def check_uqsc(schedule: Schedule, T: float, eps: float, sample_step: float | None = None) -> WindowCheck:
    return _check_windows(schedule, T, eps, _is_qsc, sample_step)


def _bottleneck(w: np.ndarray, connected: Callable[[np.ndarray], bool]) -> float:
    """Largest eps for which the eps-skeleton of ``w`` stays connected (0 if never)."""
    vals = np.unique(w[w > 0])[::-1]
    lo, hi = 0, len(vals) - 1
    best = 0.0
    while lo <= hi:
        mid = (lo + hi) // 2
        if connected(np.where(w >= vals[mid], w, 0.0)):
            best = float(vals[mid])
            hi = mid - 1
        else:
            lo = mid + 1
    return best


def find_window(schedule: Schedule, quasi: bool = False) -> WindowCheck:
    """Search a (T, eps) witness for USC (or UQSC when ``quasi``).

    T is tried at one and two periods (horizons for non-periodic schedules);
    eps starts at half the worst bottleneck seen on the breakpoint grid and is
    shrunk a few times before giving up.  A positive answer is exact; a
    negative one only says no witness was found among these candidates.
    """
    connected = _is_qsc if quasi else _is_sc
    span = schedule.period if schedule.period is not None else schedule.horizon
    last = None
    for T in (span, 2 * span):
        base, _ = _window_starts(schedule, T)
        worst = min(_bottleneck(window_integral(schedule, t, T), connected) for t in base)
        if worst <= 0:
            t = next(t for t in base if _bottleneck(window_integral(schedule, t, T), connected) <= 0)
            last = WindowCheck(False, T, 0.0, (t, t + T))
            continue
        eps = 0.5 * worst
        for _ in range(4):
            res = _check_windows(schedule, T, eps, connected)
            if res.ok:
                return res
            last = res
            eps /= 10
    return last


def _partitions(n: int):
    """Second-side indicator rows for all cuts with node 0 on the first side.

    Gray-code order over the other n-1 nodes, yielded in chunks.
    """
    total = 1 << (n - 1)
    bits = np.arange(1, n)
    for start in range(1, total, _CHUNK):
        i = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        g = i ^ (i >> 1)
        side2 = np.zeros((len(g), n))
        side2[:, 1:] = (g[:, None] >> (bits - 1)) & 1
        yield side2


def cut_balance_constant(schedule: Schedule) -> float | None:
    """Smallest K >= 1 bounding the two-way cut flows of every segment, or None."""
    n = schedule.n
    if n > MAX_CUT_NODES:
        raise CapExceeded(f"cut-balance enumeration is capped at {MAX_CUT_NODES} nodes, got {n}")
    worst = 1.0
    for m in {s.matrix for s in schedule.segments}:
        w = np.abs(m.entries)
        for side2 in _partitions(n):
            side1 = 1.0 - side2
            # flow into side 1 from side 2: sum_{j in V', k in V''} |a_jk|
            inflow = ((side1 @ w) * side2).sum(axis=1)
            outflow = ((side1 @ w.T) * side2).sum(axis=1)
            one_sided = (inflow > 0) != (outflow > 0)
            if one_sided.any():
                return None
            both = inflow > 0
            if both.any():
                ratio = inflow[both] / outflow[both]
                worst = max(worst, float(ratio.max()), float((1.0 / ratio).max()))
    return worst


def type_symmetry_constant(schedule: Schedule) -> float | None:
    """Smallest K with ``|a_kj| / K <= |a_jk| <= K |a_kj|`` throughout, or None."""
    worst = 1.0
    for m in {s.matrix for s in schedule.segments}:
        w = np.abs(m.entries)
        wt = w.T
        if np.any((w > 0) != (wt > 0)):
            return None
        both = w > 0
        if both.any():
            worst = max(worst, float((w[both] / wt[both]).max()))
    return worst


@dataclass(frozen=True)
class EssentialGraph:
    n: int
    edges: frozenset[tuple[int, int]]
    coop: frozenset[tuple[int, int]]
    comp: frozenset[tuple[int, int]]
    condensation: Condensation

    @property
    def well_defined(self) -> bool:
        """Whether no essential pair both cooperates and competes."""
        return not (self.coop & self.comp)

    def support(self) -> np.ndarray:
        w = np.zeros((self.n, self.n))
        for j, k in self.edges:
            w[j, k] = 1.0
        return w

    def signed(self, nodes=None) -> np.ndarray:
        """Unit-weight signed matrix (+1 cooperative, -1 competitive arcs)."""
        if not self.well_defined:
            raise NotApplicable("the signed essential graph is undefined: some pair both cooperates and competes")
        keep = set(range(self.n)) if nodes is None else set(nodes)
        s = np.zeros((self.n, self.n))
        for j, k in self.edges:
            if j in keep and k in keep:
                s[j, k] = 1.0 if (j, k) in self.coop else -1.0
        return s

    @property
    def is_sc(self) -> bool:
        return self.condensation.is_strongly_connected

    @property
    def is_qsc(self) -> bool:
        return is_quasi_strongly_connected(self.support())[0]

    def to_dict(self) -> list[dict]:
        return [
            {"from": k + 1, "to": j + 1, "coop": (j, k) in self.coop, "comp": (j, k) in self.comp}
            for j, k in sorted(self.edges)
        ]


def essential_graph(schedule: Schedule) -> EssentialGraph:
    """Pairs with a divergent integral of |a_jk| (and of its positive/negative parts)."""
    if schedule.period is not None:
        p = schedule.period
        total = schedule.integral(0.0, p, np.abs)
        pos = schedule.integral(0.0, p, lambda a: np.maximum(a, 0.0))
        neg = schedule.integral(0.0, p, lambda a: np.maximum(-a, 0.0))
    else:
        tail = schedule.tail_matrix().entries
        total, pos, neg = np.abs(tail), np.maximum(tail, 0.0), np.maximum(-tail, 0.0)

    def pairs(m):
        return frozenset((int(j), int(k)) for j, k in zip(*np.nonzero(m > DIVERGENCE_TOL)))

    edges = pairs(total)
    support = np.zeros((schedule.n, schedule.n))
    for j, k in edges:
        support[j, k] = 1.0
    return EssentialGraph(schedule.n, edges, pairs(pos), pairs(neg), strongly_connected_components(support))


@dataclass(frozen=True)
class ComponentPrediction:
    nodes: tuple[int, ...]
    kind: OutcomeKind
    camps: CampPartition | None = None

    def to_dict(self) -> dict:
        return {
            "nodes": [i + 1 for i in self.nodes],
            "kind": self.kind.value,
            "camps": None if self.camps is None else self.camps.to_dict(),
        }


@dataclass(frozen=True)
class CutBalancedPrediction:
    outcome: OutcomeKind
    components: tuple[ComponentPrediction, ...]
    K: float

    @property
    def rho(self) -> np.ndarray | None:
        if self.outcome not in (OutcomeKind.CONSENSUS, OutcomeKind.POLARIZATION):
            return None
        return self.components[0].camps.signs(sum(len(c.nodes) for c in self.components))


def predict_cut_balanced(schedule: Schedule, ess: EssentialGraph | None = None) -> CutBalancedPrediction:
    """Per-component limits for a cut-balanced schedule."""
    K = cut_balance_constant(schedule)
    if K is None:
        raise NotApplicable("schedule is not cut-balanced")
    ess = essential_graph(schedule) if ess is None else ess
    comps = []
    for nodes in ess.condensation.components:
        inside = set(nodes)
        e_r = {(j, k) for j, k in ess.edges if j in inside and k in inside}
        plus, minus = e_r & ess.coop, e_r & ess.comp
        if plus & minus:
            comps.append(ComponentPrediction(nodes, OutcomeKind.STABILIZING))
            continue
        s = np.zeros((ess.n, ess.n))
        for j, k in e_r:
            s[j, k] = 1.0 if (j, k) in plus else -1.0
        bal = hostile_camps(s, nodes)
        if not bal.balanced:
            comps.append(ComponentPrediction(nodes, OutcomeKind.STABILIZING))
        elif minus:
            comps.append(ComponentPrediction(nodes, OutcomeKind.POLARIZATION, bal.camps))
        else:
            comps.append(ComponentPrediction(nodes, OutcomeKind.CONSENSUS, bal.camps))
    if all(c.kind is OutcomeKind.STABILIZING for c in comps):
        outcome = OutcomeKind.STABILIZING
    elif len(comps) == 1:
        outcome = comps[0].kind
    else:
        outcome = OutcomeKind.NO_MODULUS_CONSENSUS
    return CutBalancedPrediction(outcome, tuple(comps), K)


@dataclass(frozen=True)
class UscPrediction:
    outcome: OutcomeKind
    usc: WindowCheck
    uqsc: WindowCheck
    camps: CampPartition | None = None


def predict_usc(schedule: Schedule, T: float | None = None, eps: float | None = None) -> UscPrediction:
    """Predict from uniform connectivity and, when present, a fixed camp division."""
    if (T is None) != (eps is None):
        raise InvalidParameter("give both T and eps, or neither")
    if T is None:
        usc, uqsc = find_window(schedule), find_window(schedule, quasi=True)
    else:
        usc, uqsc = check_usc(schedule, T, eps), check_uqsc(schedule, T, eps)
    kind, camps = _usc_rule(schedule, usc.ok, uqsc.ok)
    return UscPrediction(kind, usc, uqsc, camps)


def _usc_rule(schedule: Schedule, usc: bool, uqsc: bool) -> tuple[OutcomeKind, CampPartition | None]:
    # a camp division shared by all segments plus UQSC decides the type outright
    fixed = common_camps(schedule.matrices())
    if fixed.balanced and uqsc:
        kind = OutcomeKind.POLARIZATION if fixed.camps.camp2 else OutcomeKind.CONSENSUS
        return kind, fixed.camps
    if usc:
        return OutcomeKind.MODULUS_CONSENSUS, None
    return OutcomeKind.INCONCLUSIVE, None


@dataclass(frozen=True)
class ConnectivityReport:
    usc: WindowCheck
    uqsc: WindowCheck
    esc: bool
    eqsc: bool
    cut_balance_K: float | None
    type_symmetry_K: float | None

    def __post_init__(self):
        violated = []
        if self.usc.ok and not self.uqsc.ok:
            violated.append("USC without UQSC")
        if self.usc.ok and not self.esc:
            violated.append("USC without ESC")
        if self.uqsc.ok and not self.eqsc:
            violated.append("UQSC without EQSC")
        if self.esc and not self.eqsc:
            violated.append("ESC without EQSC")
        if self.type_symmetry_K is not None and (
            self.cut_balance_K is None or self.cut_balance_K > self.type_symmetry_K * (1 + 1e-12)
        ):
            violated.append("type-symmetric but cut-balance constant missing or larger")
        if self.cut_balance_K is not None and self.eqsc and not self.esc:
            violated.append("cut-balanced and EQSC but not ESC")
        if violated:
            raise AssertionError("connectivity implications violated: " + "; ".join(violated))


def connectivity_report(schedule: Schedule, ess: EssentialGraph | None = None) -> ConnectivityReport:
    ess = essential_graph(schedule) if ess is None else ess
    usc = find_window(schedule)
    uqsc = usc if usc.ok else find_window(schedule, quasi=True)
    cut = cut_balance_constant(schedule)
    return ConnectivityReport(
        usc=usc,
        uqsc=uqsc,
        esc=ess.is_sc,
        eqsc=ess.is_qsc,
        cut_balance_K=cut,
        type_symmetry_K=type_symmetry_constant(schedule),
    )


def analyze_schedule(schedule: Schedule) -> dict:
    """Full JSON-ready analysis: per-segment topology plus time-varying connectivity."""
    ess = essential_graph(schedule)
    conn = connectivity_report(schedule, ess)
    seen: dict[SignedMatrix, dict] = {}
    segments = []
    for s in schedule.segments:
        if s.matrix not in seen:
            seen[s.matrix] = topology_report(s.matrix)
        segments.append({"t_start": s.t_start, "t_end": s.t_end, **seen[s.matrix]})
    report = {
        "n": schedule.n,
        "periodic": schedule.is_periodic,
        "constant": schedule.is_constant(),
        "segments": segments,
        "instantaneous_balance": [seg["balanced"] for seg in segments],
        "usc": conn.usc.ok,
        "usc_witness": conn.usc.to_dict(),
        "uqsc": conn.uqsc.ok,
        "uqsc_witness": conn.uqsc.to_dict(),
        "esc": conn.esc,
        "eqsc": conn.eqsc,
        "cut_balance_K": conn.cut_balance_K,
        "type_symmetry_K": conn.type_symmetry_K,
        "essential_edges": ess.to_dict(),
        "essential_well_defined": ess.well_defined,
    }
    if schedule.is_constant():
        report["topology"] = seen[schedule.segments[0].matrix]
    if conn.cut_balance_K is not None:
        pred = predict_cut_balanced(schedule, ess)
        report["component_predictions"] = [c.to_dict() for c in pred.components]
        report["cut_balanced_prediction"] = pred.outcome.value
    else:
        report["component_predictions"] = None
        report["cut_balanced_prediction"] = None
    report["usc_prediction"] = _usc_rule(schedule, conn.usc.ok, conn.uqsc.ok)[0].value
    return report
