"""Scenario bundles: JSON schema, built-in examples and the predict/simulate/verify pipeline."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import jsonschema
import numpy as np

from .classification import Reconciliation, classify, predicted_outcome, reconcile
from .dynamics import (
    GainFunction,
    GainTrace,
    IntegratorConfig,
    NonlinearitySpec,
    Trajectory,
    integrate,
    integrate_gain_flow,
    integrate_nonlinear_additive,
    make_nonlinearity,
)
from .errors import InvalidMatrix, InvalidParameter, ScenarioError, SignedDynamicsError
from .outcome import Outcome, OutcomeKind
from .signed_graph import Schedule
from .time_varying import MAX_CUT_NODES, cut_balance_constant, predict_cut_balanced, predict_usc
from .topology import smallest_positive_rate, static_predict

PROTOCOLS = ("linear", "nonlinear-additive-node", "nonlinear-additive-edge", "gain-flow")
DEFAULT_T_END = 100.0
MAX_AUTO_T_END = 1000.0

_number = {"type": "number"}
SCHEMA = {
    "type": "object",
    "required": ["n", "segments"],
    "properties": {
        "name": {"type": "string"},
        "description": {"type": "string"},
        "n": {"type": "integer", "minimum": 2},
        "segments": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["t_start", "t_end", "matrix"],
                "properties": {
                    "t_start": _number,
                    "t_end": _number,
                    "matrix": {"type": "array", "items": {"type": "array", "items": _number}},
                },
                "additionalProperties": False,
            },
        },
        "period": {"type": "number", "exclusiveMinimum": 0},
        "labels": {"type": "array", "items": {"type": "string"}},
        "x0": {"type": "array", "items": _number},
        "protocol": {"enum": list(PROTOCOLS)},
        "nonlinearity": {
            "type": "object",
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["identity", "arctan", "cubic", "tabulated"]},
                "overrides": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["i", "j", "kind"],
                        "properties": {"i": {"type": "integer", "minimum": 1}, "j": {"type": "integer", "minimum": 1}},
                    },
                },
            },
        },
        "gain": {
            "type": "object",
            "required": ["kind"],
            "properties": {"kind": {"enum": ["constant", "sin2_modulated", "cos_modulated"]}, "bound": _number},
            "additionalProperties": False,
        },
        "integrator": {
            "type": "object",
            "properties": {
                "step": {"type": "number", "exclusiveMinimum": 0},
                "t_end": {"type": "number", "exclusiveMinimum": 0},
                "record_every": {"type": "integer", "minimum": 1},
            },
            "additionalProperties": False,
        },
        "classifier": {
            "type": "object",
            "properties": {
                "tol": {"type": "number", "exclusiveMinimum": 0},
                "tail_fraction": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
            },
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}


def _sin2(a: np.ndarray, x: np.ndarray) -> np.ndarray:
    return a * (1.0 + np.sin(x[:, None] - x[None, :]) ** 2)


def _cos(a: np.ndarray, x: np.ndarray) -> np.ndarray:
    return a * np.cos(x[:, None] - x[None, :])


# each gain form modulates the schedule's matrix by a state-dependent factor
GAIN_FORMS: dict[str, Callable[[np.ndarray, np.ndarray], np.ndarray]] = {
    "constant": lambda a, x: a,
    "sin2_modulated": _sin2,
    "cos_modulated": _cos,
}


@dataclass
class ScenarioBundle:
    schedule: Schedule
    x0: np.ndarray | None = None
    protocol: str = "linear"
    nonlinearity: dict | None = None
    gain: dict | None = None
    integrator: dict = field(default_factory=dict)
    classifier: dict = field(default_factory=dict)
    name: str | None = None
    description: str | None = None

    def __post_init__(self):
        problems = []
        if self.protocol not in PROTOCOLS:
            problems.append(f"protocol: unknown protocol {self.protocol!r}")
        needs_h = self.protocol.startswith("nonlinear")
        if needs_h != (self.nonlinearity is not None):
            problems.append("nonlinearity: required for nonlinear-additive protocols and only for them")
        if (self.protocol == "gain-flow") != (self.gain is not None):
            problems.append("gain: required for the gain-flow protocol and only for it")
        if self.x0 is not None:
            self.x0 = np.asarray(self.x0, dtype=float)
            if self.x0.shape != (self.schedule.n,):
                problems.append(f"x0: expected {self.schedule.n} entries, got {self.x0.size}")
            elif not np.all(np.isfinite(self.x0)):
                problems.append("x0: entries must be finite")
        if problems:
            raise ScenarioError("invalid scenario", problems)
        if needs_h:
            self.nonlinearity_spec()

    # -- protocol parameters

    def nonlinearity_spec(self) -> NonlinearitySpec:
        def build(d):
            params = {k: v for k, v in d.items() if k not in ("kind", "overrides", "i", "j")}
            try:
                return make_nonlinearity(d["kind"], **params)
            except (InvalidParameter, TypeError) as exc:
                raise ScenarioError("invalid nonlinearity", [f"nonlinearity: {exc}"]) from exc

        overrides = {}
        for o in self.nonlinearity.get("overrides", []):
            overrides[(int(o["i"]) - 1, int(o["j"]) - 1)] = build(o)
        return NonlinearitySpec(build(self.nonlinearity), overrides)

    def gain_function(self) -> GainFunction:
        form = GAIN_FORMS[self.gain["kind"]]
        sched = self.schedule
        return GainFunction(
            lambda t, x: form(sched.matrix_at(t).entries, x), self.gain.get("bound"), self.gain["kind"]
        )

    def integrator_config(self, step: float | None = None) -> IntegratorConfig:
        return IntegratorConfig(
            step=step or self.integrator.get("step", 1e-3),
            record_every=self.integrator.get("record_every", 1),
        )

    def default_t_end(self) -> float:
        """50 / (slowest nonzero Laplacian rate) for constant linear runs, else 100."""
        if "t_end" in self.integrator:
            return float(self.integrator["t_end"])
        if self.protocol == "linear" and self.schedule.is_constant():
            rate = smallest_positive_rate(self.schedule.segments[0].matrix)
            if rate:
                return min(MAX_AUTO_T_END, 50.0 / rate)
        return DEFAULT_T_END

    # -- serialization

    def to_dict(self) -> dict:
        out = self.schedule.to_dict()
        if self.name:
            out["name"] = self.name
        if self.description:
            out["description"] = self.description
        if self.x0 is not None:
            out["x0"] = self.x0.tolist()
        out["protocol"] = self.protocol
        if self.nonlinearity is not None:
            out["nonlinearity"] = self.nonlinearity
        if self.gain is not None:
            out["gain"] = self.gain
        if self.integrator:
            out["integrator"] = dict(self.integrator)
        if self.classifier:
            out["classifier"] = dict(self.classifier)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioBundle":
        validator = jsonschema.Draft202012Validator(SCHEMA)
        errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
        if errors:
            diags = [f"{'/'.join(map(str, e.absolute_path)) or '<root>'}: {e.message}" for e in errors]
            raise ScenarioError("scenario does not match the schema", diags)
        n = data["n"]
        diags = []
        for i, seg in enumerate(data["segments"]):
            m = seg["matrix"]
            if len(m) != n or any(len(row) != n for row in m):
                diags.append(f"segments/{i}/matrix: expected a {n}x{n} matrix")
        if diags:
            raise ScenarioError("scenario does not match the schema", diags)
        try:
            schedule = Schedule.from_dict(data)
        except InvalidMatrix as exc:
            raise ScenarioError("invalid matrix", [f"segments: {exc.report.summary()}"]) from exc
        except InvalidParameter as exc:
            raise ScenarioError("invalid schedule", [f"segments: {exc}"]) from exc
        return cls(
            schedule=schedule,
            x0=data.get("x0"),
            protocol=data.get("protocol", "linear"),
            nonlinearity=data.get("nonlinearity"),
            gain=data.get("gain"),
            integrator=dict(data.get("integrator", {})),
            classifier=dict(data.get("classifier", {})),
            name=data.get("name"),
            description=data.get("description"),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def loads(text: str) -> ScenarioBundle:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError("scenario is not valid JSON", [f"line {exc.lineno}, column {exc.colno}: {exc.msg}"]) from exc
    if not isinstance(data, dict):
        raise ScenarioError("scenario does not match the schema", ["<root>: expected a JSON object"])
    return ScenarioBundle.from_dict(data)


def load(source: str | Path) -> ScenarioBundle:
    """Read a scenario file, or build a built-in when ``source`` names one."""
    path = Path(source)
    if not path.exists():
        name, _, params = str(source).partition(":")
        if name in BUILTINS:
            return builtin(name, **_parse_params(params))
        raise ScenarioError(f"no such scenario file or built-in: {source}", [f"{source}: not found"])
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}", [str(exc)]) from exc
    return loads(text)


def _parse_params(text: str) -> dict:
    out = {}
    for item in filter(None, text.split(",")):
        key, _, val = item.partition("=")
        out[key.strip()] = float(val)
    return out


# ------------------------------------------------------------------ built-ins

# example2 switching time: with a31 = 1, a32 = 0 and x1 = 1 the third agent obeys
# x3' = 1 - x3, so x3(t) = 1 - (3/2) e^{-t} from x3(0) = -1/2; x3 reaches 1/2 at t = ln 3.
T0 = math.log(3.0)


def _const(name, a, x0, t_end=None, description=None, **kw) -> ScenarioBundle:
    integ = {} if t_end is None else {"t_end": t_end}
    return ScenarioBundle(Schedule.constant(a), np.array(x0, float), integrator=integ, name=name, description=description, **kw)


def example1(a31: float = 1.0, a32: float = 1.0) -> ScenarioBundle:
    a = [[0, -1, 0], [-1, 0, 0], [a31, a32, 0]]
    return _const(
        "example1", a, [1.0, -1.0, 0.3], 30.0,
        "Static QSC graph with an antagonistic pair followed by a third agent",
    )


def example2() -> ScenarioBundle:
    a1 = [[0, -1, 0], [-1, 0, 0], [1, 0, 0]]
    a2 = [[0, -1, 0], [-1, 0, 0], [0, 1, 0]]
    return ScenarioBundle(
        Schedule.periodic([a1, a2], [T0, T0]),
        np.array([1.0, -1.0, -0.5]),
        integrator={"t_end": 40.0},
        name="example2",
        description="Periodic UQSC schedule, balanced at every instant, without modulus consensus",
    )


def antagonistic2() -> ScenarioBundle:
    return _const("antagonistic2", [[0, -1], [-1, 0]], [1.0, 0.0], 30.0, "Two mutually hostile agents")


def chain3() -> ScenarioBundle:
    a = [[0, -1, 0], [-1, 0, 1], [0, 1, 0]]
    return _const("chain3", a, [0.3, -0.8, 0.5], 40.0, "Path 1-2-3: hostile pair (1,2), friendly pair (2,3)")


def cycle3_unbalanced() -> ScenarioBundle:
    a = [[0, 1, 0], [0, 0, 1], [-1, 0, 0]]
    return _const("cycle3_unbalanced", a, [1.0, -0.5, 0.25], 60.0, "Directed 3-cycle with one negative arc")


def alternating_stabilizing() -> ScenarioBundle:
    a_plus = [[0, 1], [1, 0]]
    a_minus = [[0, -1], [1, 0]]
    return ScenarioBundle(
        Schedule.periodic([a_plus, a_minus], [1.0, 1.0]),
        np.array([1.0, -0.4]),
        integrator={"t_end": 100.0},
        name="alternating_stabilizing",
        description="Arc 2->1 alternates sign, reciprocal arc fixed: essential pair both cooperates and competes",
    )


def usc_mixed_schedule() -> Schedule:
    """Period-2 switching between two non-SC graphs whose union is SC.

    Signs are fixed per pair and fit the camps {1, 3} | {2}.
    """
    a1 = [[0, -1, 0], [0, 0, -1], [0, 0, 0]]
    a2 = [[0, 0, 0], [-1, 0, 0], [1, 0, 0]]
    return Schedule.periodic([a1, a2], [1.0, 1.0])


def nonlinear_usc(variant: str = "node") -> ScenarioBundle:
    return ScenarioBundle(
        usc_mixed_schedule(),
        np.array([0.8, -0.5, 0.2]),
        protocol=f"nonlinear-additive-{variant}",
        nonlinearity={"kind": "cubic", "beta": 1.0},
        integrator={"t_end": 100.0},
        name=f"nonlinear_usc_{variant}",
        description="h(x) = x + x^3 on a periodic USC schedule with mixed signs",
    )


def gainflow_sin2() -> ScenarioBundle:
    a = [[0, 1, 0], [0, 0, 1], [1, 0, 0]]
    return ScenarioBundle(
        Schedule.constant(a),
        np.array([0.9, -0.3, 0.4]),
        protocol="gain-flow",
        gain={"kind": "sin2_modulated"},
        integrator={"t_end": 100.0},
        name="gainflow_sin2",
        description="F_ij = a_ij (1 + sin^2(x_i - x_j)) on a directed positive 3-cycle",
    )


BUILTINS: dict[str, Callable[..., ScenarioBundle]] = {
    "example1": example1,
    "example2": example2,
    "antagonistic2": antagonistic2,
    "chain3": chain3,
    "cycle3_unbalanced": cycle3_unbalanced,
    "alternating_stabilizing": alternating_stabilizing,
    "nonlinear_usc_node": lambda: nonlinear_usc("node"),
    "nonlinear_usc_edge": lambda: nonlinear_usc("edge"),
    "gainflow_sin2": gainflow_sin2,
}


def builtin(name: str, **params) -> ScenarioBundle:
    try:
        factory = BUILTINS[name]
    except KeyError:
        raise ScenarioError(f"unknown built-in {name!r}", [f"choose from {', '.join(BUILTINS)}"]) from None
    try:
        return factory(**params)
    except TypeError as exc:
        raise ScenarioError(f"bad parameters for {name}", [str(exc)]) from exc


# ------------------------------------------------------------------ pipeline


@dataclass
class Prediction:
    outcome: Outcome
    source: str
    details: dict = field(default_factory=dict)


def predict(bundle: ScenarioBundle) -> Prediction:
    """Outcome predicted from graph criteria alone.

    Constant linear scenarios use the static criterion.  Otherwise a
    cut-balanced schedule goes through the essential-graph predictor and the
    rest through uniform connectivity.  Nonlinear gains share the sign
    pattern and essential graph of the schedule, so the same rules apply,
    but the answer is advisory; state-dependent signs (``cos_modulated``)
    are not predicted.
    """
    s = bundle.schedule
    advisory = bundle.protocol != "linear"
    if bundle.protocol == "gain-flow" and bundle.gain["kind"] == "cos_modulated":
        return Prediction(predicted_outcome(OutcomeKind.INCONCLUSIVE), "none", {"advisory": True})
    if bundle.protocol == "linear" and s.is_constant():
        sp = static_predict(s.segments[0].matrix)
        return Prediction(predicted_outcome(sp.outcome, sp.rho), "static", sp.to_dict())
    if s.n <= MAX_CUT_NODES and cut_balance_constant(s) is not None:
        cb = predict_cut_balanced(s)
        details = {
            "K": cb.K,
            "components": [c.to_dict() for c in cb.components],
            "advisory": advisory,
        }
        return Prediction(predicted_outcome(cb.outcome, cb.rho), "cut-balanced", details)
    up = predict_usc(s)
    rho = None if up.camps is None else up.camps.signs(s.n)
    details = {"usc": up.usc.to_dict(), "uqsc": up.uqsc.to_dict(), "advisory": advisory}
    return Prediction(predicted_outcome(up.outcome, rho), "usc", details)


def simulate(
    bundle: ScenarioBundle, t_end: float | None = None, step: float | None = None
) -> tuple[Trajectory, GainTrace | None]:
    if bundle.x0 is None:
        raise ScenarioError("scenario has no initial state", ["x0: required to simulate"])
    t_end = t_end or bundle.default_t_end()
    cfg = bundle.integrator_config(step)
    if bundle.protocol == "linear":
        return integrate(bundle.schedule, bundle.x0, t_end, cfg), None
    if bundle.protocol == "gain-flow":
        return integrate_gain_flow(bundle.gain_function(), bundle.x0, t_end, cfg)
    variant = bundle.protocol.rsplit("-", 1)[1]
    return integrate_nonlinear_additive(bundle.schedule, bundle.nonlinearity_spec(), bundle.x0, t_end, cfg, variant)


def verify(
    bundle: ScenarioBundle, t_end: float | None = None, step: float | None = None, tol: float | None = None
) -> tuple[Reconciliation, Prediction]:
    """Predict, simulate, classify and reconcile."""
    pred = predict(bundle)
    traj, _ = simulate(bundle, t_end, step)
    observed = classify(
        traj,
        tol=tol or bundle.classifier.get("tol", 1e-6),
        tail_fraction=bundle.classifier.get("tail_fraction", 0.2),
    )
    return reconcile(pred.outcome, observed), pred


__all__ = [
    "BUILTINS",
    "ScenarioBundle",
    "SignedDynamicsError",
    "builtin",
    "load",
    "loads",
    "predict",
    "simulate",
    "verify",
]
