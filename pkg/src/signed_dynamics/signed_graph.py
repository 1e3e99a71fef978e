"""Signed adjacency matrices, Laplacians, skeletons and piecewise-constant schedules.

Index convention: ``a[j, k] != 0`` means agent ``j`` listens to agent ``k``,
i.e. there is an arc ``k -> j`` in the influence graph.  Nodes are 0-based in
the Python API; reports written for humans use 1-based labels.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

import numpy as np

from .errors import InvalidMatrix, InvalidParameter

WEIGHT_CAP = 1e6


@dataclass
class ValidationReport:
    diagonal: list[int] = field(default_factory=list)
    non_finite: list[tuple[int, int]] = field(default_factory=list)
    digon: list[tuple[int, int]] = field(default_factory=list)
    too_large: list[tuple[int, int]] = field(default_factory=list)
    shape: str | None = None

    @property
    def ok(self) -> bool:
        return not (self.diagonal or self.non_finite or self.digon or self.too_large or self.shape)

    def summary(self) -> str:
        if self.ok:
            return "no violations"
        parts = []
        if self.shape:
            parts.append(self.shape)
        if self.diagonal:
            parts.append("nonzero diagonal at " + ", ".join(str(j + 1) for j in self.diagonal))
        if self.non_finite:
            parts.append(f"{len(self.non_finite)} non-finite entries")
        if self.too_large:
            parts.append(f"{len(self.too_large)} entries above {WEIGHT_CAP:g} in magnitude")
        if self.digon:
            parts.append(
                "opposite-signed digons at " + ", ".join(f"({j + 1},{k + 1})" for j, k in self.digon)
            )
        return "; ".join(parts)


def validate(entries, require_digon_symmetry: bool = False) -> ValidationReport:
    """Report every violation of the signed-matrix invariants without raising."""
    if isinstance(entries, SignedMatrix):
        entries = entries.entries
    a = np.asarray(entries, dtype=float)
    report = ValidationReport()
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        report.shape = f"matrix must be square, got shape {a.shape}"
        return report
    if a.shape[0] < 2:
        report.shape = "at least two agents are required"
        return report
    finite = np.isfinite(a)
    report.non_finite = [tuple(map(int, idx)) for idx in np.argwhere(~finite)]
    report.diagonal = [int(j) for j in np.flatnonzero(np.diag(a) != 0)]
    with np.errstate(invalid="ignore"):
        big = finite & (np.abs(a) > WEIGHT_CAP)
        report.too_large = [tuple(map(int, idx)) for idx in np.argwhere(big)]
        if require_digon_symmetry:
            bad = np.triu(a * a.T < 0, k=1)
            report.digon = [tuple(map(int, idx)) for idx in np.argwhere(bad)]
    return report


class SignedMatrix:
    """Immutable N x N signed adjacency matrix with zero diagonal."""

    __slots__ = ("_a",)

    def __init__(self, entries, require_digon_symmetry: bool = False):
        a = np.array(entries, dtype=float)
        report = validate(a, require_digon_symmetry)
        if not report.ok:
            raise InvalidMatrix(report)
        a.setflags(write=False)
        self._a = a

    @property
    def entries(self) -> np.ndarray:
        return self._a

    @property
    def n(self) -> int:
        return self._a.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self._a if dtype is None else self._a.astype(dtype)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SignedMatrix):
            return NotImplemented
        return self._a.shape == other._a.shape and bool(np.array_equal(self._a, other._a))

    def __hash__(self) -> int:
        return hash((self._a.shape, self._a.tobytes()))

    def __repr__(self) -> str:
        return f"SignedMatrix({self._a.tolist()!r})"

    def support(self) -> np.ndarray:
        """Boolean matrix of arcs: ``support()[j, k]`` iff ``a_jk != 0``."""
        return self._a != 0

    def is_digon_symmetric(self) -> bool:
        return not validate(self._a, True).digon

    def submatrix(self, nodes: Sequence[int]) -> np.ndarray:
        idx = np.asarray(sorted(nodes), dtype=int)
        return self._a[np.ix_(idx, idx)]

    def abs(self) -> "SignedMatrix":
        return SignedMatrix(np.abs(self._a))

    def row_abs_max(self) -> float:
        """Induced infinity norm of the matrix (largest absolute row sum)."""
        return float(np.abs(self._a).sum(axis=1).max())


def as_matrix(a) -> np.ndarray:
    return a.entries if isinstance(a, SignedMatrix) else np.asarray(a, dtype=float)


def laplacian(a) -> np.ndarray:
    """Signed Laplacian: ``L_jk = -a_jk`` off the diagonal, ``L_jj = sum_m |a_jm|``."""
    a = as_matrix(a)
    lap = -a.copy()
    np.fill_diagonal(lap, np.abs(a).sum(axis=1) - np.abs(np.diag(a)))
    return lap


def epsilon_skeleton(a, eps: float) -> SignedMatrix:
    """Drop every arc whose absolute weight is below ``eps``."""
    if not eps > 0:
        raise InvalidParameter(f"epsilon must be positive, got {eps!r}")
    a = as_matrix(a)
    return SignedMatrix(np.where(np.abs(a) >= eps, a, 0.0))


def gauge(signs, a) -> SignedMatrix:
    """Conjugate by ``diag(signs)``: ``a'_jk = d_j a_jk d_k``."""
    d = np.asarray(signs, dtype=float)
    if d.ndim != 1 or not np.all(np.abs(d) == 1):
        raise InvalidParameter("gauge signs must be a vector of +1/-1")
    return SignedMatrix(d[:, None] * as_matrix(a) * d[None, :])


@dataclass(frozen=True)
class Segment:
    t_start: float
    t_end: float
    matrix: SignedMatrix

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start


class Schedule:
    """Piecewise-constant matrix function ``A(t)`` on ``[0, inf)``.

    Segments partition ``[0, horizon)``.  A periodic schedule repeats with
    ``period == horizon``; a non-periodic one holds its last matrix forever.
    """

    def __init__(
        self,
        segments: Sequence[Segment | tuple],
        period: float | None = None,
        labels: Sequence[str] | None = None,
    ):
        segs = tuple(s if isinstance(s, Segment) else _segment(*s) for s in segments)
        if not segs:
            raise InvalidParameter("a schedule needs at least one segment")
        n = segs[0].matrix.n
        t = 0.0
        for i, s in enumerate(segs):
            if s.matrix.n != n:
                raise InvalidParameter(f"segment {i} has size {s.matrix.n}, expected {n}")
            if not (math.isfinite(s.t_start) and math.isfinite(s.t_end)):
                raise InvalidParameter(f"segment {i} has non-finite bounds")
            if not math.isclose(s.t_start, t, rel_tol=1e-12, abs_tol=1e-12):
                raise InvalidParameter(f"segment {i} starts at {s.t_start}, expected {t}")
            if not s.t_end > s.t_start:
                raise InvalidParameter(f"segment {i} is empty or reversed")
            t = s.t_end
        if period is not None:
            if not period > 0:
                raise InvalidParameter("period must be positive")
            if not math.isclose(t, period, rel_tol=1e-12, abs_tol=1e-12):
                raise InvalidParameter(f"segments span {t}, but period is {period}")
        if labels is not None and len(labels) != n:
            raise InvalidParameter(f"expected {n} labels, got {len(labels)}")
        self.segments = segs
        self.period = None if period is None else float(period)
        self.labels = None if labels is None else tuple(str(x) for x in labels)
        self._starts = [s.t_start for s in segs]

    @classmethod
    def constant(cls, a, duration: float = 1.0, labels=None) -> "Schedule":
        m = a if isinstance(a, SignedMatrix) else SignedMatrix(a)
        return cls([Segment(0.0, float(duration), m)], labels=labels)

    @classmethod
    def periodic(cls, matrices: Sequence, durations: Sequence[float], labels=None) -> "Schedule":
        segs, t = [], 0.0
        for m, d in zip(matrices, durations, strict=True):
            m = m if isinstance(m, SignedMatrix) else SignedMatrix(m)
            segs.append(Segment(t, t + float(d), m))
            t += float(d)
        return cls(segs, period=t, labels=labels)

    @property
    def n(self) -> int:
        return self.segments[0].matrix.n

    @property
    def horizon(self) -> float:
        return self.segments[-1].t_end

    @property
    def is_periodic(self) -> bool:
        return self.period is not None

    def matrices(self) -> list[SignedMatrix]:
        return [s.matrix for s in self.segments]

    def is_constant(self) -> bool:
        first = self.segments[0].matrix
        return all(s.matrix == first for s in self.segments[1:])

    def tail_matrix(self) -> SignedMatrix:
        """Matrix in force as ``t -> inf`` for a non-periodic schedule."""
        return self.segments[-1].matrix

    def _index(self, tau: float) -> int:
        return max(0, bisect.bisect_right(self._starts, tau) - 1)

    def matrix_at(self, t: float) -> SignedMatrix:
        if t < 0:
            raise InvalidParameter("time must be non-negative")
        if self.period is not None:
            t = math.fmod(t, self.period)
        elif t >= self.horizon:
            return self.tail_matrix()
        return self.segments[self._index(t)].matrix

    def breakpoints(self, a: float, b: float) -> list[float]:
        """Times in ``(a, b)`` where the matrix may switch, sorted.

        The horizon of a non-periodic schedule is not a switch: the last
        matrix is held past it.
        """
        if self.period is None:
            pts = [s.t_start for s in self.segments[1:]]
            return [p for p in pts if a < p < b]
        p = self.period
        bounds = [s.t_start for s in self.segments]
        out = []
        k = math.floor(a / p)
        while k * p < b:
            for s in bounds:
                x = k * p + s
                if a < x < b:
                    out.append(x)
            k += 1
        return out

    def pieces(self, a: float, b: float) -> Iterator[tuple[float, float, SignedMatrix]]:
        """Yield ``(lo, hi, matrix)`` covering ``[a, b)`` with constant matrix."""
        pts = [a, *self.breakpoints(a, b), b]
        for lo, hi in zip(pts[:-1], pts[1:]):
            if hi > lo:
                yield lo, hi, self.matrix_at(0.5 * (lo + hi))

    def integral(
        self, a: float, b: float, transform: Callable[[np.ndarray], np.ndarray] = np.abs
    ) -> np.ndarray:
        """Exact ``int_a^b transform(A(s)) ds`` for the piecewise-constant schedule."""
        if b < a:
            raise InvalidParameter("integration bounds reversed")
        total = np.zeros((self.n, self.n))
        if self.period is not None and b - a > 2 * self.period:
            p = self.period
            one = sum((s.duration * transform(s.matrix.entries) for s in self.segments), total.copy())
            k0 = math.ceil(a / p)
            k1 = math.floor(b / p)
            if k1 > k0:
                total += (k1 - k0) * one
                total += self.integral(a, k0 * p, transform)
                total += self.integral(k1 * p, b, transform)
                return total
        for lo, hi, m in self.pieces(a, b):
            total += (hi - lo) * transform(m.entries)
        return total

    def to_dict(self) -> dict:
        out = {
            "n": self.n,
            "segments": [
                {"t_start": s.t_start, "t_end": s.t_end, "matrix": s.matrix.entries.tolist()}
                for s in self.segments
            ],
        }
        if self.period is not None:
            out["period"] = self.period
        if self.labels is not None:
            out["labels"] = list(self.labels)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Schedule":
        segs = [Segment(float(s["t_start"]), float(s["t_end"]), SignedMatrix(s["matrix"])) for s in data["segments"]]
        sched = cls(segs, period=data.get("period"), labels=data.get("labels"))
        if "n" in data and int(data["n"]) != sched.n:
            raise InvalidParameter(f"declared n={data['n']} but matrices are {sched.n}x{sched.n}")
        return sched

    def __repr__(self) -> str:
        kind = f"period={self.period}" if self.period is not None else f"horizon={self.horizon}"
        return f"Schedule(n={self.n}, segments={len(self.segments)}, {kind})"


def _segment(t_start, t_end, matrix) -> Segment:
    m = matrix if isinstance(matrix, SignedMatrix) else SignedMatrix(matrix)
    return Segment(float(t_start), float(t_end), m)


def window_integral(schedule: Schedule, t: float, length: float) -> np.ndarray:
    """``int_t^{t+length} abs A(s) ds``, entries all non-negative."""
    if t < 0 or not length > 0:
        raise InvalidParameter("window needs t >= 0 and a positive length")
    return schedule.integral(t, t + length, np.abs)
