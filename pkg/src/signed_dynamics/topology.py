"""Static graph analysis: connectivity, structural balance, ISB subgraphs, spectra.

Arcs follow the influence direction: ``a[j, k] != 0`` gives an arc ``k -> j``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import CapExceeded, InvalidInput, NumericalFailure
from .outcome import OutcomeKind
from .signed_graph import SignedMatrix, as_matrix, laplacian

MAX_SCC_FOR_ISB = 20
HURWITZ_TOL = 1e-9


@dataclass(frozen=True)
class Condensation:
    """SCCs in topological order plus the arcs between them."""

    components: tuple[tuple[int, ...], ...]
    edges: frozenset[tuple[int, int]]

    @property
    def is_strongly_connected(self) -> bool:
        return len(self.components) == 1

    def component_of(self) -> dict[int, int]:
        return {v: c for c, comp in enumerate(self.components) for v in comp}

    def predecessors(self, c: int) -> set[int]:
        return {u for u, w in self.edges if w == c}

    def sources(self) -> list[int]:
        targets = {w for _, w in self.edges}
        return [c for c in range(len(self.components)) if c not in targets]


def _out_neighbors(a: np.ndarray) -> list[list[int]]:
    # arc k -> j whenever a[j, k] != 0
    n = a.shape[0]
    return [[j for j in range(n) if j != k and a[j, k] != 0] for k in range(n)]


def strongly_connected_components(a) -> Condensation:
    """Tarjan's algorithm; components come back in topological order."""
    a = as_matrix(a)
    n = a.shape[0]
    succ = _out_neighbors(a)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    found: list[tuple[int, ...]] = []
    counter = 0

    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, i = work[-1]
            if i < len(succ[v]):
                work[-1] = (v, i + 1)
                w = succ[v][i]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                found.append(tuple(sorted(comp)))

    # Tarjan emits sinks first
    comps = tuple(reversed(found))
    where = {v: c for c, comp in enumerate(comps) for v in comp}
    edges = frozenset(
        (where[k], where[j]) for k in range(n) for j in succ[k] if where[k] != where[j]
    )
    return Condensation(comps, edges)


def reachable_from(a, start: int) -> set[int]:
    succ = _out_neighbors(as_matrix(a))
    seen = {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for w in succ[v]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


def roots(a) -> list[int]:
    """Nodes from which every other node can be reached."""
    cond = strongly_connected_components(a)
    sources = cond.sources()
    if len(sources) != 1:
        return []
    return list(cond.components[sources[0]])


def is_strongly_connected(a) -> bool:
    return strongly_connected_components(a).is_strongly_connected


def is_quasi_strongly_connected(a) -> tuple[bool, list[int]]:
    r = roots(a)
    return bool(r), r


@dataclass(frozen=True)
class CampPartition:
    camp1: frozenset[int]
    camp2: frozenset[int]

    def __post_init__(self):
        if not self.camp1:
            raise ValueError("camp 1 must be non-empty")
        if self.camp1 & self.camp2:
            raise ValueError("camps must be disjoint")

    @property
    def nodes(self) -> frozenset[int]:
        return self.camp1 | self.camp2

    def signs(self, n: int | None = None) -> np.ndarray:
        """Gauge vector: +1 on camp 1, -1 on camp 2 (0 outside the partition)."""
        n = max(self.nodes) + 1 if n is None else n
        d = np.zeros(n)
        d[list(self.camp1)] = 1.0
        d[list(self.camp2)] = -1.0
        return d

    def to_dict(self) -> dict:
        return {"camp1": sorted(i + 1 for i in self.camp1), "camp2": sorted(i + 1 for i in self.camp2)}


@dataclass(frozen=True)
class BalanceResult:
    balanced: bool
    camps: CampPartition | None = None
    cycle: tuple[int, ...] | None = None


def _two_color(nodes: Sequence[int], constraints: dict[tuple[int, int], int]) -> BalanceResult:
    """2-color ``nodes`` so that sign +1 pairs share a color and -1 pairs differ.

    ``constraints`` maps an unordered pair ``(u, w)`` with ``u < w`` to +1/-1,
    or to 0 when both signs are demanded (always a conflict).
    """
    adj: dict[int, list[tuple[int, int]]] = {v: [] for v in nodes}
    for (u, w), s in constraints.items():
        adj[u].append((w, s))
        adj[w].append((u, s))
    color: dict[int, int] = {}
    parent: dict[int, int | None] = {}
    for start in sorted(nodes):
        if start in color:
            continue
        color[start] = 1
        parent[start] = None
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for w, s in sorted(adj[v]):
                if s == 0:
                    return BalanceResult(False, cycle=(v, w, v))
                want = color[v] * s
                if w not in color:
                    color[w] = want
                    parent[w] = v
                    queue.append(w)
                elif color[w] != want:
                    return BalanceResult(False, cycle=_tree_cycle(parent, v, w))
    camp1 = frozenset(v for v, c in color.items() if c > 0)
    camp2 = frozenset(v for v, c in color.items() if c < 0)
    return BalanceResult(True, CampPartition(camp1, camp2))


def _tree_cycle(parent: dict[int, int | None], v: int, w: int) -> tuple[int, ...]:
    def path(x):
        out = [x]
        while parent[out[-1]] is not None:
            out.append(parent[out[-1]])
        return out

    pv, pw = path(v), path(w)
    common = set(pv) & set(pw)
    lca = next(x for x in pv if x in common)
    left = pv[: pv.index(lca) + 1]
    right = pw[: pw.index(lca)]
    return tuple(left + list(reversed(right)) + [v])


def _sign_constraints(mats: Iterable[np.ndarray], nodes: Sequence[int]) -> dict[tuple[int, int], int]:
    keep = set(nodes)
    cons: dict[tuple[int, int], int] = {}
    for a in mats:
        for j, k in zip(*np.nonzero(a)):
            j, k = int(j), int(k)
            if j == k or j not in keep or k not in keep:
                continue
            key = (min(j, k), max(j, k))
            s = 1 if a[j, k] > 0 else -1
            prev = cons.get(key)
            cons[key] = s if prev is None or prev == s else 0
    return cons


def hostile_camps(a, nodes: Sequence[int] | None = None) -> BalanceResult:
    """Split the (sub)graph into two hostile camps, or report a violating cycle.

    Components of the undirected support are colored independently, their
    lowest-indexed node going to camp 1.
    """
    a = as_matrix(a)
    nodes = list(range(a.shape[0])) if nodes is None else sorted(nodes)
    return _two_color(nodes, _sign_constraints([a], nodes))


def common_camps(matrices: Sequence, nodes: Sequence[int] | None = None) -> BalanceResult:
    """A single camp partition that fits every matrix at once, if there is one."""
    mats = [as_matrix(m) for m in matrices]
    nodes = list(range(mats[0].shape[0])) if nodes is None else sorted(nodes)
    return _two_color(nodes, _sign_constraints(mats, nodes))


def is_structurally_balanced(a) -> bool:
    return hostile_camps(a).balanced


def cycle_sign_check(a) -> bool:
    """True iff every directed cycle of an SC, digon sign-symmetric graph is positive.

    Propagates a sign potential along directed arcs from node 0 over a DFS
    tree and checks each remaining arc against it.
    """
    m = as_matrix(a)
    sm = a if isinstance(a, SignedMatrix) else SignedMatrix(m)
    if not sm.is_digon_symmetric():
        raise InvalidInput("cycle sign check requires a digon sign-symmetric graph")
    if not is_strongly_connected(m):
        raise InvalidInput("cycle sign check requires a strongly connected graph")
    succ = _out_neighbors(m)
    potential = {0: 1}
    stack = [0]
    while stack:
        k = stack.pop()
        for j in succ[k]:
            s = potential[k] * (1 if m[j, k] > 0 else -1)
            if j not in potential:
                potential[j] = s
                stack.append(j)
    return all(
        potential[j] == potential[k] * (1 if m[j, k] > 0 else -1)
        for k in range(m.shape[0])
        for j in succ[k]
    )


def in_isolated_sets(a, cap: int = MAX_SCC_FOR_ISB) -> list[frozenset[int]]:
    """All non-empty node sets whose members listen to nobody outside the set.

    These are the unions of SCCs closed under predecessors in the
    condensation.  Sorted by size, then lexicographically.
    """
    cond = strongly_connected_components(a)
    m = len(cond.components)
    if m > cap:
        raise CapExceeded(f"{m} strongly connected components exceed the cap of {cap}")
    preds = [cond.predecessors(c) for c in range(m)]
    found: list[frozenset[int]] = []

    def extend(c: int, chosen: set[int]):
        if c == m:
            if chosen:
                found.append(frozenset(v for i in chosen for v in cond.components[i]))
            return
        extend(c + 1, chosen)
        # components are topologically sorted, so predecessors are decided already
        if preds[c] <= chosen:
            chosen.add(c)
            extend(c + 1, chosen)
            chosen.discard(c)

    extend(0, set())
    return sorted(found, key=lambda s: (len(s), sorted(s)))


def has_isb_subgraph(a) -> tuple[bool, frozenset[int] | None]:
    """Look for an in-isolated structurally balanced subgraph.

    A balanced graph is its own witness.  Otherwise it suffices to test the
    source components of the condensation: every in-isolated set contains
    one, and a subgraph of a balanced graph is balanced.
    """
    m = as_matrix(a)
    if hostile_camps(m).balanced:
        return True, frozenset(range(m.shape[0]))
    cond = strongly_connected_components(m)
    for c in cond.sources():
        comp = cond.components[c]
        if hostile_camps(m, comp).balanced:
            return True, frozenset(comp)
    return False, None


def spectrum(a) -> np.ndarray:
    """Eigenvalues of the signed Laplacian, sorted by real part then imaginary part."""
    try:
        ev = np.linalg.eigvals(laplacian(a))
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigenvalue computation failed: {exc}") from exc
    if not np.all(np.isfinite(ev)):
        raise NumericalFailure("eigenvalue computation returned non-finite values")
    return ev[np.lexsort((ev.imag, ev.real))]


def is_hurwitz(a, tol: float = HURWITZ_TOL) -> tuple[bool, np.ndarray]:
    """Whether ``-L[A]`` is Hurwitz; returns the spectrum of ``-L[A]`` too."""
    ev = -spectrum(a)
    return bool(ev.real.max() < -tol), ev


def smallest_positive_rate(a, tol: float = HURWITZ_TOL) -> float | None:
    """Smallest real part among Laplacian eigenvalues that are not (numerically) zero."""
    ev = spectrum(a)
    rates = ev.real[np.abs(ev) > tol]
    return float(rates.min()) if rates.size else None


@dataclass(frozen=True)
class StaticPrediction:
    outcome: OutcomeKind
    camps: CampPartition | None = None
    isb_witness: frozenset[int] | None = None
    roots: tuple[int, ...] = ()
    rho: np.ndarray | None = field(default=None, compare=False)
    v: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.outcome is OutcomeKind.POLARIZATION and not (self.camps and self.camps.camp2):
            raise ValueError("polarization needs two non-empty camps")
        if self.outcome is OutcomeKind.CONSENSUS and self.camps and self.camps.camp2:
            raise ValueError("consensus needs an empty second camp")

    def limit(self, x0) -> np.ndarray:
        """Predicted ``lim x(t) = rho v^T x0``; zero when stabilizing."""
        x0 = np.asarray(x0, dtype=float)
        if self.outcome is OutcomeKind.STABILIZING:
            return np.zeros_like(x0)
        if self.rho is None:
            raise InvalidInput(f"no closed-form limit for outcome {self.outcome}")
        return self.rho * float(self.v @ x0)

    def to_dict(self) -> dict:
        return {
            "outcome": self.outcome.value,
            "camps": None if self.camps is None else self.camps.to_dict(),
            "isb_witness": None if self.isb_witness is None else sorted(i + 1 for i in self.isb_witness),
            "roots": [i + 1 for i in self.roots],
            "rho": None if self.rho is None else self.rho.tolist(),
            "v": None if self.v is None else self.v.tolist(),
        }


def left_null_vector(a, rho: np.ndarray) -> np.ndarray:
    """Left eigenvector of ``L[A]`` at 0, scaled so that ``v @ rho == 1``."""
    lap = laplacian(a)
    try:
        _, s, vt = np.linalg.svd(lap.T)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"SVD failed: {exc}") from exc
    v = vt[-1]
    scale = float(v @ rho)
    if abs(scale) < 1e-12:
        raise NumericalFailure("left null vector is orthogonal to the camp vector")
    return v / scale


def static_predict(a) -> StaticPrediction:
    """Outcome of the linear protocol on a constant graph."""
    m = as_matrix(a)
    bal = hostile_camps(m)
    qsc, rts = is_quasi_strongly_connected(m)
    if bal.balanced:
        if not qsc:
            return StaticPrediction(
                OutcomeKind.NO_MODULUS_CONSENSUS, camps=bal.camps, isb_witness=frozenset(range(m.shape[0]))
            )
        rho = bal.camps.signs(m.shape[0])
        v = left_null_vector(m, rho)
        kind = OutcomeKind.POLARIZATION if bal.camps.camp2 else OutcomeKind.CONSENSUS
        return StaticPrediction(
            kind, camps=bal.camps, isb_witness=frozenset(range(m.shape[0])), roots=tuple(rts), rho=rho, v=v
        )
    isb, witness = has_isb_subgraph(m)
    if isb:
        return StaticPrediction(OutcomeKind.NO_MODULUS_CONSENSUS, isb_witness=witness, roots=tuple(rts))
    return StaticPrediction(OutcomeKind.STABILIZING, roots=tuple(rts))


def topology_report(a) -> dict:
    """JSON-ready static analysis of one matrix (node labels 1-based)."""
    m = as_matrix(a)
    cond = strongly_connected_components(m)
    qsc, rts = is_quasi_strongly_connected(m)
    bal = hostile_camps(m)
    isb, witness = has_isb_subgraph(m)
    hurwitz, ev = is_hurwitz(m)
    pred = static_predict(m)
    return {
        "scc": [[i + 1 for i in c] for c in cond.components],
        "condensation_edges": sorted([u, w] for u, w in cond.edges),
        "sc": cond.is_strongly_connected,
        "qsc": qsc,
        "roots": [i + 1 for i in rts],
        "balanced": bal.balanced,
        "camps": None if bal.camps is None else bal.camps.to_dict(),
        "violating_cycle": None if bal.cycle is None else [i + 1 for i in bal.cycle],
        "isb_witness": None if witness is None else sorted(i + 1 for i in witness),
        "hurwitz": hurwitz,
        "spectrum": [[float(z.real), float(z.imag)] for z in spectrum(m)],
        "prediction": pred.to_dict(),
    }
