from __future__ import annotations

import enum
from dataclasses import dataclass, field


class OutcomeKind(str, enum.Enum):
    STABILIZING = "Stabilizing"
    CONSENSUS = "Consensus"
    POLARIZATION = "Polarization"
    MODULUS_CONSENSUS = "ModulusConsensus"
    NO_MODULUS_CONSENSUS = "NoModulusConsensus"
    INCONCLUSIVE = "Inconclusive"

    def __str__(self) -> str:
        return self.value

    @property
    def is_modulus_consensus(self) -> bool:
        """True for the modulus-consensus family (including its refinements)."""
        return self in _MODULUS_FAMILY

    @property
    def is_bipartite(self) -> bool:
        return self in (OutcomeKind.CONSENSUS, OutcomeKind.POLARIZATION)


_MODULUS_FAMILY = frozenset(
    {
        OutcomeKind.STABILIZING,
        OutcomeKind.CONSENSUS,
        OutcomeKind.POLARIZATION,
        OutcomeKind.MODULUS_CONSENSUS,
    }
)


@dataclass(frozen=True)
class Outcome:
    kind: OutcomeKind
    x_star: float | None = None
    rho: tuple[int, ...] | None = None
    diagnostics: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.rho is not None:
            rho = tuple(int(r) for r in self.rho)
            if any(r not in (-1, 1) for r in rho):
                raise ValueError("rho must contain only +1/-1")
            object.__setattr__(self, "rho", rho)
            if self.kind is OutcomeKind.CONSENSUS and len(set(rho)) != 1:
                raise ValueError("consensus requires a constant sign pattern")
            if self.kind is OutcomeKind.POLARIZATION and len(set(rho)) != 2:
                raise ValueError("polarization requires both signs in rho")
        if self.kind is OutcomeKind.STABILIZING and self.x_star not in (None, 0.0):
            raise ValueError("a stabilizing outcome has x_star = 0")
        if self.x_star is not None and self.x_star < 0:
            raise ValueError("x_star must be non-negative")

    @property
    def camps(self) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
        """Partition induced by ``rho``: (nodes with +1, nodes with -1)."""
        if self.rho is None:
            return None
        pos = tuple(i for i, r in enumerate(self.rho) if r > 0)
        neg = tuple(i for i, r in enumerate(self.rho) if r < 0)
        return pos, neg

    def to_dict(self) -> dict:
        camps = self.camps
        return {
            "kind": self.kind.value,
            "x_star": self.x_star,
            "rho": None if self.rho is None else list(self.rho),
            "camps": None if camps is None else [[i + 1 for i in c] for c in camps],
            "diagnostics": self.diagnostics,
        }
