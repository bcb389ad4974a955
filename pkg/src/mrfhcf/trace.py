"""Per-iteration run traces shared by the iterative estimators."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class TraceRow:
    """State summary after one iteration (row 0 describes the initial state)."""
    iteration: int
    energy: float
    committed: int
    changed: int


@dataclass(frozen=True)
class RunTrace:
    rows: tuple[TraceRow, ...]

    @property
    def iterations(self) -> int:
        """Number of state-changing iterations; terminal quiet sweeps do not count."""
        return sum(1 for r in self.rows if r.changed > 0)

    @property
    def final_energy(self) -> float:
        return self.rows[-1].energy

    @property
    def final_committed(self) -> int:
        return self.rows[-1].committed
