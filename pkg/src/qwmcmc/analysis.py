"""Distance metrics, convergence detection, and resource accounting.

The distance used throughout is the unhalved total-variation distance
``sum_x |d1(x) - d2(x)|``, which ranges over [0, 2].  This is twice the
textbook TV distance; every threshold in this package follows the
unhalved convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np


def tv_distance(d1: np.ndarray, d2: np.ndarray) -> float:
    """Unhalved total-variation distance between two probability vectors."""
    d1 = np.asarray(d1, dtype=float)
    d2 = np.asarray(d2, dtype=float)
    if d1.shape != d2.shape:
        raise ValueError(f"length mismatch: {d1.shape} vs {d2.shape}")
    for d in (d1, d2):
        if abs(d.sum() - 1.0) > 1e-9:
            raise ValueError(f"input sums to {d.sum()!r}, not a probability vector")
    return float(np.abs(d1 - d2).sum())


def detect_convergence(tv_series: Sequence[float], epsilon: float) -> Optional[int]:
    """First index whose TV value falls below ``epsilon``, or None."""
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    for t, v in enumerate(tv_series):
        if v < epsilon:
            return t
    return None


def qubit_cost(n_a: int, n_x: int, n_acc: int, t: int) -> int:
    """Total qubits consumed by ``t`` iterations: (n_a+1)*t + 2*n_x + n_acc.

    The action and coin registers are replaced with fresh qubits every
    iteration; position, trial, and acceptance registers are reused.
    """
    for name, v in (("n_a", n_a), ("n_x", n_x), ("n_acc", n_acc), ("t", t)):
        if v < 0:
            raise ValueError(f"{name} must be nonnegative, got {v}")
    return (n_a + 1) * t + 2 * n_x + n_acc


def sampling_cost(t_q: int, t_c: int, t_l: int, n_samples: int) -> tuple[int, int]:
    """Iteration counts to draw ``n_samples``: (quantum, classical).

    The quantum circuit is measured destructively, so every sample costs a
    full re-run: ``n_samples * t_q``.  A classical chain converges once and
    then pays only the decorrelation lag: ``t_c + n_samples * t_l``.
    """
    for name, v in (("t_q", t_q), ("t_c", t_c), ("t_l", t_l), ("n_samples", n_samples)):
        if v < 0:
            raise ValueError(f"{name} must be nonnegative, got {v}")
    return n_samples * t_q, t_c + n_samples * t_l


@dataclass(frozen=True)
class CostAccount:
    """Qubit and iteration budget of a converged run."""

    n_a: int
    n_x: int
    n_acc: int
    t: int

    @property
    def total_qubits(self) -> int:
        return qubit_cost(self.n_a, self.n_x, self.n_acc, self.t)

    def quantum_sampling_iters(self, n_samples: int) -> int:
        return n_samples * self.t

    def classical_sampling_iters(self, n_samples: int, t_c: int, t_l: int) -> int:
        return t_c + n_samples * t_l
