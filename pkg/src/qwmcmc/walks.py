"""Plain coined quantum walk on the line, and its classical counterpart.

These baselines exhibit the spread gap that motivates walk-based
samplers: the classical walker's position deviation grows like sqrt(t),
the coined quantum walker's grows linearly in t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class CoinParams:
    """Rotation angle and phases of the 2x2 coin operator.

    theta sets the left/right bias (pi/4 is the unbiased Hadamard coin);
    the phases affect interference but never single-step probabilities.
    """

    theta: float
    gamma0: float = 0.0
    gamma1: float = 0.0

    def __post_init__(self) -> None:
        if not 0 <= self.theta < 2 * math.pi:
            raise ValueError(f"theta must lie in [0, 2*pi), got {self.theta}")
        for name, g in (("gamma0", self.gamma0), ("gamma1", self.gamma1)):
            if not 0 <= g < math.pi:
                raise ValueError(f"{name} must lie in [0, pi), got {g}")


HADAMARD_COIN = CoinParams(theta=math.pi / 4)


def coin_matrix(p: CoinParams) -> np.ndarray:
    """Unitary coin matrix in the (H, T) basis."""
    c, s = math.cos(p.theta), math.sin(p.theta)
    e0 = np.exp(1j * p.gamma0)
    e1 = np.exp(1j * p.gamma1)
    return np.array([[c, e0 * s], [e1 * s, -e0 * e1 * c]])


@dataclass
class WalkState:
    """Coin-position amplitudes on a symmetric lattice.

    Row 0 holds the H (move left) component, row 1 the T (move right)
    component; column j is lattice position ``j - t_max``.
    """

    amplitudes: np.ndarray  # (2, 2*t_max + 1) complex
    t_max: int

    @classmethod
    def localized(cls, coin: str, position: int, t_max: int) -> "WalkState":
        if coin not in ("H", "T"):
            raise ValueError(f"coin must be 'H' or 'T', got {coin!r}")
        if abs(position) > t_max:
            raise ValueError(f"position {position} outside lattice of half-width {t_max}")
        amps = np.zeros((2, 2 * t_max + 1), dtype=complex)
        amps[0 if coin == "H" else 1, position + t_max] = 1.0
        return cls(amps, t_max)

    def positions(self) -> np.ndarray:
        return np.arange(-self.t_max, self.t_max + 1)

    def position_distribution(self) -> np.ndarray:
        return (np.abs(self.amplitudes) ** 2).sum(axis=0)

    def amplitude(self, coin: str, position: int) -> complex:
        return self.amplitudes[0 if coin == "H" else 1, position + self.t_max]

    def norm(self) -> float:
        return float((np.abs(self.amplitudes) ** 2).sum())


def _padded(state: WalkState, extra: int) -> WalkState:
    amps = np.zeros((2, 2 * (state.t_max + extra) + 1), dtype=complex)
    amps[:, extra : extra + 2 * state.t_max + 1] = state.amplitudes
    return WalkState(amps, state.t_max + extra)


def dqw_evolve(p: CoinParams, steps: int, init: WalkState | None = None) -> WalkState:
    """Evolve a coined walk for ``steps`` steps, padding so no edge is reached.

    Each step applies the coin to the internal register, then moves the H
    component one site left and the T component one site right.
    """
    if steps < 0:
        raise ValueError(f"steps must be nonnegative, got {steps}")
    if init is None:
        init = WalkState.localized("H", 0, t_max=max(steps, 1))
        state = init
    else:
        state = _padded(init, steps)
    c = coin_matrix(p)
    amps = state.amplitudes
    for _ in range(steps):
        mixed = c @ amps
        amps = np.zeros_like(mixed)
        amps[0, :-1] = mixed[0, 1:]   # H moves left
        amps[1, 1:] = mixed[1, :-1]   # T moves right
    out = WalkState(amps, state.t_max)
    drift = abs(out.norm() - 1.0)
    if drift > 1e-10:
        raise RuntimeError(f"walk norm drifted by {drift:e}")
    return out


def dqw_run(p: CoinParams, steps: int, init: WalkState | None = None) -> np.ndarray:
    """Position distribution of the coined walk after ``steps`` steps."""
    return dqw_evolve(p, steps, init).position_distribution()


def rw_distribution(p_right: float, steps: int) -> np.ndarray:
    """Exact position distribution of the classical walk (binomial).

    Returns a vector over positions -steps..steps; only sites matching the
    parity of ``steps`` carry mass.
    """
    if not 0 <= p_right <= 1:
        raise ValueError(f"p_right must lie in [0, 1], got {p_right}")
    if steps < 0:
        raise ValueError(f"steps must be nonnegative, got {steps}")
    probs = np.zeros(2 * steps + 1)
    if steps == 0:
        probs[0] = 1.0
        return probs
    if p_right == 0.0:
        probs[0] = 1.0
        return probs
    if p_right == 1.0:
        probs[-1] = 1.0
        return probs
    lg = math.lgamma
    for k in range(steps + 1):
        logpmf = (
            lg(steps + 1) - lg(k + 1) - lg(steps - k + 1)
            + k * math.log(p_right) + (steps - k) * math.log1p(-p_right)
        )
        probs[2 * k] = math.exp(logpmf)  # position 2k - steps, index 2k
    return probs


def position_std(probs: np.ndarray, positions: np.ndarray | None = None) -> float:
    """Standard deviation of a position distribution.

    With no explicit positions, the vector is assumed to cover the
    symmetric lattice -t..t.
    """
    probs = np.asarray(probs, dtype=float)
    if positions is None:
        half = (len(probs) - 1) // 2
        positions = np.arange(-half, half + 1)
    mean = float(np.dot(probs, positions))
    var = float(np.dot(probs, (positions - mean) ** 2))
    return math.sqrt(max(var, 0.0))
