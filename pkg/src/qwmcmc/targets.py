"""Target densities on a discretized interval.

A target is a mixture of Gaussians restricted to a finite interval and
evaluated at the grid points addressed by an ``n_x``-qubit position
register.  The resulting probability vector is the reference ("expected")
distribution that both the quantum engine and the classical sampler are
measured against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Relative floor applied to the discretized density before normalization so
# that acceptance ratios f(t)/f(x) are always finite and nonzero.
DENSITY_FLOOR = 1e-12


@dataclass(frozen=True)
class Grid:
    """Uniform grid identifying basis state ``|i>`` with a point of [x_min, x_max].

    The endpoints map exactly: index 0 is ``x_min`` and index ``2**n_x - 1``
    is ``x_max``; interior indices are linearly interpolated.
    """

    n_x: int
    x_min: float
    x_max: float

    def __post_init__(self) -> None:
        if self.n_x < 1:
            raise ValueError(f"need at least one position qubit, got n_x={self.n_x}")
        if not self.x_min < self.x_max:
            raise ValueError(f"empty interval [{self.x_min}, {self.x_max}]")

    @property
    def n_states(self) -> int:
        return 2 ** self.n_x

    def positions(self) -> np.ndarray:
        """Real positions of all grid points, endpoints exact."""
        return np.linspace(self.x_min, self.x_max, self.n_states)


def real_of_index(i: int, grid: Grid) -> float:
    """Real position of basis state ``i`` on ``grid``."""
    n = grid.n_states
    if not 0 <= i < n:
        raise ValueError(f"state index {i} outside [0, {n - 1}]")
    if i == n - 1:
        return grid.x_max
    step = (grid.x_max - grid.x_min) / (n - 1)
    return grid.x_min + i * step


@dataclass(frozen=True)
class GaussianComponent:
    weight: float
    mean: float
    sigma: float

    def __post_init__(self) -> None:
        if self.weight <= 0:
            raise ValueError(f"component weight must be positive, got {self.weight}")
        if self.sigma <= 0:
            raise ValueError(f"component sigma must be positive, got {self.sigma}")


@dataclass(frozen=True)
class TargetSpec:
    """Gaussian-mixture density paired with the grid it is sampled on.

    Component weights are normalized to sum to one at construction, so any
    common positive rescaling of the weights describes the same target.
    """

    components: tuple[GaussianComponent, ...]
    grid: Grid

    def __post_init__(self) -> None:
        comps = tuple(
            c if isinstance(c, GaussianComponent) else GaussianComponent(*c)
            for c in self.components
        )
        if not comps:
            raise ValueError("target needs at least one mixture component")
        total = sum(c.weight for c in comps)
        comps = tuple(
            GaussianComponent(c.weight / total, c.mean, c.sigma) for c in comps
        )
        object.__setattr__(self, "components", comps)

    def density(self, x: np.ndarray) -> np.ndarray:
        """Mixture density evaluated pointwise at ``x``."""
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for c in self.components:
            z = (x - c.mean) / c.sigma
            out += c.weight * np.exp(-0.5 * z * z) / (c.sigma * np.sqrt(2.0 * np.pi))
        return out

    @classmethod
    def single_gaussian(cls, mean: float, sigma: float, grid: Grid) -> "TargetSpec":
        return cls((GaussianComponent(1.0, mean, sigma),), grid)


class ExpectedDistribution:
    """Floored, normalized probability vector over the position grid."""

    def __init__(self, probs: np.ndarray):
        probs = np.asarray(probs, dtype=float).copy()
        if probs.ndim != 1 or len(probs) < 2:
            raise ValueError("expected a 1-D probability vector of length >= 2")
        if probs.min() <= 0:
            raise ValueError("all probabilities must be strictly positive")
        if abs(probs.sum() - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {probs.sum()!r}, not 1")
        probs.flags.writeable = False
        self.probs = probs

    def __len__(self) -> int:
        return len(self.probs)

    def __getitem__(self, i):
        return self.probs[i]

    def __repr__(self) -> str:
        return f"ExpectedDistribution(n={len(self.probs)})"


def discretize_target(spec: TargetSpec) -> ExpectedDistribution:
    """Evaluate the target on its grid, floor, and normalize.

    Each value is clamped to at least ``DENSITY_FLOOR`` times the maximal
    grid value so that ratios between any two entries stay finite.
    """
    vals = spec.density(spec.grid.positions())
    peak = vals.max()
    if not peak > 0:
        raise ValueError("target density is zero at every grid point")
    vals = np.maximum(vals, DENSITY_FLOOR * peak)
    return ExpectedDistribution(vals / vals.sum())


def uniform_target(grid: Grid) -> TargetSpec:
    """A target whose discretization is the exactly-uniform vector.

    A Gaussian this wide evaluates to the identical float at every grid
    point, so flooring and normalization yield exactly 1/N per state.
    """
    return TargetSpec.single_gaussian(0.0, 1e150, grid)
