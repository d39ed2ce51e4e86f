"""Quantum-walk Metropolis engine, evolved exactly as a channel.

One circuit iteration proposes every nonzero offset in superposition,
scores each move with a discretized Metropolis acceptance probability,
and shifts the position register conditioned on an acceptance coin.
Discarding the per-iteration action and coin registers is a partial
trace, so the whole iteration acts on the reduced position state as a
quantum channel with two Kraus operators per action: a diagonal "reject"
operator and a shifted-diagonal "accept" operator.  Iterating the channel
reproduces the growing-circuit simulation exactly while keeping the state
at a fixed N x N size.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Optional

import numpy as np

from .analysis import detect_convergence, qubit_cost, tv_distance
from .targets import ExpectedDistribution, TargetSpec, discretize_target

logger = logging.getLogger(__name__)

KRAUS_COMPLETENESS_ATOL = 1e-12
HERMITICITY_ATOL = 1e-10
TRACE_ATOL = 1e-10
DIAG_NEG_ATOL = 1e-12
TRACE_RENORM_THRESHOLD = 1e-9


@dataclass(frozen=True)
class CircuitConfig:
    """Register sizes and stopping rule for one engine run.

    ``n_a`` action qubits encode ``2**n_a`` signed offsets, at most half
    the number of position states.  ``n_acc`` qubits discretize the
    acceptance probability into ``2**n_acc`` intervals.  Position
    arithmetic wraps modulo ``2**n_x`` (cyclic boundary); targets should
    leave negligible mass at the interval edges.
    """

    n_x: int
    n_a: int = 1
    n_acc: int = 4
    epsilon: float = 1e-4
    max_iters: int = 100_000
    boundary: str = "cyclic"

    def __post_init__(self) -> None:
        if self.n_x < 1:
            raise ValueError(f"n_x must be >= 1, got {self.n_x}")
        if not 1 <= self.n_a <= self.n_x - 1:
            raise ValueError(
                f"n_a must satisfy 1 <= n_a <= n_x - 1, got n_a={self.n_a}, n_x={self.n_x}"
            )
        if self.n_acc < 1:
            raise ValueError(f"n_acc must be >= 1, got {self.n_acc}")
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.boundary != "cyclic":
            raise ValueError(f"only cyclic boundary is supported, got {self.boundary!r}")

    @property
    def n_states(self) -> int:
        return 2 ** self.n_x

    @property
    def n_actions(self) -> int:
        return 2 ** self.n_a

    @property
    def n_intervals(self) -> int:
        return 2 ** self.n_acc


def offset_of_action(a: int, n_a: int) -> int:
    """Signed position offset encoded by action label ``a``.

    Labels 0..2**n_a - 1 map onto {-A/2, ..., -1, +1, ..., +A/2}; zero is
    skipped so no action proposes staying in place.
    """
    n_actions = 2 ** n_a
    if not 0 <= a < n_actions:
        raise ValueError(f"action {a} outside [0, {n_actions - 1}]")
    half = n_actions // 2
    return a - half + (1 if a >= half else 0)


def acceptance_ratio(pi: ExpectedDistribution, x: int, t: int) -> float:
    """Metropolis acceptance min(1, pi[t]/pi[x]); positive by the density floor."""
    return min(1.0, pi[t] / pi[x])


def disc_index(a_prob: float, m: int) -> int:
    """Interval index of acceptance probability ``a_prob`` among ``m`` intervals.

    The range [0, 1) is split into m-1 uniform intervals; the top index is
    reserved for certain acceptance (a_prob >= 1).
    """
    if m < 2:
        raise ValueError(f"need at least 2 intervals, got {m}")
    if a_prob <= 0:
        raise ValueError(f"acceptance probability must be positive, got {a_prob}")
    if a_prob >= 1.0:
        return m - 1
    return int(a_prob * (m - 1))


def coin_prob(i: int, m: int) -> float:
    """Acceptance probability represented by interval ``i``.

    Interior intervals use their midpoint; the top interval accepts with
    certainty (the coin gate degenerates to a plain bit flip).
    """
    if not 0 <= i < m:
        raise ValueError(f"interval index {i} outside [0, {m - 1}]")
    if i == m - 1:
        return 1.0
    return (i + 0.5) / (m - 1)


@dataclass(frozen=True)
class KrausSet:
    """Per-action Kraus pair of one circuit iteration, in structured form.

    For action ``a`` with offset ``delta``, the reject operator is
    ``diag(cos_diag[a]) / sqrt(A)`` and the accept operator is
    ``Shift_delta . diag(sin_diag[a]) / sqrt(A)``, where ``Shift_delta``
    maps ``|x> -> |x + delta mod N>``.
    """

    offsets: np.ndarray   # (A,) signed ints
    cos_diag: np.ndarray  # (A, N) reject amplitudes
    sin_diag: np.ndarray  # (A, N) accept amplitudes

    @property
    def n_actions(self) -> int:
        return self.cos_diag.shape[0]

    @property
    def n_states(self) -> int:
        return self.cos_diag.shape[1]

    def completeness_defect(self) -> float:
        """Max deviation of sum_K K^dag K from the identity (all terms diagonal)."""
        total = (self.cos_diag ** 2 + self.sin_diag ** 2).sum(axis=0) / self.n_actions
        return float(np.abs(total - 1.0).max())

    @cached_property
    def reject_weight(self) -> np.ndarray:
        """Elementwise weight of the combined reject branches.

        Every reject operator is diagonal, so their summed contribution to
        the channel is ``rho * reject_weight`` with
        ``reject_weight[i, j] = sum_a cos[a, i] * cos[a, j] / A``.
        """
        return np.einsum("ai,aj->ij", self.cos_diag, self.cos_diag) / self.n_actions

    def dense_operators(self) -> Iterator[tuple[np.ndarray, np.ndarray]]:
        """Materialize (reject, accept) as dense matrices, for cross-checks."""
        n = self.n_states
        scale = 1.0 / math.sqrt(self.n_actions)
        for a in range(self.n_actions):
            reject = np.diag(self.cos_diag[a]).astype(complex) * scale
            accept = np.zeros((n, n), dtype=complex)
            rows = (np.arange(n) + self.offsets[a]) % n
            accept[rows, np.arange(n)] = self.sin_diag[a] * scale
            yield reject, accept


def build_kraus(config: CircuitConfig, pi: ExpectedDistribution) -> KrausSet:
    """Compose trial, discretization, and coin rules into Kraus diagonals.

    For each (position x, action a): the trial is ``t = (x + delta(a)) mod N``,
    its acceptance ratio is discretized to an interval, and the interval's
    coin angle supplies ``sin`` (accept) and ``cos`` (reject) amplitudes.
    """
    n = config.n_states
    if len(pi) != n:
        raise ValueError(f"distribution has {len(pi)} entries, config expects {n}")
    n_act = config.n_actions
    m = config.n_intervals
    x = np.arange(n)
    offsets = np.array([offset_of_action(a, config.n_a) for a in range(n_act)])
    cos_diag = np.empty((n_act, n))
    sin_diag = np.empty((n_act, n))
    for a in range(n_act):
        t = (x + offsets[a]) % n
        ratio = np.minimum(1.0, pi.probs[t] / pi.probs[x])
        idx = np.where(ratio >= 1.0, m - 1, (ratio * (m - 1)).astype(int))
        p = np.where(idx == m - 1, 1.0, (idx + 0.5) / (m - 1))
        sin_diag[a] = np.sqrt(p)
        cos_diag[a] = np.sqrt(1.0 - p)
    ks = KrausSet(offsets=offsets, cos_diag=cos_diag, sin_diag=sin_diag)
    defect = ks.completeness_defect()
    if defect > KRAUS_COMPLETENESS_ATOL:
        raise AssertionError(f"Kraus completeness defect {defect:e}")
    return ks


class DensityState:
    """Reduced state of the position register: Hermitian, trace one."""

    def __init__(self, rho: np.ndarray):
        rho = np.asarray(rho, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError(f"density matrix must be square, got {rho.shape}")
        self.rho = rho

    @classmethod
    def uniform_superposition(cls, n_states: int) -> "DensityState":
        """Pure state with every basis amplitude equal to 1/sqrt(N)."""
        return cls(np.full((n_states, n_states), 1.0 / n_states, dtype=complex))

    @property
    def n_states(self) -> int:
        return self.rho.shape[0]

    @property
    def distribution(self) -> np.ndarray:
        """Diagonal of the state: the position measurement distribution."""
        return np.real(np.diagonal(self.rho))

    def validate(self) -> None:
        """Check Hermiticity, unit trace, and diagonal nonnegativity."""
        herm = np.abs(self.rho - self.rho.conj().T).max()
        if herm > HERMITICITY_ATOL:
            raise AssertionError(f"state not Hermitian: max deviation {herm:e}")
        tr = self.rho.trace()
        if abs(tr - 1.0) > TRACE_ATOL:
            raise AssertionError(f"state trace {tr!r} deviates from 1")
        dmin = self.distribution.min()
        if dmin < -DIAG_NEG_ATOL:
            raise AssertionError(f"negative diagonal entry {dmin:e}")


def _shift_both_axes(src: np.ndarray, delta: int, out: np.ndarray) -> None:
    """out[i, j] = src[i - delta mod N, j - delta mod N], without temporaries."""
    n = src.shape[0]
    d = delta % n
    if d == 0:
        out[:] = src
        return
    out[d:, d:] = src[: n - d, : n - d]
    out[:d, d:] = src[n - d :, : n - d]
    out[d:, :d] = src[: n - d, n - d :]
    out[:d, :d] = src[n - d :, n - d :]


def channel_step(state: DensityState, ks: KrausSet) -> DensityState:
    """Apply one circuit iteration to the reduced position state.

    The diagonal reject branches fold into one precomputed elementwise
    weight; accept branches accumulate in ascending action order.  The
    evaluation order is fixed, so repeated runs are bit-identical.
    """
    n = state.n_states
    if ks.n_states != n:
        raise ValueError(f"Kraus set is {ks.n_states}-dim, state is {n}-dim")
    rho = state.rho
    accept = np.zeros((n, n), dtype=complex)
    outer = np.empty((n, n))
    tmp = np.empty((n, n), dtype=complex)
    shifted = np.empty((n, n), dtype=complex)
    for a in range(ks.n_actions):
        s = ks.sin_diag[a]
        np.multiply(s[:, None], s[None, :], out=outer)
        np.multiply(rho, outer, out=tmp)
        _shift_both_axes(tmp, int(ks.offsets[a]), shifted)
        accept += shifted
    accept /= ks.n_actions
    accept += rho * ks.reject_weight
    drift = abs(accept.trace() - 1.0)
    if drift > TRACE_RENORM_THRESHOLD:
        logger.warning("renormalizing state trace, drift %.3e", drift)
        accept /= accept.trace().real
    return DensityState(accept)


@dataclass
class ConvergenceReport:
    """Per-iteration distributions and convergence diagnostics of one run.

    ``tv_series[t]`` is the TV distance between iterations t and t-1
    (entry 0 is +inf: there is no predecessor).  ``converged_iter`` is the
    first t with ``tv_series[t] < epsilon``, or None if the iteration cap
    was reached first.
    """

    distributions: np.ndarray       # (T+1, N), row t = distribution after t iterations
    tv_series: np.ndarray           # (T+1,)
    tv_to_expected_series: np.ndarray  # (T+1,)
    converged_iter: Optional[int]
    qubit_cost_at_convergence: Optional[int]
    expected: np.ndarray = field(repr=False, default=None)

    @property
    def converged(self) -> bool:
        return self.converged_iter is not None

    @property
    def iterations_run(self) -> int:
        return self.distributions.shape[0] - 1

    @property
    def final_distribution(self) -> np.ndarray:
        return self.distributions[-1]

    @property
    def tv_to_expected_final(self) -> float:
        return float(self.tv_to_expected_series[-1])


def run_qmcmc(config: CircuitConfig, spec: TargetSpec) -> ConvergenceReport:
    """Iterate the channel from the uniform superposition until converged.

    Starts from the pure uniform-superposition state, applies the channel
    built from the discretized target, and stops at the first iteration
    whose distribution moved less than ``config.epsilon`` in TV distance,
    or at ``config.max_iters``.  State invariants are checked after every
    iteration.  Non-convergence is reported, not raised.
    """
    if spec.grid.n_x != config.n_x:
        raise ValueError(
            f"target grid has n_x={spec.grid.n_x}, config has n_x={config.n_x}"
        )
    pi = discretize_target(spec)
    ks = build_kraus(config, pi)
    state = DensityState.uniform_superposition(config.n_states)
    state.validate()

    dists = [state.distribution.copy()]
    tv_prev = [np.inf]
    tv_exp = [tv_distance(dists[0], pi.probs)]
    converged: Optional[int] = None
    for t in range(1, config.max_iters + 1):
        state = channel_step(state, ks)
        state.validate()
        p = state.distribution.copy()
        dists.append(p)
        tv_prev.append(tv_distance(p, dists[-2]))
        tv_exp.append(tv_distance(p, pi.probs))
        if tv_prev[-1] < config.epsilon:
            converged = t
            break

    assert converged == detect_convergence(tv_prev, config.epsilon)
    cost = (
        qubit_cost(config.n_a, config.n_x, config.n_acc, converged)
        if converged is not None
        else None
    )
    return ConvergenceReport(
        distributions=np.array(dists),
        tv_series=np.array(tv_prev),
        tv_to_expected_series=np.array(tv_exp),
        converged_iter=converged,
        qubit_cost_at_convergence=cost,
        expected=pi.probs,
    )
