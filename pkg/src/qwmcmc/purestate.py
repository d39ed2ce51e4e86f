"""Literal statevector simulation of the iterated sampling circuit.

Every iteration consumes a fresh action register and a fresh coin qubit;
the old ones stay in the state vector untouched (swapping them out is
realized by relabeling which axes the next iteration's gates address).
The live qubit count therefore grows by ``n_a + 1`` per iteration, which
keeps this module honest but restricts it to tiny instances.  It exists
as an independent correctness oracle for the channel engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .engine import CircuitConfig, acceptance_ratio, coin_prob, disc_index, offset_of_action
from .targets import ExpectedDistribution, TargetSpec, discretize_target

# 2**26 complex doubles is ~1 GiB; the oracle never needs more.
MAX_LIVE_QUBITS = 26

NORM_ATOL = 1e-10
UNCOMPUTE_ATOL = 1e-12


def live_qubits(config: CircuitConfig, iterations: int) -> int:
    """Qubits held after ``iterations`` circuit iterations."""
    return (config.n_a + 1) * iterations + 2 * config.n_x + config.n_acc


@dataclass(frozen=True)
class FullState:
    """Flattened amplitudes plus the ordered register layout.

    ``layout`` lists (register name, width in qubits) in axis order;
    reshaping ``amplitudes`` to one axis of size ``2**width`` per entry
    recovers the structured array.
    """

    amplitudes: np.ndarray
    layout: tuple[tuple[str, int], ...]

    @property
    def n_qubits(self) -> int:
        return sum(w for _, w in self.layout)

    def dims(self) -> tuple[int, ...]:
        return tuple(2 ** w for _, w in self.layout)

    def axis_of(self, name: str) -> int:
        for i, (n, _) in enumerate(self.layout):
            if n == name:
                return i
        raise KeyError(name)


class PureStateSimulator:
    """Gate-by-gate simulator of the sampling circuit on a full state vector."""

    def __init__(self, config: CircuitConfig, pi: ExpectedDistribution):
        n = config.n_states
        if len(pi) != n:
            raise ValueError(f"distribution has {len(pi)} entries, config expects {n}")
        self.config = config
        self.pi = pi
        self.iterations_done = 0
        m = config.n_intervals
        self.offsets = [offset_of_action(a, config.n_a) for a in range(config.n_actions)]
        # Interval index of every (current, trial) pair, and per-interval coin gates.
        self.disc_table = np.array(
            [[disc_index(acceptance_ratio(pi, x, t), m) for t in range(n)] for x in range(n)]
        )
        self.coin_gates = []
        for i in range(m):
            if i == m - 1:
                self.coin_gates.append(np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex))
            else:
                p = coin_prob(i, m)
                s, c = math.sqrt(p), math.sqrt(1.0 - p)
                self.coin_gates.append(np.array([[c, -s], [s, c]], dtype=complex))
        # Axes between iterations: retired (a, coin) pairs, then x, t, acc.
        self.amps = np.zeros((n, n, m), dtype=complex)
        self.amps[:, 0, 0] = 1.0 / math.sqrt(n)
        self.retired: list[tuple[str, int]] = []

    @property
    def live_qubit_count(self) -> int:
        return live_qubits(self.config, self.iterations_done)

    def _check_norm(self, stage: str) -> None:
        norm = np.vdot(self.amps, self.amps).real
        if abs(norm - 1.0) > NORM_ATOL:
            raise RuntimeError(f"norm drifted to {norm!r} after {stage}")

    def step(self) -> None:
        """Apply one full circuit iteration and retire its action/coin registers."""
        cfg = self.config
        if live_qubits(cfg, self.iterations_done + 1) > MAX_LIVE_QUBITS:
            raise ValueError(
                f"iteration {self.iterations_done + 1} needs "
                f"{live_qubits(cfg, self.iterations_done + 1)} qubits, "
                f"above the {MAX_LIVE_QUBITS}-qubit simulator limit"
            )
        n, n_act, m = cfg.n_states, cfg.n_actions, cfg.n_intervals

        # Fresh |a> in uniform superposition (Hadamard layer on |0>) and fresh
        # coin in |0>.  Axes: (*retired, a, x, t, acc, coin).
        amps = np.zeros((*self.amps.shape[:-3], n_act, n, n, m, 2), dtype=complex)
        amps[..., 0] = self.amps[..., None, :, :, :] / math.sqrt(n_act)
        self.amps = amps
        self._check_norm("action superposition")

        # Trial proposal: t += x + offset(a)  (mod N).
        for a in range(n_act):
            d = self.offsets[a]
            for x in range(n):
                shift = (x + d) % n
                self.amps[..., a, x, :, :, :] = np.roll(
                    self.amps[..., a, x, :, :, :], shift, axis=-3
                )
        self._check_norm("trial")

        # Acceptance discretization: acc += D(x, t)  (mod M).
        for x in range(n):
            for t in range(n):
                d = self.disc_table[x, t]
                if d:
                    self.amps[..., :, x, t, :, :] = np.roll(
                        self.amps[..., :, x, t, :, :], d, axis=-2
                    )
        self._check_norm("discretization")

        # Coin rotations controlled on the acceptance interval.
        for i in range(m):
            u = self.coin_gates[i]
            self.amps[..., i, :] = self.amps[..., i, :] @ u.T
        self._check_norm("coin group")

        # Uncompute acceptance and trial registers.
        for x in range(n):
            for t in range(n):
                d = self.disc_table[x, t]
                if d:
                    self.amps[..., :, x, t, :, :] = np.roll(
                        self.amps[..., :, x, t, :, :], -d, axis=-2
                    )
        for a in range(n_act):
            d = self.offsets[a]
            for x in range(n):
                shift = (x + d) % n
                self.amps[..., a, x, :, :, :] = np.roll(
                    self.amps[..., a, x, :, :, :], -shift, axis=-3
                )
        self._check_norm("uncomputation")

        # Conditional move: x += offset(a)  (mod N) on the coin=1 branch.
        for a in range(n_act):
            self.amps[..., a, :, :, :, 1] = np.roll(
                self.amps[..., a, :, :, :, 1], self.offsets[a], axis=-3
            )
        self._check_norm("shift")

        kept = self.amps[..., :, :, 0, 0, :]
        residue = 1.0 - np.vdot(kept, kept).real
        if residue > UNCOMPUTE_ATOL:
            raise RuntimeError(
                f"trial/acceptance registers not restored to |0>: residue {residue:e}"
            )

        # Retire the action and coin registers: fold them into the leading block.
        self.amps = np.ascontiguousarray(np.moveaxis(self.amps, -1, -4))
        self.iterations_done += 1
        self.retired += [
            (f"a{self.iterations_done}", cfg.n_a),
            (f"coin{self.iterations_done}", 1),
        ]

    def run(self, iterations: int) -> None:
        for _ in range(iterations):
            self.step()

    def x_distribution(self) -> np.ndarray:
        """Marginal measurement distribution of the position register."""
        probs = np.abs(self.amps) ** 2
        x_axis = probs.ndim - 3
        other = tuple(i for i in range(probs.ndim) if i != x_axis)
        return probs.sum(axis=other)

    def full_state(self) -> FullState:
        cfg = self.config
        layout = (*self.retired, ("x", cfg.n_x), ("t", cfg.n_x), ("acc", cfg.n_acc))
        return FullState(amplitudes=self.amps.ravel().copy(), layout=layout)


def pure_run(config: CircuitConfig, spec: TargetSpec, iterations: int) -> np.ndarray:
    """Position distribution after ``iterations`` literal circuit iterations.

    Refuses runs whose final live qubit count exceeds ``MAX_LIVE_QUBITS``.
    """
    if iterations < 0:
        raise ValueError(f"iterations must be nonnegative, got {iterations}")
    needed = live_qubits(config, iterations)
    if needed > MAX_LIVE_QUBITS:
        raise ValueError(
            f"{iterations} iterations need {needed} live qubits, above the "
            f"{MAX_LIVE_QUBITS}-qubit simulator limit"
        )
    if spec.grid.n_x != config.n_x:
        raise ValueError(
            f"target grid has n_x={spec.grid.n_x}, config has n_x={config.n_x}"
        )
    sim = PureStateSimulator(config, discretize_target(spec))
    sim.run(iterations)
    return sim.x_distribution()
