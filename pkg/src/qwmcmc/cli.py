"""Experiment runner writing machine-readable CSV/JSON outputs.

Subcommands: ``qmcmc`` (channel engine), ``dqw`` / ``rw`` (walk
baselines), ``mh`` (classical sampler), ``sweep`` (one engine run per
parameter value, executed concurrently).  Options may come from a flat
``key = value`` config file; explicit flags override file values.
Outputs are byte-identical across runs of the same configuration.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import math
import re
import sys
from pathlib import Path

import numpy as np

from .analysis import qubit_cost
from .engine import CircuitConfig, DensityState, build_kraus, channel_step, run_qmcmc
from .mcmc import ProposalSpec, mh_run
from .purestate import MAX_LIVE_QUBITS, PureStateSimulator, live_qubits
from .targets import (
    GaussianComponent,
    Grid,
    TargetSpec,
    discretize_target,
    real_of_index,
)
from .walks import CoinParams, WalkState, dqw_run, position_std, rw_distribution

MAX_STORED_FRAMES = 1000


class CliError(Exception):
    """User-facing configuration error; maps to a nonzero exit."""


def _fmt(x) -> str:
    """Round-trip-safe decimal with 17 significant digits."""
    return f"{float(x):.17g}"


# ----------------------------------------------------------------------------
# target strings

_COMPONENT_RE = re.compile(
    r"^(?:(?P<w>[^*]+)\*)?\s*N\(\s*(?P<mu>[^,;]+)\s*[,;]\s*(?P<sig>[^)]+)\s*\)$",
    re.IGNORECASE,
)


def _split_top_level(text: str) -> list[str]:
    parts, cur, depth = [], [], 0
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "+" and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts]


def parse_target(text: str, grid: Grid) -> TargetSpec:
    """Parse a mixture string like ``N(0,1)`` or ``0.5*N(-5,1)+0.5*N(5,1)``."""
    comps = []
    for part in _split_top_level(text):
        m = _COMPONENT_RE.match(part)
        if m is None:
            raise CliError(
                f"cannot parse target component {part!r}; expected [w*]N(mean,sigma)"
            )
        try:
            weight = float(m.group("w")) if m.group("w") else 1.0
            mean = float(m.group("mu"))
            sigma = float(m.group("sig"))
        except ValueError as e:
            raise CliError(f"bad number in target component {part!r}: {e}") from None
        comps.append((weight, mean, sigma))
    try:
        return TargetSpec(tuple(GaussianComponent(*c) for c in comps), grid)
    except ValueError as e:
        raise CliError(str(e)) from None


# ----------------------------------------------------------------------------
# config files

def load_config_file(path: str) -> tuple[dict[str, str], dict[str, int]]:
    """Read a flat ``key = value`` file; returns values and line numbers."""
    values: dict[str, str] = {}
    lines: dict[str, int] = {}
    p = Path(path)
    if not p.is_file():
        raise CliError(f"config file not found: {path}")
    for lineno, raw in enumerate(p.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise CliError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not key:
            raise CliError(f"{path}:{lineno}: empty key")
        if key in values:
            raise CliError(f"{path}:{lineno}: duplicate key {key!r}")
        values[key] = value.strip()
        lines[key] = lineno
    return values, lines


class _Options:
    """Flag values merged over config-file values merged over defaults."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.path = getattr(args, "config", None)
        if self.path:
            self.file_values, self.file_lines = load_config_file(self.path)
        else:
            self.file_values, self.file_lines = {}, {}
        self.used: set[str] = set()

    def _convert(self, key: str, raw: str, typ):
        try:
            if typ is bool:
                low = raw.lower()
                if low in ("true", "1", "yes"):
                    return True
                if low in ("false", "0", "no"):
                    return False
                raise ValueError(f"not a boolean: {raw!r}")
            if typ is _range_pair:
                return _range_pair(raw)
            return typ(raw)
        except ValueError as e:
            raise CliError(f"{self.path}:{self.file_lines[key]}: bad value for {key}: {e}") from None

    def get(self, key: str, typ, default=None, required: bool = False):
        self.used.add(key)
        v = getattr(self.args, key, None)
        if v is None and key in self.file_values:
            v = self._convert(key, self.file_values[key], typ)
        if v is None:
            v = default
        if v is None and required:
            raise CliError(f"missing required option --{key.replace('_', '-')}")
        return v

    def reject_unknown(self) -> None:
        unknown = set(self.file_values) - self.used
        if unknown:
            key = min(unknown, key=lambda k: self.file_lines[k])
            raise CliError(f"{self.path}:{self.file_lines[key]}: unknown key {key!r}")


def _range_pair(raw: str) -> tuple[float, float]:
    parts = raw.replace(",", " ").split()
    if len(parts) != 2:
        raise ValueError(f"expected two numbers, got {raw!r}")
    return float(parts[0]), float(parts[1])


# ----------------------------------------------------------------------------
# output writers

def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(r) for r in rows)
    _write_text(path, "\n".join(lines) + "\n")


def _write_json(path: Path, obj) -> None:
    _write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _frame_indices(n_frames: int) -> np.ndarray:
    """Every frame when few, a uniform subsample of at most 1000 otherwise."""
    if n_frames <= MAX_STORED_FRAMES:
        return np.arange(n_frames)
    return np.unique(np.round(np.linspace(0, n_frames - 1, MAX_STORED_FRAMES)).astype(int))


def _target_json(spec: TargetSpec) -> list[dict]:
    return [
        {"weight": c.weight, "mean": c.mean, "sigma": c.sigma} for c in spec.components
    ]


def write_qmcmc_outputs(out: Path, config: CircuitConfig, spec: TargetSpec, report,
                        oracle: dict | None = None) -> None:
    grid = spec.grid
    pos_real = [_fmt(real_of_index(i, grid)) for i in range(grid.n_states)]

    rows = []
    for t in _frame_indices(report.distributions.shape[0]):
        dist = report.distributions[t]
        rows.extend(
            (str(t), str(i), pos_real[i], _fmt(dist[i]))
            for i in range(grid.n_states)
        )
    _write_csv(out / "evolution.csv", ["iter", "pos_index", "pos_real", "probability"], rows)

    _write_csv(
        out / "convergence.csv",
        ["iter", "tv_prev", "tv_expected"],
        (
            (str(t), _fmt(report.tv_series[t]), _fmt(report.tv_to_expected_series[t]))
            for t in range(len(report.tv_series))
        ),
    )

    final = report.final_distribution
    _write_csv(
        out / "final.csv",
        ["pos_index", "pos_real", "obtained", "expected"],
        (
            (str(i), pos_real[i], _fmt(final[i]), _fmt(report.expected[i]))
            for i in range(grid.n_states)
        ),
    )

    summary = {
        "mode": "qmcmc",
        "config": {
            "n_x": config.n_x,
            "n_a": config.n_a,
            "n_acc": config.n_acc,
            "epsilon": config.epsilon,
            "max_iters": config.max_iters,
            "boundary": config.boundary,
            "x_min": grid.x_min,
            "x_max": grid.x_max,
            "target": _target_json(spec),
        },
        "converged": report.converged,
        "converged_iter": report.converged_iter,
        "iterations_run": report.iterations_run,
        "qubit_cost": report.qubit_cost_at_convergence,
        "tv_to_expected_final": report.tv_to_expected_final,
    }
    if oracle is not None:
        summary.update(oracle)
    _write_json(out / "summary.json", summary)


# ----------------------------------------------------------------------------
# subcommands

def _build_qmcmc_setup(opt: _Options):
    x_min, x_max = opt.get("range", _range_pair, required=True)
    n_x = opt.get("nx", int, required=True)
    grid = Grid(n_x, x_min, x_max)
    spec = parse_target(opt.get("target", str, required=True), grid)
    try:
        config = CircuitConfig(
            n_x=n_x,
            n_a=opt.get("na", int, 1),
            n_acc=opt.get("nacc", int, n_x),
            epsilon=opt.get("epsilon", float, 1e-4),
            max_iters=opt.get("max_iters", int, 100_000),
        )
    except ValueError as e:
        raise CliError(str(e)) from None
    return config, spec


def _oracle_check(config: CircuitConfig, spec: TargetSpec, iterations: int) -> dict:
    needed = live_qubits(config, iterations)
    if needed > MAX_LIVE_QUBITS:
        raise CliError(
            f"oracle check of {iterations} iterations needs {needed} live qubits, "
            f"above the {MAX_LIVE_QUBITS}-qubit simulator limit; "
            "reduce --oracle-iters or the register sizes"
        )
    pi = discretize_target(spec)
    ks = build_kraus(config, pi)
    state = DensityState.uniform_superposition(config.n_states)
    sim = PureStateSimulator(config, pi)
    worst = 0.0
    for _ in range(iterations):
        state = channel_step(state, ks)
        sim.step()
        worst = max(worst, float(np.abs(state.distribution - sim.x_distribution()).max()))
    return {"oracle_max_diff": worst, "oracle_iters": iterations}


def cmd_qmcmc(args: argparse.Namespace) -> int:
    opt = _Options(args)
    config, spec = _build_qmcmc_setup(opt)
    out = Path(opt.get("out", str, "qmcmc_out"))
    oracle_requested = opt.get("oracle_check", bool, False)
    oracle_iters = opt.get("oracle_iters", int, 3)
    opt.reject_unknown()
    oracle = _oracle_check(config, spec, oracle_iters) if oracle_requested else None
    report = run_qmcmc(config, spec)
    write_qmcmc_outputs(out, config, spec, report, oracle)
    return 0


_SWEEP_PARAMS = ("na", "nacc", "nx", "epsilon", "max_iters")


def _run_sweep_point(payload: dict) -> dict:
    """One sweep point, executed in a worker process."""
    grid = Grid(payload["nx"], payload["x_min"], payload["x_max"])
    spec = TargetSpec(
        tuple(GaussianComponent(**c) for c in payload["target"]), grid
    )
    config = CircuitConfig(
        n_x=payload["nx"],
        n_a=payload["na"],
        n_acc=payload["nacc"],
        epsilon=payload["epsilon"],
        max_iters=payload["max_iters"],
    )
    report = run_qmcmc(config, spec)
    write_qmcmc_outputs(Path(payload["out"]), config, spec, report)
    return {
        "value": payload["value"],
        "converged": report.converged,
        "converged_iter": report.converged_iter,
        "qubit_cost": report.qubit_cost_at_convergence,
        "tv_to_expected_final": report.tv_to_expected_final,
    }


def cmd_sweep(args: argparse.Namespace) -> int:
    opt = _Options(args)
    param = opt.get("param", str, required=True)
    if param not in _SWEEP_PARAMS:
        raise CliError(f"--param must be one of {', '.join(_SWEEP_PARAMS)}")
    values_raw = opt.get("values", str, required=True)
    caster = float if param == "epsilon" else int
    try:
        values = [caster(v) for v in values_raw.split(",") if v.strip()]
    except ValueError as e:
        raise CliError(f"bad --values entry: {e}") from None
    if not values:
        raise CliError("--values is empty")

    x_min, x_max = opt.get("range", _range_pair, required=True)
    n_x = opt.get("nx", int, None if param == "nx" else -1, required=(param != "nx"))
    base = {
        "x_min": x_min,
        "x_max": x_max,
        "nx": n_x,
        "na": opt.get("na", int, 1),
        "nacc": opt.get("nacc", int, None),
        "epsilon": opt.get("epsilon", float, 1e-4),
        "max_iters": opt.get("max_iters", int, 100_000),
    }
    target_text = opt.get("target", str, required=True)
    out = Path(opt.get("out", str, "sweep_out"))
    opt.reject_unknown()

    payloads = []
    for value in values:
        p = dict(base)
        p[param] = value
        if p["nacc"] is None:
            p["nacc"] = p["nx"]
        grid = Grid(p["nx"], x_min, x_max)
        spec = parse_target(target_text, grid)
        p["target"] = _target_json(spec)
        p["value"] = value
        p["out"] = str(out / f"{param}={value}")
        try:
            CircuitConfig(n_x=p["nx"], n_a=p["na"], n_acc=p["nacc"],
                          epsilon=p["epsilon"], max_iters=p["max_iters"])
        except ValueError as e:
            raise CliError(f"{param}={value}: {e}") from None
        payloads.append(p)

    if len(payloads) == 1:
        results = [_run_sweep_point(payloads[0])]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=len(payloads)) as ex:
            results = list(ex.map(_run_sweep_point, payloads))
    _write_json(
        out / "sweep_summary.json",
        {"mode": "sweep", "param": param, "values": values, "results": results},
    )
    return 0


def cmd_mh(args: argparse.Namespace) -> int:
    opt = _Options(args)
    x_min, x_max = opt.get("range", _range_pair, required=True)
    n_x = opt.get("nx", int, required=True)
    grid = Grid(n_x, x_min, x_max)
    spec = parse_target(opt.get("target", str, required=True), grid)
    try:
        proposal = ProposalSpec(
            k=opt.get("k", int, required=True),
            sigma=opt.get("sigma", float, None),
        )
    except ValueError as e:
        raise CliError(str(e)) from None
    iters = opt.get("iters", int, 100_000)
    seed = opt.get("seed", int, 0)
    burn_in = opt.get("burn_in", float, 0.1)
    thinning = opt.get("thinning", int, 1)
    acceptance = opt.get("acceptance", str, "metropolis")
    out = Path(opt.get("out", str, "mh_out"))
    opt.reject_unknown()

    pi = discretize_target(spec)
    try:
        result = mh_run(pi, proposal, iters, seed, burn_in, thinning, acceptance)
    except ValueError as e:
        raise CliError(str(e)) from None

    _write_csv(
        out / "chain.csv",
        ["iter", "state"],
        ((str(i), str(int(s))) for i, s in enumerate(result.samples)),
    )
    freq = result.histogram / max(result.histogram.sum(), 1)
    _write_csv(
        out / "histogram.csv",
        ["pos_index", "pos_real", "count", "frequency", "expected"],
        (
            (str(i), _fmt(real_of_index(i, grid)), str(int(result.histogram[i])),
             _fmt(freq[i]), _fmt(pi[i]))
            for i in range(grid.n_states)
        ),
    )
    _write_json(
        out / "summary.json",
        {
            "mode": "mh",
            "config": {
                "n_x": n_x,
                "x_min": x_min,
                "x_max": x_max,
                "target": _target_json(spec),
                "k": proposal.k,
                "sigma": proposal.sigma,
                "iters": iters,
                "seed": seed,
                "burn_in_fraction": burn_in,
                "thinning": thinning,
                "acceptance_mode": acceptance,
            },
            "acceptance_rate": result.acceptance_rate,
            "mode_occupancy": list(result.mode_occupancy),
            "retained_samples": int(len(result.samples)),
            "raw_length": result.raw_length,
            "rng_algorithm": result.rng_algorithm,
        },
    )
    return 0


def _write_distribution(out: Path, summary: dict, probs: np.ndarray) -> None:
    half = (len(probs) - 1) // 2
    _write_csv(
        out / "distribution.csv",
        ["position", "probability"],
        ((str(p - half), _fmt(probs[p])) for p in range(len(probs))),
    )
    summary["position_std"] = position_std(probs)
    _write_json(out / "summary.json", summary)


def cmd_dqw(args: argparse.Namespace) -> int:
    opt = _Options(args)
    steps = opt.get("steps", int, 100)
    theta = opt.get("theta", float, math.pi / 4)
    gamma0 = opt.get("gamma0", float, 0.0)
    gamma1 = opt.get("gamma1", float, 0.0)
    coin = opt.get("coin", str, "H")
    out = Path(opt.get("out", str, "dqw_out"))
    opt.reject_unknown()
    try:
        params = CoinParams(theta=theta, gamma0=gamma0, gamma1=gamma1)
        init = WalkState.localized(coin, 0, t_max=max(steps, 1))
        probs = dqw_run(params, steps, init)
    except ValueError as e:
        raise CliError(str(e)) from None
    # The walk starts at the origin, so all mass lies within +-steps; trim
    # the padding to align with the classical baseline's lattice.
    half = (len(probs) - 1) // 2
    lo = half - max(steps, 1)
    probs = probs[lo : lo + 2 * max(steps, 1) + 1]
    summary = {
        "mode": "dqw",
        "config": {"theta": theta, "gamma0": gamma0, "gamma1": gamma1,
                   "coin": coin, "steps": steps},
    }
    _write_distribution(out, summary, probs)
    return 0


def cmd_rw(args: argparse.Namespace) -> int:
    opt = _Options(args)
    steps = opt.get("steps", int, 100)
    p_right = opt.get("p_right", float, 0.5)
    out = Path(opt.get("out", str, "rw_out"))
    opt.reject_unknown()
    try:
        probs = rw_distribution(p_right, steps)
    except ValueError as e:
        raise CliError(str(e)) from None
    summary = {"mode": "rw", "config": {"p_right": p_right, "steps": steps}}
    _write_distribution(out, summary, probs)
    return 0


# ----------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qwmcmc",
        description="Quantum-walk Metropolis sampling experiments",
    )
    sub = parser.add_subparsers(dest="mode", required=True)

    def add_common(p):
        p.add_argument("--config", help="flat key = value config file")
        p.add_argument("--out", help="output directory")

    def add_target(p):
        p.add_argument("--target", help="mixture, e.g. 'N(0,1)' or '0.5*N(-5,1)+0.5*N(5,1)'")
        p.add_argument("--range", type=float, nargs=2, metavar=("XMIN", "XMAX"),
                       help="interval endpoints, e.g. --range -5 5")
        p.add_argument("--nx", type=int, help="position qubits")

    def add_circuit(p):
        p.add_argument("--na", type=int, help="action qubits (default 1)")
        p.add_argument("--nacc", type=int, help="acceptance qubits (default: nx)")
        p.add_argument("--epsilon", type=float, help="TV convergence threshold (default 1e-4)")
        p.add_argument("--max-iters", dest="max_iters", type=int, help="iteration cap")

    p = sub.add_parser("qmcmc", help="run the quantum sampling engine")
    add_common(p); add_target(p); add_circuit(p)
    p.add_argument("--oracle-check", dest="oracle_check", action="store_const", const=True,
                   help="cross-check against the statevector reference")
    p.add_argument("--oracle-iters", dest="oracle_iters", type=int,
                   help="iterations to cross-check (default 3)")
    p.set_defaults(func=cmd_qmcmc)

    p = sub.add_parser("sweep", help="run the engine once per parameter value")
    add_common(p); add_target(p); add_circuit(p)
    p.add_argument("--param", choices=_SWEEP_PARAMS, help="parameter to sweep")
    p.add_argument("--values", help="comma-separated values")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("mh", help="run the classical Metropolis-Hastings sampler")
    add_common(p); add_target(p)
    p.add_argument("--k", type=int, help="proposal neighborhood size per direction")
    p.add_argument("--sigma", type=float, help="proposal dispersion (default k/2)")
    p.add_argument("--iters", type=int, help="chain length (default 100000)")
    p.add_argument("--seed", type=int, help="RNG seed (default 0)")
    p.add_argument("--burn-in", dest="burn_in", type=float, help="burn-in fraction (default 0.1)")
    p.add_argument("--thinning", type=int, help="keep every n-th sample (default 1)")
    p.add_argument("--acceptance", choices=("metropolis", "greedy"),
                   help="acceptance rule (default metropolis)")
    p.set_defaults(func=cmd_mh)

    p = sub.add_parser("dqw", help="run the coined quantum walk baseline")
    add_common(p)
    p.add_argument("--steps", type=int, help="walk steps (default 100)")
    p.add_argument("--theta", type=float, help="coin angle (default pi/4)")
    p.add_argument("--gamma0", type=float, help="coin phase 0 (default 0)")
    p.add_argument("--gamma1", type=float, help="coin phase 1 (default 0)")
    p.add_argument("--coin", choices=("H", "T"), help="initial coin state (default H)")
    p.set_defaults(func=cmd_dqw)

    p = sub.add_parser("rw", help="run the classical random walk baseline")
    add_common(p)
    p.add_argument("--steps", type=int, help="walk steps (default 100)")
    p.add_argument("--p-right", dest="p_right", type=float,
                   help="probability of a rightward step (default 0.5)")
    p.set_defaults(func=cmd_rw)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
