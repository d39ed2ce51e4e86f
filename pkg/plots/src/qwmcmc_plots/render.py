"""Figure rendering from qwmcmc CSV/JSON outputs.

Three figure kinds cover the experiment suite: ``heatmap_overlay``
(iteration-by-position evolution heatmap above an obtained-vs-expected
line plot), ``walk_compare`` (quantum vs classical walk spread), and
``chain_trace`` (sample traces alongside histogram-vs-target panels).
Rendering is deterministic: identical inputs produce identical bytes.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

# Colormap direction: low probability = light (yellow), high = dark (blue).
DEFAULT_CMAP = "YlGnBu"

KINDS = ("heatmap_overlay", "walk_compare", "chain_trace")

# Fixed salt so SVG element ids do not vary between processes.
matplotlib.rcParams["svg.hashsalt"] = "qwmcmc-plots"


class PlotError(Exception):
    """Bad request or malformed input file; maps to a nonzero exit."""


@dataclass(frozen=True)
class FigureRequest:
    kind: str
    in_dir: Path
    out_file: Path
    colormap: str = DEFAULT_CMAP

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise PlotError(f"unknown figure kind {self.kind!r}; choose from {KINDS}")


def _read_csv(path: Path, expected_header: list[str]) -> dict[str, np.ndarray]:
    """Parse a CSV written by the runner, naming the offending row on errors."""
    if not path.is_file():
        raise PlotError(f"input file not found: {path}")
    lines = path.read_text().splitlines()
    if not lines:
        raise PlotError(f"{path}: empty file")
    header = lines[0].split(",")
    if header != expected_header:
        raise PlotError(
            f"{path}: row 1: expected header {','.join(expected_header)!r}, "
            f"got {lines[0]!r}"
        )
    columns: list[list[float]] = [[] for _ in expected_header]
    for lineno, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != len(expected_header):
            raise PlotError(
                f"{path}: row {lineno}: expected {len(expected_header)} fields, "
                f"got {len(cells)}"
            )
        for col, cell in zip(columns, cells):
            try:
                col.append(float(cell))
            except ValueError:
                raise PlotError(
                    f"{path}: row {lineno}: not a number: {cell!r}"
                ) from None
    if not columns[0]:
        raise PlotError(f"{path}: no data rows")
    return {name: np.array(col) for name, col in zip(expected_header, columns)}


def _save(fig, out_file: Path) -> None:
    out_file.parent.mkdir(parents=True, exist_ok=True)
    suffix = out_file.suffix.lower().lstrip(".") or "svg"
    # Strip volatile metadata so reruns are byte-identical.
    metadata = {"Date": None} if suffix == "svg" else {"CreationDate": None}
    fig.savefig(out_file, format=suffix, metadata=metadata)
    plt.close(fig)


def _render_heatmap_overlay(req: FigureRequest) -> None:
    evo = _read_csv(
        req.in_dir / "evolution.csv",
        ["iter", "pos_index", "pos_real", "probability"],
    )
    fin = _read_csv(
        req.in_dir / "final.csv",
        ["pos_index", "pos_real", "obtained", "expected"],
    )
    iters = np.unique(evo["iter"])
    positions = np.unique(evo["pos_real"])
    n_pos = len(positions)
    if len(evo["iter"]) != len(iters) * n_pos:
        raise PlotError(
            f"{req.in_dir / 'evolution.csv'}: grid is ragged: "
            f"{len(evo['iter'])} rows for {len(iters)} iterations x {n_pos} positions"
        )
    order = np.lexsort((evo["pos_real"], evo["iter"]))
    grid = evo["probability"][order].reshape(len(iters), n_pos).T

    fig, (top, bottom) = plt.subplots(
        2, 1, figsize=(7, 6), height_ratios=[2, 1], constrained_layout=True
    )
    mesh = top.pcolormesh(iters, positions, grid, cmap=req.colormap, shading="nearest")
    fig.colorbar(mesh, ax=top, label="probability")
    top.set_xlabel("iteration")
    top.set_ylabel("position")

    bottom.plot(fin["pos_real"], fin["obtained"], "-", color="tab:blue", label="obtained")
    bottom.plot(fin["pos_real"], fin["expected"], "--", color="tab:orange", label="expected")
    bottom.set_xlabel("position")
    bottom.set_ylabel("probability")
    bottom.legend()
    _save(fig, req.out_file)


def _render_walk_compare(req: FigureRequest) -> None:
    curves = []
    for name, style, color in (
        ("dqw", "-", "tab:blue"),
        ("rw", "--", "tab:red"),
    ):
        path = req.in_dir / name / "distribution.csv"
        data = _read_csv(path, ["position", "probability"])
        curves.append((name, style, color, data))
    fig, ax = plt.subplots(figsize=(7, 4.5), constrained_layout=True)
    labels = {"dqw": "quantum walk", "rw": "random walk"}
    for name, style, color, data in curves:
        ax.plot(data["position"], data["probability"], style, color=color,
                label=labels[name], linewidth=1.2)
    ax.set_xlabel("position")
    ax.set_ylabel("probability")
    ax.legend()
    _save(fig, req.out_file)


def _chain_run_dirs(in_dir: Path) -> list[Path]:
    if (in_dir / "chain.csv").is_file():
        return [in_dir]
    runs = sorted(
        d for d in in_dir.iterdir() if d.is_dir() and (d / "chain.csv").is_file()
    )
    if not runs:
        raise PlotError(f"no chain.csv found under {in_dir}")
    return runs


def _render_chain_trace(req: FigureRequest) -> None:
    runs = _chain_run_dirs(req.in_dir)
    fig, (left, right) = plt.subplots(
        1, 2, figsize=(9, 4), width_ratios=[2, 1], constrained_layout=True
    )
    cycle = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    expected = None
    for i, run in enumerate(runs):
        color = cycle[i % len(cycle)]
        chain = _read_csv(run / "chain.csv", ["iter", "state"])
        hist = _read_csv(
            run / "histogram.csv",
            ["pos_index", "pos_real", "count", "frequency", "expected"],
        )
        label = run.name if len(runs) > 1 else "chain"
        left.plot(chain["iter"], chain["state"], "-", color=color,
                  linewidth=0.6, label=label)
        right.step(hist["pos_index"], hist["frequency"], where="mid",
                   color=color, linewidth=1.0)
        expected = (hist["pos_index"], hist["expected"])
    if expected is not None:
        right.plot(expected[0], expected[1], "--", color="black",
                   linewidth=1.0, label="target")
    left.set_xlabel("sample index")
    left.set_ylabel("state")
    left.legend()
    right.set_xlabel("state")
    right.set_ylabel("frequency")
    right.legend()
    _save(fig, req.out_file)


_RENDERERS = {
    "heatmap_overlay": _render_heatmap_overlay,
    "walk_compare": _render_walk_compare,
    "chain_trace": _render_chain_trace,
}


def render(req: FigureRequest) -> None:
    """Render one figure; raises PlotError on bad requests or inputs."""
    _RENDERERS[req.kind](req)
