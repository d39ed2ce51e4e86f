"""Unit tests for figure rendering against synthesized runner outputs."""

import numpy as np
import pytest

from qwmcmc_plots.cli import main
from qwmcmc_plots.render import FigureRequest, PlotError, render


def fmt(x):
    return f"{float(x):.17g}"


def write_qmcmc_fixture(d, n_pos=8, n_iter=5):
    rng = np.random.default_rng(0)
    rows = ["iter,pos_index,pos_real,probability"]
    for t in range(n_iter):
        dist = rng.dirichlet(np.ones(n_pos))
        for i in range(n_pos):
            rows.append(f"{t},{i},{fmt(-5 + 10 * i / (n_pos - 1))},{fmt(dist[i])}")
    (d / "evolution.csv").write_text("\n".join(rows) + "\n")
    final = rng.dirichlet(np.ones(n_pos))
    expected = rng.dirichlet(np.ones(n_pos))
    rows = ["pos_index,pos_real,obtained,expected"]
    for i in range(n_pos):
        rows.append(
            f"{i},{fmt(-5 + 10 * i / (n_pos - 1))},{fmt(final[i])},{fmt(expected[i])}"
        )
    (d / "final.csv").write_text("\n".join(rows) + "\n")


def write_walk_fixture(d):
    rng = np.random.default_rng(1)
    for name in ("dqw", "rw"):
        sub = d / name
        sub.mkdir(parents=True, exist_ok=True)
        probs = rng.dirichlet(np.ones(21))
        rows = ["position,probability"]
        rows += [f"{p - 10},{fmt(probs[p])}" for p in range(21)]
        (sub / "distribution.csv").write_text("\n".join(rows) + "\n")


def write_chain_fixture(d, runs=("gauss-16", "gauss-256")):
    rng = np.random.default_rng(2)
    for name in runs:
        sub = d / name
        sub.mkdir(parents=True, exist_ok=True)
        states = rng.integers(0, 16, size=50)
        rows = ["iter,state"] + [f"{i},{s}" for i, s in enumerate(states)]
        (sub / "chain.csv").write_text("\n".join(rows) + "\n")
        freq = np.bincount(states, minlength=16) / 50
        expected = rng.dirichlet(np.ones(16))
        rows = ["pos_index,pos_real,count,frequency,expected"]
        for i in range(16):
            rows.append(
                f"{i},{fmt(-5 + 10 * i / 15)},{int(freq[i] * 50)},{fmt(freq[i])},{fmt(expected[i])}"
            )
        (sub / "histogram.csv").write_text("\n".join(rows) + "\n")


@pytest.mark.parametrize("kind,writer", [
    ("heatmap_overlay", write_qmcmc_fixture),
    ("walk_compare", write_walk_fixture),
    ("chain_trace", write_chain_fixture),
])
def test_kinds_render_svg(tmp_path, kind, writer):
    writer(tmp_path)
    out = tmp_path / f"{kind}.svg"
    render(FigureRequest(kind=kind, in_dir=tmp_path, out_file=out))
    content = out.read_bytes()
    assert content.startswith(b"<?xml") and b"<svg" in content


def test_rendering_is_deterministic(tmp_path):
    write_qmcmc_fixture(tmp_path)
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    render(FigureRequest(kind="heatmap_overlay", in_dir=tmp_path, out_file=a))
    render(FigureRequest(kind="heatmap_overlay", in_dir=tmp_path, out_file=b))
    assert a.read_bytes() == b.read_bytes()


def test_pdf_output(tmp_path):
    write_walk_fixture(tmp_path)
    out = tmp_path / "walks.pdf"
    render(FigureRequest(kind="walk_compare", in_dir=tmp_path, out_file=out))
    assert out.read_bytes().startswith(b"%PDF")


def test_single_chain_directory(tmp_path):
    write_chain_fixture(tmp_path / "only", runs=("",))
    out = tmp_path / "trace.svg"
    render(FigureRequest(kind="chain_trace", in_dir=tmp_path / "only", out_file=out))
    assert out.is_file()


def test_unknown_kind_rejected(tmp_path):
    with pytest.raises(PlotError, match="kind"):
        FigureRequest(kind="pie", in_dir=tmp_path, out_file=tmp_path / "x.svg")


def test_missing_input_named(tmp_path):
    with pytest.raises(PlotError, match="evolution.csv"):
        render(FigureRequest(kind="heatmap_overlay", in_dir=tmp_path,
                             out_file=tmp_path / "x.svg"))


def test_malformed_cell_names_row(tmp_path):
    write_qmcmc_fixture(tmp_path)
    path = tmp_path / "final.csv"
    lines = path.read_text().splitlines()
    lines[3] = lines[3].replace(lines[3].split(",")[2], "not-a-number")
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(PlotError, match=r"row 4"):
        render(FigureRequest(kind="heatmap_overlay", in_dir=tmp_path,
                             out_file=tmp_path / "x.svg"))


def test_wrong_field_count_names_row(tmp_path):
    write_walk_fixture(tmp_path)
    path = tmp_path / "rw" / "distribution.csv"
    lines = path.read_text().splitlines()
    lines[5] += ",extra"
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(PlotError, match=r"row 6"):
        render(FigureRequest(kind="walk_compare", in_dir=tmp_path,
                             out_file=tmp_path / "x.svg"))


def test_bad_header_rejected(tmp_path):
    write_qmcmc_fixture(tmp_path)
    path = tmp_path / "evolution.csv"
    text = path.read_text().replace("probability", "prob")
    path.write_text(text)
    with pytest.raises(PlotError, match="row 1"):
        render(FigureRequest(kind="heatmap_overlay", in_dir=tmp_path,
                             out_file=tmp_path / "x.svg"))


class TestCli:
    def test_success_exit_zero(self, tmp_path):
        write_walk_fixture(tmp_path)
        out = tmp_path / "cmp.svg"
        assert main(["walk_compare", "--in", str(tmp_path), "--out", str(out)]) == 0
        assert out.is_file()

    def test_failure_exit_nonzero(self, tmp_path, capsys):
        code = main(["chain_trace", "--in", str(tmp_path), "--out",
                     str(tmp_path / "x.svg")])
        assert code == 2
        assert "chain.csv" in capsys.readouterr().err
