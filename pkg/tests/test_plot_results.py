import json
import os

import pytest

pytest.importorskip("plotly")

from ghost.cli import main as cli_main  # noqa: E402
from scripts.plot_results import (  # noqa: E402
    compare_sweeps,
    main,
    plot_curves,
    plot_regime_map,
    plot_sweep,
    save_figure,
)

POWER_PAIRS = [(r, r ** -0.5) for r in (1e-2, 1e-3, 1e-4, 1e-5, 1e-6)]


def test_plot_sweep(sample_csv):
    fig, fit = plot_sweep(str(sample_csv(POWER_PAIRS)))
    assert fit.model.value == "power"
    assert len(fig.data) == 3
    assert "quadratic / identity" in fig.layout.title.text


def test_compare_sweeps_skips_foreign_files(sample_csv, tmp_path):
    first = sample_csv(POWER_PAIRS, name="a.csv")
    second = sample_csv([(r, 2.0) for r, _ in POWER_PAIRS], name="b.csv", phase="power:0.5")
    foreign = tmp_path / "foreign.csv"
    foreign.write_text("model,tokens\nx,1\n")
    fig = compare_sweeps([str(first), str(foreign), str(second)])
    assert [trace.name for trace in fig.data] == ["quadratic / identity", "power:0.5 / identity"]


@pytest.mark.parametrize("figure, per_panel", [("1", 3), ("3", 2)])
def test_plot_curves(tmp_path, capsys, figure, per_panel):
    target = tmp_path / f"figure{figure}.csv"
    assert cli_main(["curves", "--figure", figure, "--samples", "11", "-o", str(target)]) == 0
    fig = plot_curves(str(target))
    assert len(fig.data) == 3 * per_panel


def test_plot_regime_map(tmp_path):
    scan = tmp_path / "regime_map.json"
    scan.write_text(json.dumps([
        {"alpha": 0.5, "model": "constant", "exponent": None, "prefactor": 4.0, "intercept": 0.0,
         "rmse": 0.01, "r_squared": 0.0},
        {"alpha": 2.0, "model": "power", "exponent": 0.5, "prefactor": 3.14, "intercept": -2.0,
         "rmse": 1e-6, "r_squared": 1.0},
    ]))
    fig = plot_regime_map(str(scan))
    assert len(fig.data) == 2
    assert list(fig.data[1].y) == [pytest.approx(0.5)]


def test_save_figure_writes_html(sample_csv, tmp_path):
    fig, _ = plot_sweep(str(sample_csv(POWER_PAIRS)))
    written = save_figure(fig, str(tmp_path / "sweep"))
    assert written == [str(tmp_path / "sweep.html")]
    assert os.path.getsize(written[0]) > 0


def test_main(sample_csv, capsys):
    assert main([]) == 1
    path = sample_csv(POWER_PAIRS)
    assert main(["--csv", str(path)]) == 0
    assert os.path.exists(str(path).replace(".csv", "_plots") + ".html")
    assert "Selected law: power" in capsys.readouterr().out
