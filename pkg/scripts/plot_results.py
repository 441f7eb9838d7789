import argparse
import glob
import json
import os
import sys

import numpy as np
import pandas as pd
import plotly.express as px
import plotly.graph_objects as go
from plotly.subplots import make_subplots

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
from config.ghost_config import RESULTS_DIR
from ghost.errors import MalformedData
from ghost.results import read_samples_csv
from ghost.scaling import fit_samples

MODEL_COLORS = {"constant": "green", "logarithmic": "orange", "power": "blue"}


def sweep_label(csv_file, labels):
    if labels.get("phase"):
        return f"{labels['phase']} / {labels.get('param', '')}"
    return os.path.basename(csv_file).replace(".csv", "")


def plot_sweep(csv_file):
    """
    Log-log passage times of one sweep CSV with the selected scaling law
    overlaid, next to the local slope -d ln t / d ln r.
    """
    samples, labels = read_samples_csv(csv_file)
    fit = fit_samples(samples)
    r = np.array([s.r for s in samples])
    t = np.array([s.t for s in samples])
    order = np.argsort(r)
    r, t = r[order], t[order]
    slope = -np.gradient(np.log(t), np.log(r))

    fig = make_subplots(rows=1, cols=2, subplot_titles=("Passage time vs r", "Local exponent vs r"))

    fig.add_trace(
        go.Scatter(
            x=r, y=t,
            mode="markers",
            name="measured",
            marker=dict(size=8, color="black"),
            hovertemplate="<b>r=%{x:.3e}</b><br>t=%{y:.6g}<extra></extra>",
        ),
        row=1, col=1,
    )
    fig.add_trace(
        go.Scatter(
            x=r, y=fit.predict(r),
            mode="lines",
            name=f"{fit.model.value} fit",
            line=dict(color=MODEL_COLORS.get(fit.model.value, "red"), width=3),
        ),
        row=1, col=1,
    )
    fig.add_trace(
        go.Scatter(
            x=r, y=slope,
            mode="lines+markers",
            name="local exponent",
            line=dict(color="purple", width=3),
            marker=dict(size=6),
        ),
        row=1, col=2,
    )

    fig.update_xaxes(title_text="r", type="log", row=1, col=1)
    fig.update_xaxes(title_text="r", type="log", row=1, col=2)
    fig.update_yaxes(title_text="t", type="log", row=1, col=1)
    fig.update_yaxes(title_text="-d ln t / d ln r", row=1, col=2)

    exponent = f", p = {fit.exponent:.4f}" if fit.exponent is not None else ""
    fig.update_layout(
        title=f"{sweep_label(csv_file, labels)}: {fit.model.value}{exponent} (rmse {fit.rmse:.2e})",
        height=500,
        width=1200,
        template="plotly_white",
        font=dict(size=12),
    )
    return fig, fit


def compare_sweeps(csv_files):
    fig = go.Figure()
    colors = px.colors.qualitative.Set1
    for i, csv_file in enumerate(csv_files):
        try:
            samples, labels = read_samples_csv(csv_file)
        except MalformedData:
            print(f"Skipping {csv_file}: not a sweep file")
            continue
        label = sweep_label(csv_file, labels)
        fig.add_trace(
            go.Scatter(
                x=[s.r for s in samples],
                y=[s.t for s in samples],
                mode="lines+markers",
                name=label,
                line=dict(color=colors[i % len(colors)], width=3),
                marker=dict(size=8),
                hovertemplate=f"<b>{label}</b><br>r=%{{x:.3e}}<br>t=%{{y:.6g}}<extra></extra>",
            )
        )
    fig.update_layout(
        title="Passage-time scaling comparison",
        xaxis=dict(title="r", type="log"),
        yaxis=dict(title="t", type="log"),
        template="plotly_white",
        width=1000,
        height=600,
        font=dict(size=12),
        legend=dict(yanchor="top", y=0.99, xanchor="right", x=0.99),
    )
    return fig


def plot_curves(csv_file):
    """Curve families written by `ghost.cli curves`."""
    df = pd.read_csv(csv_file)
    exponents = sorted(df["a"].unique())
    fig = make_subplots(rows=1, cols=len(exponents), subplot_titles=[f"a = {a:g}" for a in exponents])

    for col, a in enumerate(exponents, 1):
        part = df[df["a"] == a]
        if "theta" in df.columns:
            traces = [("1 - F_a", part["theta"], part["one_minus_F"], "blue"),
                      ("1 + F_a", part["theta"], part["one_plus_F"], "red")]
        else:
            traces = [(f"r = {level:g}", group["x"], group["f"], color)
                      for (level, group), color in zip(part.groupby("r"), ("blue", "black", "red"))]
        for name, x, y, color in traces:
            fig.add_trace(
                go.Scatter(x=x, y=y, mode="lines", name=name, legendgroup=name, showlegend=(col == 1),
                           line=dict(color=color, width=2)),
                row=1, col=col,
            )
        fig.add_hline(y=0, line=dict(color="gray", dash="dot"), row=1, col=col)

    variable = "theta" if "theta" in df.columns else "x"
    fig.update_xaxes(title_text=variable)
    fig.update_layout(
        title=f"Field families: {os.path.basename(csv_file)}",
        height=450,
        width=400 * len(exponents),
        template="plotly_white",
        font=dict(size=12),
    )
    return fig


def plot_regime_map(json_file):
    """Bar chart of the scan: fitted exponent per alpha, colored by scaling class."""
    with open(json_file) as handle:
        entries = json.load(handle)
    df = pd.DataFrame(entries)
    height = df["exponent"].fillna(0.0)
    fig = go.Figure(
        go.Bar(
            x=[f"{alpha:g}" for alpha in df["alpha"]],
            y=height,
            text=df["model"],
            textposition="outside",
            marker_color=[MODEL_COLORS.get(model, "gray") for model in df["model"]],
            hovertemplate="<b>alpha=%{x}</b><br>%{text}<br>exponent %{y:.4f}<extra></extra>",
        )
    )
    alphas = df["alpha"].to_numpy(dtype=float)
    above = alphas[alphas > 1]
    if len(above):
        fig.add_trace(go.Scatter(x=[f"{a:g}" for a in above], y=(above - 1) / above, mode="markers",
                                 name="(alpha - 1) / alpha", marker=dict(symbol="x", size=12, color="black")))
    fig.update_layout(
        title="Regime map",
        xaxis_title="alpha",
        yaxis_title="Fitted exponent (0 for constant / logarithmic)",
        template="plotly_white",
        width=900,
        height=500,
        font=dict(size=12),
    )
    return fig


def save_figure(fig, base, static=False, width=1200, height=600):
    """Write base.html, plus base.png through kaleido when static is set."""
    html_file = f"{base}.html"
    fig.write_html(html_file)
    print(f"Interactive plot saved to: {html_file}")
    written = [html_file]
    if static:
        png_file = f"{base}.png"
        fig.write_image(png_file, width=width, height=height)
        print(f"Static plot saved to: {png_file}")
        written.append(png_file)
    return written


def main(argv=None):
    parser = argparse.ArgumentParser(description="Generate interactive plots from ghost results using Plotly")
    parser.add_argument("--csv", type=str, help="Sweep CSV file to plot")
    parser.add_argument("--compare", nargs="*", help="Sweep CSV files to overlay (default: all in results/)")
    parser.add_argument("--curves", type=str, help="Curve CSV written by the curves command")
    parser.add_argument("--scan", type=str, help="Regime map JSON written by the scan command")
    parser.add_argument("--static", action="store_true", help="Also write PNG images (needs kaleido)")
    parser.add_argument("--show", action="store_true", help="Open the figures in a browser")
    args = parser.parse_args(argv)

    figures = []
    if args.csv:
        fig, fit = plot_sweep(args.csv)
        print(f"Selected law: {fit.model.value}" + (f", exponent {fit.exponent:.4f}" if fit.exponent is not None else ""))
        figures.append((fig, args.csv.replace(".csv", "_plots")))
    if args.compare is not None:
        csv_files = args.compare or sorted(glob.glob(os.path.join(RESULTS_DIR, "*.csv")))
        if len(csv_files) > 1:
            figures.append((compare_sweeps(csv_files), os.path.join(RESULTS_DIR, "sweep_comparison")))
        else:
            print("Need at least 2 sweep files to compare")
    if args.curves:
        figures.append((plot_curves(args.curves), args.curves.replace(".csv", "_plots")))
    if args.scan:
        figures.append((plot_regime_map(args.scan), args.scan.replace(".json", "_plots")))

    if not figures:
        print("Nothing to plot. Usage examples:")
        print("  python scripts/plot_results.py --csv results/quadratic.csv")
        print("  python scripts/plot_results.py --compare")
        print("  python scripts/plot_results.py --curves results/figure3.csv --static")
        print("  python scripts/plot_results.py --scan results/regime_map.json")
        return 1

    for fig, base in figures:
        save_figure(fig, base, static=args.static)
        if args.show:
            fig.show()
    return 0


if __name__ == "__main__":
    sys.exit(main())
