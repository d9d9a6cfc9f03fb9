"""Render the six standard figures from randlat CSV artifacts.

The pipeline never recomputes physics: every curve, band, and overlay is
read from the CSV files the harness emits (trajectory records, per-
realization transmittance clouds, ensemble summaries with their theory
curves).  Output images are byte-deterministic: fixed figure geometry, the
Agg backend, and no embedded timestamps or version strings.

Usage: randlat-render --figure fig5 --in <artifact dir> --out fig5.png
"""

from __future__ import annotations

import argparse
import csv
import glob
import os
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

FIGURES = ("fig1", "fig2", "fig3", "fig4", "fig5", "fig6")

_SAVE_KW = dict(dpi=110, metadata={"Software": None})


class SchemaError(ValueError):
    """Input CSV does not carry the expected columns."""


def read_csv_columns(path: str, required: tuple[str, ...]) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [row for row in reader]
    for col in required:
        if col not in header:
            raise SchemaError(f"{os.path.basename(path)}: missing column {col!r}")
    data = np.array(rows, dtype=float)
    if data.ndim != 2 or data.shape[1] != len(header):
        raise SchemaError(f"{os.path.basename(path)}: ragged rows")
    return {name: data[:, j] for j, name in enumerate(header)}


def read_trajectory(path: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Returns (times, sites, values[time, site]) from a trajectory record."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [row for row in reader]
    if not header or header[0] != "t" or not all(h.startswith("site_") for h in header[1:]):
        raise SchemaError(f"{os.path.basename(path)}: missing column 't'/'site_*'")
    sites = np.array([int(h[5:]) for h in header[1:]])
    data = np.array(rows, dtype=float)
    return data[:, 0], sites, data[:, 1:]


def _band_and_mean(ax, coord, mean, std, n, label):
    if n > 1:
        ax.fill_between(coord, mean - std, mean + std, alpha=0.3,
                        color="#d62728", linewidth=0, label="spread (1 std)")
    ax.plot(coord, mean, color="#d62728", lw=1.8, label=label)


def _render_trajectories(indir: str, prefix: str, out: str) -> None:
    clean_path = os.path.join(indir, f"{prefix}_clean.csv")
    real_paths = sorted(glob.glob(os.path.join(indir, f"{prefix}_r*.csv")))
    if not os.path.exists(clean_path) or not real_paths:
        raise SchemaError(f"{prefix}: expected {prefix}_r*.csv and {prefix}_clean.csv")
    fig, axes = plt.subplots(1, 2, figsize=(10.0, 4.2), sharey=True)
    gain = 2.5  # displacement exaggeration so the fan is visible
    for ax, paths, title in ((axes[0], real_paths, "perturbed masses"),
                             (axes[1], [clean_path], "clean chain")):
        first = True
        for path in paths:
            t, sites, vals = read_trajectory(path)
            for j, x in enumerate(sites):
                ax.plot(x + gain * vals[:, j], t, color="#1f77b4",
                        lw=0.4, alpha=0.25 if len(paths) > 1 else 0.9)
            if first:
                ax.plot(t, t, color="orange", lw=1.0)
                ax.plot(-t, t, color="orange", lw=1.0)
                first = False
        ax.set_title(title)
        ax.set_xlabel("site")
    axes[0].set_ylabel("time")
    fig.tight_layout()
    fig.savefig(out, **_SAVE_KW)
    plt.close(fig)


def _render_cloud(indir: str, prefix: str, out: str) -> None:
    path = os.path.join(indir, f"{prefix}_cloud.csv")
    cols = read_csv_columns(path, ("omega", "trans2", "realization"))
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for r in np.unique(cols["realization"]):
        sel = cols["realization"] == r
        ax.plot(cols["omega"][sel], cols["trans2"][sel],
                color="#1f77b4", lw=0.35, alpha=0.35)
    ax.set_xlabel("frequency")
    ax.set_ylabel("transmittance |T|^2")
    ax.set_title("per-realization transmittance")
    fig.tight_layout()
    fig.savefig(out, **_SAVE_KW)
    plt.close(fig)


def _render_ensemble_vs_theory(indir: str, prefix: str, out: str,
                               coord_label: str, theory_cols,
                               theory_coord: str) -> None:
    ens = read_csv_columns(os.path.join(indir, f"{prefix}_ensemble.csv"),
                           ("coord", "mean", "std", "stderr", "n"))
    th = read_csv_columns(os.path.join(indir, f"{prefix}_theory.csv"),
                          (theory_coord, *theory_cols))
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    _band_and_mean(ax, ens["coord"], ens["mean"], ens["std"],
                   int(ens["n"][0]), "ensemble mean")
    ax.plot(th[theory_coord], th[theory_cols[0]], color="#1f77b4", lw=1.8,
            label="theory")
    if len(theory_cols) > 1:
        ax.plot(th[theory_coord], th[theory_cols[0]] + th[theory_cols[1]],
                color="#1f77b4", lw=0.9, ls="--")
        ax.plot(th[theory_coord], th[theory_cols[0]] - th[theory_cols[1]],
                color="#1f77b4", lw=0.9, ls="--")
    ax.set_xlabel(coord_label)
    ax.set_ylabel("value")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(out, **_SAVE_KW)
    plt.close(fig)


def render(figure: str, indir: str, out: str) -> None:
    """Render one figure from the artifacts in `indir` to the image `out`."""
    if figure in ("fig1", "fig2"):
        _render_trajectories(indir, figure, out)
    elif figure == "fig3":
        _render_cloud(indir, figure, out)
    elif figure == "fig4":
        _render_ensemble_vs_theory(indir, figure, out, "slowness t/x",
                                   ("theory",), "alpha")
    elif figure in ("fig5", "fig6"):
        _render_ensemble_vs_theory(indir, figure, out, "frequency",
                                   ("mean_T2", "std_T2"), "omega")
    else:
        raise SchemaError(f"unknown figure {figure!r}")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="randlat-render",
                                     description=__doc__.split("\n")[0])
    parser.add_argument("--figure", required=True, choices=FIGURES)
    parser.add_argument("--in", dest="indir", required=True,
                        help="directory holding the harness CSV artifacts")
    parser.add_argument("--out", required=True, help="output image path")
    args = parser.parse_args(argv)
    try:
        render(args.figure, args.indir, args.out)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: I/O failure: {exc}", file=sys.stderr)
        return 4
    print(args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
