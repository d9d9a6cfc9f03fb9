"""Command-line harness: wires configs to solvers and emits CSV artifacts.

Scenarios map one-to-one to the standard experiment layouts (trajectory
fans, mean field/front vs theory, transmittance clouds, moment curves vs
theory, non-matched transmittance, density curves).  A JSON config fully
determines every artifact; re-running a config reproduces byte-identical
CSVs, and a manifest records the config hash, seed, and versions.

Exit codes: 0 success, 2 config/schema violation (message names the field
path), 3 solver failure (message names the realization index), 4 I/O error.
"""

from __future__ import annotations

import argparse
import copy
import hashlib
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .asymptotics import FieldQuery, front_attenuation, mean_bulk, unperturbed_front
from .core import LatticeConfig, band_edges, front_params
from .ensemble import DisorderSpec, EnsembleSummary, draw_deltas
from .scattering import batch_to_csv, classify_channel, transmission_batch
from .timedomain import (MassProfile, impulse, sample_ensemble, simulate,
                         snap_time)
from .transtats import (CorrelationModel, density, gamma_iid,
                        moments_nonmatched_left, moments_nonmatched_right,
                        moments_to_csv, moments_vector)

SCENARIOS = ("td-trajectories", "td-mean-field", "td-mean-front",
             "fd-transmittance", "fd-moments", "fd-nonmatched", "density")

OUTDIR_ENV = "RANDLAT_OUTDIR"


class SchemaError(ValueError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class SolverError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Config validation

def _get(cfg: dict, path: str, typ, default=None, required=False):
    node = cfg
    parts = path.split(".")
    for p in parts[:-1]:
        node = node.get(p, {}) if isinstance(node, dict) else {}
    if not isinstance(node, dict) or parts[-1] not in node:
        if required:
            raise SchemaError(path, "missing required field")
        return default
    val = node[parts[-1]]
    if typ is float and isinstance(val, int):
        val = float(val)
    if not isinstance(val, typ):
        raise SchemaError(path, f"expected {typ.__name__}, got {type(val).__name__}")
    return val


def _grid(cfg: dict, path: str, required=False) -> np.ndarray | None:
    raw = _get(cfg, path, (list, dict), required=required)
    if raw is None:
        return None
    if isinstance(raw, dict):
        for key in ("start", "stop", "count"):
            if key not in raw:
                raise SchemaError(f"{path}.{key}", "missing required field")
        grid = np.linspace(float(raw["start"]), float(raw["stop"]), int(raw["count"]))
    else:
        grid = np.asarray(raw, dtype=float)
    if grid.size == 0 or np.any(np.diff(grid) <= 0.0):
        raise SchemaError(path, "grid must be nonempty and strictly increasing")
    return grid


def _lattice(cfg: dict) -> LatticeConfig:
    try:
        return LatticeConfig(
            pinning=_get(cfg, "lattice.pinning", float, 0.0),
            section_length=_get(cfg, "lattice.section_length", int, required=True),
            disorder_sigma=_get(cfg, "disorder.sigma", float, 0.0),
            left_offset=_get(cfg, "lattice.left_offset", float, 0.0),
            right_offset=_get(cfg, "lattice.right_offset", float, 0.0),
        )
    except ValueError as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError("lattice", str(exc)) from None


def _correlation(cfg: dict) -> CorrelationModel:
    kind = _get(cfg, "disorder.correlation.kind", str, "uncorrelated")
    try:
        if kind == "uncorrelated":
            return CorrelationModel.uncorrelated()
        if kind == "geometric":
            return CorrelationModel.geometric(_get(cfg, "disorder.correlation.rho",
                                                    float, required=True))
        if kind == "tabulated":
            return CorrelationModel.tabulated(_get(cfg, "disorder.correlation.table",
                                                   list, required=True))
    except ValueError as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError("disorder.correlation", str(exc)) from None
    raise SchemaError("disorder.correlation.kind", f"unknown kind {kind!r}")


def _disorder(cfg: dict, lattice: LatticeConfig) -> DisorderSpec:
    try:
        return DisorderSpec(
            sigma=_get(cfg, "disorder.sigma", float, 0.0),
            length=lattice.section_length,
            distribution=_get(cfg, "disorder.distribution", str, "uniform"),
            correlation=_correlation(cfg),
            master_seed=_get(cfg, "disorder.master_seed", int, 0),
        )
    except ValueError as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError("disorder", str(exc)) from None


def _omega_grid(cfg: dict, lattice: LatticeConfig, offsets=(0.0, 0.0)) -> np.ndarray:
    grid = _grid(cfg, "omega_grid")
    if grid is None:
        lo, hi = band_edges(lattice.pinning)
        margin = 0.06 * (hi - lo)
        grid = np.linspace(lo + margin, hi - margin, 30)
    for off in offsets:
        for i, w in enumerate(grid):
            if not classify_channel(float(w), lattice.pinning, off).propagative:
                raise SchemaError("omega_grid",
                                  f"omega_grid[{i}]={w} is not propagative everywhere")
    return grid


# ---------------------------------------------------------------------------
# Scenario runners; each returns the list of CSV files written

def _run_td_trajectories(cfg, lattice, spec, outdir, prefix):
    n_real = _get(cfg, "n_real", int, required=True)
    x0 = _get(cfg, "x0", int, 0)
    t_max = _get(cfg, "t_max", float, required=True)
    dt = _get(cfg, "dt", float, 0.01)
    section_start = _get(cfg, "section_start", int, 1)
    rec_lo = _get(cfg, "record.lo", int, -30)
    rec_hi = _get(cfg, "record.hi", int, 60)
    stride = _get(cfg, "record.stride", int, 10)
    # shifting the section to start at s is the same as moving the source
    x0_eff = x0 - (section_start - 1)
    radius = x0_eff + math.ceil(t_max) + 10 + max(abs(rec_lo), abs(rec_hi))
    files = []
    for i in range(n_real):
        profile = MassProfile(draw_deltas(spec, i), lattice.left_offset,
                              lattice.right_offset)
        rec = simulate(lattice, profile, impulse(x0_eff), t_max, dt, radius,
                       record_sites=(rec_lo - (section_start - 1),
                                     rec_hi - (section_start - 1)),
                       record_stride=stride)
        path = os.path.join(outdir, f"{prefix}_r{i:03d}.csv")
        rec.to_csv(path)
        files.append(path)
    clean = MassProfile(np.zeros(lattice.section_length), lattice.left_offset,
                        lattice.right_offset)
    rec = simulate(lattice, clean, impulse(x0_eff), t_max, dt, radius,
                   record_sites=(rec_lo - (section_start - 1),
                                 rec_hi - (section_start - 1)),
                   record_stride=stride)
    path = os.path.join(outdir, f"{prefix}_clean.csv")
    rec.to_csv(path)
    files.append(path)
    return files


def _td_sample_stats(lattice, spec, n_real, x0, samples, dt):
    deltas = np.stack([draw_deltas(spec, i) for i in range(n_real)])
    t_max = max(t for _, t in samples)
    radius = x0 + math.ceil(t_max) + 10
    try:
        table = sample_ensemble(lattice, deltas, x0, t_max, dt, radius, samples)
    except Exception as exc:
        raise SolverError(f"time-domain batch failed: {exc}") from exc
    mean = table.mean(axis=0)
    std = table.std(axis=0, ddof=1)
    return mean, std, std / math.sqrt(n_real)


def _run_td_mean_field(cfg, lattice, spec, outdir, prefix):
    n_real = _get(cfg, "n_real", int, required=True)
    x = _get(cfg, "x", int, required=True)
    dt = _get(cfg, "dt", float, 0.01)
    alphas = _grid(cfg, "alpha_grid", required=True)
    fp = front_params(lattice.pinning)
    samples, alpha_eff = [], []
    for a in alphas:
        if a <= fp.alpha_s + 1e-3:
            raise SchemaError("alpha_grid", f"alpha={a} must exceed alpha_s={fp.alpha_s}")
        t = snap_time(a * x, dt)
        samples.append((x, t))
        alpha_eff.append(t / x)
    mean, std, stderr = _td_sample_stats(lattice, spec, n_real, 0, samples, dt)
    summary = EnsembleSummary(np.asarray(alpha_eff), n_real, mean, std, stderr)
    f1 = os.path.join(outdir, f"{prefix}_ensemble.csv")
    summary.to_csv(f1)
    theory = [mean_bulk(FieldQuery(x, a, lattice), spec.sigma,
                        lattice.section_length).value for a in alpha_eff]
    f2 = os.path.join(outdir, f"{prefix}_theory.csv")
    _curve_to_csv(f2, "alpha,theory", alpha_eff, theory)
    return [f1, f2]


def _run_td_mean_front(cfg, lattice, spec, outdir, prefix):
    n_real = _get(cfg, "n_real", int, required=True)
    x = _get(cfg, "x", int, required=True)
    dt = _get(cfg, "dt", float, 0.01)
    betas = _grid(cfg, "beta_grid", required=True)
    fp = front_params(lattice.pinning)
    croot = x ** (1.0 / 3.0)
    samples, beta_eff = [], []
    for b in betas:
        t = snap_time(fp.alpha_s * x + b * croot, dt)
        samples.append((x, t))
        beta_eff.append((t - fp.alpha_s * x) / croot)
    mean, std, stderr = _td_sample_stats(lattice, spec, n_real, 0, samples, dt)
    summary = EnsembleSummary(np.asarray(beta_eff), n_real, mean, std, stderr)
    f1 = os.path.join(outdir, f"{prefix}_ensemble.csv")
    summary.to_csv(f1)
    att = front_attenuation(spec.sigma, lattice.section_length, lattice.pinning)
    theory = [att * unperturbed_front(x, b, lattice.pinning) for b in beta_eff]
    f2 = os.path.join(outdir, f"{prefix}_theory.csv")
    _curve_to_csv(f2, "beta,theory", beta_eff, theory)
    return [f1, f2]


def _transmittance_table(cfg, lattice, spec, omegas, n_real):
    deltas = np.stack([draw_deltas(spec, i) for i in range(n_real)])
    t2 = np.empty((n_real, omegas.size))
    rows_T = np.empty((n_real, omegas.size), dtype=complex)
    rows_R = np.empty((n_real, omegas.size), dtype=complex)
    for j, w in enumerate(omegas):
        try:
            T, R = transmission_batch(float(w), lattice.pinning, deltas,
                                      lattice.left_offset, lattice.right_offset)
        except Exception as exc:
            raise SolverError(f"scattering failed at omega index {j}: {exc}") from exc
        rows_T[:, j] = T
        rows_R[:, j] = R
        t2[:, j] = np.abs(T) ** 2
    return rows_T, rows_R, t2


def _run_fd_transmittance(cfg, lattice, spec, outdir, prefix):
    n_real = _get(cfg, "n_real", int, required=True)
    omegas = _omega_grid(cfg, lattice, (lattice.left_offset, lattice.right_offset))
    rows_T, rows_R, _ = _transmittance_table(cfg, lattice, spec, omegas, n_real)
    k0 = np.array([classify_channel(float(w), lattice.pinning, lattice.left_offset).k
                   for w in omegas])
    k1 = np.array([classify_channel(float(w), lattice.pinning, lattice.right_offset).k
                   for w in omegas])
    flux = np.abs(np.abs(rows_R) ** 2
                  + (np.sin(k1) / np.sin(k0)) * np.abs(rows_T) ** 2 - 1.0)
    path = os.path.join(outdir, f"{prefix}_cloud.csv")
    omega_col = np.tile(omegas, n_real)
    real_col = np.repeat(np.arange(n_real), omegas.size)
    batch_to_csv(path, omega_col, rows_T.ravel(), rows_R.ravel(), flux.ravel(),
                 spec.master_seed, real_col)
    return [path]


def _run_fd_moments(cfg, lattice, spec, outdir, prefix):
    n_real = _get(cfg, "n_real", int, required=True)
    omegas = _omega_grid(cfg, lattice)
    _, _, t2 = _transmittance_table(cfg, lattice, spec, omegas, n_real)
    mean = t2.mean(axis=0)
    std = t2.std(axis=0, ddof=1)
    summary = EnsembleSummary(omegas, n_real, mean, std, std / math.sqrt(n_real))
    f1 = os.path.join(outdir, f"{prefix}_ensemble.csv")
    summary.to_csv(f1)
    model = _correlation(cfg)
    gl = np.array([gamma_iid(float(w), spec.sigma, lattice.pinning)
                   * lattice.section_length for w in omegas]) \
        if model.kind == "uncorrelated" else \
        np.array([_gamma_corr(float(w), spec, lattice, model) for w in omegas])
    th_mean = np.empty(omegas.size)
    th_std = np.empty(omegas.size)
    for j, g in enumerate(gl):
        m = moments_vector(2, float(g))
        th_mean[j] = m[0]
        th_std[j] = math.sqrt(max(m[1] - m[0] ** 2, 0.0))
    f2 = os.path.join(outdir, f"{prefix}_theory.csv")
    moments_to_csv(f2, omegas, gl, th_mean, th_std)
    return [f1, f2]


def _gamma_corr(w, spec, lattice, model):
    from .transtats import gamma_correlated
    return gamma_correlated(w, spec.sigma, lattice.pinning, model) * lattice.section_length


def _run_fd_nonmatched(cfg, lattice, spec, outdir, prefix):
    if (lattice.left_offset != 0.0) == (lattice.right_offset != 0.0):
        raise SchemaError("lattice", "exactly one of left_offset/right_offset "
                                     "must be nonzero for fd-nonmatched")
    n_real = _get(cfg, "n_real", int, required=True)
    omegas = _omega_grid(cfg, lattice, (lattice.left_offset, lattice.right_offset))
    _, _, t2 = _transmittance_table(cfg, lattice, spec, omegas, n_real)
    mean = t2.mean(axis=0)
    std = t2.std(axis=0, ddof=1)
    summary = EnsembleSummary(omegas, n_real, mean, std, std / math.sqrt(n_real))
    f1 = os.path.join(outdir, f"{prefix}_ensemble.csv")
    summary.to_csv(f1)
    th_mean = np.empty(omegas.size)
    th_std = np.empty(omegas.size)
    for j, w in enumerate(omegas):
        if lattice.left_offset != 0.0:
            m1 = moments_nonmatched_left(1, float(w), lattice.pinning, spec.sigma,
                                         lattice.section_length, lattice.left_offset)
            m2 = moments_nonmatched_left(2, float(w), lattice.pinning, spec.sigma,
                                         lattice.section_length, lattice.left_offset)
        else:
            m1 = moments_nonmatched_right(1, float(w), lattice.pinning, spec.sigma,
                                          lattice.section_length, lattice.right_offset)
            m2 = moments_nonmatched_right(2, float(w), lattice.pinning, spec.sigma,
                                          lattice.section_length, lattice.right_offset)
        th_mean[j] = m1
        th_std[j] = math.sqrt(max(m2 - m1 * m1, 0.0))
    gl = np.array([gamma_iid(float(w), spec.sigma, lattice.pinning)
                   * lattice.section_length for w in omegas])
    f2 = os.path.join(outdir, f"{prefix}_theory.csv")
    moments_to_csv(f2, omegas, gl, th_mean, th_std)
    return [f1, f2]


def _run_density(cfg, lattice, spec, outdir, prefix):
    gammaL = _get(cfg, "gammaL", float)
    if gammaL is None:
        omega = _get(cfg, "omega", float, required=True)
        gammaL = gamma_iid(omega, spec.sigma, lattice.pinning) * lattice.section_length
    tau0 = _get(cfg, "tau0", float, 1.0)
    taus = _grid(cfg, "tau_grid")
    if taus is None:
        taus = np.linspace(0.02, 1.0, 50)
    vals = [density(float(t), tau0, gammaL) for t in taus]
    path = os.path.join(outdir, f"{prefix}_density.csv")
    _curve_to_csv(path, "tau,density", taus, vals)
    return [path]


def _curve_to_csv(path, header, xs, ys):
    with open(path, "w", newline="") as fh:
        fh.write(header + "\n")
        for x, y in zip(xs, ys):
            fh.write(f"{float(x)!r},{float(y)!r}\n")


_RUNNERS = {
    "td-trajectories": _run_td_trajectories,
    "td-mean-field": _run_td_mean_field,
    "td-mean-front": _run_td_mean_front,
    "fd-transmittance": _run_fd_transmittance,
    "fd-moments": _run_fd_moments,
    "fd-nonmatched": _run_fd_nonmatched,
    "density": _run_density,
}


# ---------------------------------------------------------------------------
# Presets: desk-scale analogs of the six standard figures

PRESETS: dict[str, dict] = {
    "fig1": {
        "scenario": "td-trajectories",
        "lattice": {"pinning": 0.0, "section_length": 12},
        "disorder": {"sigma": 0.15, "master_seed": 1},
        "n_real": 51, "x0": 0, "t_max": 60.0, "dt": 0.01, "section_start": 2,
        "record": {"lo": -20, "hi": 60, "stride": 20},
        "output": "fig1",
    },
    "fig2": {
        "scenario": "td-trajectories",
        "lattice": {"pinning": 1.1, "section_length": 12},
        "disorder": {"sigma": 0.15, "master_seed": 2},
        "n_real": 51, "x0": 0, "t_max": 60.0, "dt": 0.01, "section_start": 2,
        "record": {"lo": -20, "hi": 60, "stride": 20},
        "output": "fig2",
    },
    "fig3": {
        "scenario": "fd-transmittance",
        "lattice": {"pinning": 0.0, "section_length": 40},
        "disorder": {"sigma": 0.05, "master_seed": 3},
        "n_real": 200,
        "output": "fig3",
    },
    "fig4": {
        "scenario": "td-mean-field",
        "lattice": {"pinning": 0.0, "section_length": 16},
        "disorder": {"sigma": 0.15, "master_seed": 4},
        "n_real": 200, "x": 300, "dt": 0.01,
        "alpha_grid": {"start": 1.2, "stop": 2.4, "count": 13},
        "output": "fig4",
    },
    "fig5": {
        "scenario": "fd-moments",
        "lattice": {"pinning": 0.02, "section_length": 40},
        "disorder": {"sigma": 0.05, "master_seed": 5},
        "n_real": 200,
        "output": "fig5",
    },
    "fig6": {
        "scenario": "fd-nonmatched",
        "lattice": {"pinning": 0.02, "section_length": 40, "left_offset": 0.1},
        "disorder": {"sigma": 0.05, "master_seed": 6},
        "n_real": 151,
        "omega_grid": {"start": 0.35, "stop": 1.85, "count": 25},
        "output": "fig6",
    },
}

_PRESET_NOTES = {
    "fig1": "trajectory fan, free chain, L=12, sigma=0.15, 51 realizations",
    "fig2": "trajectory fan with pinning Ks=1.1, otherwise as fig1",
    "fig3": "per-realization transmittance cloud, sigma=0.05, L=40, 200 realizations",
    "fig4": "ensemble mean field vs closed form, Ks=0, L=16, sigma=0.15",
    "fig5": "transmittance mean/spread vs moment theory, Ks=0.02, sigma=0.05, L=40",
    "fig6": "non-matched transmittance vs theory, Ks=0.02, offsets +-0.1, ensemble 151",
}


# ---------------------------------------------------------------------------
# Entry points

def validate_and_run(cfg: dict, outdir: str) -> dict:
    scenario = _get(cfg, "scenario", str, required=True)
    if scenario not in SCENARIOS:
        raise SchemaError("scenario", f"must be one of {', '.join(SCENARIOS)}")
    lattice = _lattice(cfg)
    spec = _disorder(cfg, lattice)
    prefix = _get(cfg, "output", str, scenario.replace("-", "_"))
    os.makedirs(outdir, exist_ok=True)
    files = _RUNNERS[scenario](cfg, lattice, spec, outdir, prefix)
    manifest = {
        "config": cfg,
        "config_hash": config_hash(cfg),
        "master_seed": spec.master_seed,
        "versions": {
            "randlat": __version__,
            "numpy": np.__version__,
            "python": sys.version.split()[0],
        },
        "outputs": [os.path.basename(f) for f in files],
    }
    mpath = os.path.join(outdir, f"{prefix}_manifest.json")
    with open(mpath, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def config_hash(cfg: dict) -> str:
    return hashlib.sha256(
        json.dumps(cfg, sort_keys=True, separators=(",", ":")).encode()
    ).hexdigest()


def _apply_overrides(cfg: dict, overrides: list[str]) -> dict:
    cfg = copy.deepcopy(cfg)
    for item in overrides:
        if "=" not in item:
            raise SchemaError("--set", f"expected key=value, got {item!r}")
        key, raw = item.split("=", 1)
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = cfg
        parts = key.split(".")
        for p in parts[:-1]:
            node = node.setdefault(p, {})
            if not isinstance(node, dict):
                raise SchemaError(key, "path runs through a non-object")
        node[parts[-1]] = value
    return cfg


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="randlat",
        description="Random-mass lattice laboratory: CSV artifact generator")
    parser.add_argument("--outdir", default=None,
                        help=f"output directory (default: ${OUTDIR_ENV} or '.')")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run a JSON config")
    p_run.add_argument("config", help="path to the JSON config file")
    p_run.add_argument("--set", action="append", default=[], dest="overrides",
                       metavar="KEY=VALUE", help="override a config field")
    p_pre = sub.add_parser("preset", help="run a named preset")
    p_pre.add_argument("name", choices=sorted(PRESETS))
    p_pre.add_argument("--set", action="append", default=[], dest="overrides",
                       metavar="KEY=VALUE", help="override a preset field")
    sub.add_parser("list-presets", help="list the available presets")

    args = parser.parse_args(argv)
    outdir = args.outdir or os.environ.get(OUTDIR_ENV, ".")

    if args.command == "list-presets":
        for name in sorted(PRESETS):
            print(f"{name}: {_PRESET_NOTES[name]}")
            print(f"    {json.dumps(PRESETS[name], sort_keys=True)}")
        return 0

    try:
        if args.command == "run":
            try:
                with open(args.config) as fh:
                    cfg = json.load(fh)
            except OSError as exc:
                print(f"error: cannot read config: {exc}", file=sys.stderr)
                return 4
            except json.JSONDecodeError as exc:
                print(f"error: config is not valid JSON: {exc}", file=sys.stderr)
                return 2
        else:
            cfg = PRESETS[args.name]
        cfg = _apply_overrides(cfg, args.overrides)
        manifest = validate_and_run(cfg, outdir)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SolverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: I/O failure: {exc}", file=sys.stderr)
        return 4
    for name in manifest["outputs"]:
        print(os.path.join(outdir, name))
    return 0


if __name__ == "__main__":
    sys.exit(main())
