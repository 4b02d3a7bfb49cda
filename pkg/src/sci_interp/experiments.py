"""Experiment runners behind the CLI subcommands.

Each ``run_*`` takes a config dataclass and returns ``(results, files)``:
a JSON-ready results dict and a mapping of output file name to CSV text.
Runners fill in ``cfg.resolved_k`` where ``k`` is ``"auto"``.
"""

from __future__ import annotations

import numpy as np

from .config import DescentConfig, Fig1Config, Fig2Config, IslandsConfig, RatesConfig
from .core import HolderParams, WeightScheme, optimal_k
from .doubledescent import DescentSpec, run_descent
from .estimators import WinnEstimator
from .io import csv_text
from .risk import _map_replicates, island_radii, rate_sweep, winn_builder
from .synthgen import Fig1Regression, Fig2Gaussians, HolderRegression, generate


def _resolve_k(k, n, alpha, dim):
    return optimal_k(n, HolderParams(alpha, dim)) if k == "auto" else int(k)


def run_fig1(cfg: Fig1Config):
    ds, truth = generate(Fig1Regression(n=cfg.n, seed=cfg.seed))
    k = _resolve_k(cfg.k, cfg.n, cfg.alpha, 1)
    cfg.resolved_k = k
    est = WinnEstimator(ds, k, WeightScheme.parse(cfg.delta))

    steps = int(round((cfg.grid_hi - cfg.grid_lo) / cfg.grid_step))
    grid = cfg.grid_lo + cfg.grid_step * np.arange(steps + 1)
    xs = np.union1d(grid, ds.points[:, 0])
    curve = est.predict(xs[:, None])
    is_sample = np.isin(xs, ds.points[:, 0])

    at_samples = est.predict(ds.points)
    xmin, xmax = ds.points[:, 0].min(), ds.points[:, 0].max()
    far = est.predict(np.array([[xmin - 1e6], [xmax + 1e6]]))
    results = {
        "n": cfg.n,
        "k": k,
        "weights": str(est.scheme),
        "max_abs_error_at_samples": float(np.max(np.abs(at_samples - ds.labels))),
        "passes_through_samples": bool(np.all(at_samples == ds.labels)),
        "sample_range": [float(xmin), float(xmax)],
        "curve_at_grid_ends": [float(curve[0]), float(curve[-1])],
        "far_field_values": [float(far[0]), float(far[1])],
        "label_range": [float(ds.labels.min()), float(ds.labels.max())],
    }
    files = {
        "fig1_curve.csv": csv_text(["x", "yhat", "eta", "is_sample"], zip(xs, curve, truth.eta(xs[:, None]), is_sample)),
        "fig1_samples.csv": csv_text(["x1", "y"], zip(ds.points[:, 0], ds.labels)),
    }
    return results, files


def _cell_centers(lo, hi, size):
    w = (hi - lo) / size
    return lo + w * (np.arange(size) + 0.5), w


def run_fig2(cfg: Fig2Config):
    ds, truth = generate(Fig2Gaussians(n=cfg.n, flip_prob=cfg.flip_prob, separation=cfg.separation, seed=cfg.seed))
    k = _resolve_k(cfg.k, cfg.n, cfg.alpha, 2)
    cfg.resolved_k = k
    est = WinnEstimator(ds, k, WeightScheme.parse(cfg.delta))

    g = cfg.grid_size
    c1, w1 = _cell_centers(*cfg.x1_range, g)
    c2, w2 = _cell_centers(*cfg.x2_range, g)
    G1, G2 = np.meshgrid(c1, c2, indexing="ij")
    centers = np.column_stack([G1.ravel(), G2.ravel()])
    labels = est.classify(centers).astype(int)
    anchored = np.zeros(len(centers), dtype=bool)

    # A cell holding a sample is painted with the classifier's value at the
    # sample itself (lowest index wins), so islands narrower than a cell show.
    i1 = np.floor((ds.points[:, 0] - cfg.x1_range[0]) / w1).astype(int)
    i2 = np.floor((ds.points[:, 1] - cfg.x2_range[0]) / w2).astype(int)
    inside = (i1 >= 0) & (i1 < g) & (i2 >= 0) & (i2 < g)
    cell_of = np.where(inside, i1 * g + i2, -1)
    at_samples = est.classify(ds.points).astype(int)
    for j in range(len(ds) - 1, -1, -1):
        if cell_of[j] >= 0:
            labels[cell_of[j]] = at_samples[j]
            anchored[cell_of[j]] = True

    flipped = np.flatnonzero(truth.flipped)
    mis_cells = cell_of[flipped]
    mis_ok = bool(np.all(labels[mis_cells[mis_cells >= 0]] == ds.labels[flipped][mis_cells >= 0]))

    index = est.index
    _, nearest = index.nearest(centers, 1)
    boundary = truth.bayes_boundary_x1
    far = (nearest[:, 0] > cfg.far_from_samples) & (np.abs(centers[:, 0] - boundary) > cfg.far_from_boundary) & ~anchored
    bayes = truth.bayes_label(centers)
    agreement = float(np.mean(labels[far] == bayes[far])) if far.any() else float("nan")

    results = {
        "n": cfg.n,
        "k": k,
        "weights": str(est.scheme),
        "bayes_line_x1": boundary,
        "bayes_risk": truth.bayes_risk,
        "n_mislabeled": int(len(flipped)),
        "mislabeled_cells_carry_training_label": mis_ok,
        "samples_classified_as_training_label": bool(np.all(at_samples == ds.labels)),
        "far_cells": int(far.sum()),
        "far_cell_bayes_agreement": agreement,
    }
    files = {
        "fig2_regions.csv": csv_text(["x1", "x2", "label", "anchored"], zip(centers[:, 0], centers[:, 1], labels, anchored)),
        "fig2_samples.csv": csv_text(
            ["x1", "x2", "y", "clean_y", "flipped"],
            zip(ds.points[:, 0], ds.points[:, 1], ds.labels, truth.clean_labels, truth.flipped),
        ),
        "fig2_bayes_line.csv": csv_text(["x1", "x2"], [(boundary, cfg.x2_range[0]), (boundary, cfg.x2_range[1])]),
    }
    return results, files


def run_rates(cfg: RatesConfig, threads: int = 1):
    spec = HolderRegression(n=cfg.n_values[0], dim=cfg.dim, alpha=cfg.alpha, noise_sd=cfg.noise_sd, target_id=cfg.target, seed=cfg.seed)
    cfg.resolved_k = [_resolve_k(cfg.k, n, cfg.alpha, cfg.dim) for n in cfg.n_values]
    builder = winn_builder(cfg.k, cfg.delta, cfg.alpha, cfg.c)
    report = rate_sweep(builder, spec, cfg.n_values, cfg.n_test, cfg.replicates, threads)
    expected = -HolderParams(cfg.alpha, cfg.dim).rate_exponent
    results = {**report.to_dict(), "expected_rate": expected}
    rows = [(r.n, k, r.mean_excess_risk, r.std_error, r.replicates) for r, k in zip(report.records, cfg.resolved_k)]
    files = {"rates.csv": csv_text(["n", "k", "mean_excess_risk", "std_error", "replicates"], rows)}
    return results, files


def run_descent_cmd(cfg: DescentConfig, threads: int = 1):
    spec = DescentSpec(cfg.m, cfg.D, tuple(cfg.p_grid), cfg.noise_sd, cfg.signal_norm, cfg.replicates, cfg.seed)
    curve = run_descent(spec, threads)
    p, ge, se = curve.p, curve.mean_ge, curve.std_error
    results = curve.to_dict()
    results["argmax_p"] = int(p[np.argmax(ge)])
    if cfg.m in p and cfg.D in p:
        results["peak_to_overparameterized_ratio"] = float(ge[p == cfg.m][0] / ge[p == cfg.D][0])
    tail = p > cfg.m
    steps = np.diff(ge[tail])
    slack = 2 * np.hypot(se[tail][1:], se[tail][:-1])
    results["second_descent_nonincreasing"] = bool(np.all(steps <= slack))
    rows = [(r.p, r.mean_ge, r.std_error, r.min_singular_value) for r in curve.records]
    files = {"descent.csv": csv_text(["p", "mean_ge", "std_error", "min_singular_value"], rows)}
    return results, files


def run_islands(cfg: IslandsConfig, threads: int = 1):
    cfg.resolved_k = [_resolve_k(cfg.k, n, cfg.alpha, 2) for n in cfg.n_values]
    per_n = []
    for n in cfg.n_values:
        spec = Fig2Gaussians(n=n, flip_prob=cfg.flip_prob, separation=cfg.separation, seed=cfg.seed)
        stats = _map_replicates(
            lambda r: island_radii(spec.replicate(r), cfg.k, cfg.delta, cfg.alpha, cfg.max_radius, cfg.max_points),
            cfg.replicates,
            threads,
        )
        medians = [s.median for s in stats]
        pooled = np.concatenate([s.radii for s in stats])
        per_n.append(
            {
                "n": n,
                "replicate_medians": medians,
                "median_of_medians": float(np.nanmedian(medians)) if np.any(np.isfinite(medians)) else float("nan"),
                "pooled_median": float(np.median(pooled)) if len(pooled) else float("nan"),
                "islands_measured": int(len(pooled)),
                "mislabeled": int(sum(s.n_mislabeled for s in stats)),
                "skipped": int(sum(s.n_skipped for s in stats)),
                "all_mislabeled_self_misclassified": bool(all(s.self_misclassified for s in stats)),
            }
        )
    pairs = []
    for a, b in zip(per_n, per_n[1:]):
        ma, mb = np.array(a["replicate_medians"]), np.array(b["replicate_medians"])
        ok = np.isfinite(ma) & np.isfinite(mb)
        pairs.append(
            {
                "n_small": a["n"],
                "n_large": b["n"],
                "defined_pairs": int(ok.sum()),
                "pairs_shrinking": int(np.sum(mb[ok] < ma[ok])),
            }
        )
    rows = []
    for rec in per_n:
        for r, m in enumerate(rec["replicate_medians"]):
            rows.append((rec["n"], r, m))
    files = {"islands.csv": csv_text(["n", "replicate", "median_radius"], rows)}
    return {"per_n": per_n, "pairs": pairs}, files
