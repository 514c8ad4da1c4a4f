"""Command line interface: fit / kww / simulate subcommands."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import credset, kww, metrics, rankdist
from .domain import Dataset, DomainError, rank_of
from .fileio import FMT, fmt, parse_dataset, write_matrix_csv, write_rows_csv
from .posterior import HbConfig, gibbs_hb, sample_ub, summarize
from .simlab import RESULT_COLUMNS, SimConfig, run_study


def _round12(obj):
    """Round floats to the pinned 12 significant digits for JSON output."""
    if isinstance(obj, float):
        return float(FMT % obj)
    if isinstance(obj, dict):
        return {k: _round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round12(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _round12(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return float(FMT % float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


def _write_json(path, payload):
    with open(path, "w") as f:
        json.dump(_round12(payload), f, indent=2, sort_keys=True)
        f.write("\n")


def _marginal_quantile(marginal: np.ndarray, q: float) -> int:
    return int(np.searchsorted(np.cumsum(marginal), q) + 1)


def _cmd_fit(args) -> int:
    ds = parse_dataset(args.dataset)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    if args.model == "ub":
        draws = sample_ub(ds, args.samples, args.seed)
        center, dispersion = ds.y, np.diag(ds.d)
        summary = summarize(draws)
    else:
        cfg = HbConfig(
            samples=args.samples,
            burn_in=args.burnin,
            thin=args.thin,
            seed=args.seed,
            include_intercept=not args.no_intercept,
        )
        draws = gibbs_hb(ds, cfg)
        summary = summarize(draws)
        center, dispersion = summary.mean, summary.cov

    if args.set == "cartesian":
        sel = credset.cartesian_select(draws, args.alpha)
        dist = rankdist.build_distribution(
            sel, draws, args.weights, mahal_context=(center, dispersion)
        )
        bounds = np.column_stack([sel.cart.lower, sel.cart.upper])
        size = metrics.orthotope_size(bounds)
        geometry_meta = {"kappa": sel.cart.kappa, "bounds": bounds}
    else:
        sel = credset.elliptical_select(draws, center, dispersion, args.alpha)
        dist = rankdist.build_distribution(sel, draws, args.weights)
        size = metrics.ellipse_size(np.linalg.inv(dispersion), ds.m, sel.ellip.cutoff)
        geometry_meta = {"cutoff": sel.ellip.cutoff}

    write_matrix_csv(out / "rank_matrix.csv", dist.probs, ds.ids)

    observed = rank_of(ds.y)
    gold_ranks = ds.gold_ranks() if ds.has_gold else None
    header = ["id", "y", "observed_rank", "expected_rank", "rank_q05", "rank_q50", "rank_q95"]
    if ds.has_gold:
        header += ["gold_rank", "exp_abs_dev"]
    rows = []
    for i, ident in enumerate(ds.ids):
        marginal = dist.probs[:, i]
        row = [
            ident,
            ds.y[i],
            observed[i],
            rankdist.expected_rank(dist, i),
            _marginal_quantile(marginal, 0.05),
            _marginal_quantile(marginal, 0.50),
            _marginal_quantile(marginal, 0.95),
        ]
        if ds.has_gold:
            row += [gold_ranks[i], metrics.expected_abs_deviation(marginal, gold_ranks[i])]
        rows.append(row)
    write_rows_csv(out / "rank_summary.csv", header, rows)

    _write_json(
        out / "size_report.json",
        {
            "geometry": args.set,
            "alpha": args.alpha,
            "selected": sel.K,
            "samples": draws.S,
            "volume": size.volume,
            "vol_mth_root": size.vol_mth_root,
            "avg_length": size.avg_length,
            "per_side_lengths": size.per_side_lengths,
            **geometry_meta,
        },
    )
    post = {
        "model": dist.model,
        "seed": args.seed,
        "samples": draws.S,
        "mean": dict(zip(ds.ids, summary.mean)),
    }
    if summary.a_mean is not None:
        post["a_mean"] = summary.a_mean
        post["a_median"] = summary.a_median
    if ds.has_gold:
        post["tese_direct"] = metrics.tese(ds.y, ds.gold)
        post["tese_posterior_mean"] = metrics.tese(summary.mean, ds.gold)
    _write_json(out / "posterior_summary.json", post)

    if args.plot_data:
        _write_plot_data(out / "plot_data.csv", ds, dist, args.alpha)
    return 0


def _write_plot_data(path, ds: Dataset, dist, alpha):
    """Tidy overlay data: KWW ranges, nonzero credible cells, observed and
    gold ranks.  No image rendering; feed this to any plotter."""
    ranks = kww.rank_confidence_set(ds, alpha, kww.INDEPENDENCE)
    observed = rank_of(ds.y, tie_rule="highest")
    rows = []
    for i, ident in enumerate(ds.ids):
        rows.append(["kww_range", ident, int(ranks.rank_lo[i]), float(ranks.rank_hi[i])])
        rows.append(["observed_rank", ident, int(observed[i]), 1.0])
        for k in range(ds.m):
            p = dist.probs[k, i]
            if p > 0:
                rows.append(["credible_cell", ident, k + 1, float(p)])
    if ds.has_gold:
        gold_ranks = ds.gold_ranks()
        for i, ident in enumerate(ds.ids):
            rows.append(["gold_rank", ident, gold_ranks[i], 1.0])
    write_rows_csv(path, ["kind", "id", "rank", "value"], rows)


def _cmd_kww(args) -> int:
    ds = parse_dataset(args.dataset)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    ranks = kww.rank_confidence_set(ds, args.alpha, args.method)
    gold_ranks = ds.gold_ranks() if ds.has_gold else None
    rows = []
    for i, ident in enumerate(ds.ids):
        eps = (
            fmt(metrics.kww_abs_deviation(ranks.rank_lo[i], ranks.rank_hi[i], gold_ranks[i]))
            if ds.has_gold
            else ""
        )
        rows.append(
            [
                ident,
                ranks.intervals[i, 0],
                ranks.intervals[i, 1],
                int(ranks.rank_lo[i]),
                int(ranks.rank_hi[i]),
                eps,
            ]
        )
    write_rows_csv(out / "kww_ranksets.csv", ["id", "L", "U", "rank_lo", "rank_hi", "eps_kww"], rows)
    return 0


def _cmd_simulate(args) -> int:
    with open(args.config) as f:
        raw = json.load(f)
    for key in ("a_grid", "beta1_grid", "d"):
        if key in raw:
            raw[key] = tuple(raw[key])
    cfg = SimConfig(**raw)
    rows = run_study(cfg)
    write_rows_csv(
        args.out,
        RESULT_COLUMNS,
        [[r[c] if isinstance(r[c], str) else float(r[c]) for c in RESULT_COLUMNS] for r in rows],
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rankcred",
        description="Credible distributions of overall rankings from noisy estimates",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="fit a credible rank distribution to a dataset")
    fit.add_argument("dataset", help="CSV with columns id,y,d[,x1..xp,gold]")
    fit.add_argument("--model", choices=["ub", "hb"], default="hb")
    fit.add_argument("--set", choices=["cartesian", "elliptical"], default="cartesian")
    fit.add_argument("--weights", choices=["equal", "mahal"], default="equal")
    fit.add_argument("--alpha", type=float, default=0.1)
    fit.add_argument("--samples", type=int, default=50000)
    fit.add_argument("--burnin", type=int, default=2000)
    fit.add_argument("--thin", type=int, default=1)
    fit.add_argument("--seed", type=int, default=0)
    fit.add_argument("--no-intercept", action="store_true")
    fit.add_argument("--out", default=".")
    fit.add_argument("--plot-data", action="store_true")
    fit.set_defaults(func=_cmd_fit)

    kww_p = sub.add_parser("kww", help="frequentist joint rank confidence set")
    kww_p.add_argument("dataset")
    kww_p.add_argument("--alpha", type=float, default=0.1)
    kww_p.add_argument(
        "--method", choices=["bonferroni", "independence"], default="independence"
    )
    kww_p.add_argument("--out", default=".")
    kww_p.set_defaults(func=_cmd_kww)

    sim = sub.add_parser("simulate", help="run the comparative simulation study")
    sim.add_argument("--config", required=True, help="JSON mirroring SimConfig fields")
    sim.add_argument("--out", required=True, help="result CSV path")
    sim.set_defaults(func=_cmd_simulate)
    return parser


def run_command(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (DomainError, OSError, json.JSONDecodeError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_command())
