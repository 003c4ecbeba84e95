"""Command-line entry point: ``irsa threshold|predict|simulate|frame|reproduce``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .degree import mean_degree, resolve_distribution
from .density_evolution import bp_threshold, compute_gamma
from .errors import ConfigError, IRSAError
from .frame import activity_for_load, generate_frame, sic_decode
from .harness import (
    config_from_mapping,
    load_config,
    load_range,
    prediction_params_for,
    run_sweep,
    write_outputs,
)
from .scaling import fep_predict, plp_predict

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3

log = logging.getLogger("irsa")

# (m, quantity) per reproduced figure
FIGURES = {3: (200, "fer"), 4: (50, "plr"), 5: (200, "plr")}


def cmd_threshold(args) -> int:
    dist, _ = resolve_distribution(args.dist)
    res = bp_threshold(dist, tol=args.tol)
    out = {
        "g_star": res.g_star,
        "gamma": compute_gamma(dist),
        "mean_degree": mean_degree(dist),
        "bracket_width": res.bracket_width,
    }
    print(json.dumps(out))
    return EXIT_OK


def cmd_predict(args) -> int:
    _, params = prediction_params_for(args.dist, args.alpha0, args.beta0)
    loads = [float(x) for x in args.g.split(",") if x.strip()]
    print("g,fep,plp")
    for g in loads:
        fep = fep_predict(args.m, g, params, args.n)
        plp = plp_predict(args.m, g, params, args.n)
        print(f"{g:.6g},{fep:.6g},{plp:.6g}")
    return EXIT_OK


def _simulate_config(args):
    flags = {
        "dist": args.dist,
        "m": args.m,
        "activity": args.activity,
        "max_frames": args.frames,
        "target_errors": args.target_errors,
        "seed": args.seed,
        "workers": args.workers,
        "emit_floor": True if args.floor else None,
        "emit_prediction": True if args.predict else None,
        "alpha0": args.alpha0,
        "beta0": args.beta0,
    }
    if args.g_start is not None or args.g_stop is not None:
        if args.g_start is None or args.g_stop is None:
            raise ConfigError("--g-start and --g-stop go together")
        flags["load_grid"] = load_range(args.g_start, args.g_stop, args.g_step)
    if args.config:
        return load_config(args.config, **flags)
    return config_from_mapping({k: v for k, v in flags.items() if v is not None})


def _plot(result_rows, label, out: Path, emit_quantities=("fer", "plr")) -> list[Path]:
    from .plotting import save_figure

    return [
        save_figure({label: result_rows}, out.with_suffix(f".{q}.png"), quantity=q)
        for q in emit_quantities
    ]


def cmd_simulate(args) -> int:
    cfg = _simulate_config(args)

    def progress(row):
        log.info("g=%.4g frames=%d errors=%d fer=%.4g plr=%.4g",
                 row.g, row.frames_run, row.frame_errors, row.fer, row.plr)

    result = run_sweep(cfg, progress=progress)
    if args.out:
        out = Path(args.out)
        meta = write_outputs(result, out)
        log.info("wrote %s and %s", out, meta)
        if args.plot:
            for p in _plot(result.rows, cfg.dist_name or str(cfg.dist), out):
                log.info("wrote %s", p)
    else:
        if args.plot:
            raise ConfigError("--plot needs --out (figures are written next to the CSV)")
        sys.stdout.write(result.to_csv())
    return EXIT_OK


def cmd_frame(args) -> int:
    dist, _ = resolve_distribution(args.dist)
    rng = np.random.default_rng(args.seed)
    activity = activity_for_load(args.activity, args.g, args.m)
    frame = generate_frame(args.m, dist, activity, rng)
    sys.stdout.write(frame.dump())
    outcome = sic_decode(frame)
    log.info("active=%d resolved=%d unresolved=%d",
             len(frame.users), len(outcome.resolved), len(outcome.unresolved))
    return EXIT_OK


def cmd_reproduce(args) -> int:
    from .plotting import save_figure

    m, quantity = FIGURES[args.figure]
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    curves = {}
    for name in args.dists.split(","):
        cfg = config_from_mapping({
            "dist": name, "m": m,
            "load_grid": load_range(args.g_start, args.g_stop, args.g_step),
            "max_frames": args.frames, "target_errors": args.target_errors,
            "seed": args.seed, "workers": args.workers,
            "emit_prediction": True, "emit_floor": True,
        })
        log.info("figure %d: %s at m=%d", args.figure, name, m)
        result = run_sweep(cfg)
        write_outputs(result, outdir / f"fig{args.figure}_{name}_m{m}.csv")
        curves[name] = result.rows
    path = save_figure(curves, outdir / f"fig{args.figure}_m{m}_{quantity}.png", quantity,
                       title=f"IRSA, m = {m}")
    log.info("wrote %s", path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="irsa", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("threshold", help="BP threshold and gamma via density evolution")
    p.add_argument("--dist", required=True, help="built-in name or 'd:p,d:p'")
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("predict", help="scaling-law FEP/PLP as CSV")
    p.add_argument("--dist", required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--g", required=True, help="comma-separated loads")
    p.add_argument("--n", type=int, default=None, help="finite population size")
    p.add_argument("--alpha0", type=float)
    p.add_argument("--beta0", type=float)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("simulate", help="Monte Carlo sweep over loads, CSV out")
    p.add_argument("--config", help="YAML/JSON file with ExperimentConfig fields")
    p.add_argument("--dist")
    p.add_argument("--m", type=int)
    p.add_argument("--g-start", type=float)
    p.add_argument("--g-stop", type=float)
    p.add_argument("--g-step", type=float, default=0.05)
    p.add_argument("--activity", help="poisson | binomial:<n> | fixed")
    p.add_argument("--frames", type=int, help="max frames per point")
    p.add_argument("--target-errors", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--floor", action="store_true", help="add fep_floor,plp_floor columns")
    p.add_argument("--predict", action="store_true", help="add fep_pred,plp_pred columns")
    p.add_argument("--alpha0", type=float)
    p.add_argument("--beta0", type=float)
    p.add_argument("--out", help="CSV path; a .meta.json sidecar is written next to it")
    p.add_argument("--plot", action="store_true", help="also write <out>.fer.png and <out>.plr.png")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("frame", help="dump one random frame (debug format)")
    p.add_argument("--dist", required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--g", type=float, required=True)
    p.add_argument("--activity", default="poisson", choices=["poisson", "fixed"])
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_frame)

    p = sub.add_parser("reproduce", help="regenerate a published-style figure with CSVs")
    p.add_argument("--figure", type=int, choices=sorted(FIGURES), required=True)
    p.add_argument("--dists", default="x3,x4,x5,lambda1,lambda2")
    p.add_argument("--g-start", type=float, default=0.3)
    p.add_argument("--g-stop", type=float, default=1.0)
    p.add_argument("--g-step", type=float, default=0.02)
    p.add_argument("--frames", type=int, default=100_000)
    p.add_argument("--target-errors", type=int, default=200)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--outdir", default="figures")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except IRSAError as exc:
        print(f"irsa: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001
        log.debug("runtime failure", exc_info=True)
        print(f"irsa: runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
