"""Batch command line: ``python -m capped_nn <command> [flags]``.

Commands: run, smv, crf, trace, selftest.  Exit codes: 0 ok, 1 config
error, 2 runtime error, 3 selftest failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import dyadic as dy
from .checks import cap_invariant_fuzz, dyadic_filter_fuzz, path_inequality_canned, oracle_equivalence
from .config import PRESETS, ConfigError, ExperimentConfig, parse_intervals, preset
from .harness import compare_learners, crf_frequency
from .partitions import cells_visited_curve, curve_to_csv, partition_from_spec, smv_ratio_report
from .processes import ScheduleError, make_trajectory
from .rng import derive_seed, parse_seed
from .spaces import target_from_spec
from .svg import line_chart

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME, EXIT_SELFTEST = 0, 1, 2, 3


def _provenance_line(cfg: ExperimentConfig, h: str) -> str:
    return f"# capped_nn {__version__} seed={cfg.seed} config_hash={h}"


def _config_hash(cfg: ExperimentConfig) -> str:
    from .harness import config_hash
    return config_hash(cfg.to_dict())


def _write(out_dir: Path, name: str, text: str) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    path.write_text(text)
    return path


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def cmd_run(cfg: ExperimentConfig) -> dict:
    """Monte-Carlo runs of every configured learner; writes report.csv/json and plot.svg."""
    cfg.validate()
    learners = cfg.learner_configs()
    aggs = compare_learners(cfg.process, cfg.target, learners, cfg.trials, cfg.seed,
                            cfg.resolved_checkpoints(), workers=cfg.workers)
    h = _config_hash(cfg)
    buf = io.StringIO()
    buf.write(_provenance_line(cfg, h) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["T", "learner", "mean_loss", "q10", "q90"])
    for name, agg in aggs.items():
        for T, m, lo, hi in zip(agg.checkpoints, agg.mean_loss, agg.quantile(0.1), agg.quantile(0.9)):
            w.writerow([T, name, f"{m:.6f}", f"{lo:.6f}", f"{hi:.6f}"])
    report = {
        "version": __version__,
        "seed": cfg.seed,
        "config_hash": h,
        "config": cfg.to_dict(),
        "learners": {name: agg.to_dict() for name, agg in aggs.items()},
    }
    svg = line_chart({name: (agg.checkpoints, agg.mean_loss) for name, agg in aggs.items()},
                     title=f"{cfg.preset}: mean average loss ({cfg.trials} trials, seed {cfg.seed})",
                     ylabel="average loss")
    out = Path(cfg.out_dir)
    _write(out, "report.csv", buf.getvalue())
    _write(out, "report.json", _json(report))
    _write(out, "plot.svg", svg.replace("<svg ", f"<!-- capped_nn {__version__} seed={cfg.seed} "
                                                 f"config_hash={h} -->\n<svg ", 1))
    return report


def cmd_smv(cfg: ExperimentConfig) -> dict:
    """Cells-visited curve of one trajectory under the configured partition."""
    cfg.validate()
    if not cfg.partition:
        raise ConfigError("smv needs a [partition] section")
    part = partition_from_spec(cfg.partition)
    traj = make_trajectory(cfg.process, cfg.seed, target_from_spec(cfg.target))
    rep = smv_ratio_report(cells_visited_curve(traj, part, cfg.resolved_checkpoints()))
    h = _config_hash(cfg)
    out = Path(cfg.out_dir)
    _write(out, "smv.csv", _provenance_line(cfg, h) + "\n" + curve_to_csv(rep))
    result = {"version": __version__, "seed": cfg.seed, "config_hash": h,
              "config": cfg.to_dict(), "checkpoints": rep.checkpoints, "counts": rep.counts,
              "ratios": [round(r, 12) for r in rep.ratios], "verdict": rep.verdict}
    _write(out, "smv.json", _json(result))
    return result


def cmd_crf(cfg: ExperimentConfig) -> dict:
    """Relative frequency of a finite union of intervals, averaged over trials."""
    cfg.validate()
    intervals = parse_intervals(cfg.intervals or "[0/2^0,1/2^1)")
    ckpts = cfg.resolved_checkpoints()
    target = target_from_spec(cfg.target)
    curves = []
    seeds = [derive_seed(cfg.seed, "trial", i) for i in range(cfg.trials)]
    for s in seeds:
        traj = make_trajectory(cfg.process, s, target)
        curves.append([f for _, f in crf_frequency(traj, intervals, ckpts)])
    arr = np.array(curves)
    mean = arr.mean(axis=0)
    h = _config_hash(cfg)
    buf = io.StringIO()
    buf.write(_provenance_line(cfg, h) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["T", "mean_frequency", "min", "max"])
    for T, m, lo, hi in zip(ckpts, mean, arr.min(axis=0), arr.max(axis=0)):
        w.writerow([T, f"{m:.6f}", f"{lo:.6f}", f"{hi:.6f}"])
    out = Path(cfg.out_dir)
    _write(out, "crf.csv", buf.getvalue())
    result = {"version": __version__, "seed": cfg.seed, "config_hash": h, "config": cfg.to_dict(),
              "checkpoints": ckpts, "mean_frequency": [round(float(v), 12) for v in mean],
              "trial_final": [round(c[-1], 12) for c in curves], "seeds": seeds}
    _write(out, "crf.json", _json(result))
    return result


def cmd_trace(cfg: ExperimentConfig, binary: bool = False) -> Path:
    """Dump one trajectory as CSV (and optionally the binary cache)."""
    cfg.validate()
    traj = make_trajectory(cfg.process, cfg.seed, target_from_spec(cfg.target))
    out = Path(cfg.out_dir)
    path = _write(out, "trajectory.csv", traj.to_csv())
    if binary:
        out.joinpath("trajectory.bin").write_bytes(traj.to_bytes())
    return path


def cmd_selftest(quick: bool = True, corrupt_tie_break: bool = False, stream=None) -> bool:
    """Run the invariant suites and print one verdict line each."""
    stream = stream or sys.stdout
    scale = 1 if not quick else 10
    results = [dyadic_filter_fuzz(100_000 // scale)]
    results += oracle_equivalence(max(20, 500 // scale), corrupt_tie_break=corrupt_tie_break)
    results += cap_invariant_fuzz(max(20, 1000 // scale))
    results.append(path_inequality_canned())
    for r in results:
        print(r.line(), file=stream)
    ok = all(r.ok for r in results)
    print("selftest: " + ("all passed" if ok else "FAILED"), file=stream)
    return ok


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="capped_nn", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"capped_nn {__version__}")
    sub = p.add_subparsers(dest="command")

    def common(sp):
        sp.add_argument("--preset", choices=sorted(PRESETS))
        sp.add_argument("--config", help="INI experiment file (flags override it)")
        sp.add_argument("--seed", help="decimal or 0x-prefixed hex")
        sp.add_argument("--horizon", type=int)
        sp.add_argument("--trials", type=int)
        sp.add_argument("--learner", action="append",
                        help="memo, 1nn, 2c1nn, kc1nn, knn, knn:floor_sqrt, knn:5 (repeatable)")
        sp.add_argument("--k", type=int, help="cap for kc1nn learners")
        sp.add_argument("--out-dir")
        sp.add_argument("--workers", type=int, help="parallel trials (default: CPU count)")

    for name, helptext in (("run", "learner-vs-process experiment"),
                           ("smv", "cells-visited curve and verdict"),
                           ("crf", "relative-frequency check"),
                           ("trace", "dump a trajectory")):
        sp = sub.add_parser(name, help=helptext)
        common(sp)
        if name == "trace":
            sp.add_argument("--binary", action="store_true", help="also write trajectory.bin")
    st = sub.add_parser("selftest", help="run the invariant suites")
    st.add_argument("--full", action="store_true", help="full-size suites")
    st.add_argument("--corrupt-tie-break", action="store_true", help=argparse.SUPPRESS)
    return p


def _load_config(args) -> ExperimentConfig:
    if args.config:
        cfg = ExperimentConfig.from_ini(Path(args.config).read_text())
    elif args.preset:
        cfg = preset(args.preset)
    else:
        cfg = ExperimentConfig()
    if args.config and args.preset:
        cfg.preset = args.preset
    return cfg.with_overrides(
        seed=parse_seed(args.seed) if args.seed is not None else None,
        horizon=args.horizon, trials=args.trials, learners=args.learner, k=args.k,
        out_dir=args.out_dir,
        workers=args.workers if args.workers is not None else (os.cpu_count() or 1),
    )


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else argv
    if not argv:
        parser.print_usage()
        return EXIT_CONFIG
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage()
        return EXIT_CONFIG
    if args.command == "selftest":
        ok = cmd_selftest(quick=not args.full, corrupt_tie_break=args.corrupt_tie_break)
        return EXIT_OK if ok else EXIT_SELFTEST
    try:
        cfg = _load_config(args)
        if args.command == "run":
            rep = cmd_run(cfg)
            for name, agg in rep["learners"].items():
                print(f"{name}: mean loss at T={agg['checkpoints'][-1]} = {agg['mean_loss'][-1]:.4f}")
        elif args.command == "smv":
            rep = cmd_smv(cfg)
            print(f"verdict: {rep['verdict']} (ratio at T={rep['checkpoints'][-1]}: "
                  f"{rep['ratios'][-1]:.4f})")
        elif args.command == "crf":
            rep = cmd_crf(cfg)
            print(f"mean frequency at T={rep['checkpoints'][-1]}: {rep['mean_frequency'][-1]:.4f}")
        elif args.command == "trace":
            print(cmd_trace(cfg, binary=args.binary))
        print(f"config_hash={_config_hash(cfg)} seed={cfg.seed} out_dir={cfg.out_dir}")
    except dy.PrecisionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (ConfigError, ScheduleError, ValueError, KeyError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
