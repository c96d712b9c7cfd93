"""Command line entry point ``exterior-dw``.

Exit codes: 0 when every check run passed, 1 when any failed, 2 on a
configuration error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from . import experiments as ex
from .config import ConfigError, ExperimentConfig, default_config, parse_config
from .harness import emit_summary, fit_exponent, run_sweep

log = logging.getLogger("exterior_dw")

COMMANDS = {
    "heat-decay": (ex.check_heat_decay, ex.check_supersolution),
    "linear-estimates": (ex.check_positivity, ex.check_l1dmu, ex.check_matsumura, ex.check_oracles, ex.check_modal),
    "inequalities": (ex.check_hardy, ex.check_log_gn),
    "global-decay": (ex.check_global_decay,),
}


def _load(args, kind: str) -> ExperimentConfig:
    cfg = parse_config(args.config) if args.config else default_config(kind)
    over = {}
    if args.out is not None:
        over["out_dir"] = Path(args.out)
    if args.seed is not None:
        over["seed"] = args.seed
    return replace(cfg, **over) if over else cfg


def _heat(cfg: ExperimentConfig, jobs: int):
    from .heat import heat_decay_report
    from .semilinear import default_data

    g = default_data(cfg.a, cfg.dr)
    for q in cfg.heat_q:
        rep = heat_decay_report(g, q, cfg.heat_times)
        (cfg.out_dir / f"heat_decay_q{q:g}.json").write_text(rep.to_json() + "\n")
    return [ex.check_heat_decay(dr=cfg.dr, qs=cfg.heat_q, a=cfg.a), ex.check_supersolution(seed=cfg.seed)]


def _linear(cfg: ExperimentConfig, jobs: int):
    from .linear import WaveConfig, dw_linear_evolve
    from .semilinear import default_data

    wcfg = WaveConfig(dt=cfg.dt, cfl_safety=cfg.cfl, margin=cfg.margin, tol_tail=cfg.tol_tail)
    g = default_data(cfg.a, cfg.dr)
    g = g.transfer(wcfg.grid_for(g.support_radius(), 10.0, cfg.dr))
    dw_linear_evolve(g, 10.0, wcfg, np.arange(11.0)).to_csv(cfg.out_dir / "trajectory.csv")
    return [ex.check_positivity(seed=cfg.seed), ex.check_l1dmu(), ex.check_matsumura(a=cfg.a), ex.check_oracles(),
            ex.check_modal()]


def _inequalities(cfg: ExperimentConfig, jobs: int):
    from .inequalities import constant_sweep

    reports = []
    for fam in cfg.families:
        reports.append(constant_sweep("hardy", fam))
        for q in cfg.ineq_q:
            reports.append(constant_sweep("gn", fam, q))
            reports.append(constant_sweep("log_gn", fam, q))
    (cfg.out_dir / "inequalities.json").write_text(json.dumps([asdict(r) for r in reports], indent=2) + "\n")
    return [ex.check_hardy(seed=cfg.seed), ex.check_log_gn(qs=cfg.ineq_q)]


def _sweep(cfg: ExperimentConfig, jobs: int):
    path = cfg.out_dir / f"lifespan_p{cfg.p:g}.csv"
    if cfg.p < 2:
        return [ex.check_subcritical(cfg, jobs, path)]
    if cfg.p == 2:
        return [ex.check_critical(cfg, jobs, path)]
    recs = run_sweep(cfg, jobs, path)
    try:
        fit = fit_exponent(recs, "global")
        (cfg.out_dir / "fit_global.json").write_text(json.dumps(asdict(fit), indent=2) + "\n")
    except ValueError as exc:
        log.warning("no global fit: %s", exc)
    return []


def _global(cfg: ExperimentConfig, jobs: int):
    return [ex.check_global_decay(p=cfg.p if cfg.p > 2 else 3.0, a=cfg.a, csv_path=cfg.out_dir / "functionals.csv")]


def _supersolution(cfg: ExperimentConfig, jobs: int):
    """Heat-comparison lifespan next to the measured wave lifespan, per epsilon."""
    import csv

    from .semilinear import default_data, heat_supersolution_lifespan

    recs = run_sweep(cfg, jobs, cfg.out_dir / f"lifespan_p{cfg.p:g}.csv")
    g = default_data(cfg.a, cfg.dr)
    with (cfg.out_dir / "supersolution_compare.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["p", "epsilon", "T_heat", "loglog_T_heat", "heat_reached", "T_measured", "converged"])
        for rec in recs:
            s = heat_supersolution_lifespan(g, rec.epsilon, cfg.p, horizon=min(cfg.horizon, 1e4), extrapolate=True)
            w.writerow([repr(cfg.p), repr(rec.epsilon), repr(s.time), repr(s.log_log_time), s.reached,
                        repr(rec.T_measured), rec.converged])
    return []


RUNNERS = {
    "heat-decay": _heat,
    "linear-estimates": _linear,
    "inequalities": _inequalities,
    "lifespan-sweep": _sweep,
    "global-decay": _global,
    "supersolution-compare": _supersolution,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="exterior-dw", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in (*RUNNERS, "verify-all"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", type=Path, help="INI experiment file (defaults used when omitted)")
        sp.add_argument("--out", type=Path, help="output directory (overrides [output] dir)")
        sp.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
        sp.add_argument("--seed", type=int, help="random seed (overrides [experiment] seed)")
    return ap


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify-all":
            cfg = _load(args, "lifespan-sweep")
            results = _verify_all(cfg, args.jobs)
        else:
            cfg = _load(args, args.command)
            if args.config and cfg.kind != args.command:
                raise ConfigError([f"experiment.kind: file declares {cfg.kind!r} but command is {args.command!r}"])
            cfg.out_dir.mkdir(parents=True, exist_ok=True)
            results = RUNNERS[args.command](cfg, args.jobs)
    except ConfigError as exc:
        for v in exc.violations:
            print(f"config error: {v}", file=sys.stderr)
        return 2
    for r in results:
        print(r.line())
    return emit_summary(results, cfg.out_dir)


def _verify_all(cfg: ExperimentConfig, jobs: int):
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    results = []
    for check in ex.ALL_CHECKS:
        if check is ex.check_subcritical:
            r = check(jobs=jobs, csv_path=cfg.out_dir / "lifespan_p1.5.csv")
        elif check is ex.check_critical:
            r = check(jobs=jobs, csv_path=cfg.out_dir / "lifespan_p2.csv")
        elif check is ex.check_global_decay:
            r = check(csv_path=cfg.out_dir / "functionals_p3.csv")
        else:
            r = check()
        log.info(r.line())
        results.append(r)
    return results


if __name__ == "__main__":
    sys.exit(main())
