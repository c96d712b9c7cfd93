"""Lifespan sweeps, scaling-law fits and summary emission."""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .config import ExperimentConfig
from .semilinear import LifespanRecord, default_data, lifespan_estimate

SWEEP_COLUMNS = ["p", "epsilon", "T_measured", "converged", "Q_value", "grid_n", "dt"]


def _one_point(args) -> LifespanRecord:
    cfg, eps = args
    try:
        g = default_data(cfg.a, cfg.dr)
        return lifespan_estimate(g, eps, cfg.p, cfg.horizon, cfg.evolution())
    except Exception as exc:  # isolation: a failed point becomes a flagged row
        return LifespanRecord(cfg.p, eps, math.nan, False, math.nan, 0, math.nan, status="failed",
                              error=f"{exc.__class__.__name__}: {exc}")


def run_sweep(cfg: ExperimentConfig, jobs: int = 1, csv_path=None) -> list[LifespanRecord]:
    """Lifespan at every epsilon of ``cfg``, sorted by epsilon.

    Points run in a pool of ``jobs`` worker processes (inline for
    ``jobs=1``). Any exception inside a point is caught and recorded on its
    row with ``converged = False``.
    """
    if not cfg.epsilons:
        raise ValueError("epsilon grid is empty")
    tasks = [(cfg, float(e)) for e in sorted(cfg.epsilons)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_one_point, tasks))
    else:
        records = [_one_point(t) for t in tasks]
    if csv_path is not None:
        write_sweep_csv(records, csv_path)
    return records


def write_sweep_csv(records: Sequence[LifespanRecord], path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SWEEP_COLUMNS)
        for rec in records:
            w.writerow([repr(float(x)) if isinstance(x, float) else str(x) for x in rec.row()])
    return path


def read_sweep_csv(path) -> list[LifespanRecord]:
    out = []
    with Path(path).open() as fh:
        for row in csv.DictReader(fh):
            out.append(LifespanRecord(float(row["p"]), float(row["epsilon"]), float(row["T_measured"]),
                                      row["converged"] == "True", float(row["Q_value"]), int(row["grid_n"]),
                                      float(row["dt"])))
    return out


@dataclass
class FitResult:
    """Log-space least-squares fit.

    For ``sub-2`` and ``global``, ``exponent`` is the slope and
    ``constant`` the prefactor; ``residual`` is the RMS of log residuals.
    For ``critical-Q``, ``q_min``, ``q_max`` and ``q_ratio`` describe the
    band and ``exponent`` holds the ratio.
    """

    model: str
    exponent: float
    constant: float
    residual: float
    n_points: int
    expected: float | None = None
    q_min: float | None = None
    q_max: float | None = None
    q_ratio: float | None = None
    extra: dict = field(default_factory=dict)


def subcritical_abscissa(eps):
    """``eps^{-1} log(1/eps)``."""
    eps = np.asarray(eps, dtype=float)
    return np.log(1.0 / eps) / eps


def critical_q(eps, T):
    """``eps log(1 + log(1+T))``."""
    return np.asarray(eps, dtype=float) * np.log1p(np.log1p(np.asarray(T, dtype=float)))


def fit_exponent(records: Sequence[LifespanRecord], model: str) -> FitResult:
    """Fit measured lifespans against one of the scaling models.

    ``sub-2``: ``log T`` against ``log(eps^{-1} log(1/eps))``; expected slope
    ``(p-1)/(2-p)``. ``critical-Q``: the band of ``eps log(1+log(1+T))``.
    ``global``: ``log T`` against ``log(1/eps)`` over the points that blew up.
    Only converged records are used and at least three are required.
    """
    recs = [r for r in records if r.converged and math.isfinite(r.T_measured)]
    if len(recs) < 3:
        raise ValueError(f"{model} fit needs at least 3 converged records, got {len(recs)}")
    eps = np.array([r.epsilon for r in recs])
    T = np.array([r.T_measured for r in recs])
    p = recs[0].p
    if model == "critical-Q":
        q = critical_q(eps, T)
        ratio = float(q.max() / q.min())
        return FitResult(model, ratio, float(np.exp(np.mean(np.log(q)))), float(np.std(np.log(q))), len(recs),
                         q_min=float(q.min()), q_max=float(q.max()), q_ratio=ratio)
    if model == "sub-2":
        if np.any(eps >= 1):
            raise ValueError("sub-2 model needs eps < 1 so that log(1/eps) > 0")
        x = subcritical_abscissa(eps)
        expected = (p - 1) / (2 - p) if p < 2 else None
    elif model == "global":
        x = 1.0 / eps
        expected = None
    else:
        raise ValueError(f"unknown model {model!r}")
    lx, lT = np.log(x), np.log(T)
    slope, icpt = np.polyfit(lx, lT, 1)
    res = lT - (slope * lx + icpt)
    return FitResult(model, float(slope), float(np.exp(icpt)), float(np.sqrt(np.mean(res**2))), len(recs),
                     expected=expected)


# --- summaries ----------------------------------------------------------------


def emit_summary(results, out_dir) -> int:
    """Write ``summary.json`` and ``summary.md``; return the process exit code.

    ``results`` is a sequence of :class:`~exterior_dw.experiments.CheckResult`.
    The exit code is 0 when every check passed (or there were none) and 1
    otherwise.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = [r.as_dict() for r in results]
    passed = all(r["passed"] for r in rows)
    doc = {"all_passed": passed, "checks": rows}
    (out / "summary.json").write_text(json.dumps(doc, indent=2, default=_jsonable) + "\n")
    lines = ["# Verification summary", ""]
    if rows:
        lines += ["| # | statement | group | result | key numbers |", "|---|---|---|---|---|"]
        for r in rows:
            nums = ", ".join(f"{k}={_fmt(v)}" for k, v in r["metrics"].items() if not isinstance(v, (list, dict)))
            lines.append(f"| {r['criterion']} | {r['statement']} | {r['group']} | {'pass' if r['passed'] else 'FAIL'} | {nums} |")
    else:
        lines.append("No checks were run.")
    lines.append("")
    (out / "summary.md").write_text("\n".join(lines))
    return 0 if passed else 1


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.4g}"
    return str(v)


def _jsonable(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, Path):
        return str(o)
    if hasattr(o, "__dataclass_fields__"):
        return asdict(o)
    raise TypeError(f"not serialisable: {type(o).__name__}")
