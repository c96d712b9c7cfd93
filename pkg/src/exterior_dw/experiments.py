"""The twelve verification checks, shared by the CLI and the acceptance tests.

Each ``check_*`` function runs one experiment at its default desk-scale
settings and returns a :class:`CheckResult` with a pass flag, the numbers
behind it, and the wall time against its budget.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import heat, inequalities as ineq, linear, semilinear
from .config import ExperimentConfig, default_config
from .harness import critical_q, fit_exponent, run_sweep
from .radial import RadialField, grid_with_spacing


@dataclass
class CheckResult:
    criterion: int
    key: str
    statement: str
    group: str
    passed: bool
    tolerance: str
    metrics: dict = field(default_factory=dict)
    runtime: float = 0.0
    budget: float = math.inf

    def as_dict(self) -> dict:
        return asdict(self)

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] #{self.criterion:<2d} {self.key:<24s} {self.tolerance} ({self.runtime:.1f} s / {self.budget:.0f} s)"


def _timed(criterion, key, statement, group, tolerance, budget):
    """Decorator: time the body, fold the budget into the verdict."""

    def wrap(fn: Callable[..., tuple[bool, dict]]):
        def run(*args, **kwargs) -> CheckResult:
            t0 = time.perf_counter()
            ok, metrics = fn(*args, **kwargs)
            dt = time.perf_counter() - t0
            metrics["within_budget"] = dt <= budget
            return CheckResult(criterion, key, statement, group, bool(ok and dt <= budget), tolerance,
                               _plain(metrics), dt, budget)

        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        run.criterion = criterion
        return run

    return wrap


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return obj


def random_bumps(count: int, seed: int, r_lo=(1.0, 4.0), width=(0.5, 3.0), powers=(1.0, 2.0, 3.0)):
    """Random ``((r-a)(b-r))_+^k`` profiles."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        a = float(rng.uniform(*r_lo)) if rng.random() < 0.7 else 1.0
        b = a + float(rng.uniform(*width))
        out.append(ineq.bump(a, b, float(rng.choice(powers))))
    return out


def sample_on(profile: ineq.Profile, dr: float, r_max: float) -> RadialField:
    grid = grid_with_spacing(max(r_max, profile.r_hi), dr)
    v = np.asarray(profile.fn(grid.r), dtype=float)
    v[0] = 0.0
    return RadialField(grid, v)


# --- 1 -------------------------------------------------------------------------


@_timed(1, "critical-hardy", "critical Hardy inequality with constant 1/4", "functional inequalities",
        "hardy_ratio <= 1.001 on 500 fuzzed fields + near-extremal family", 60)
def check_hardy(seed: int = 0, n_fuzz: int = 500, bound: float = 1.001):
    fuzz = [ineq.hardy_ratio(f) for f in ineq.random_dirichlet_fields(n_fuzz, seed)]
    ext = ineq.constant_sweep("hardy", "hardy_extremal")
    worst = max(max(fuzz), ext.fitted_constant)
    trend = bool(np.all(np.diff(ext.ratios) > 0))
    return worst <= bound, {"max_fuzz": max(fuzz), "extremal_ratios": ext.ratios, "extremal_increasing": trend,
                            "max_ratio": worst, "refinement_drift": ext.refinement_drift}


# --- 2 -------------------------------------------------------------------------


@_timed(2, "positivity", "nonnegative data give nonnegative linear solutions", "linear propagator",
        "min u >= -1e-6 |g|_inf for 50 bumps, T=50, both solvers; undershoot shrinks >= 4x", 300)
def check_positivity(seed: int = 0, count: int = 50, T: float = 50.0, dr: float = 0.05, tol_pos: float = 1e-6,
                     floor: float = 1e-12, nodes_per_support: int = 40):
    """Each bump is sampled with spacing ``min(dr, width / nodes_per_support)``
    and then once more at half that spacing. Undershoots at or below
    ``floor`` (relative to max g) count as roundoff and are not required to
    shrink further."""
    cfg = linear.WaveConfig()
    worst = {"coarse": 0.0, "fine": 0.0}
    shrink_ok = True
    failures = []
    for i, prof in enumerate(random_bumps(count, seed)):
        under = {}
        h0 = min(dr, (prof.r_hi - prof.r_lo) / nodes_per_support)
        for level, h in (("coarse", h0), ("fine", h0 / 2)):
            g = sample_on(prof, h, cfg.required_r_max(prof.r_hi, T))
            rep = linear.positivity_check(g, T, cfg, tol_pos)
            under[level] = max(rep.undershoot_full, rep.undershoot_reduced)
            worst[level] = max(worst[level], under[level])
            if not rep.passed:
                failures.append((i, level, under[level]))
        if under["fine"] > max(under["coarse"] / 4.0, floor):
            shrink_ok = False
            failures.append((i, "shrink", under["coarse"], under["fine"]))
    ok = not failures and shrink_ok
    return ok, {"worst_undershoot_coarse": worst["coarse"], "worst_undershoot_fine": worst["fine"],
                "roundoff_floor": floor, "failures": failures[:10]}


# --- 3 -------------------------------------------------------------------------


def l1_data(dr: float, r_max: float) -> list[tuple[str, RadialField]]:
    """Seven nonnegative profiles and three sign-changing differences."""
    pos = [ineq.bump(1, 3), ineq.bump(1, 2, 1.0), ineq.bump(2, 5, 3.0), ineq.bump(1, 8), ineq.bump(5, 6),
           ineq.gaussian(2.0, 0.5), ineq.gaussian(6.0, 1.5)]
    r_max = max(r_max, *(p.r_hi for p in pos))
    out = [(p.label, sample_on(p, dr, r_max)) for p in pos]
    for a, b in ((0, 2), (1, 4), (5, 3)):
        out.append((f"{pos[a].label}-{pos[b].label}", out[a][1] - out[b][1]))
    return out


@_timed(3, "l1dmu-contraction", "weighted L1 bound (1-e^{-t}) |g|", "linear propagator",
        "ratio <= 1.02 at t in {0.1,1,10,50}, 10 data incl. sign-changing", 120)
def check_l1dmu(dr: float = 0.05, times=(0.1, 1.0, 10.0, 50.0), tol: float = 0.02):
    cfg = linear.WaveConfig()
    r_max = cfg.required_r_max(l1_data(dr, 1.5)[0][1].grid.r_max, max(times))
    worst, per = 0.0, {}
    for label, g in l1_data(dr, r_max):
        parts = [g] if np.all(g.values >= 0) else [g, g.positive_part(), g.negative_part()]
        m = max(linear.l1dmu_bound_check(f, times, cfg, tol).max_ratio for f in parts)
        per[label] = m
        worst = max(worst, m)
    return worst <= 1 + tol, {"max_ratio": worst, "per_datum": per}


# --- 4 -------------------------------------------------------------------------


@_timed(4, "applied-matsumura", "wave minus heat: t^{-3/2} gradient and t^{-2} time-derivative rates",
        "linear propagator", "last <= 3x first over t in {1,3,10,30,100}; constants within 25% under refinement", 600)
def check_matsumura(dr: float = 0.1, times=(1.0, 3.0, 10.0, 30.0, 100.0), a: float = 3.0):
    reps = [linear.matsumura_diff_report(semilinear.default_data(a, h), times) for h in (dr, dr / 2)]
    fine = reps[-1]
    growth_ok = fine.grad_ratios[-1] <= 3 * fine.grad_ratios[0] and fine.dt_ratios[-1] <= 3 * fine.dt_ratios[0]
    dg = abs(reps[1].grad_constant - reps[0].grad_constant) / reps[1].grad_constant
    dd = abs(reps[1].dt_constant - reps[0].dt_constant) / reps[1].dt_constant
    return growth_ok and dg <= 0.25 and dd <= 0.25, {
        "grad_ratios": fine.grad_ratios, "dt_ratios": fine.dt_ratios, "grad_constant": fine.grad_constant,
        "dt_constant": fine.dt_constant, "grad_constant_drift": dg, "dt_constant_drift": dd}


# --- 5 -------------------------------------------------------------------------


@_timed(5, "heat-lq-l2-decay", "log-weighted L^q_mu -> L^2 heat decay", "heat semigroup",
        "rho(1e4) <= rho(1e2) for q in {1,2}", 300)
def check_heat_decay(dr: float = 0.1, qs=(1.0, 2.0), times=(1.0, 10.0, 100.0, 1000.0, 10000.0), a: float = 3.0):
    g = semilinear.default_data(a, dr)
    ok, out = True, {}
    for q in qs:
        rep = heat.heat_decay_report(g, q, times)
        rho = dict(zip(rep.times, rep.ratios))
        passed = rho[10000.0] <= rho[100.0]
        ok &= passed
        out[f"q={q:g}"] = {"ratios": rep.ratios, "rho_1e2": rho[100.0], "rho_1e4": rho[10000.0], "passed": passed,
                           "grid": rep.grid}
    return ok, out


# --- 6 -------------------------------------------------------------------------


@_timed(6, "comparison-supersolution", "comparison function is a supersolution near the obstacle",
        "heat semigroup", "min residual over 1e5 points of Q1 >= -1e-12", 10)
def check_supersolution(samples: int = 100_000, qs=(2.0,), seed: int = 0):
    out, ok = {}, True
    for q in qs:
        rep = heat.supersolution_residual_check(q, samples, seed=seed)
        ok &= rep.passed
        out[f"q={q:g}"] = {"min_residual": rep.min_residual, "passed": rep.passed}
    out["kappa_2"] = heat.kappa_q(2.0)
    return ok, out


# --- 7 -------------------------------------------------------------------------


@_timed(7, "log-weighted-gn", "log-weighted Gagliardo-Nirenberg inequality", "functional inequalities",
        "bounded over translations to r0=1000; refinement drift <= 10%", 120)
def check_log_gn(qs=(1.5, 2.0, 3.0)):
    ok, out = True, {}
    for q in qs:
        rep = ineq.constant_sweep("log_gn", "translations", q)
        bounded = bool(np.all(np.isfinite(rep.ratios))) and rep.ratios[-1] <= rep.ratios[0]
        passed = bounded and rep.refinement_drift <= 0.10
        ok &= passed
        out[f"q={q:g}"] = {"ratios": rep.ratios, "fitted_constant": rep.fitted_constant,
                           "refinement_drift": rep.refinement_drift, "passed": passed}
    return ok, out


# --- 8, 9 ----------------------------------------------------------------------

SUBCRITICAL_EPS = tuple(float(x) for x in np.geomspace(0.5, 0.03, 8))
CRITICAL_EPS = tuple(float(x) for x in np.geomspace(60.0, 21.0, 8))


def _sweep_metrics(recs):
    return {
        "epsilon": [r.epsilon for r in recs],
        "T_measured": [r.T_measured for r in recs],
        "converged": [r.converged for r in recs],
        "history": [r.history for r in recs],
    }


def _monotone(recs, slack=0.02):
    """T non-increasing in epsilon (records sorted by epsilon) with relative slack."""
    T = [r.T_measured for r in recs]
    return all(T[i + 1] <= T[i] * (1 + slack) for i in range(len(T) - 1))


@_timed(8, "subcritical-lifespan", "lifespan ~ (eps^-1 log 1/eps)^{(p-1)/(2-p)} for 1<p<2", "semilinear",
        "p=1.5, 8 eps, T in [10,1e4]: fitted slope 1.0 +- 0.25", 1800)
def check_subcritical(cfg: ExperimentConfig | None = None, jobs: int = 1, csv_path=None):
    cfg = cfg or default_config("lifespan-sweep", p=1.5, epsilons=SUBCRITICAL_EPS, horizon=2e4)
    recs = run_sweep(cfg, jobs, csv_path)
    fit = fit_exponent(recs, "sub-2")
    expected = (cfg.p - 1) / (2 - cfg.p)
    T = [r.T_measured for r in recs]
    in_window = all(10 <= t <= 1e4 for t in T)
    eps = np.array([r.epsilon for r in recs])
    plain = float(np.polyfit(np.log(1 / eps), np.log(T), 1)[0])
    m = _sweep_metrics(recs) | {"slope": fit.exponent, "expected": expected, "rms_log_residual": fit.residual,
                                "T_in_window": in_window, "monotone": _monotone(recs),
                                "slope_vs_inverse_eps": plain}
    return abs(fit.exponent - expected) <= 0.25 and in_window and _monotone(recs), m


@_timed(9, "critical-lifespan-band", "eps log(1+log(1+T)) stays in a bounded band for p=2", "semilinear",
        "p=2, T <= 1e6: max Q / min Q <= 5", 3600)
def check_critical(cfg: ExperimentConfig | None = None, jobs: int = 1, csv_path=None):
    cfg = cfg or default_config("lifespan-sweep", p=2.0, epsilons=CRITICAL_EPS, horizon=1e5)
    recs = run_sweep(cfg, jobs, csv_path)
    fit = fit_exponent(recs, "critical-Q")
    T_ok = all(r.T_measured <= 1e6 for r in recs)
    q = critical_q([r.epsilon for r in recs], [r.T_measured for r in recs])
    return fit.q_ratio <= 5 and T_ok, _sweep_metrics(recs) | {
        "Q": q.tolist(), "q_min": fit.q_min, "q_max": fit.q_max, "q_ratio": fit.q_ratio, "monotone": _monotone(recs)}


# --- 10 ------------------------------------------------------------------------


@_timed(10, "supercritical-decay", "small data global solutions decay at the linear rates for p>2", "semilinear",
        "p=3 to t=1e3: each weighted ratio at 1e3 <= 2x its value at 10", 900)
def check_global_decay(delta: float = 0.1, p: float = 3.0, dr: float = 0.05, horizon: float = 1e3, a: float = 3.0,
                       csv_path=None):
    run = semilinear.semilinear_evolve(semilinear.default_data(a, dr), delta, p, horizon)
    if run.blew_up:
        return False, {"status": "blew_up", "t_blow": run.t_end}
    if csv_path is not None:
        run.functionals.to_csv(csv_path)
    rep = semilinear.global_decay_report(run)
    return rep.passed, {"early_late": rep.early_late, "suprema": rep.suprema, "t_early": rep.t_early,
                        "t_late": rep.t_late, "delta": delta}


# --- 11 ------------------------------------------------------------------------


def _slope(h, err):
    return float(np.polyfit(np.log(h), np.log(err), 1)[0])


@_timed(11, "solver-equivalences", "reflected 1D reduction and Duhamel formula agree with the direct solver",
        "oracles", "cross-solver slope >= 1.8 over 3 refinements; Duhamel order in [1.7, 2.3]", 600)
def check_oracles(T: float = 10.0, drs=(0.04, 0.02, 0.01, 0.005), duhamel_drs=(0.04, 0.02, 0.01),
                  eps: float = 0.5, T_duhamel: float = 2.0):
    cfg = linear.WaveConfig()
    prof = ineq.bump(1.0, 3.0)
    cross = []
    for h in drs:
        g = sample_on(prof, h, cfg.required_r_max(3.0, T))
        ts = np.linspace(0, T, 11)
        a = linear.dw_linear_evolve(g, T, cfg, ts)
        b = linear.reduced_1d_evolve(g, T, cfg, ts)
        cross.append(float(np.abs(a.u - b.u).max()))
    s_cross = _slope(drs, cross)
    duh = []
    for h in duhamel_drs:
        run = semilinear.semilinear_evolve(semilinear.default_data(3.0, h), eps, 2.0, T_duhamel,
                                           semilinear.EvolutionConfig(store_every=1))
        duh.append(semilinear.duhamel_residual_check(run, [T_duhamel / 2, T_duhamel]).max_deviation)
    s_duh = _slope(duhamel_drs, duh)
    return s_cross >= 1.8 and 1.7 <= s_duh <= 2.3, {
        "cross_errors": cross, "cross_slope": s_cross, "duhamel_deviations": duh, "duhamel_slope": s_duh}


# --- 12 ------------------------------------------------------------------------


@_timed(12, "abstract-matsumura", "modal diffusion-phenomenon bounds", "linear propagator",
        "per-mode constants over 25 modes x t in [1,100] within a factor 2", 10)
def check_modal(n_modes: int = 25, lam_range=(1e-3, 1e3), n_times: int = 2000):
    rep = linear.abstract_matsumura_verify(np.geomspace(*lam_range, n_modes), np.linspace(1.0, 100.0, n_times))
    ok = rep.grad_spread <= 2.0 and rep.dt_spread <= 2.0
    return ok, {"grad_spread": rep.grad_spread, "dt_spread": rep.dt_spread,
                "uniform_grad_constant": rep.uniform_grad_constant, "uniform_dt_constant": rep.uniform_dt_constant,
                "grad_constants": rep.grad_constants, "dt_constants": rep.dt_constants,
                "uniform_constants_finite": math.isfinite(rep.uniform_grad_constant)
                and math.isfinite(rep.uniform_dt_constant)}


ALL_CHECKS = (check_hardy, check_positivity, check_l1dmu, check_matsumura, check_heat_decay, check_supersolution,
              check_log_gn, check_subcritical, check_critical, check_global_decay, check_oracles, check_modal)
