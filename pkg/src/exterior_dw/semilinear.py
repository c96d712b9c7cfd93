"""Semilinear damped wave ``u_tt - lap u + u_t = |u|^p`` with data ``(0, eps g)``.

Runs stop when ``max |u|`` reaches ``m_blow``; the crossing time, checked for
stability under time-step halving, is the measured lifespan. Also here: the
Duhamel cross-check, the lifespan of the heat-flow comparison function, and
the weighted decay ratios of small global solutions.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy import integrate as spi
from scipy import optimize

from .heat import HeatConfig, heat_grid, heat_snapshots
from .linear import RadialLeapfrog, WaveConfig
from .radial import Measure, RadialField, RadialGrid, grad_norm_sq, grid_with_spacing, h_weight, int_h_power, norm


class Status(enum.Enum):
    COMPLETED = "completed"
    BLEW_UP = "blew_up"


@dataclass(frozen=True)
class EvolutionConfig:
    """Time stepping, truncation and blow-up settings for one run.

    Functionals are recorded at ``0``, at ``t_first_output`` and then at
    ``outputs_per_decade`` log-spaced times per decade. ``store_every`` (in
    steps) additionally keeps the full ``u`` profile, which the Duhamel check
    needs.
    """

    dt: float | None = None
    cfl: float = 0.5
    margin: float = 5.0
    tol_tail: float = 1e-10
    m_blow: float = 1e8
    outputs_per_decade: int = 10
    t_first_output: float = 0.1
    store_every: int | None = None
    refine_tol: float = 0.02
    max_refinements: int = 3
    refine_dr: bool = False

    def __post_init__(self):
        if not 0 < self.cfl <= 1:
            raise ValueError(f"cfl must lie in (0, 1], got {self.cfl}")
        if self.dt is not None and self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.m_blow > 1:
            raise ValueError("m_blow must exceed 1")
        if self.outputs_per_decade < 1:
            raise ValueError("outputs_per_decade must be >= 1")

    def wave(self) -> WaveConfig:
        return WaveConfig(dt=self.dt, cfl_safety=self.cfl, margin=self.margin, tol_tail=self.tol_tail)

    def output_times(self, horizon: float) -> np.ndarray:
        t0 = self.t_first_output
        if horizon <= t0:
            return np.array([0.0, horizon])
        k = self.outputs_per_decade
        lo, hi = math.floor(k * math.log10(t0) + 1e-9), math.ceil(k * math.log10(horizon) - 1e-9)
        ts = 10.0 ** (np.arange(lo, hi + 1) / k)
        ts = ts[(ts >= t0 * (1 - 1e-12)) & (ts < horizon)]
        return np.concatenate([[0.0], ts, [horizon]])


@dataclass
class Functionals:
    t: list[float] = field(default_factory=list)
    l1dmu: list[float] = field(default_factory=list)
    grad_l2: list[float] = field(default_factory=list)
    dtu_l2: list[float] = field(default_factory=list)
    sup: list[float] = field(default_factory=list)
    xt: list[float] = field(default_factory=list)

    def record(self, t: float, u: RadialField, v: RadialField):
        l1 = norm(u, 1, Measure.LOG_WEIGHTED)
        gr = math.sqrt(grad_norm_sq(u))
        x = l1 + gr / h_weight(t)
        self.t.append(float(t))
        self.l1dmu.append(l1)
        self.grad_l2.append(gr)
        self.dtu_l2.append(norm(v))
        self.sup.append(norm(u, math.inf))
        self.xt.append(max(x, self.xt[-1]) if self.xt else x)

    def at(self, t: float) -> int:
        """Index of the recorded time closest to ``t``."""
        return int(np.argmin(np.abs(np.asarray(self.t) - t)))

    def to_csv(self, path) -> Path:
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "l1dmu", "grad_l2", "dtu_l2", "sup", "xt"])
            for row in zip(self.t, self.l1dmu, self.grad_l2, self.dtu_l2, self.sup, self.xt):
                w.writerow([repr(float(x)) for x in row])
        return path


@dataclass
class SemilinearRun:
    p: float
    epsilon: float
    g: RadialField
    cfg: EvolutionConfig
    horizon: float
    status: Status
    t_end: float
    dt: float
    functionals: Functionals
    source: bool = True
    stored_times: np.ndarray | None = None
    stored_u: np.ndarray | None = None
    final: RadialField | None = None

    @property
    def blew_up(self) -> bool:
        return self.status is Status.BLEW_UP

    @property
    def t_blow(self) -> float | None:
        return self.t_end if self.blew_up else None

    @property
    def grid(self) -> RadialGrid:
        return self.g.grid


def _crossing_time(prev: np.ndarray, cur: np.ndarray, step: int, dt: float, m_blow: float) -> float:
    """Time at which ``max |u|`` reaches ``m_blow`` between steps ``step-1`` and ``step``.

    Log-linear interpolation of the two sup norms; a non-finite new level
    pins the crossing to the prior step.
    """
    s0 = float(np.max(np.abs(prev)))
    s1 = float(np.max(np.abs(cur)))
    if not math.isfinite(s1) or s0 <= 0 or s1 <= s0:
        return (step - 1) * dt
    frac = (math.log(m_blow) - math.log(s0)) / (math.log(s1) - math.log(s0))
    return (step - 1 + min(max(frac, 0.0), 1.0)) * dt


def semilinear_evolve(g: RadialField, epsilon: float, p: float, horizon: float, cfg: EvolutionConfig | None = None,
                      source: bool = True) -> SemilinearRun:
    """Leapfrog run from ``(0, epsilon g)`` until ``horizon`` or blow-up.

    ``g`` is moved onto a grid with its own spacing whose outer radius obeys
    :meth:`WaveConfig.required_r_max`. ``source=False`` switches the
    nonlinearity off.
    """
    cfg = cfg or EvolutionConfig()
    if not p > 1:
        raise ValueError(f"p must exceed 1, got {p}")
    if epsilon < 0:
        raise ValueError(f"epsilon must be >= 0, got {epsilon}")
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    if not g.is_dirichlet:
        raise ValueError("data must vanish at r = 1")
    wcfg = cfg.wave()
    need = wcfg.required_r_max(g.support_radius(), horizon)
    if g.grid.r_max < need:
        g = g.transfer(grid_with_spacing(need, g.grid.dr))
    grid = g.grid
    dt_max = wcfg.step(grid)
    nsteps = max(1, int(math.ceil(horizon / dt_max - 1e-9)))
    dt = horizon / nsteps

    out_steps = sorted({min(nsteps, int(round(t / dt))) for t in cfg.output_times(horizon)})
    store_steps = set(range(0, nsteps + 1, cfg.store_every)) if cfg.store_every else set()
    events = sorted(set(out_steps) | store_steps)
    outs = set(out_steps)

    fun = Functionals()
    v0 = epsilon * g.values
    stored_t, stored_u = [], []
    stepper = RadialLeapfrog(v0, grid, dt, p, with_source=source, m_blow=cfg.m_blow)
    status, t_end, final = Status.COMPLETED, nsteps * dt, None
    for n in events:
        if n == 0:
            if 0 in store_steps:
                stored_t.append(0.0)
                stored_u.append(np.zeros(grid.n))
            fun.record(0.0, grid.zeros(), RadialField(grid, v0))
            continue
        if n > stepper.step and stepper.advance(n - stepper.step):
            break
        if n < stepper.step:
            continue  # already passed by a snapshot
        if n in store_steps:
            stored_t.append(n * dt)
            stored_u.append(stepper.state[1].copy())
        if n in outs:
            t, u, v = stepper.snapshot()
            if np.all(np.isfinite(u)):
                fun.record(t, RadialField(grid, u), RadialField(grid, v))
            if stepper.crossed:
                break
    if stepper.crossed:
        status = Status.BLEW_UP
        prev, cur = stepper.state[0], stepper.state[1]
        t_end = _crossing_time(prev, cur, stepper.step, dt, cfg.m_blow)
        if np.all(np.isfinite(cur)):
            tc = stepper.step * dt
            if not fun.t or tc > fun.t[-1]:
                fun.record(tc, RadialField(grid, cur), RadialField(grid, (cur - prev) / dt))
        final = RadialField(grid, prev)
    else:
        final = RadialField(grid, stepper.state[1]) if nsteps > 0 else grid.zeros()
    return SemilinearRun(
        p=float(p), epsilon=float(epsilon), g=g, cfg=cfg, horizon=float(horizon), status=status, t_end=float(t_end),
        dt=dt, functionals=fun, source=source,
        stored_times=np.array(stored_t) if cfg.store_every else None,
        stored_u=np.array(stored_u) if cfg.store_every else None,
        final=final,
    )


# --- blow-up detection and lifespans --------------------------------------


def _halved(g: RadialField, run: SemilinearRun, refine_dr: bool) -> tuple[RadialField, EvolutionConfig]:
    dt = run.dt / 2
    if refine_dr:
        g = g.transfer(g.grid.refined(2))
    return g, replace(run.cfg, dt=dt)


@dataclass
class BlowupDecision:
    declared: bool
    t_cross: float | None
    t_cross_refined: float | None
    relative_change: float | None
    stable: bool
    xt_growth: float
    sup_growth: float
    profile_t: list[float]
    profile_xt: list[float]
    profile_sup: list[float]


def detect_blowup(run: SemilinearRun, refined: SemilinearRun | None = None) -> BlowupDecision:
    """Decide whether ``run`` blew up.

    Blow-up is declared when the sup norm crossed ``m_blow`` and the crossing
    time moves by less than ``refine_tol`` when the time step is halved. The
    halved run is computed unless supplied. The ``*_growth`` fields are the
    final recorded value of ``X_t`` and of ``max |u|`` over their value at
    ``t_first_output``.
    """
    f = run.functionals
    k0 = f.at(run.cfg.t_first_output)
    xg = f.xt[-1] / f.xt[k0] if f.xt[k0] > 0 else math.inf if f.xt[-1] > 0 else 1.0
    sg = f.sup[-1] / f.sup[k0] if f.sup[k0] > 0 else math.inf if f.sup[-1] > 0 else 1.0
    base = dict(xt_growth=xg, sup_growth=sg, profile_t=list(f.t), profile_xt=list(f.xt), profile_sup=list(f.sup))
    if not run.blew_up:
        return BlowupDecision(False, None, None, None, False, **base)
    if refined is None:
        g2, cfg2 = _halved(run.g, run, run.cfg.refine_dr)
        refined = semilinear_evolve(g2, run.epsilon, run.p, run.horizon, cfg2, source=run.source)
    if not refined.blew_up:
        return BlowupDecision(False, run.t_end, None, None, False, **base)
    rel = abs(refined.t_end - run.t_end) / refined.t_end
    stable = rel < run.cfg.refine_tol
    return BlowupDecision(stable, run.t_end, refined.t_end, rel, stable, **base)


@dataclass
class LifespanRecord:
    p: float
    epsilon: float
    T_measured: float
    converged: bool
    Q_value: float
    grid_n: int
    dt: float
    status: str = Status.BLEW_UP.value
    history: list[float] = field(default_factory=list)
    error: str = ""

    def row(self) -> list:
        return [self.p, self.epsilon, self.T_measured, self.converged, self.Q_value, self.grid_n, self.dt]


def q_value(epsilon: float, p: float, T: float) -> float:
    """``eps^{p-1} int_0^T h^{p-1}``."""
    return epsilon ** (p - 1) * int_h_power(T, p)


def lifespan_estimate(g: RadialField, epsilon: float, p: float, horizon: float,
                      cfg: EvolutionConfig | None = None) -> LifespanRecord:
    """Blow-up time with successive time-step halving until it moves less than ``refine_tol``.

    Refined runs use a horizon just past the previous crossing, which keeps
    their grids small. If the first run reaches ``horizon`` the record holds
    ``T_measured = horizon`` with status ``completed``: a lower bound only.
    """
    cfg = cfg or EvolutionConfig()
    run = semilinear_evolve(g, epsilon, p, horizon, cfg)
    if not run.blew_up:
        return LifespanRecord(p, epsilon, horizon, False, q_value(epsilon, p, horizon), run.grid.n, run.dt,
                              status=Status.COMPLETED.value, history=[])
    history = [run.t_end]
    converged = False
    cur = run
    src = g
    for _ in range(cfg.max_refinements):
        src, cfg2 = _halved(src, cur, cfg.refine_dr)
        h2 = min(horizon, 1.25 * cur.t_end + 2.0)
        nxt = semilinear_evolve(src, epsilon, p, h2, cfg2)
        if not nxt.blew_up:
            # a finer run outlived the extended horizon: not converged
            history.append(math.inf)
            cur = nxt
            break
        history.append(nxt.t_end)
        cur = nxt
        if abs(history[-1] - history[-2]) / history[-1] < cfg.refine_tol:
            converged = True
            break
    T = history[-1] if math.isfinite(history[-1]) else history[-2]
    return LifespanRecord(p, epsilon, T, converged, q_value(epsilon, p, T), cur.grid.n, cur.dt, history=history)


# --- Duhamel reconstruction ------------------------------------------------


@dataclass
class DuhamelReport:
    sample_times: list[float]
    deviations: list[float]
    max_deviation: float
    dr: float
    dt: float


def duhamel_residual_check(run: SemilinearRun, sample_times) -> DuhamelReport:
    """Rebuild ``u(t) = eps S(t) g + int_0^t S(t-s) |u(s)|^p ds`` and compare with the run.

    The source is taken from the stored profiles (``store_every`` must be
    set and must divide the sample steps), each slice is propagated with the
    linear leapfrog, and the time integral uses the trapezoid rule. Returns
    relative ``L^2`` deviations.
    """
    if run.blew_up:
        raise ValueError("Duhamel check needs a run that did not blow up")
    if run.stored_u is None:
        raise ValueError("run has no stored profiles; set EvolutionConfig.store_every")
    grid, dt = run.grid, run.dt
    k = run.cfg.store_every
    ts = run.stored_times
    src = np.abs(run.stored_u) ** run.p if run.source else np.zeros_like(run.stored_u)
    ds = k * dt
    devs, used = [], []
    for t in sample_times:
        j = int(round(t / ds))
        if j < 1 or j >= len(ts) or abs(ts[j] - t) > 1e-9 * max(1.0, t):
            raise ValueError(f"sample time {t} is not a stored time")
        target = run.stored_u[j]
        recon = _propagate(run.epsilon * run.g.values, grid, dt, j * k)
        for i in range(j):  # S(0) F = 0, so the endpoint s = t drops out
            if not np.any(src[i]):
                continue
            w = 0.5 * ds if i == 0 else ds
            recon += w * _propagate(src[i], grid, dt, (j - i) * k)
        den = norm(RadialField(grid, target))
        diff = norm(RadialField(grid, recon - target))
        devs.append(diff / den if den else diff)
        used.append(float(ts[j]))
    return DuhamelReport(used, devs, max(devs), grid.dr, dt)


def _propagate(v0: np.ndarray, grid: RadialGrid, dt: float, steps: int) -> np.ndarray:
    """``S(steps*dt) v0`` by the linear leapfrog."""
    st = RadialLeapfrog(v0, grid, dt)
    st.advance(steps - 1)
    return st.state[1].copy()


# --- comparison with the heat flow ------------------------------------------


@dataclass
class SupersolutionLifespan:
    time: float
    log_log_time: float
    reached: bool
    extrapolated: bool
    tail_constant: float | None = None


def _h_tail(u0: float, u1: float, p: float) -> float:
    """``int h^{p-1} dt`` between ``t = e^{u0}-1`` and ``e^{u1}-1`` (``u1`` may be inf)."""
    a = 2.0 - p
    val, _ = spi.quad(lambda u: math.exp(a * (u - u0)) * (1.0 + u) ** (1.0 - p), u0, u1, epsabs=0.0, epsrel=1e-10,
                      limit=200)
    return val * math.exp(a * u0)


def heat_supersolution_lifespan(f: RadialField, epsilon: float, p: float, horizon: float = 1e4,
                                cfg: HeatConfig | None = None, extrapolate: bool = False,
                                samples: int = 400) -> SupersolutionLifespan:
    """Time at which ``1 - (p-1) eps^{p-1} int_0^t |e^{s lap} f|_inf^{p-1} ds`` reaches zero.

    The heat flow is computed up to ``horizon``. With ``extrapolate`` the sup
    norm past the horizon is continued as ``C h(t)``, ``C`` matched at the
    horizon, and the remaining integral is done in closed variables; for
    ``p = 2`` this gives ``log log T`` without overflow.
    """
    if np.any(f.values < 0):
        raise ValueError("f must be nonnegative")
    if not p > 1 or epsilon <= 0:
        raise ValueError("need p > 1 and epsilon > 0")
    cfg = cfg or HeatConfig()
    f = heat_grid(f, horizon, cfg)
    t0 = min(1e-3, horizon / 10)
    times = np.concatenate([[0.0], np.geomspace(t0, horizon, samples)])
    snaps = heat_snapshots(f, times, cfg)
    m = np.array([norm(s, math.inf) for s in snaps]) ** (p - 1)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (m[1:] + m[:-1]) * np.diff(times))])
    need = 1.0 / ((p - 1) * epsilon ** (p - 1))
    hit = np.nonzero(cum >= need)[0]
    if hit.size:
        i = int(hit[0])
        t = times[i - 1] + (need - cum[i - 1]) / (cum[i] - cum[i - 1]) * (times[i] - times[i - 1])
        return SupersolutionLifespan(float(t), math.log(math.log1p(t)) if t > 0 else -math.inf, True, False)
    if not extrapolate:
        return SupersolutionLifespan(float(horizon), math.log(math.log1p(horizon)), False, False)
    C = (m[-1] ** (1.0 / (p - 1))) / h_weight(horizon)
    rest = (need - cum[-1]) / C ** (p - 1)
    uH = math.log1p(horizon)
    if p == 2.0:
        # int h = log(1 + log(1+t)) exactly
        llt = math.log(math.log1p(horizon) + 1.0) + rest  # log(1 + u_T)
        u_T = math.expm1(llt)
        ll = math.log(u_T)  # log log (1+T)
        T = math.expm1(u_T) if u_T < 700 else math.inf
        return SupersolutionLifespan(T, ll, True, True, C)
    if p > 2.0 and _h_tail(uH, math.inf, p) <= rest:
        return SupersolutionLifespan(math.inf, math.inf, False, True, C)
    hi = uH + 1.0
    while _h_tail(uH, hi, p) < rest:
        hi = uH + 2 * (hi - uH)
    u_T = optimize.brentq(lambda u: _h_tail(uH, u, p) - rest, uH, hi, xtol=1e-12)
    T = math.expm1(u_T) if u_T < 700 else math.inf
    return SupersolutionLifespan(T, math.log(u_T), True, True, C)


# --- decay of small global solutions -----------------------------------------


@dataclass
class GlobalDecayReport:
    times: list[float]
    grad: list[float]
    dtu: list[float]
    l1dmu: list[float]
    energy: list[float]
    suprema: dict
    early_late: dict
    t_early: float
    t_late: float

    @property
    def passed(self) -> bool:
        return all(late <= 2.0 * early for early, late in self.early_late.values())


def global_decay_report(run: SemilinearRun, t_early: float = 10.0, t_late: float | None = None) -> GlobalDecayReport:
    """Weighted decay ratios of a completed run for ``t >= t_early``.

    ``grad``: ``|grad u| (1+t)(1+log(1+t))``; ``dtu``: ``|u_t| (1+t)^{3/2}(1+log(1+t))``;
    ``l1dmu``: ``|u|_{L^1_mu}``; ``energy``: ``(|grad u|^2 + |u_t|^2)(1+t)^2(1+log(1+t))^2``.
    ``early_late`` maps each series to its values at the recorded times
    closest to ``t_early`` and ``t_late`` (default: the horizon).
    """
    if run.blew_up:
        raise ValueError("global decay needs a completed run")
    if not run.p > 2:
        raise ValueError("global decay is stated for p > 2")
    f = run.functionals
    t = np.asarray(f.t)
    sel = t >= t_early * (1 - 1e-9)
    t = t[sel]
    gr, dv, l1 = (np.asarray(x)[sel] for x in (f.grad_l2, f.dtu_l2, f.l1dmu))
    w = (1 + t) * (1 + np.log1p(t))
    series = {
        "grad": gr * w,
        "dtu": dv * w * np.sqrt(1 + t),
        "l1dmu": l1,
        "energy": (gr**2 + dv**2) * w**2,
    }
    t_late = run.horizon if t_late is None else t_late
    ie, il = int(np.argmin(np.abs(t - t_early))), int(np.argmin(np.abs(t - t_late)))
    return GlobalDecayReport(
        times=t.tolist(),
        grad=series["grad"].tolist(),
        dtu=series["dtu"].tolist(),
        l1dmu=series["l1dmu"].tolist(),
        energy=series["energy"].tolist(),
        suprema={k: float(v.max()) if v.size else 0.0 for k, v in series.items()},
        early_late={k: (float(v[ie]), float(v[il])) if v.size else (0.0, 0.0) for k, v in series.items()},
        t_early=float(t[ie]) if t.size else t_early,
        t_late=float(t[il]) if t.size else t_late,
    )


# --- data family -------------------------------------------------------------


def data_norm(g: RadialField) -> float:
    """``|g|_2 + |g|_{L^1_mu}``."""
    return norm(g) + norm(g, 1, Measure.LOG_WEIGHTED)


def default_data(a: float = 3.0, dr: float = 0.02) -> RadialField:
    """``[(r-1)(a-r)]_+^2`` scaled to unit ``|g|_2 + |g|_{L^1_mu}``."""
    if not a > 1:
        raise ValueError("a must exceed 1")
    grid = grid_with_spacing(a + 1.0, dr)
    g = grid.sample(lambda r: np.where(r < a, ((r - 1) * (a - r)) ** 2, 0.0))
    return g * (1.0 / data_norm(g))
