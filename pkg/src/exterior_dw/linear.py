"""Linear damped wave ``u_tt - lap u + u_t = 0`` with data ``(0, g)``.

Two independent discretisations of the propagator ``S(t) g``:

* :func:`dw_linear_evolve` steps the radial equation directly with leapfrog
  and a centred damping term;
* :func:`reduced_1d_evolve` uses ``U = e^{t/2} r^{1/2} u``, which solves
  ``U_tt - U_yy = m(y) U`` on the line after odd reflection through ``r = 1``,
  and maps back.

The remaining functions compare the propagator with the heat semigroup and
check its weighted ``L^1`` contraction and positivity.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import _kernels
from .heat import HeatConfig, heat_snapshots, heat_time_derivative
from .radial import (
    Measure,
    RadialField,
    RadialGrid,
    grad_norm_sq,
    grid_with_spacing,
    h_weight,
    norm,
)


@dataclass(frozen=True)
class WaveState:
    u: RadialField
    v: RadialField

    def __post_init__(self):
        if self.u.grid != self.v.grid:
            raise ValueError("u and v must share a grid")

    def energy(self) -> float:
        """``|grad u|^2 + |u_t|^2``."""
        return grad_norm_sq(self.u) + norm(self.v) ** 2


@dataclass(frozen=True)
class WaveConfig:
    """Leapfrog settings.

    ``dt=None`` picks ``cfl_safety * dr``. ``margin`` is the clearance kept
    between the truncation radius and the furthest point the data can reach.
    """

    dt: float | None = None
    cfl_safety: float = 0.5
    margin: float = 5.0
    tol_tail: float = 1e-10

    def __post_init__(self):
        if not 0 < self.cfl_safety <= 1:
            raise ValueError(f"cfl_safety must lie in (0, 1], got {self.cfl_safety}")
        if self.dt is not None and not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")

    def step(self, grid: RadialGrid) -> float:
        dt = self.cfl_safety * grid.dr if self.dt is None else self.dt
        if dt > self.cfl_safety * grid.dr * (1 + 1e-12):
            raise ValueError(f"CFL violation: dt={dt:g} exceeds cfl_safety*dr={self.cfl_safety * grid.dr:g}")
        return dt

    def required_r_max(self, r_supp: float, horizon: float) -> float:
        """Truncation radius that keeps the outer boundary invisible up to ``horizon``.

        Up to the time the damped front has decayed below ``tol_tail``
        (``2 log(1/tol)``) this is the light cone ``r_supp + horizon``; past
        that the diffusive bulk sets the size, as for the heat flow.
        """
        lt = math.log(1.0 / self.tol_tail)
        reach = min(horizon, max(math.sqrt(4.0 * horizon * lt), 2.0 * lt))
        return r_supp + reach + self.margin

    def grid_for(self, r_supp: float, horizon: float, dr: float) -> RadialGrid:
        return grid_with_spacing(self.required_r_max(r_supp, horizon), dr)


@dataclass
class Trajectory:
    """States of one run at the recorded times."""

    grid: RadialGrid
    times: np.ndarray
    u: np.ndarray
    v: np.ndarray

    def __len__(self):
        return len(self.times)

    def state(self, k: int) -> WaveState:
        return WaveState(RadialField(self.grid, self.u[k]), RadialField(self.grid, self.v[k]))

    def u_field(self, k: int) -> RadialField:
        return RadialField(self.grid, self.u[k])

    def v_field(self, k: int) -> RadialField:
        return RadialField(self.grid, self.v[k])

    def energies(self) -> np.ndarray:
        return np.array([self.state(k).energy() for k in range(len(self))])

    def to_csv(self, path) -> Path:
        """Long format ``t,r,u,v``."""
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "r", "u", "v"])
            for k, t in enumerate(self.times):
                for r, a, b in zip(self.grid.r, self.u[k], self.v[k]):
                    w.writerow([repr(float(t)), repr(float(r)), repr(float(a)), repr(float(b))])
        return path


def _check_data(g: RadialField, T: float, cfg: WaveConfig):
    if T < 0:
        raise ValueError(f"T must be >= 0, got {T}")
    if not g.is_dirichlet:
        raise ValueError("data must vanish at r = 1")
    need = cfg.required_r_max(g.support_radius(), T)
    if g.grid.r_max < need - 1e-9:
        raise ValueError(
            f"support violation: data reach r={g.support_radius():g}, horizon {T:g} needs r_max >= {need:g}, "
            f"grid has {g.grid.r_max:g}"
        )


def _time_axis(T: float, dt_max: float, output_times):
    nsteps = max(1, int(math.ceil(T / dt_max - 1e-9))) if T > 0 else 0
    dt = T / nsteps if nsteps else dt_max
    if output_times is None:
        output_times = np.linspace(0.0, T, 101) if T > 0 else [0.0]
    steps = sorted({min(nsteps, max(0, int(round(float(t) / dt)))) for t in output_times})
    return dt, nsteps, steps


class RadialLeapfrog:
    """Leapfrog state for ``u_tt - lap u + u_t = |u|^p`` (source optional) from ``(0, v0)``."""

    def __init__(self, v0: np.ndarray, grid: RadialGrid, dt: float, p: float = 2.0, with_source: bool = False,
                 m_blow: float = math.inf):
        self.grid = grid
        self.dt = dt
        self.p = float(p)
        self.with_source = with_source
        self.m_blow = m_blow
        self.v0 = np.array(v0, dtype=float)
        self.state = np.zeros((2, grid.n))
        # Taylor start: u_tt(0) = lap 0 - v0 + |0|^p
        self.state[1] = (dt - 0.5 * dt * dt) * self.v0
        self.state[1, 0] = self.state[1, -1] = 0.0
        nz = np.nonzero(self.v0)[0]
        self.i_hi = int(nz[-1]) + 1 if nz.size else 0
        self.step = 1
        self.crossed = False

    @property
    def t(self) -> float:
        return self.step * self.dt

    def advance(self, k: int) -> bool:
        """Take up to ``k`` steps; True if the blow-up threshold was crossed."""
        if k <= 0 or self.crossed:
            return self.crossed
        done, crossed, self.i_hi = _kernels.radial_leapfrog_steps(
            self.state, self.grid.r, self.grid.dr, self.dt, k, self.p, self.with_source, self.i_hi, self.m_blow
        )
        self.step += done
        self.crossed = bool(crossed)
        return self.crossed

    def snapshot(self):
        """``(t, u, u_t)`` at the current step; moves one step forward.

        ``u_t`` is the centred difference, which needs the next level.
        """
        if self.step == 0:
            raise RuntimeError("unreachable")
        older = self.state[0].copy()
        t = self.t
        self.advance(1)
        u = self.state[0].copy()
        v = (self.state[1] - older) / (2.0 * self.dt)
        return t, u, v


def _collect(stepper_factory, grid, dt, steps, v0):
    times, us, vs = [], [], []
    stepper = None
    for n in steps:
        if n == 0:
            times.append(0.0)
            us.append(np.zeros(grid.n))
            vs.append(np.array(v0, dtype=float))
            continue
        if stepper is None:
            stepper = stepper_factory()
        stepper.advance(n - stepper.step)
        t, u, v = stepper.snapshot()
        times.append(t)
        us.append(u)
        vs.append(v)
    return Trajectory(grid, np.array(times), np.array(us), np.array(vs))


def dw_linear_evolve(g: RadialField, T: float, cfg: WaveConfig | None = None, output_times=None) -> Trajectory:
    """``S(t) g`` by radial leapfrog, recorded at ``output_times`` (101 even times by default).

    Output times are snapped to the step grid; ``Trajectory.times`` holds the
    snapped values.
    """
    cfg = cfg or WaveConfig()
    _check_data(g, T, cfg)
    grid = g.grid
    dt, _, steps = _time_axis(T, cfg.step(grid), output_times)
    return _collect(lambda: RadialLeapfrog(g.values, grid, dt), grid, dt, steps, g.values)


def reflection_potential(y):
    """``m(y) = (1/(|y|+1)^2 + 1) / 4``."""
    y = np.asarray(y, dtype=float)
    return 0.25 * (1.0 / (np.abs(y) + 1.0) ** 2 + 1.0)


def odd_extension(g: RadialField) -> tuple[np.ndarray, np.ndarray]:
    """Line grid ``y_j = j dr`` for ``|j| < n`` and the odd data ``sgn(y)(1+|y|)^{1/2} g(1+|y|)``."""
    n = g.grid.n
    j = np.arange(-(n - 1), n)
    y = j * g.grid.dr
    g1 = np.sqrt(g.grid.r) * g.values
    data = np.concatenate([-g1[:0:-1], g1])
    data[n - 1] = 0.0
    return y, data


class LineLeapfrog:
    """Leapfrog for ``U_tt - U_yy = m U`` from ``(0, w)``, zero at both ends."""

    def __init__(self, w: np.ndarray, m: np.ndarray, dy: float, dt: float):
        self.m = m
        self.dy = dy
        self.dt = dt
        self.state = np.zeros((2, len(w)))
        # U_tt(0) = U_yy(0) + m U(0) = 0
        self.state[1] = dt * w
        self.state[1, 0] = self.state[1, -1] = 0.0
        self.step = 1

    def advance(self, k: int):
        if k > 0:
            _kernels.line_leapfrog_steps(self.state, self.m, self.dy, self.dt, k)
            self.step += k

    def snapshot(self):
        older = self.state[0].copy()
        t = self.step * self.dt
        self.advance(1)
        return t, self.state[0].copy(), (self.state[1] - older) / (2.0 * self.dt)


@dataclass
class ReducedTrajectory(Trajectory):
    """Trajectory mapped back to ``u``, plus the line solution it came from."""

    y: np.ndarray = None
    U_line: np.ndarray = None


def reduced_1d_evolve(g: RadialField, T: float, cfg: WaveConfig | None = None, output_times=None) -> ReducedTrajectory:
    """``S(t) g`` through the reflected line problem.

    Solves ``U_tt - U_yy = m U`` on ``(-Y, Y)``, ``Y = r_max - 1``, with odd
    data, and returns ``u(r, t) = e^{-t/2} r^{-1/2} U(r - 1, t)``.
    """
    cfg = cfg or WaveConfig()
    _check_data(g, T, cfg)
    grid = g.grid
    dt, _, steps = _time_axis(T, cfg.step(grid), output_times)
    y, w = odd_extension(g)
    m = reflection_potential(y)
    n = grid.n
    times, us, vs, lines = [], [], [], []
    stepper = LineLeapfrog(w, m, grid.dr, dt)
    scale = 1.0 / np.sqrt(grid.r)
    for k in steps:
        if k == 0:
            t, U, Ut = 0.0, np.zeros_like(w), w.copy()
        else:
            stepper.advance(k - stepper.step)
            t, U, Ut = stepper.snapshot()
        half = U[n - 1 :]
        damp = math.exp(-0.5 * t)
        times.append(t)
        lines.append(U)
        us.append(damp * scale * half)
        vs.append(damp * scale * (Ut[n - 1 :] - 0.5 * half))
    return ReducedTrajectory(grid, np.array(times), np.array(us), np.array(vs), y=y, U_line=np.array(lines))


# --- checks ---------------------------------------------------------------


@dataclass
class PositivityReport:
    status: str  # "passed", "failed" or "skipped"
    min_full: float
    min_reduced: float
    undershoot_full: float
    undershoot_reduced: float
    tol_pos: float
    reason: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "passed"


def positivity_check(g: RadialField, T: float, cfg: WaveConfig | None = None, tol_pos: float = 1e-6,
                     n_outputs: int = 200) -> PositivityReport:
    """Most negative value of ``S(t) g`` from both solvers over the recorded times.

    Undershoots are reported relative to ``max g``; the check passes when
    both are at most ``tol_pos``.
    """
    if np.any(g.values < 0):
        return PositivityReport("skipped", math.nan, math.nan, math.nan, math.nan, tol_pos,
                                reason="data changes sign; nonnegativity precondition unmet")
    top = float(g.values.max())
    if top == 0.0:
        return PositivityReport("passed", 0.0, 0.0, 0.0, 0.0, tol_pos)
    times = np.linspace(0.0, T, n_outputs + 1)
    full = dw_linear_evolve(g, T, cfg, times)
    red = reduced_1d_evolve(g, T, cfg, times)
    mf, mr = float(full.u.min()), float(red.u.min())
    uf, ur = max(0.0, -mf) / top, max(0.0, -mr) / top
    status = "passed" if max(uf, ur) <= tol_pos else "failed"
    return PositivityReport(status, mf, mr, uf, ur, tol_pos)


@dataclass
class L1BoundReport:
    times: list[float]
    ratios: list[float]
    max_ratio: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_ratio <= 1.0 + self.tol


def l1dmu_bound_check(g: RadialField, times, cfg: WaveConfig | None = None, tol: float = 0.02) -> L1BoundReport:
    """``|S(t) g|_{L^1_mu} / ((1 - e^{-t}) |g|_{L^1_mu})`` at each time."""
    times = [float(t) for t in times]
    traj = dw_linear_evolve(g, max(times), cfg, times)
    base = norm(g, 1, Measure.LOG_WEIGHTED)
    ratios = []
    for k, t in enumerate(traj.times):
        if t == 0.0:
            continue
        ratios.append(norm(traj.u_field(k), 1, Measure.LOG_WEIGHTED) / (-math.expm1(-t) * base) if base else 0.0)
    return L1BoundReport([float(t) for t in traj.times if t > 0], ratios, max(ratios), tol)


def _common_grid(g: RadialField, horizon: float, wave_cfg: WaveConfig, heat_cfg: HeatConfig) -> RadialField:
    r_supp = g.support_radius()
    need = max(wave_cfg.required_r_max(r_supp, horizon), heat_cfg.required_r_max(r_supp, horizon))
    if g.grid.r_max >= need:
        return g
    return g.transfer(grid_with_spacing(need, g.grid.dr))


@dataclass
class RateReport:
    """Normalised ratio sequences with their suprema (fitted constants)."""

    name: str
    times: list[float]
    grad_ratios: list[float]
    dt_ratios: list[float]
    grad_constant: float
    dt_constant: float
    grid: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


def matsumura_diff_report(g: RadialField, times, wave_cfg: WaveConfig | None = None,
                          heat_cfg: HeatConfig | None = None) -> RateReport:
    """Gap between damped wave and heat flow from the same datum.

    ``grad_ratios``: ``t^{3/2} |grad (S(t) - e^{t lap}) g|_2 / |g|_2``;
    ``dt_ratios``: ``t^2 |d_t (S(t) - e^{t lap}) g|_2 / |g|_2``.
    """
    times = [float(t) for t in times]
    if min(times) < 1:
        raise ValueError("times must be >= 1")
    wave_cfg = wave_cfg or WaveConfig()
    heat_cfg = heat_cfg or HeatConfig()
    g = _common_grid(g, max(times), wave_cfg, heat_cfg)
    traj = dw_linear_evolve(g, max(times), wave_cfg, times)
    heat = heat_snapshots(g, traj.times, heat_cfg)
    gn = norm(g)
    gr, dr_ = [], []
    for k, t in enumerate(traj.times):
        if gn == 0:
            gr.append(0.0)
            dr_.append(0.0)
            continue
        du = traj.u_field(k) - heat[k]
        dv = traj.v_field(k) - heat_time_derivative(heat[k])
        gr.append(t**1.5 * math.sqrt(grad_norm_sq(du)) / gn)
        dr_.append(t**2 * norm(dv) / gn)
    return RateReport("matsumura-difference", [float(t) for t in traj.times], gr, dr_, max(gr), max(dr_),
                      grid={"r_max": g.grid.r_max, "n": g.grid.n, "dt": traj.times[-1] / max(1, round(traj.times[-1] / wave_cfg.step(g.grid)))})


def log_matsumura_report(g: RadialField, q: float, times, cfg: WaveConfig | None = None) -> RateReport:
    """Decay of ``S(t) g`` against the logarithmic rate ``h(t)^{1/q}``.

    ``grad_ratios``: ``|grad S(t) g| / (h(t)^{1/q} N)``;
    ``dt_ratios``: ``(1+t)^{1/2} |d_t S(t) g| / (h(t)^{1/q} N)``,
    with ``N = |g|_{L^q_mu} + |g|_2``.
    """
    if not 1 <= q <= 2:
        raise ValueError("q must lie in [1, 2]")
    times = [float(t) for t in times]
    cfg = cfg or WaveConfig()
    g = _common_grid(g, max(times), cfg, HeatConfig(tol_tail=cfg.tol_tail))
    traj = dw_linear_evolve(g, max(times), cfg, times)
    big = norm(g, q, Measure.LOG_WEIGHTED) + norm(g)
    gr, dr_ = [], []
    for k, t in enumerate(traj.times):
        if big == 0:
            gr.append(0.0)
            dr_.append(0.0)
            continue
        hq = h_weight(t) ** (1.0 / q)
        gr.append(math.sqrt(grad_norm_sq(traj.u_field(k))) / (hq * big))
        dr_.append(math.sqrt(1.0 + t) * norm(traj.v_field(k)) / (hq * big))
    return RateReport(f"log-matsumura-q{q:g}", [float(t) for t in traj.times], gr, dr_, max(gr), max(dr_),
                      grid={"r_max": g.grid.r_max, "n": g.grid.n})


# --- single-mode version --------------------------------------------------


def modal_solution(lam: float, t):
    """``(y, y')`` for ``y'' + y' + lam y = 0``, ``y(0) = 0``, ``y'(0) = 1``."""
    if lam < 0:
        raise ValueError("eigenvalue must be >= 0")
    t = np.asarray(t, dtype=float)
    disc = 1.0 - 4.0 * lam
    if disc > 0:
        d = 0.5 * math.sqrt(disc)
        a, b = 0.5 - d, 0.5 + d  # decay rates, a <= b
        ea, eb = np.exp(-a * t), np.exp(-b * t)
        return (ea - eb) / (2 * d), (-a * ea + b * eb) / (2 * d)
    if disc == 0:
        e = np.exp(-0.5 * t)
        return t * e, e * (1.0 - 0.5 * t)
    w = 0.5 * math.sqrt(-disc)
    e = np.exp(-0.5 * t)
    s, c = np.sin(w * t), np.cos(w * t)
    return e * s / w, e * (c - 0.5 * s / w)


@dataclass
class ModalReport:
    eigenvalues: list[float]
    grad_constants: list[float]
    dt_constants: list[float]
    uniform_grad_constant: float
    uniform_dt_constant: float

    @property
    def grad_spread(self) -> float:
        return max(self.grad_constants) / min(self.grad_constants)

    @property
    def dt_spread(self) -> float:
        return max(self.dt_constants) / min(self.dt_constants)


def abstract_matsumura_verify(eigs, times) -> ModalReport:
    """Per-mode constants of the two abstract diffusion-phenomenon bounds.

    For each eigenvalue ``lam`` the constants are the suprema over ``times``
    (all ``>= 1``) of

    ``sqrt(lam) |y - e^{-lam t}| / (t^{-3/2} e^{-lam t/2} + e^{-t/16} sqrt(lam)/(sqrt(lam)+1))``

    and ``|y' + lam e^{-lam t}| / (t^{-2} (1 + e^{-t/4}))``.
    """
    eigs = [float(x) for x in eigs]
    if any(x < 0 for x in eigs):
        raise ValueError("eigenvalues must be >= 0")
    t = np.asarray(times, dtype=float)
    if np.any(t < 1):
        raise ValueError("times must be >= 1")
    c1, c2 = [], []
    for lam in eigs:
        y, yp = modal_solution(lam, t)
        heat = np.exp(-lam * t)
        sl = math.sqrt(lam)
        lhs1 = sl * np.abs(y - heat)
        rhs1 = t**-1.5 * np.exp(-0.5 * lam * t) + np.exp(-t / 16) * sl / (sl + 1.0)
        lhs2 = np.abs(yp + lam * heat)
        rhs2 = t**-2.0 * (1.0 + np.exp(-t / 4))
        c1.append(float(np.max(lhs1 / rhs1)))
        c2.append(float(np.max(lhs2 / rhs2)))
    return ModalReport(eigs, c1, c2, max(c1), max(c2))
