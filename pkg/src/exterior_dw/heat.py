"""Dirichlet heat semigroup outside the unit disk, radial case.

Crank-Nicolson in time with a few implicit-Euler start-up sub-steps, zero
values at ``r = 1`` and at the truncation radius. The truncation radius is
chosen so that the Gaussian tail of the solution is negligible there.

Also holds the closed-form comparison function used to bound the semigroup
pointwise near the obstacle, with its exact parabolic residual.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.stats import qmc

from . import _kernels
from .radial import (
    Measure,
    RadialField,
    RadialGrid,
    grid_with_spacing,
    laplacian_values,
    norm,
)


@dataclass(frozen=True)
class HeatConfig:
    """Time stepping for :func:`heat_evolve`.

    ``dt=None`` means ``dt = dr`` of the grid in use.
    """

    dt: float | None = None
    rannacher_steps: int = 2
    tail_margin: float = 1.0
    tol_tail: float = 1e-10

    def __post_init__(self):
        if self.dt is not None and not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.rannacher_steps < 0:
            raise ValueError("rannacher_steps must be >= 0")
        if not 0 < self.tol_tail < 1:
            raise ValueError("tol_tail must lie in (0, 1)")

    def step(self, grid: RadialGrid) -> float:
        return self.dt if self.dt is not None else grid.dr

    def required_r_max(self, r_supp: float, horizon: float) -> float:
        """Radius where a Gaussian started inside ``r_supp`` is below ``tol_tail`` at ``horizon``."""
        return r_supp + self.tail_margin * math.sqrt(4.0 * horizon * math.log(1.0 / self.tol_tail))


class HeatSolverError(RuntimeError):
    pass


def _theta_march(w: np.ndarray, grid: RadialGrid, duration: float, dt: float, theta: float):
    if duration <= 0:
        return
    nsteps = max(1, int(math.ceil(duration / dt - 1e-9)))
    status = _kernels.theta_heat_steps(w, grid.r, grid.dr, duration / nsteps, theta, nsteps)
    if status != 0:
        raise HeatSolverError("zero pivot in tridiagonal solve")


class _HeatMarcher:
    """Holds one evolving profile so several output times share the work."""

    def __init__(self, f: RadialField, cfg: HeatConfig):
        if not f.is_dirichlet:
            raise ValueError("heat data must vanish at r = 1")
        self.grid = f.grid
        self.cfg = cfg
        self.dt = cfg.step(f.grid)
        self.w = np.array(f.values)
        self.w[-1] = 0.0
        self.t = 0.0
        self._startup_left = cfg.rannacher_steps * 0.5 * self.dt

    def advance_to(self, t: float) -> RadialField:
        if t < self.t - 1e-12:
            raise ValueError("heat marcher cannot go backwards")
        if t < 0:
            raise ValueError(f"t must be >= 0, got {t}")
        span = t - self.t
        if span > 0 and self._startup_left > 0:
            d = min(span, self._startup_left)
            k = max(1, int(math.ceil(d / (0.5 * self.dt) - 1e-9)))
            _kernels.theta_heat_steps(self.w, self.grid.r, self.grid.dr, d / k, 1.0, k)
            self._startup_left -= d
            span -= d
        _theta_march(self.w, self.grid, span, self.dt, 0.5)
        self.t = t
        return RadialField(self.grid, self.w)


def heat_evolve(f: RadialField, t: float, cfg: HeatConfig | None = None) -> RadialField:
    """``e^{t lap} f`` with zero boundary values at both ends of ``f.grid``."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    cfg = cfg or HeatConfig()
    return _HeatMarcher(f, cfg).advance_to(t)


def heat_snapshots(f: RadialField, times, cfg: HeatConfig | None = None) -> list[RadialField]:
    """``e^{t lap} f`` for each of the increasing ``times``."""
    cfg = cfg or HeatConfig()
    marcher = _HeatMarcher(f, cfg)
    return [marcher.advance_to(float(t)) for t in times]


def heat_grid(f: RadialField, horizon: float, cfg: HeatConfig) -> RadialField:
    """Copy of ``f`` on a grid of equal spacing that is wide enough for ``horizon``."""
    need = cfg.required_r_max(f.support_radius(), horizon)
    if f.grid.r_max >= need:
        return f
    return f.transfer(grid_with_spacing(need, f.grid.dr))


# --- comparison function near the obstacle ----------------------------------

START_TIME = 4.0


def kappa_q(q: float) -> float:
    """Sharp constant of the whole-plane ``L^q -> L^inf`` heat bound."""
    if q < 1:
        raise ValueError("q must be >= 1")
    if q == math.inf:
        return 1.0
    s = 1.0 - 1.0 / q
    lead = 1.0 if s == 0 else s**s
    return lead / (4.0 * math.pi) ** (1.0 / q)


def _theta(r, t):
    return 2.0 + np.log(t) + 2.0 * np.log(r)


def phi_factor(r, t):
    """``(1 + log r^2) / (2 + log t + log r^2)``."""
    r = np.asarray(r, dtype=float)
    t = np.asarray(t, dtype=float)
    return (1.0 + 2.0 * np.log(r)) / _theta(r, t)


def _inv_q(q):
    return 0.0 if q == math.inf else 1.0 / q


def _check_region(r, t):
    r = np.asarray(r, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(t < START_TIME):
        raise ValueError(f"comparison function is defined for t >= {START_TIME}")
    if np.any(r < 1.0) or np.any(r > np.sqrt(t) * (1 + 1e-12)):
        raise ValueError("need 1 <= r <= sqrt(t)")
    return r, t


def supersolution_phi(r, t, q: float):
    """``U = phi_factor(r, t) * t^(-1/q) * exp(-r^2 / 4t)`` on ``1 <= r <= sqrt(t)``, ``t >= 4``."""
    r, t = _check_region(r, t)
    out = phi_factor(r, t) * t ** (-_inv_q(q)) * np.exp(-(r**2) / (4.0 * t))
    return float(out) if out.ndim == 0 else out


def phi_derivatives(r, t):
    """``(d_t Phi, d_r Phi, lap Phi)`` in closed form."""
    th = _theta(r, t)
    lt = 1.0 + np.log(t)
    dphi_dt = -(1.0 + 2.0 * np.log(r)) / (t * th**2)
    dphi_dr = 2.0 * lt / (th**2 * r)
    lap_phi = -8.0 * lt / (th**3 * r**2)
    return dphi_dt, dphi_dr, lap_phi


def supersolution_residual(r, t, q: float):
    """``d_t U - lap U`` assembled from the derivative formulas by the product rule."""
    r, t = _check_region(r, t)
    iq = _inv_q(q)
    phi = phi_factor(r, t)
    dphi_dt, dphi_dr, lap_phi = phi_derivatives(r, t)
    gauss = np.exp(-(r**2) / (4.0 * t))
    amp = t ** (-iq)
    dgauss_dt = gauss * r**2 / (4.0 * t**2)
    dgauss_dr = -gauss * r / (2.0 * t)
    lap_gauss = gauss * (r**2 / (4.0 * t**2) - 1.0 / t)
    du_dt = amp * (dphi_dt * gauss + phi * dgauss_dt) - iq / t * amp * phi * gauss
    lap_u = amp * (lap_phi * gauss + 2.0 * dphi_dr * dgauss_dr + phi * lap_gauss)
    return du_dt - lap_u


@dataclass
class ResidualReport:
    q: float
    sample_count: int
    min_residual: float
    min_scaled_residual: float
    argmin: tuple[float, float]
    edge_bound_holds: bool
    kappa: float

    @property
    def passed(self) -> bool:
        return self.min_residual >= -1e-12 and self.edge_bound_holds


def supersolution_residual_check(q: float, sample_count: int = 100_000, t_max: float = 1e6, seed: int = 0) -> ResidualReport:
    """Minimum of ``d_t U - lap U`` over Sobol points of ``{4 <= t <= t_max, 1 <= r <= sqrt(t)}``.

    Times are spread log-uniformly, radii uniformly in ``[1, sqrt(t)]``. The
    edge check verifies ``1 + log(1+t) <= 2 (1 + log r)`` at ``r = sqrt(t)``.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    m = int(math.ceil(math.log2(max(sample_count, 2))))
    pts = qmc.Sobol(d=2, scramble=True, seed=seed).random_base2(m)[:sample_count]
    t = np.exp(math.log(START_TIME) + pts[:, 0] * (math.log(t_max) - math.log(START_TIME)))
    r = 1.0 + pts[:, 1] * (np.sqrt(t) - 1.0)
    res = supersolution_residual(r, t, q)
    scale = t ** (-1.0 - _inv_q(q)) * np.exp(-(r**2) / (4.0 * t))
    k = int(np.argmin(res))
    edge = np.sqrt(t)
    edge_ok = bool(np.all(1.0 + np.log1p(t) <= 2.0 * (1.0 + np.log(edge)) * (1 + 1e-14)))
    return ResidualReport(
        q=q,
        sample_count=len(res),
        min_residual=float(res.min()),
        min_scaled_residual=float((res / scale).min()),
        argmin=(float(r[k]), float(t[k])),
        edge_bound_holds=edge_ok,
        kappa=kappa_q(q),
    )


# --- decay of the semigroup in the log-weighted scale ----------------------


@dataclass
class HeatDecayReport:
    q: float
    times: list[float]
    ratios: list[float]
    max_ratio: float
    pointwise_ratios: list[float]
    adjoint_ratios: list[float]
    grid: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


def heat_decay_report(f: RadialField, q: float, times, cfg: HeatConfig | None = None) -> HeatDecayReport:
    """Normalised decay ratios of ``e^{t lap} f`` at each time.

    ``ratios``: ``t^(1/q-1/2) (1+log(1+t))^(1/q) |e^{t lap} f|_2 / |f|_{L^q_mu}``.
    ``pointwise_ratios``: grid maximum of
    ``e^{t lap} f(r) t^(1/q) (1+log(1+t)) / ((1+log r) |f|_{L^q})``.
    ``adjoint_ratios``: ``t^(1-1/q) (1+log(1+t)) |e^{t lap} f|_q / |f|_{L^1_mu}``.
    """
    if not 1 <= q <= 2:
        raise ValueError("q must lie in [1, 2]")
    times = [float(t) for t in times]
    if any(t <= 0 for t in times) or any(b <= a for a, b in zip(times, times[1:])):
        raise ValueError("times must be positive and increasing")
    cfg = cfg or HeatConfig()
    f = heat_grid(f, times[-1], cfg)
    grid = f.grid
    nq_mu = norm(f, q, Measure.LOG_WEIGHTED)
    nq = norm(f, q)
    n1_mu = norm(f, 1, Measure.LOG_WEIGHTED)
    weight = 1.0 + np.log(grid.r)
    ratios, pointwise, adjoint = [], [], []
    for t, w in zip(times, heat_snapshots(f, times, cfg)):
        lg = 1.0 + math.log1p(t)
        if nq_mu == 0:
            ratios.append(0.0)
            pointwise.append(0.0)
            adjoint.append(0.0)
            continue
        ratios.append(t ** (1 / q - 0.5) * lg ** (1 / q) * norm(w) / nq_mu)
        pointwise.append(float(np.max(np.abs(w.values) / weight)) * t ** (1 / q) * lg / nq)
        adjoint.append(t ** (1 - 1 / q) * lg * norm(w, q) / n1_mu)
    return HeatDecayReport(
        q=q,
        times=times,
        ratios=ratios,
        max_ratio=max(ratios),
        pointwise_ratios=pointwise,
        adjoint_ratios=adjoint,
        grid={"r_max": grid.r_max, "n": grid.n, "dt": cfg.step(grid)},
    )


def heat_time_derivative(w: RadialField) -> RadialField:
    """``d_t e^{t lap} f = lap e^{t lap} f`` on the grid."""
    return RadialField(w.grid, laplacian_values(w.values, w.grid.r, w.grid.dr))
