"""Radial grids, fields, weighted quadrature and the discrete radial Laplacian.

Every function on the exterior domain ``{|x| >= 1}`` of the plane is stored
by its radial profile on a uniform mesh of ``[1, r_max]``. Integrals carry
the polar Jacobian ``2*pi*r`` and, for the logarithmic measure, the extra
harmonic weight ``1 + log r``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy import integrate as _spi

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class RadialGrid:
    """Uniform mesh ``r_i = 1 + i*dr`` on ``[1, r_max]`` with ``n`` nodes."""

    r_max: float
    n: int

    r_min = 1.0

    def __post_init__(self):
        if not self.r_max > self.r_min:
            raise ValueError(f"r_max must exceed {self.r_min}, got {self.r_max}")
        if self.n < 3:
            raise ValueError(f"need at least 3 nodes, got {self.n}")

    @property
    def dr(self) -> float:
        return (self.r_max - self.r_min) / (self.n - 1)

    @cached_property
    def r(self) -> np.ndarray:
        r = self.r_min + self.dr * np.arange(self.n)
        r[-1] = self.r_max
        r.flags.writeable = False
        return r

    @cached_property
    def r_mid(self) -> np.ndarray:
        """Cell midpoints, one per interval."""
        r = 0.5 * (self.r[1:] + self.r[:-1])
        r.flags.writeable = False
        return r

    def field(self, values) -> "RadialField":
        return RadialField(self, values)

    def sample(self, fn) -> "RadialField":
        """Field with values ``fn(r_i)``."""
        return RadialField(self, np.asarray(fn(self.r), dtype=float))

    def zeros(self) -> "RadialField":
        return RadialField(self, np.zeros(self.n))

    def refined(self, factor: int = 2) -> "RadialGrid":
        """Same interval, spacing divided by ``factor``."""
        return RadialGrid(self.r_max, (self.n - 1) * factor + 1)

    def index_at(self, radius: float) -> int:
        """Index of the first node at or beyond ``radius`` (clipped)."""
        i = int(math.ceil((radius - self.r_min) / self.dr - 1e-9))
        return min(max(i, 0), self.n - 1)


def build_grid(r_max: float, n: int) -> RadialGrid:
    """Uniform grid on ``[1, r_max]`` with ``n`` nodes."""
    return RadialGrid(float(r_max), int(n))


def grid_with_spacing(r_max: float, dr: float) -> RadialGrid:
    """Grid whose spacing is ``dr`` or slightly smaller, covering ``[1, r_max]``."""
    n = int(math.ceil((r_max - 1.0) / dr - 1e-9)) + 1
    return RadialGrid(1.0 + (n - 1) * dr, max(n, 3))


class RadialField:
    """Samples of a radial function on a :class:`RadialGrid`.

    Values are copied and frozen on construction.
    """

    __slots__ = ("grid", "values")

    def __init__(self, grid: RadialGrid, values):
        values = np.array(values, dtype=float)
        if values.shape != (grid.n,):
            raise ValueError(f"expected {grid.n} values, got shape {values.shape}")
        values.flags.writeable = False
        self.grid = grid
        self.values = values

    def __repr__(self):
        return f"RadialField(n={self.grid.n}, r_max={self.grid.r_max:g}, max={np.abs(self.values).max():.3g})"

    def __add__(self, other: "RadialField") -> "RadialField":
        _check_same_grid(self, other)
        return RadialField(self.grid, self.values + other.values)

    def __sub__(self, other: "RadialField") -> "RadialField":
        _check_same_grid(self, other)
        return RadialField(self.grid, self.values - other.values)

    def __mul__(self, c: float) -> "RadialField":
        return RadialField(self.grid, c * self.values)

    __rmul__ = __mul__

    def __neg__(self) -> "RadialField":
        return RadialField(self.grid, -self.values)

    @property
    def is_dirichlet(self) -> bool:
        return self.values[0] == 0.0

    def support_radius(self, atol: float = 0.0) -> float:
        """Largest radius where ``|f| > atol`` (``1.0`` for the zero field)."""
        nz = np.nonzero(np.abs(self.values) > atol)[0]
        return float(self.grid.r[nz[-1]]) if nz.size else 1.0

    def positive_part(self) -> "RadialField":
        return RadialField(self.grid, np.maximum(self.values, 0.0))

    def negative_part(self) -> "RadialField":
        return RadialField(self.grid, np.maximum(-self.values, 0.0))

    def transfer(self, grid: RadialGrid) -> "RadialField":
        """Linear interpolation onto another grid, zero beyond ``r_max``."""
        return RadialField(grid, np.interp(grid.r, self.grid.r, self.values, right=0.0))


def _check_same_grid(a: RadialField, b: RadialField):
    if a.grid != b.grid:
        raise ValueError("fields live on different grids")


class Measure(enum.Enum):
    LEBESGUE = "lebesgue"
    LOG_WEIGHTED = "log_weighted"

    def density(self, r):
        r = np.asarray(r, dtype=float)
        if self is Measure.LEBESGUE:
            return TWO_PI * r
        return (1.0 + np.log(r)) * TWO_PI * r


def quadrature_weights(grid: RadialGrid, m: Measure = Measure.LEBESGUE) -> np.ndarray:
    """Trapezoid node weights with the measure density folded in."""
    w = np.full(grid.n, grid.dr)
    w[0] = w[-1] = 0.5 * grid.dr
    return w * m.density(grid.r)


def integrate(f: RadialField, m: Measure = Measure.LEBESGUE) -> float:
    return float(np.dot(quadrature_weights(f.grid, m), f.values))


def norm(f: RadialField, p: float = 2.0, m: Measure = Measure.LEBESGUE) -> float:
    """``L^p`` norm against ``m``; ``p = inf`` gives the grid maximum."""
    if p == math.inf:
        return float(np.abs(f.values).max())
    if p < 1:
        raise ValueError(f"norm exponent must be >= 1, got {p}")
    a = np.abs(f.values)
    top = a.max()
    if top == 0.0:
        return 0.0
    # scale out the maximum so large p does not overflow
    s = np.dot(quadrature_weights(f.grid, m), (a / top) ** p)
    return float(top * s ** (1.0 / p))


def grad_norm_sq(f: RadialField) -> float:
    """Squared ``L^2`` norm of the gradient.

    Difference quotients on each cell, weighted by the exact cell integral of
    ``2*pi*r``. This is the exact Dirichlet energy of the piecewise-linear
    interpolant and equals ``-<lap f, f>`` for the discrete Laplacian below.
    """
    g = f.grid
    d = np.diff(f.values)
    return float(TWO_PI * np.dot(g.r_mid, d * d) / g.dr)


def gradient_values(f: RadialField) -> np.ndarray:
    """Cell-centred derivative ``f'(r_{i+1/2})``."""
    return np.diff(f.values) / f.grid.dr


def laplacian_values(values: np.ndarray, r: np.ndarray, dr: float) -> np.ndarray:
    out = np.zeros_like(values)
    out[1:-1] = (values[2:] - 2.0 * values[1:-1] + values[:-2]) / dr**2 + (values[2:] - values[:-2]) / (
        2.0 * dr * r[1:-1]
    )
    return out


def apply_laplacian(f: RadialField) -> RadialField:
    """``f'' + f'/r`` by centred differences; boundary nodes get zero."""
    return RadialField(f.grid, laplacian_values(f.values, f.grid.r, f.grid.dr))


def h_weight(t):
    """Decay weight ``1 / ((1+t) (1+log(1+t)))``."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ValueError("h_weight needs t >= 0")
    out = 1.0 / ((1.0 + t_arr) * (1.0 + np.log1p(t_arr)))
    return float(out) if out.ndim == 0 else out


def int_h_power(t: float, p: float) -> float:
    """``int_0^t h(s)^(p-1) ds`` by adaptive quadrature.

    Integrated in ``u = log(1+s)``, where the integrand is the smooth
    ``exp((2-p) u) / (1+u)^(p-1)``.
    """
    if p <= 1:
        raise ValueError(f"int_h_power needs p > 1, got {p}")
    if t < 0:
        raise ValueError("int_h_power needs t >= 0")
    if t == 0:
        return 0.0
    umax = math.log1p(t)
    a = 2.0 - p
    val, _ = _spi.quad(lambda u: math.exp(a * u) * (1.0 + u) ** (1.0 - p), 0.0, umax, epsabs=0.0, epsrel=1e-12, limit=200)
    return float(val)


def write_field_csv(f: RadialField, path) -> Path:
    path = Path(path)
    np.savetxt(path, np.column_stack([f.grid.r, f.values]), delimiter=",", header="r,value", comments="", fmt="%.17g")
    return path


def read_field_csv(path) -> RadialField:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    r, v = data[:, 0], data[:, 1]
    grid = RadialGrid(float(r[-1]), len(r))
    if not np.allclose(grid.r, r, rtol=0, atol=1e-9 * max(1.0, grid.r_max)):
        raise ValueError(f"{path}: radii are not a uniform grid")
    return RadialField(grid, v)
