"""Ratios of the critical Hardy, Nash/Gagliardo-Nirenberg and log-weighted
Gagliardo-Nirenberg inequalities, and empirical constant sweeps over test
function families.

Every ratio is LHS / RHS, so an inequality with constant ``C`` holds on a
family exactly when the sweep maximum stays below ``C``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .radial import Measure, RadialField, RadialGrid, grad_norm_sq, grid_with_spacing, norm, quadrature_weights

TOL_DISC = 1e-3


def _require_nonzero(f: RadialField):
    if not np.any(f.values):
        raise ValueError("ratio undefined for the zero field")


def _require_q(q: float):
    if not q > 1:
        raise ValueError(f"exponent q must exceed 1, got {q}")


def hardy_ratio(f: RadialField) -> float:
    """``(1/4) int f^2 / (r^2 (1+log r)^2) dx`` over ``|grad f|^2``."""
    _require_nonzero(f)
    r = f.grid.r
    w = quadrature_weights(f.grid) / (r * (1.0 + np.log(r))) ** 2
    lhs = 0.25 * float(np.dot(w, f.values**2))
    den = grad_norm_sq(f)
    if den == 0.0:
        raise ValueError("ratio undefined: zero gradient")
    return lhs / den


def gn_ratio(f: RadialField, q: float) -> float:
    """``|f|_q / (|grad f|_2^{1-1/q} |f|_1^{1/q})``."""
    _require_nonzero(f)
    _require_q(q)
    return norm(f, q) / (math.sqrt(grad_norm_sq(f)) ** (1 - 1 / q) * norm(f, 1) ** (1 / q))


def log_gn_ratio(f: RadialField, q: float) -> float:
    """As :func:`gn_ratio` with both Lebesgue norms of ``f`` taken against ``dmu``."""
    _require_nonzero(f)
    _require_q(q)
    lw = Measure.LOG_WEIGHTED
    return norm(f, q, lw) / (math.sqrt(grad_norm_sq(f)) ** (1 - 1 / q) * norm(f, 1, lw) ** (1 / q))


RATIOS: dict[str, Callable] = {
    "hardy": lambda f, q: hardy_ratio(f),
    "gn": gn_ratio,
    "log_gn": log_gn_ratio,
}


# --- test-function families -----------------------------------------------
#
# A family member is a profile ``fn(r)`` plus the outer radius of its support,
# so that each member can be sampled on a grid resolving it.


@dataclass(frozen=True)
class Profile:
    label: str
    fn: Callable[[np.ndarray], np.ndarray]
    r_lo: float
    r_hi: float

    def sample(self, nodes_per_unit: float, min_nodes: int = 400) -> RadialField:
        """Sample on ``[1, r_hi]`` with at least ``min_nodes`` nodes across the support."""
        width = self.r_hi - self.r_lo
        dr = min(1.0 / nodes_per_unit, width / min_nodes)
        grid = grid_with_spacing(self.r_hi, dr)
        v = np.asarray(self.fn(grid.r), dtype=float)
        v[0] = 0.0
        return RadialField(grid, v)


def bump(a: float, b: float, k: float = 2.0) -> Profile:
    """``((r-a)(b-r))_+^k``."""

    def fn(r):
        return np.where((r > a) & (r < b), ((r - a) * (b - r)) ** k, 0.0)

    return Profile(f"bump[{a:g},{b:g}]^{k:g}", fn, a, b)


def gaussian(center: float, width: float) -> Profile:
    """``exp(-(r-c)^2/w^2)`` times ``(1 - e^{-(r-1)/w})``, cut at ``c + 8w``."""
    hi = center + 8.0 * width

    def fn(r):
        return np.where(r < hi, np.exp(-(((r - center) / width) ** 2)) * -np.expm1(-(r - 1.0) / width), 0.0)

    return Profile(f"gauss[{center:g},{width:g}]", fn, 1.0, hi)


def hardy_near_extremal(R: float) -> Profile:
    """``(1+log r)^{1/2} sin(pi s / L)`` with ``s = log(1+log r)``, ``L = log(1+log R)``.

    In the variable ``s`` the Hardy quotient of this profile tends to
    ``(1/4) / ((pi/L)^2 + 1/4)``, which climbs to 1 as ``R`` grows.
    """
    L = math.log1p(math.log(R))

    def fn(r):
        s = np.log1p(np.log(np.minimum(r, R)))
        return np.where(r < R, np.sqrt(1.0 + np.log(r)) * np.sin(math.pi * s / L), 0.0)

    return Profile(f"hardy_ext[R={R:g}]", fn, 1.0, R)


def dilation(base: Profile, lam: float) -> Profile:
    """``f(1 + (r-1)/lam)``."""
    return Profile(
        f"{base.label}@dil{lam:g}",
        lambda r: base.fn(1.0 + (r - 1.0) / lam),
        1.0 + (base.r_lo - 1.0) * lam,
        1.0 + (base.r_hi - 1.0) * lam,
    )


def translation(center: float, half_width: float = 0.5) -> Profile:
    """Bump of fixed width centred at ``center``."""
    return bump(max(1.0, center - half_width), center + half_width)


FAMILIES: dict[str, Callable[[], list[Profile]]] = {
    "bumps": lambda: [bump(a, b, k) for a, b in [(1, 2), (1, 4), (1.5, 3), (3, 5), (1, 11)] for k in (1.0, 2.0, 4.0)],
    "gaussians": lambda: [gaussian(c, w) for c in (1.5, 3.0, 10.0) for w in (0.3, 1.0)],
    "hardy_extremal": lambda: [hardy_near_extremal(R) for R in (10.0, 1e2, 1e3, 1e4)],
    "dilations": lambda: [dilation(bump(1, 2), lam) for lam in (1, 2, 4, 8)],
    "translations": lambda: [translation(c) for c in (2.0, 10.0, 100.0, 1000.0)],
}


def resolve_family(family) -> list[Profile]:
    """Family name, list of names, or an explicit list of profiles."""
    if isinstance(family, str):
        if family not in FAMILIES:
            raise ValueError(f"unknown family {family!r}; known: {sorted(FAMILIES)}")
        return FAMILIES[family]()
    members: list[Profile] = []
    for item in family:
        members.extend(resolve_family(item) if isinstance(item, str) else [item])
    return members


@dataclass
class InequalityReport:
    name: str
    q: float | None
    labels: list[str]
    ratios: list[float]
    max_ratio: float
    fitted_constant: float
    refinement_drift: float
    grid: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


def constant_sweep(ineq: str, family, q: float | None = None, nodes_per_unit: float = 100.0) -> InequalityReport:
    """Ratio of ``ineq`` over each family member, at two resolutions.

    The fitted constant is the largest ratio seen at either resolution;
    ``refinement_drift`` is the relative change of the maximum when the
    sampling density is doubled.
    """
    if ineq not in RATIOS:
        raise ValueError(f"unknown inequality {ineq!r}; known: {sorted(RATIOS)}")
    if ineq != "hardy":
        _require_q(q)
    members = resolve_family(family)
    if not members:
        raise ValueError("test-function family is empty")
    fn = RATIOS[ineq]
    coarse = [fn(m.sample(nodes_per_unit), q) for m in members]
    fine = [fn(m.sample(2 * nodes_per_unit, min_nodes=800), q) for m in members]
    mc, mf = max(coarse), max(fine)
    return InequalityReport(
        name=ineq,
        q=q,
        labels=[m.label for m in members],
        ratios=fine,
        max_ratio=mf,
        fitted_constant=max(mc, mf),
        refinement_drift=abs(mf - mc) / mf,
        grid={"nodes_per_unit": [nodes_per_unit, 2 * nodes_per_unit], "min_nodes": [400, 800]},
    )


def random_dirichlet_fields(count: int, seed: int = 0, n_knots: Sequence[int] = (3, 40), r_max_range=(1.5, 50.0),
                            n_nodes: int = 2001) -> list[RadialField]:
    """Piecewise-linear fields with random knots and values, zero at ``r = 1``.

    Each field lives on its own grid; some also vanish at the outer end and
    some have random sign changes.
    """
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        r_max = float(np.exp(rng.uniform(np.log(r_max_range[0]), np.log(r_max_range[1]))))
        grid = RadialGrid(r_max, n_nodes)
        k = int(rng.integers(n_knots[0], n_knots[1] + 1))
        knots = np.sort(np.concatenate([[1.0, r_max], rng.uniform(1.0, r_max, k)]))
        vals = rng.normal(size=knots.size)
        if rng.random() < 0.5:
            vals = np.abs(vals)
        vals[0] = 0.0
        if rng.random() < 0.5:
            vals[-1] = 0.0
        out.append(RadialField(grid, np.interp(grid.r, knots, vals)))
    return out
