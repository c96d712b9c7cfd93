"""INI experiment configuration.

A minimal file only needs ``[experiment] kind``. Everything else has a
default, listed in ``DEFAULTS`` below. Validation collects every violation
before reporting, and each message names the offending ``section.key``.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from pathlib import Path

KINDS = ("heat-decay", "linear-estimates", "inequalities", "lifespan-sweep", "global-decay", "supersolution-compare")

# section -> key -> default (as text, the way it would appear in the file)
DEFAULTS: dict[str, dict[str, str]] = {
    "experiment": {"kind": "", "seed": "0"},
    "grid": {"dr": "0.1"},
    "solver": {
        "dt": "",
        "cfl": "0.5",
        "margin": "5",
        "m_blow": "1e8",
        "refine_tol": "0.02",
        "max_refinements": "3",
        "tol_tail": "1e-10",
    },
    "data": {"a": "3"},
    "sweep": {"p": "1.5", "epsilons": "", "eps_min": "0.03", "eps_max": "0.5", "eps_count": "8", "horizon": "2e4"},
    "heat": {"q": "1, 2", "times": "1, 10, 100, 1000, 10000"},
    "inequalities": {"families": "bumps, gaussians, hardy_extremal, dilations, translations", "q": "1.5, 2, 3"},
    "output": {"dir": "out"},
}


class ConfigError(ValueError):
    """All violations found in one file; ``violations`` holds one message each."""

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    seed: int = 0
    dr: float = 0.1
    dt: float | None = None
    cfl: float = 0.5
    margin: float = 5.0
    m_blow: float = 1e8
    refine_tol: float = 0.02
    max_refinements: int = 3
    tol_tail: float = 1e-10
    a: float = 3.0
    p: float = 1.5
    epsilons: tuple[float, ...] = ()
    horizon: float = 2e4
    heat_q: tuple[float, ...] = (1.0, 2.0)
    heat_times: tuple[float, ...] = (1.0, 10.0, 100.0, 1000.0, 10000.0)
    families: tuple[str, ...] = ()
    ineq_q: tuple[float, ...] = (1.5, 2.0, 3.0)
    out_dir: Path = field(default_factory=lambda: Path("out"))
    source: str = "<defaults>"

    def evolution(self):
        from .semilinear import EvolutionConfig

        return EvolutionConfig(dt=self.dt, cfl=self.cfl, margin=self.margin, tol_tail=self.tol_tail,
                               m_blow=self.m_blow, refine_tol=self.refine_tol, max_refinements=self.max_refinements)


def default_config(kind: str, **overrides) -> ExperimentConfig:
    """Config with every default filled, as :func:`parse_config` would give for a file with only ``kind``."""
    return _build({s: dict(v) for s, v in DEFAULTS.items()} | {"experiment": {**DEFAULTS["experiment"], "kind": kind}},
                  "<defaults>", overrides)


def parse_config(path) -> ExperimentConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError([f"config file not found: {path}"])
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read(path)
    except configparser.Error as exc:
        raise ConfigError([f"{path}: unreadable INI ({exc.__class__.__name__}: {exc})"]) from exc
    problems = []
    raw = {s: dict(v) for s, v in DEFAULTS.items()}
    for section in cp.sections():
        if section not in DEFAULTS:
            problems.append(f"[{section}]: unknown section")
            continue
        for key, value in cp.items(section):
            if key not in DEFAULTS[section]:
                problems.append(f"{section}.{key}: unknown key")
            else:
                raw[section][key] = value.strip()
    try:
        cfg = _build(raw, str(path), {})
    except ConfigError as exc:
        problems.extend(exc.violations)
        raise ConfigError(problems) from None
    if problems:
        raise ConfigError(problems)
    return cfg


def _build(raw: dict, source: str, overrides: dict) -> ExperimentConfig:
    problems: list[str] = []

    def num(section, key, kind=float, optional=False):
        text = raw[section][key]
        if text == "" and optional:
            return None
        try:
            v = kind(float(text)) if kind is int else kind(text)
        except ValueError:
            problems.append(f"{section}.{key}: expected a number, got {text!r}")
            return None
        if kind is float and not math.isfinite(v):
            problems.append(f"{section}.{key}: must be finite")
            return None
        return v

    def nums(section, key):
        text = raw[section][key]
        out = []
        for part in filter(None, (s.strip() for s in text.split(","))):
            try:
                out.append(float(part))
            except ValueError:
                problems.append(f"{section}.{key}: expected comma-separated numbers, got {part!r}")
        return tuple(out)

    kind = raw["experiment"]["kind"]
    if kind not in KINDS:
        problems.append(f"experiment.kind: must be one of {', '.join(KINDS)}; got {kind!r}")
    vals = dict(
        kind=kind,
        seed=num("experiment", "seed", int),
        dr=num("grid", "dr"),
        dt=num("solver", "dt", optional=True),
        cfl=num("solver", "cfl"),
        margin=num("solver", "margin"),
        m_blow=num("solver", "m_blow"),
        refine_tol=num("solver", "refine_tol"),
        max_refinements=num("solver", "max_refinements", int),
        tol_tail=num("solver", "tol_tail"),
        a=num("data", "a"),
        p=num("sweep", "p"),
        horizon=num("sweep", "horizon"),
        heat_q=nums("heat", "q"),
        heat_times=nums("heat", "times"),
        ineq_q=nums("inequalities", "q"),
        families=tuple(filter(None, (s.strip() for s in raw["inequalities"]["families"].split(",")))),
        out_dir=Path(raw["output"]["dir"]),
    )
    eps = nums("sweep", "epsilons")
    if not eps and not raw["sweep"]["epsilons"]:
        lo, hi, count = num("sweep", "eps_min"), num("sweep", "eps_max"), num("sweep", "eps_count", int)
        if None not in (lo, hi, count):
            if lo <= 0 or hi <= 0:
                problems.append("sweep.eps_min/eps_max: must be positive")
            elif count < 1:
                problems.append("sweep.eps_count: epsilon grid is empty")
            else:
                eps = tuple(float(x) for x in _geomspace(lo, hi, count))
    vals["epsilons"] = eps
    vals.update(overrides)
    _validate(vals, problems)
    if problems:
        raise ConfigError(problems)
    return ExperimentConfig(**vals, source=source)


def _geomspace(lo, hi, n):
    if n == 1:
        return [lo]
    return [lo * (hi / lo) ** (i / (n - 1)) for i in range(n)]


def _validate(v: dict, problems: list[str]):
    def check(ok, msg):
        if not ok:
            problems.append(msg)

    if v["dr"] is not None:
        check(v["dr"] > 0, "grid.dr: must be positive")
    if v["cfl"] is not None:
        check(0 < v["cfl"] <= 1, "solver.cfl: must lie in (0, 1]")
    if v["dt"] is not None:
        check(v["dt"] > 0, "solver.dt: must be positive")
        if v["dr"] and v["cfl"]:
            check(v["dt"] <= v["cfl"] * v["dr"], f"solver.dt: CFL rule dt <= cfl*dr violated ({v['dt']:g} > {v['cfl'] * v['dr']:g})")
    if v["p"] is not None:
        check(v["p"] > 1, f"sweep.p: nonlinearity exponent must satisfy p > 1, got {v['p']:g}")
    if v["m_blow"] is not None:
        check(v["m_blow"] > 1, "solver.m_blow: must exceed 1")
    if v["refine_tol"] is not None:
        check(0 < v["refine_tol"] < 1, "solver.refine_tol: must lie in (0, 1)")
    if v["max_refinements"] is not None:
        check(v["max_refinements"] >= 0, "solver.max_refinements: must be >= 0")
    if v["tol_tail"] is not None:
        check(0 < v["tol_tail"] < 1, "solver.tol_tail: must lie in (0, 1)")
    if v["margin"] is not None:
        check(v["margin"] >= 0, "solver.margin: must be >= 0")
    if v["a"] is not None:
        check(v["a"] > 1, "data.a: support end must exceed 1")
    if v["horizon"] is not None:
        check(v["horizon"] > 0, "sweep.horizon: must be positive")
    check(all(e > 0 for e in v["epsilons"]), "sweep.epsilons: every epsilon must be positive")
    if v["kind"] in ("lifespan-sweep", "supersolution-compare"):
        check(len(v["epsilons"]) > 0, "sweep.epsilons: epsilon grid is empty")
    check(all(1 <= q <= 2 for q in v["heat_q"]), "heat.q: exponents must lie in [1, 2]")
    check(all(t > 0 for t in v["heat_times"]), "heat.times: must be positive")
    check(list(v["heat_times"]) == sorted(v["heat_times"]), "heat.times: must be increasing")
    check(all(q > 1 for q in v["ineq_q"]), "inequalities.q: exponents must exceed 1")
    from .inequalities import FAMILIES

    bad = [f for f in v["families"] if f not in FAMILIES]
    check(not bad, f"inequalities.families: unknown {bad}; known {sorted(FAMILIES)}")
