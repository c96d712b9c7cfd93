import json
import math
from dataclasses import replace

import numpy as np
import pytest

from exterior_dw.cli import main
from exterior_dw.config import ConfigError, default_config, parse_config
from exterior_dw.experiments import CheckResult
from exterior_dw.harness import emit_summary, fit_exponent, run_sweep, subcritical_abscissa
from exterior_dw.semilinear import LifespanRecord


def write(tmp_path, text, name="exp.ini"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_minimal_config_defaults(tmp_path):
    cfg = parse_config(write(tmp_path, "[experiment]\nkind = heat-decay\n"))
    assert cfg.kind == "heat-decay"
    assert cfg.dr == 0.1 and cfg.cfl == 0.5 and cfg.dt is None and cfg.m_blow == 1e8
    assert cfg.heat_q == (1.0, 2.0)
    assert len(cfg.epsilons) == 8 and math.isclose(cfg.epsilons[0], 0.03)


def test_p_below_one_named(tmp_path):
    with pytest.raises(ConfigError) as exc:
        parse_config(write(tmp_path, "[experiment]\nkind = lifespan-sweep\n[sweep]\np = 0.5\n"))
    assert any("sweep.p" in v and "p > 1" in v for v in exc.value.violations)


def test_cfl_named(tmp_path):
    with pytest.raises(ConfigError) as exc:
        parse_config(write(tmp_path, "[experiment]\nkind = global-decay\n[grid]\ndr = 0.1\n[solver]\ndt = 0.2\n"))
    assert any("CFL" in v and "solver.dt" in v for v in exc.value.violations)


def test_all_violations_collected(tmp_path):
    text = "[experiment]\nkind = bogus\n[sweep]\np = 0.5\nfoo = 1\n[grid]\ndr = -1\n[nonsense]\nx = 1\n"
    with pytest.raises(ConfigError) as exc:
        parse_config(write(tmp_path, text))
    v = " | ".join(exc.value.violations)
    for key in ("experiment.kind", "sweep.p", "sweep.foo", "grid.dr", "[nonsense]"):
        assert key in v


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        parse_config(tmp_path / "absent.ini")


def test_empty_epsilon_grid(tmp_path):
    with pytest.raises(ConfigError, match="empty"):
        parse_config(write(tmp_path, "[experiment]\nkind = lifespan-sweep\n[sweep]\neps_count = 0\n"))


def test_run_sweep_empty_grid_rejected():
    cfg = replace(default_config("lifespan-sweep"), epsilons=())
    with pytest.raises(ValueError):
        run_sweep(cfg)


def test_sweep_isolation_and_order(tmp_path):
    # -1 makes lifespan_estimate raise; its row is flagged and the others survive
    cfg = replace(default_config("lifespan-sweep", p=2.0, horizon=200.0), epsilons=(40.0, -1.0, 30.0))
    recs = run_sweep(cfg, jobs=2, csv_path=tmp_path / "s.csv")
    assert [r.epsilon for r in recs] == [-1.0, 30.0, 40.0]
    assert not recs[0].converged and recs[0].status == "failed" and "ValueError" in recs[0].error
    assert recs[1].converged and recs[2].converged
    assert recs[1].T_measured > recs[2].T_measured
    header = (tmp_path / "s.csv").read_text().splitlines()[0]
    assert header == "p,epsilon,T_measured,converged,Q_value,grid_n,dt"


def test_sweep_csv_deterministic(tmp_path):
    cfg = replace(default_config("lifespan-sweep", p=2.0, horizon=200.0), epsilons=(40.0, 50.0))
    run_sweep(cfg, jobs=1, csv_path=tmp_path / "a.csv")
    run_sweep(cfg, jobs=2, csv_path=tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def records(p, eps, T):
    return [LifespanRecord(p, e, t, True, 0.0, 10, 0.1) for e, t in zip(eps, T)]


def test_fit_exact_power_law():
    eps = np.geomspace(0.5, 0.01, 6)
    T = 7.0 * subcritical_abscissa(eps) ** 1.0
    fit = fit_exponent(records(1.5, eps, T), "sub-2")
    assert abs(fit.exponent - 1.0) <= 1e-6 and math.isclose(fit.constant, 7.0)
    assert fit.residual < 1e-10 and fit.n_points == 6


@pytest.mark.parametrize("p,slope", [(1.5, 1.0), (1.8, 4.0)])
def test_expected_slope(p, slope):
    eps = np.geomspace(0.5, 0.05, 4)
    fit = fit_exponent(records(p, eps, subcritical_abscissa(eps)), "sub-2")
    assert math.isclose(fit.expected, slope)


def test_fit_needs_three_converged():
    recs = records(1.5, [0.1, 0.2, 0.3], [10, 5, 3])
    recs[0].converged = False
    with pytest.raises(ValueError):
        fit_exponent(recs, "sub-2")


def test_critical_q_band():
    eps = np.array([20.0, 30.0, 40.0])
    T = np.expm1(np.expm1(50.0 / eps))  # Q = 50 exactly
    fit = fit_exponent(records(2.0, eps, T), "critical-Q")
    assert math.isclose(fit.q_min, 50.0) and math.isclose(fit.q_ratio, 1.0)


def test_summary_empty(tmp_path):
    assert emit_summary([], tmp_path) == 0
    doc = json.loads((tmp_path / "summary.json").read_text())
    assert doc == {"all_passed": True, "checks": []}
    assert (tmp_path / "summary.md").exists()


def test_summary_failing_exit_code(tmp_path):
    ok = CheckResult(1, "a", "x", "g", True, "tol", {"v": 1.0})
    bad = CheckResult(2, "b", "y", "g", False, "tol", {"v": 2.0})
    assert emit_summary([ok, bad], tmp_path) == 1
    md = (tmp_path / "summary.md").read_text()
    assert "FAIL" in md and "pass" in md


def test_cli_config_error_exit_2(tmp_path, capsys):
    p = write(tmp_path, "[experiment]\nkind = lifespan-sweep\n[sweep]\np = 0.5\n")
    assert main(["lifespan-sweep", "--config", str(p), "--out", str(tmp_path / "o")]) == 2
    assert "sweep.p" in capsys.readouterr().err


def test_cli_kind_mismatch_exit_2(tmp_path):
    p = write(tmp_path, "[experiment]\nkind = heat-decay\n")
    assert main(["inequalities", "--config", str(p), "--out", str(tmp_path)]) == 2


def test_cli_inequalities(tmp_path):
    out = tmp_path / "o"
    assert main(["inequalities", "--out", str(out), "--seed", "3"]) == 0
    doc = json.loads((out / "summary.json").read_text())
    assert [c["criterion"] for c in doc["checks"]] == [1, 7]
    assert (out / "inequalities.json").exists()


def test_cli_supersolution_compare(tmp_path):
    p = write(tmp_path, "[experiment]\nkind = supersolution-compare\n[sweep]\np = 2\nepsilons = 40, 60\nhorizon = 100\n")
    assert main(["supersolution-compare", "--config", str(p), "--out", str(tmp_path / "o")]) == 0
    lines = (tmp_path / "o" / "supersolution_compare.csv").read_text().splitlines()
    assert lines[0].startswith("p,epsilon,T_heat") and len(lines) == 3
