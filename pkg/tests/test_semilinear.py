import math

import numpy as np
import pytest

from exterior_dw import EvolutionConfig, Measure, detect_blowup, duhamel_residual_check
from exterior_dw import global_decay_report, heat_supersolution_lifespan, int_h_power, lifespan_estimate, norm
from exterior_dw import semilinear_evolve
from exterior_dw.semilinear import Status, _crossing_time, data_norm, default_data, q_value


@pytest.fixture(scope="module")
def g():
    return default_data(3.0, 0.1)


def test_default_data_normalised():
    g = default_data(2.0, 0.01)
    assert math.isclose(data_norm(g), 1.0)
    assert g.is_dirichlet and g.support_radius() < 2.0


def test_zero_epsilon_completes_with_zero_solution(g):
    run = semilinear_evolve(g, 0.0, 2.0, 10.0)
    assert run.status is Status.COMPLETED
    assert max(run.functionals.sup) == 0.0 and np.all(run.final.values == 0)


def test_rejects_bad_inputs(g):
    with pytest.raises(ValueError):
        semilinear_evolve(g, 1.0, 1.0, 10.0)
    with pytest.raises(ValueError):
        semilinear_evolve(g, -1.0, 2.0, 10.0)
    with pytest.raises(ValueError, match="CFL"):
        semilinear_evolve(g, 1.0, 2.0, 10.0, EvolutionConfig(dt=2 * g.grid.dr))


def test_crossing_time_interpolation():
    prev, cur = np.array([0.0, 1e6]), np.array([0.0, 1e10])
    # log-midpoint of 1e6 and 1e10 is 1e8
    assert math.isclose(_crossing_time(prev, cur, 10, 0.1, 1e8), 0.95)
    assert _crossing_time(prev, np.array([0.0, np.inf]), 10, 0.1, 1e8) == pytest.approx(0.9)


def test_p2_blowup_earlier_for_larger_eps(g):
    runs = [semilinear_evolve(g, eps, 2.0, 500.0) for eps in (26.0, 30.0, 40.0)]
    assert all(r.blew_up for r in runs)
    t = [r.t_blow for r in runs]
    assert t[0] > t[1] > t[2] > 0
    assert runs[0].functionals.sup[-1] >= 1e8


def test_p3_small_data_global():
    run = semilinear_evolve(default_data(3.0, 0.1), 0.1, 3.0, 1e3)
    assert run.status is Status.COMPLETED and run.t_end == 1e3
    e = np.square(run.functionals.grad_l2) + np.square(run.functionals.dtu_l2)
    assert e[-1] < 1e-3 * e[1]


def test_xt_monotone_and_functionals_csv(tmp_path, g):
    run = semilinear_evolve(g, 30.0, 2.0, 200.0)
    assert np.all(np.diff(run.functionals.xt) >= 0)
    path = run.functionals.to_csv(tmp_path / "f.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == "t,l1dmu,grad_l2,dtu_l2,sup,xt"
    assert len(lines) == 1 + len(run.functionals.t)


def test_semilinear_stays_nonnegative(g):
    run = semilinear_evolve(g, 5.0, 2.0, 50.0)
    top = max(run.functionals.sup)
    assert run.final.values.min() >= -1e-6 * top


def test_semilinear_dominates_linear_flow(g):
    eps, T = 1.0, 3.0
    cfg = EvolutionConfig(store_every=10)
    run = semilinear_evolve(g, eps, 2.0, T, cfg)
    lin = semilinear_evolve(g, eps, 2.0, T, cfg, source=False)
    for u, v in zip(run.stored_u[1:], lin.stored_u[1:]):
        assert np.all(u >= v - 1e-14)


def test_linear_run_never_declares(g):
    run = semilinear_evolve(g, 30.0, 2.0, 200.0, source=False)
    assert not detect_blowup(run).declared


def test_detect_blowup_stable_and_divergent_functionals(g):
    run = semilinear_evolve(g, 30.0, 2.0, 500.0)
    dec = detect_blowup(run)
    assert dec.declared and dec.stable and dec.relative_change < 0.02
    assert dec.xt_growth > 1e3 and dec.sup_growth > 1e3


def test_detect_blowup_flags_unstable_refinement(g):
    run = semilinear_evolve(g, 30.0, 2.0, 500.0)
    # a "refined" run that crosses much later stands in for a drifting crossing time
    other = semilinear_evolve(g, 29.0, 2.0, 500.0)
    dec = detect_blowup(run, other)
    assert dec.relative_change > 0.02 and not dec.declared


def test_lifespan_record_and_q(g):
    rec = lifespan_estimate(g, 30.0, 2.0, 1e3)
    assert rec.converged and rec.T_measured > 0
    assert math.isclose(rec.Q_value, 30.0 * math.log1p(math.log1p(rec.T_measured)))
    assert rec.history[-1] == rec.T_measured


def test_lifespan_horizon_exhausted(g):
    rec = lifespan_estimate(g, 1.0, 2.0, 50.0)
    assert rec.status == "completed" and rec.T_measured == 50.0 and not rec.converged


def test_lifespan_huge_epsilon_small_positive(g):
    rec = lifespan_estimate(g, 1e4, 2.0, 10.0)
    assert 0 < rec.T_measured < 0.5


def test_lifespan_decreases_in_eps_p15(g):
    T = [lifespan_estimate(g, eps, 1.5, 1e3).T_measured for eps in (0.8, 1.6, 3.2)]
    assert T[0] > T[1] > T[2]


def test_q_value_uses_int_h_power():
    assert math.isclose(q_value(0.5, 1.5, 100.0), 0.5**0.5 * int_h_power(100.0, 1.5))


def test_duhamel_linear_is_exact():
    run = semilinear_evolve(default_data(3.0, 0.04), 0.5, 2.0, 2.0, EvolutionConfig(store_every=1), source=False)
    assert duhamel_residual_check(run, [1.0, 2.0]).max_deviation <= 1e-13


def test_duhamel_second_order():
    devs = []
    for dr in (0.04, 0.02, 0.01):
        run = semilinear_evolve(default_data(3.0, dr), 0.5, 2.0, 2.0, EvolutionConfig(store_every=1))
        devs.append(duhamel_residual_check(run, [2.0]).max_deviation)
    slope = np.polyfit(np.log([0.04, 0.02, 0.01]), np.log(devs), 1)[0]
    assert 1.7 <= slope <= 2.3


def test_duhamel_deviation_grows_with_eps():
    g = default_data(3.0, 0.04)
    devs = [duhamel_residual_check(semilinear_evolve(g, e, 2.0, 2.0, EvolutionConfig(store_every=1)), [2.0]).max_deviation
            for e in (0.25, 1.0, 4.0)]
    assert devs[0] < devs[1] < devs[2]


def test_duhamel_needs_stored_profiles(g):
    with pytest.raises(ValueError):
        duhamel_residual_check(semilinear_evolve(g, 0.1, 2.0, 1.0), [1.0])


def test_supersolution_p2_double_exponential():
    f = default_data(3.0, 0.1)
    inv = np.array([1.0, 2.0, 3.0, 4.0])
    ll = [heat_supersolution_lifespan(f, 1 / x, 2.0, 1e3, extrapolate=True).log_log_time for x in inv]
    # log log T grows linearly in 1/eps
    slope, icpt = np.polyfit(inv, ll, 1)
    resid = np.array(ll) - (slope * inv + icpt)
    assert slope > 0 and np.abs(resid).max() < 0.05 * slope


def test_supersolution_p3_global_for_small_eps():
    s = heat_supersolution_lifespan(default_data(3.0, 0.1), 0.5, 3.0, 1e3, extrapolate=True)
    assert not s.reached and math.isinf(s.time)


def test_supersolution_large_eps_short_and_decreasing():
    f = default_data(3.0, 0.1)
    t = [heat_supersolution_lifespan(f, e, 2.0, 100.0).time for e in (50.0, 100.0, 200.0)]
    assert t[0] > t[1] > t[2] > 0


def test_supersolution_horizon_flag():
    s = heat_supersolution_lifespan(default_data(3.0, 0.1), 1.0, 2.0, 10.0)
    assert not s.reached and s.time == 10.0


def test_global_decay_bounded(g):
    run = semilinear_evolve(default_data(3.0, 0.1), 0.1, 3.0, 1e3)
    rep = global_decay_report(run)
    assert rep.passed and rep.t_early == 10.0 and rep.t_late == 1e3
    assert max(rep.l1dmu) <= 2 * 0.1 * norm(run.g, 1, Measure.LOG_WEIGHTED)


def test_global_decay_zero_data(g):
    rep = global_decay_report(semilinear_evolve(g, 0.0, 3.0, 100.0))
    assert all(v == 0 for v in rep.suprema.values())


def test_global_decay_preconditions(g):
    with pytest.raises(ValueError):
        global_decay_report(semilinear_evolve(g, 0.1, 2.0, 20.0))
    with pytest.raises(ValueError):
        global_decay_report(semilinear_evolve(g, 100.0, 3.0, 500.0))
