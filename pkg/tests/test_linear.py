import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from exterior_dw import WaveConfig, abstract_matsumura_verify, dw_linear_evolve, l1dmu_bound_check
from exterior_dw import log_matsumura_report, matsumura_diff_report, positivity_check, reduced_1d_evolve
from exterior_dw.linear import modal_solution, odd_extension, reflection_potential
from exterior_dw.radial import norm

CFG = WaveConfig()


def bump_on(T, dr=0.05, a=1.0, b=3.0, k=2):
    grid = CFG.grid_for(max(b, 6.0), T, dr)
    return grid.sample(lambda r: np.where((r > a) & (r < b), ((r - a) * (b - r)) ** k, 0.0))


def test_zero_data_stays_zero():
    g = bump_on(5.0) * 0.0
    traj = dw_linear_evolve(g, 5.0)
    assert np.all(traj.u == 0) and np.all(traj.v == 0)


def test_cfl_violation_rejected():
    g = bump_on(5.0)
    with pytest.raises(ValueError, match="CFL"):
        dw_linear_evolve(g, 5.0, WaveConfig(dt=g.grid.dr))


def test_support_violation_rejected():
    g = bump_on(5.0)
    with pytest.raises(ValueError, match="support"):
        dw_linear_evolve(g, 500.0)


def test_r_max_rule_light_cone_then_diffusive():
    c = WaveConfig(margin=5.0, tol_tail=1e-10)
    assert math.isclose(c.required_r_max(3.0, 10.0), 18.0)
    L = math.log(1e10)
    assert math.isclose(c.required_r_max(3.0, 1e4), 8.0 + math.sqrt(4e4 * L))


def test_energy_bounded_by_data_and_non_increasing():
    g = bump_on(20.0)
    traj = dw_linear_evolve(g, 20.0, output_times=np.linspace(0, 20, 401))
    e = traj.energies()
    assert e.max() <= norm(g) ** 2 * (1 + 1e-3)
    assert np.all(np.diff(e) <= 1e-6 * e[0])


@given(a=st.floats(-3, 3), b=st.floats(-3, 3))
@settings(max_examples=20, deadline=None)
def test_linearity(a, b):
    g1 = bump_on(4.0, 0.05)
    g2 = bump_on(4.0, 0.05, 1.5, 2.5, 3)
    t = [0, 2, 4]
    lhs = dw_linear_evolve(a * g1 + b * g2, 4.0, output_times=t).u
    rhs = a * dw_linear_evolve(g1, 4.0, output_times=t).u + b * dw_linear_evolve(g2, 4.0, output_times=t).u
    scale = max(1.0, np.abs(rhs).max())
    assert np.abs(lhs - rhs).max() <= 1e-10 * scale


def test_finite_propagation():
    g = bump_on(6.0, 0.02, 2.0, 3.0)
    traj = dw_linear_evolve(g, 6.0, output_times=[1, 3, 6])
    top = np.abs(traj.u).max()
    for k, t in enumerate(traj.times):
        # beyond the light cone plus one stencil width only leapfrog leakage remains
        outside = traj.grid.r > 3.0 + t + 2 * traj.grid.dr
        assert np.abs(traj.u[k][outside]).max() <= 1e-4 * top
        # and the scheme's own cone (dr/dt nodes per step) is exact
        beyond = traj.grid.r > 3.0 + t * traj.grid.dr / CFG.step(traj.grid) + 2 * traj.grid.dr
        assert np.all(traj.u[k][beyond] == 0)


def test_potential():
    assert reflection_potential(0.0) == 0.5
    y = np.linspace(-50, 50, 1001)
    m = reflection_potential(y)
    assert np.all((m >= 0.25) & (m <= 0.5))
    assert np.allclose(m, m[::-1])


def test_odd_extension():
    g = bump_on(5.0)
    y, w = odd_extension(g)
    n = g.grid.n
    assert y[n - 1] == 0 and w[n - 1] == 0
    assert np.array_equal(w, -w[::-1])
    assert np.allclose(w[n:], np.sqrt(g.grid.r[1:]) * g.values[1:])


def test_reduced_solution_stays_odd():
    g = bump_on(10.0)
    traj = reduced_1d_evolve(g, 10.0, output_times=np.linspace(0, 10, 51))
    n = g.grid.n
    assert np.abs(traj.U_line[:, n - 1]).max() <= 1e-12
    assert np.abs(traj.U_line + traj.U_line[:, ::-1]).max() <= 1e-12 * np.abs(traj.U_line).max()


def test_cross_solver_agreement_second_order():
    errs = []
    for dr in (0.04, 0.02, 0.01):
        g = bump_on(8.0, dr)
        a = dw_linear_evolve(g, 8.0, output_times=[2, 4, 8])
        b = reduced_1d_evolve(g, 8.0, output_times=[2, 4, 8])
        errs.append(max(np.abs(a.u - b.u).max(), np.abs(a.v - b.v).max()))
    assert errs[-1] < 1e-5
    assert 3.5 < errs[0] / errs[1] < 4.5 and 3.5 < errs[1] / errs[2] < 4.5


def test_trajectory_csv(tmp_path):
    g = bump_on(1.0, 0.1)
    traj = dw_linear_evolve(g, 1.0, output_times=[0, 1])
    path = traj.to_csv(tmp_path / "traj.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == "t,r,u,v"
    assert len(lines) == 1 + 2 * g.grid.n


def test_positivity_smooth_bump():
    rep = positivity_check(bump_on(30.0, 0.05), 30.0)
    assert rep.passed
    assert rep.min_full >= -1e-6 and rep.min_reduced >= -1e-6


def test_positivity_zero_and_sign_changing():
    g = bump_on(5.0)
    rep = positivity_check(g * 0.0, 5.0)
    assert rep.status == "passed" and rep.min_full == 0.0
    h = g - 2.0 * bump_on(5.0, 0.05, 4.0, 6.0)
    rep = positivity_check(h, 5.0)
    assert rep.status == "skipped" and "precondition" in rep.reason


def test_l1dmu_bound_nonnegative_and_small_t():
    g = bump_on(50.0)
    rep = l1dmu_bound_check(g, [1e-3, 0.1, 1, 10, 50])
    assert rep.passed and all(r <= 1.02 for r in rep.ratios)
    assert 0.9 < rep.ratios[0] <= 1.0 + 1e-3  # u ~ t g as t -> 0


def test_l1dmu_bound_sign_changing_parts():
    g = bump_on(50.0) - bump_on(50.0, 0.05, 4.0, 6.0, 3)
    for f in (g, g.positive_part(), g.negative_part()):
        assert l1dmu_bound_check(f, [0.1, 1, 10, 50]).max_ratio <= 1.02


def test_matsumura_zero_data():
    rep = matsumura_diff_report(bump_on(10.0, 0.1) * 0.0, [1, 10])
    assert rep.grad_ratios == [0.0, 0.0] and rep.dt_ratios == [0.0, 0.0]


def test_matsumura_rejects_small_times():
    with pytest.raises(ValueError):
        matsumura_diff_report(bump_on(10.0, 0.1), [0.5, 10])


def test_matsumura_no_growth_and_json():
    rep = matsumura_diff_report(bump_on(100.0, 0.1), [1, 10, 100])
    assert rep.grad_ratios[-1] <= 3 * rep.grad_ratios[0]
    assert rep.dt_ratios[-1] <= 3 * rep.dt_ratios[0]
    assert json.loads(rep.to_json())["grad_constant"] == rep.grad_constant


@pytest.mark.parametrize("q", [1.0, 2.0])
def test_log_matsumura_bounded(q):
    times = [0.1, 0.5, 1, 10, 100, 1000]
    rep = log_matsumura_report(bump_on(1000.0, 0.1), q, times)
    assert np.all(np.isfinite(rep.grad_ratios))
    decade = dict(zip(rep.times, rep.grad_ratios))
    assert decade[1000.0] <= 2 * decade[100.0] and decade[100.0] <= 2 * decade[10.0]
    # t <= 1: controlled by the energy bound |grad u| <= |g|
    g = bump_on(1000.0, 0.1)
    for t, r in zip(rep.times, rep.grad_ratios):
        if t <= 1:
            from exterior_dw import h_weight

            assert r <= norm(g) / (h_weight(t) ** (1 / q) * norm(g)) + 1e-12


def test_modal_closed_forms():
    t = np.linspace(0, 10, 101)
    y, _ = modal_solution(0.0, t)
    assert np.allclose(y, 1 - np.exp(-t))
    y, _ = modal_solution(0.25, t)
    assert np.allclose(y, t * np.exp(-t / 2))


@pytest.mark.parametrize("lam", [0.0, 0.1, 0.2499, 0.25, 0.2501, 3.0, 100.0])
def test_modal_matches_ode_integration(lam):
    t = np.linspace(0, 20, 201)
    sol = solve_ivp(lambda s, z: [z[1], -z[1] - lam * z[0]], (0, 20), [0.0, 1.0], t_eval=t, rtol=1e-12, atol=1e-14)
    y, yp = modal_solution(lam, t)
    assert np.allclose(y, sol.y[0], atol=1e-9)
    assert np.allclose(yp, sol.y[1], atol=1e-9)


def test_modal_rejects_negative():
    with pytest.raises(ValueError):
        abstract_matsumura_verify([-1.0], [1.0])


def test_modal_uniform_constants_finite():
    rep = abstract_matsumura_verify(np.geomspace(1e-3, 1e3, 25), np.linspace(1, 100, 500))
    assert math.isfinite(rep.uniform_grad_constant) and math.isfinite(rep.uniform_dt_constant)
    assert rep.uniform_grad_constant < 1.0 and rep.uniform_dt_constant < 2.0
