import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exterior_dw import Measure, constant_sweep, gn_ratio, hardy_ratio, log_gn_ratio, norm
from exterior_dw.inequalities import TOL_DISC, bump, dilation, hardy_near_extremal, random_dirichlet_fields
from exterior_dw.radial import build_grid

HARDY_FAR_BUMP = 2.6052597839968017e-4  # mpmath quadrature of ((r-100)(200-r))^2 on [100, 200]


def test_hardy_below_one_on_fuzzed_fields():
    ratios = [hardy_ratio(f) for f in random_dirichlet_fields(500, seed=11)]
    assert max(ratios) <= 1 + TOL_DISC


def test_hardy_near_extremal_trend():
    ratios = [hardy_ratio(hardy_near_extremal(R).sample(100)) for R in (10, 100, 1e3, 1e4)]
    assert np.all(np.diff(ratios) > 0)
    assert max(ratios) <= 1 + TOL_DISC


def test_hardy_near_extremal_matches_continuum_quotient():
    # in s = log(1 + log r) the profile reduces to a sine mode with quotient
    # (1/4) / ((pi/L)^2 + 1/4); only the log-rescaled quadrature differs
    R = 1e3
    L = math.log1p(math.log(R))
    expected = 0.25 / ((math.pi / L) ** 2 + 0.25)
    got = hardy_ratio(hardy_near_extremal(R).sample(100, min_nodes=4000))
    assert math.isclose(got, expected, rel_tol=2e-3)


def test_hardy_far_support_small():
    f = bump(100, 200).sample(50)
    assert math.isclose(hardy_ratio(f), HARDY_FAR_BUMP, rel_tol=1e-3)


def test_ratios_reject_zero_and_bad_q():
    z = build_grid(3, 30).zeros()
    for fn in (hardy_ratio, lambda f: gn_ratio(f, 2), lambda f: log_gn_ratio(f, 2)):
        with pytest.raises(ValueError):
            fn(z)
    f = bump(1, 2).sample(100)
    for q in (1.0, 0.5):
        with pytest.raises(ValueError):
            gn_ratio(f, q)
        with pytest.raises(ValueError):
            log_gn_ratio(f, q)


@given(c=st.floats(1e-6, 1e6) | st.floats(-1e6, -1e-6), q=st.floats(1.1, 6.0))
@settings(max_examples=60, deadline=None)
def test_homogeneity(c, q):
    f = bump(1.0, 4.0, 3.0).sample(60)
    g = f * c
    assert math.isclose(hardy_ratio(g), hardy_ratio(f), rel_tol=1e-12)
    assert math.isclose(gn_ratio(g, q), gn_ratio(f, q), rel_tol=1e-12)
    assert math.isclose(log_gn_ratio(g, q), log_gn_ratio(f, q), rel_tol=1e-12)


@given(seed=st.integers(0, 2**31 - 1), q=st.sampled_from([1.5, 2.0, 3.0]))
@settings(max_examples=40, deadline=None)
def test_weighted_norm_sandwich(seed, q):
    f = random_dirichlet_fields(1, seed=seed, n_nodes=301)[0]
    plain, weighted = norm(f, q), norm(f, q, Measure.LOG_WEIGHTED)
    r_supp = f.support_radius()
    assert plain <= weighted * (1 + 1e-12)
    assert weighted <= (1 + math.log(r_supp)) ** (1 / q) * plain * (1 + 1e-12)


def test_gn_dilation_family_bounded():
    base = bump(1, 2)
    ratios = [gn_ratio(dilation(base, lam).sample(100), 2.0) for lam in (1, 2, 4, 8)]
    assert max(ratios) / min(ratios) < 2.0


def test_nash_constant_refinement_stable():
    rep = constant_sweep("gn", "bumps", 2.0)
    assert rep.refinement_drift <= 0.10
    assert rep.max_ratio <= rep.fitted_constant


def test_log_gn_translations_bounded():
    for q in (1.5, 2.0, 3.0):
        rep = constant_sweep("log_gn", "translations", q)
        assert rep.ratios[-1] <= rep.ratios[0]
        assert rep.refinement_drift <= 0.10


def test_sweep_hardy_all_families():
    for fam in ("bumps", "gaussians", "hardy_extremal", "dilations", "translations"):
        rep = constant_sweep("hardy", fam)
        assert rep.max_ratio <= 1 + TOL_DISC


def test_sweep_errors():
    with pytest.raises(ValueError):
        constant_sweep("hardy", [])
    with pytest.raises(ValueError):
        constant_sweep("nope", "bumps")
    with pytest.raises(ValueError):
        constant_sweep("gn", "bumps", 1.0)
    with pytest.raises(ValueError):
        constant_sweep("hardy", "unknown-family")


def test_report_json():
    rep = constant_sweep("log_gn", "dilations", 2.0)
    doc = json.loads(rep.to_json())
    assert doc["name"] == "log_gn" and len(doc["ratios"]) == 4
    assert "refinement_drift" in doc and "grid" in doc
