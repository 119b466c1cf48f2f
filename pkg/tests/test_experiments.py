import numpy as np
import pytest
from dataclasses import replace

from gsqg.basis import build_rectangle_basis
from gsqg.experiments import (
    SweepReport,
    mode_sweep,
    sine_window_test,
    viscosity_sweep,
    weak_continuity_terms,
    weak_residual,
)
from gsqg.galerkin import SimConfig, run
from gsqg.weakform import test_function_catalog as catalog


@pytest.fixture
def viscous_config():
    return SimConfig(alpha=0.5, epsilon=0.01, m=16, dt=1e-3, T=0.25,
                     initial="random", seed=7, stride=1)


def test_space_time_window_vanishes_at_endpoints():
    st = sine_window_test(catalog()["quartic"], T=0.5)
    assert st.chi(0.0) == 0.0
    assert abs(st.chi(0.5)) < 1e-12
    # analytic derivative vs finite difference
    h = 1e-7
    for t in (0.1, 0.23, 0.4):
        fd = (st.chi(t + h) - st.chi(t - h)) / (2 * h)
        assert st.dchi(t) == pytest.approx(fd, abs=1e-6)


def test_weak_residual_steady_single_mode():
    cfg = SimConfig(alpha=0.5, epsilon=0.0, m=16, dt=1e-3, T=0.25,
                    initial="single_mode", stride=1)
    tr = run(cfg)
    st = sine_window_test(catalog()["sine_bump"], T=cfg.T)
    assert weak_residual(tr, st) < 1e-8


def test_weak_residual_dt_convergence(viscous_config):
    st = sine_window_test(catalog()["sine_bump"], T=viscous_config.T)
    residuals = []
    for dt in (1e-3, 5e-4):
        tr = run(replace(viscous_config, dt=dt))
        residuals.append(weak_residual(tr, st))
    assert residuals[0] < 1e-5
    assert residuals[0] / residuals[1] > 4.0  # order >= 2


def test_weak_residual_epsilon_term_linear(viscous_config):
    # the residual of an inviscid-identity evaluation of a viscous run
    # isolates the eps term, so it scales linearly in eps
    st = sine_window_test(catalog()["sine_bump"], T=viscous_config.T)
    gaps = []
    for eps in (1e-3, 5e-4):
        tr = run(replace(viscous_config, epsilon=eps))
        r_full = weak_residual(tr, st)
        fake = replace(tr, config=replace(tr.config, epsilon=0.0))
        gaps.append(weak_residual(fake, st) - r_full)
    assert gaps[0] / gaps[1] == pytest.approx(2.0, rel=0.05)


def test_weak_residual_rejects_mismatched_window(viscous_config):
    tr = run(viscous_config)
    st = sine_window_test(catalog()["sine_bump"], T=1.0)
    with pytest.raises(ValueError, match="does not match"):
        weak_residual(tr, st)


def test_weak_residual_rejects_coarse_stride(viscous_config):
    tr = run(replace(viscous_config, stride=50))
    st = sine_window_test(catalog()["sine_bump"], T=viscous_config.T)
    with pytest.raises(ValueError, match="stride"):
        weak_residual(tr, st)


def test_mode_sweep_band_limited_datum():
    # datum whose dynamics stays inside the smallest band (a single mode is
    # steady up to viscous decay): all runs integrate identical projections
    tpl = SimConfig(alpha=0.5, epsilon=0.01, m=8, dt=1e-3, T=0.1,
                    initial="single_mode", stride=10)
    rep = mode_sweep(tpl, [8, 16, 32])
    for diffs in rep.pair_diffs.values():
        assert np.all(diffs < 1e-8)


def test_mode_sweep_rough_datum_cauchy_trend():
    tpl = SimConfig(alpha=0.5, epsilon=0.01, m=16, dt=1e-3, T=0.25,
                    initial="random_rough", seed=9, stride=10)
    rep = mode_sweep(tpl, [16, 32, 64])
    diffs = rep.pair_diffs["dneg_1.0"]
    assert np.all(np.diff(diffs) < 0)
    assert "tail_decay_exponent" in rep.fits


def test_mode_sweep_requires_increasing_list():
    tpl = SimConfig(m=16)
    with pytest.raises(ValueError, match="increasing"):
        mode_sweep(tpl, [16, 16, 32])


def test_viscosity_sweep_uniform_bound():
    tpl = SimConfig(alpha=0.5, m=16, dt=1e-3, T=0.5, initial="random",
                    seed=10, stride=10)
    rep = viscosity_sweep(tpl, [1e-1, 1e-2, 1e-3])
    assert np.all(rep.metrics["uni_tt_margin"] <= 1.0 + 1e-8)
    assert np.all(np.isfinite(rep.metrics["dt_surrogate_hm4"]))


def test_viscosity_sweep_requires_decreasing_list():
    with pytest.raises(ValueError, match="decreasing"):
        viscosity_sweep(SimConfig(m=16), [1e-3, 1e-2])


def test_sweep_report_validates_monotone_parameters():
    with pytest.raises(ValueError, match="monotone"):
        SweepReport("m", [1, 3, 2], {}, {})
    with pytest.raises(ValueError, match="non-finite"):
        SweepReport("m", [1, 2], {"bad": np.array([1.0, np.nan])}, {})


def test_weak_continuity_identical_trajectories():
    basis = build_rectangle_basis(5)
    cfg = SimConfig(alpha=0.4, m=20, dt=1e-3, T=0.05, epsilon=1e-2,
                    initial="random", seed=5, stride=5)
    tr = run(cfg, basis=basis)
    out = weak_continuity_terms(tr, tr, catalog()["sine_bump"], delta=0.15)
    for j in range(1, 7):
        assert abs(out[f"I{j}"]) < 1e-14


def test_weak_continuity_sum_identity():
    basis = build_rectangle_basis(5)
    cfg = SimConfig(alpha=0.4, m=20, dt=1e-3, T=0.05, initial="random",
                    seed=5, stride=5)
    tr_e = run(replace(cfg, epsilon=1e-2), basis=basis)
    tr_r = run(replace(cfg, epsilon=1e-3), basis=basis)
    out = weak_continuity_terms(tr_e, tr_r, catalog()["sine_bump"], delta=0.15)
    scale = max(1.0, sum(abs(out[f"I{j}"]) for j in range(1, 7)))
    assert abs(out["sum"] - out["two_delta_n"]) < 1e-8 * scale


def test_weak_continuity_terms_shrink_with_closer_pairs():
    basis = build_rectangle_basis(5)
    cfg = SimConfig(alpha=0.4, m=20, dt=1e-3, T=0.05, initial="random",
                    seed=5, stride=5)
    tr_ref = run(replace(cfg, epsilon=1e-4), basis=basis)
    far = run(replace(cfg, epsilon=1e-1), basis=basis)
    near = run(replace(cfg, epsilon=1e-3), basis=basis)
    phi = catalog()["sine_bump"]
    out_far = weak_continuity_terms(far, tr_ref, phi, delta=0.15)
    out_near = weak_continuity_terms(near, tr_ref, phi, delta=0.15)
    for j in range(1, 7):
        assert abs(out_near[f"I{j}"]) < abs(out_far[f"I{j}"])


def test_weak_continuity_rejects_bad_delta():
    basis = build_rectangle_basis(4)
    cfg = SimConfig(alpha=0.4, m=10, dt=1e-3, T=0.02, initial="random", stride=5)
    tr = run(cfg, basis=basis)
    with pytest.raises(ValueError, match="delta"):
        weak_continuity_terms(tr, tr, catalog()["quartic"], delta=0.5)
