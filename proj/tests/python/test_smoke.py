import math

import numpy as np
import pytest

import ttdtrack as tt


@pytest.fixture(scope="module")
def cfg():
    return tt.reference_system()


def test_reference_system(cfg):
    assert cfg.n_bs == 256
    assert cfg.subcarrier_count() == 129
    assert cfg.f_d == pytest.approx(10e9 / 128)
    assert "n_bs=256" in repr(cfg)


def test_gain_and_angle_map(cfg):
    assert tt.dirichlet(16, 0.0) == pytest.approx(1.0)
    assert tt.array_gain(cfg.f_c, 0.3, 0.3, 0.3, cfg) == pytest.approx(1.0)
    pc = tt.make_pairing(0.6, 0.05, cfg)
    assert pc.mode == tt.PairingMode.backward
    assert tt.angle_map(-cfg.m_half, pc.psi, pc.t_aux, cfg) == pytest.approx(0.65)
    assert tt.angle_map(cfg.m_half, pc.psi, pc.t_aux, cfg) == pytest.approx(0.55)


def test_bounds(cfg):
    assert tt.theorem1_bound(1.0, cfg) == pytest.approx(0.150157, abs=5e-4)
    assert tt.fixed_radius(cfg) == pytest.approx(0.0625)
    b = tt.radius_bounds(0.5, cfg)
    assert set(b) >= {"forward", "backward", "fb", "theorem1", "fixed", "quasi_fixed"}
    assert b["fb"] == pytest.approx(max(b["forward"], b["backward"]))


def test_codebook(cfg):
    cb = tt.codebook(cfg)
    assert len(cb["psi"]) == 257
    assert cb["t_max"] == pytest.approx(1.25)
    assert tt.snap(0.003, "psi", cfg) == 0.0
    assert tt.snap(1.5, "t", cfg) == pytest.approx(1.25)
    with pytest.raises(ValueError):
        tt.snap(0.1, "phi", cfg)


def test_track_noiseless(cfg):
    angles = tt.search_angles(0.6, 0.2, 4, cfg)
    assert angles.shape == (4, 129)
    theta = float(angles[1, 40])
    out = tt.track(theta, 0.6, 0.2, 4, compensation=False)
    assert out["theta_coarse"] == pytest.approx(theta, abs=1e-12)
    assert out["y"].shape == (4, 129)
    assert np.iscomplexobj(out["y"])

    refined = tt.track(0.6123, 0.6, 0.2, 4, max_iter=300, tol=1e-24)
    assert abs(refined["theta_refined"] - 0.6123) < 1e-6
    assert refined["g"] == pytest.approx(1.0, rel=1e-3)


def test_domain_errors(cfg):
    with pytest.raises(ValueError):
        tt.track(0.9, 0.9, 0.2, 4)
    with pytest.raises(ValueError):
        tt.SystemConfig(n_bs=250, n_ttd=16, p=16)


def test_sweep_deterministic():
    overrides = {"trials": 4, "users": 2, "seed": 5, "snr_db": [0, 10], "compensation": False, "threads": 1}
    a = tt.sweep(overrides, with_records=True)
    b = tt.sweep(overrides, with_records=True)
    assert len(a) == 2
    assert repr(a) == repr(b)
    assert len(a[0]["trial_records"]) == 8
    assert a[0]["nmse"] >= 0.0
    assert math.isnan(a[0]["trial_records"][0]["theta_refined"])
    with pytest.raises(ValueError):
        tt.sweep({"colour": "red"})


def test_nmse():
    linear, db, used, excluded = tt.nmse([0.55, 0.3], [0.5, 0.0])
    assert linear == pytest.approx(0.01)
    assert db == pytest.approx(-20.0)
    assert (used, excluded) == (1, 1)
