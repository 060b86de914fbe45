import math

import numpy as np
import pytest

import mbotorus as mt


def test_flat_interface_energy():
    stripe = mt.sample_stripe(2, 256, 0.5)
    assert stripe.shape == (256, 256)
    assert mt.energy(stripe, 1e-3) == pytest.approx(2 * mt.c0, rel=0.01)
    assert mt.perimeter_estimate(stripe, 1e-3) == pytest.approx(2.0, rel=0.01)


def test_disc_run_ledger():
    chi0 = mt.sample_disc(2, 64, [0.5, 0.5], 0.3)
    out = mt.run(chi0, 4e-3, 0.02)
    assert out["states"].shape == (6, 64, 64)
    energy = out["energy"]
    assert np.all(np.diff(energy) <= 1e-12)
    budget = np.sum(out["metric_increment"][1:] ** 2) / (2 * out["h"])
    assert energy[-1] + budget <= energy[0] + 1e-10
    radius = mt.equivalent_radius(out["volume"][-1], 2)
    assert radius == pytest.approx(math.sqrt(0.09 - 0.02), rel=0.05)


def test_threshold_step_matches_run():
    chi0 = mt.sample_disc(2, 32, [0.4, 0.6], 0.25)
    out = mt.run(chi0, 5e-3, 5e-3)
    np.testing.assert_array_equal(mt.threshold_step(chi0, 5e-3), out["states"][1])


def test_pair_measure_sum_identity_and_weights():
    u = mt.sample_disc(2, 64, [0.5, 0.5], 0.25)
    h = 2e-3
    a = mt.pair_measure(u, h, "inside_out")
    b = mt.pair_measure(u, h, "outside_in")
    assert abs(a + b - 2 * mt.energy(u, h)) < 1e-6
    weighted = mt.pair_measure(u, h, weight=lambda z: 2.0, test=lambda x: 1.0)
    assert weighted == pytest.approx(2 * a, rel=1e-12)
    with pytest.raises(ValueError):
        mt.pair_measure(u, h, "sideways")


def test_dissipation_and_metric():
    chi0 = mt.sample_disc(2, 64, [0.5, 0.5], 0.3)
    out = mt.run(chi0, 4e-3, 0.012)
    density, integral = mt.dissipation_density(out["states"][2], out["states"][1], 4e-3)
    assert density.shape == (64, 64)
    assert integral == pytest.approx(out["dissipation"][2], rel=1e-10)
    d = mt.metric(out["states"][2], out["states"][1], 4e-3)
    assert integral == pytest.approx(d * d / (2 * 4e-3**2), rel=1e-12)


def test_interpolation_and_slope():
    chi0 = mt.sample_disc(2, 32, [0.5, 0.5], 0.3)
    h = 4e-3
    rec = mt.interpolate(chi0, h, h / 4)
    assert rec["converged"]
    assert 0.0 <= rec["u"].min() and rec["u"].max() <= 1.0
    assert rec["energy"] <= mt.energy(chi0, h) + 1e-8
    bound = mt.slope_lower(np.full((32, 32), 0.5), h, K=1)
    assert bound["value"] < 1e-6


def test_gaussian_identities():
    res = mt.gaussian_identities(dim=2)
    assert res["max_abs_residual"] < 1e-6


def test_rejects_bad_grids():
    with pytest.raises(ValueError):
        mt.energy(np.zeros((8, 4)), 1e-2)
    with pytest.raises(ValueError):
        mt.energy(np.zeros((6, 6)), 1e-2)
