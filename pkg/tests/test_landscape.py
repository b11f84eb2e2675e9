import numpy as np
import pytest

from conftest import make_model
from qflab import landscape
from qflab import qmodel as qm
from qflab.ansatz import random_parameters
from qflab.attack import angular_distance
from qflab.errors import ConfigurationError
from qflab.qmodel import Sample
from qflab.seeding import ROLE_TEST, derive_rng

TWO_PI = 2 * np.pi


def test_pure_tone_minima_count_and_valley():
    angles = np.arange(700) * (TWO_PI / 700)
    values = 1.0 - np.cos(7 * angles)
    minima, maxima, plateau = landscape._extrema_1d(values)
    assert len(minima) == 7
    assert len(maxima) == 7
    assert not plateau
    assert np.allclose(values[minima], 0.0, atol=1e-6)
    gmin = (int(np.argmin(values)),)
    width = landscape._valley_width(angles, gmin, maxima, n=1)
    assert width == pytest.approx(np.pi / 7, abs=TWO_PI / 700)


def test_constant_landscape_has_no_strict_extrema():
    values = np.full(100, 2.5)
    minima, maxima, plateau = landscape._extrema_1d(values)
    assert len(minima) == 0 and len(maxima) == 0
    assert plateau


def test_resolution_floor_enforced():
    model = make_model(n=1, m=1, layers=2)
    theta = random_parameters(model.ansatz, np.random.default_rng(0))
    with pytest.raises(ConfigurationError):
        landscape.scan_landscape(model, theta, Sample(np.array([0.5]), 1.0), 0,
                                 resolution=10)


def test_minima_count_stable_under_oversampling():
    model = make_model(n=1, m=1, layers=2)
    rng = derive_rng(0, ROLE_TEST)
    theta = random_parameters(model.ansatz, rng)
    sample = Sample(rng.uniform(0, 1, 1), 1.0)
    base = landscape.scan_landscape(model, theta, sample, 1)
    fine = landscape.scan_landscape(model, theta, sample, 1,
                                    resolution=base.resolution * 100)
    assert base.n_minima == fine.n_minima


@pytest.mark.parametrize("m", [1, 2, 3])
def test_refinement_stability(m):
    for seed in range(4 if m < 3 else 2):
        profile = landscape.census_run(m, seed, master_seed=77)
        doubled = landscape.census_run(m, seed, master_seed=77,
                                       resolution=2 * profile.resolution)
        assert abs(doubled.n_minima - profile.n_minima) <= max(1, 0.05 * profile.n_minima)


@pytest.mark.parametrize("m", [1, 2])
def test_minima_confirmed_by_gradient_sign_change(m):
    """The analytic d L_j / dx' flips sign inside every reported minimum's
    bracket of neighboring cells (the continuous minimum can sit anywhere
    within the cell, so the sign change is located by sampling the bracket)."""
    for seed in range(2):
        rng = derive_rng(100 + seed, ROLE_TEST)
        model = landscape.landscape_model(m)
        theta = random_parameters(model.ansatz, rng)
        sample = Sample(rng.uniform(0, 1, 1), float(rng.choice((-1.0, 1.0))))
        j = int(rng.integers(model.num_parameters - 2 * model.num_qubits))
        profile = landscape.scan_landscape(model, theta, sample, j)
        target = qm.cost_gradient(model, sample, theta)
        step = TWO_PI / profile.resolution

        def deriv(angle):
            return qm.attack_loss_gradient_x(model, [angle / model.encoding.gamma],
                                             target, sample.y, theta, 0,
                                             j_indices=[j])

        for idx in profile.minima_indices:
            center = profile.angles[idx]
            left = [deriv(center - f * step) for f in (1.0, 0.6, 0.2)]
            right = [deriv(center + f * step) for f in (0.2, 0.6, 1.0)]
            assert min(left) < 0, f"no descent left of minimum at {center:.4f}"
            assert max(right) > 0, f"no ascent right of minimum at {center:.4f}"


def test_truth_hosts_a_local_minimum():
    """The hidden input zeroes the single-gradient loss, so a local minimum
    sits within a couple of grid cells of it.  (The grid *global* minimum may
    land on a different exact zero: any x' where this one gradient entry
    happens to match the target is also a zero of L_j; only matching all d
    entries pins the truth uniquely.)"""
    for seed in range(5):
        profile = landscape.census_run(2, seed, master_seed=13)
        cell = TWO_PI / profile.resolution
        nearest = min(angular_distance(profile.angles[i], profile.true_angle[0])
                      for i in profile.minima_indices)
        assert nearest <= 2 * cell
        # and the loss in the truth's cell is tiny on the landscape's scale
        idx = int(np.argmin(np.abs(profile.angles - profile.true_angle[0])))
        assert profile.values[idx] <= 1e-3 * profile.values.max()


def test_two_coordinate_scan():
    model = landscape.landscape_model(1, n=2)
    rng = derive_rng(3, ROLE_TEST)
    theta = random_parameters(model.ansatz, rng)
    sample = Sample(rng.uniform(0, 1, 2), 1.0)
    profile = landscape.scan_landscape(model, theta, sample, 1)
    assert profile.values.shape == (profile.resolution, profile.resolution)
    assert profile.n_minima >= 1
    assert profile.values[profile.global_min_index] == profile.values.min()
    distances = profile.minima_distances()
    assert np.all((0 <= distances) & (distances <= np.pi))


def test_minima_distance_distribution_shapes():
    profiles = [landscape.census_run(2, s, master_seed=5) for s in range(3)]
    out = landscape.minima_distance_distribution(profiles)
    assert out["m"] == 2
    assert len(out["distances"]) == sum(p.n_minima for p in profiles)
    assert 0.0 <= out["ks_statistic"] <= 1.0
    with pytest.raises(ConfigurationError):
        landscape.minima_distance_distribution(
            profiles + [landscape.census_run(1, 0, master_seed=5)])


def test_fit_log_scaling_recovers_known_slope():
    m_values = [1, 2, 3]
    values = [[np.exp(1.5 * m) * f for f in (0.9, 1.0, 1.1)] for m in m_values]
    fit = landscape.fit_log_scaling(m_values, values)
    assert fit["slope"] == pytest.approx(1.5, abs=1e-9)


def test_landscape_during_training_epoch_zero_matches_direct_scan():
    model = landscape.landscape_model(2)
    rng = derive_rng(4, ROLE_TEST)
    theta = random_parameters(model.ansatz, rng)
    target_angle = 1.6371
    y = 0.3
    series = landscape.landscape_during_training(model, {0: theta}, target_angle, y, 2)
    x = np.array([target_angle / model.encoding.gamma])
    direct = landscape.scan_landscape(model, theta, Sample(x, y), 2)
    assert np.array_equal(series[0][1].values, direct.values)
    assert series[0][1].n_minima == direct.n_minima
