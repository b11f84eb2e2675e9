"""Exhaustive characterization of the attack-loss landscape.

The single-gradient loss L_j(x') = (C'_j(x') - C_j)^2 is sampled on a
periodic uniform grid over gamma*x' in [0, 2*pi)^n at ten times the Nyquist
resolution.  Strict comparison against all grid neighbors (with wraparound)
identifies local minima and maxima; plateaus produce no extrema and are
flagged.  The census experiments repeat this across seeds and fit how the
minima count N_c and the global-minimum valley width r scale with the tower
height m.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ansatz import AnsatzSpec, min_layers_for_overparameterization, random_parameters
from .attack import angular_distance
from .encoding import EncodingSpec, max_gradient_frequency
from .engine import FixedThetaEvaluator, encoding_states
from .errors import ConfigurationError
from .qmodel import ModelSpec, Sample
from .seeding import ROLE_CENSUS, derive_rng

TWO_PI = 2.0 * np.pi
NYQUIST_MULTIPLIER = 10


def minimum_resolution(m: int, base: int = 5, multiplier: int = NYQUIST_MULTIPLIER) -> int:
    """Grid points per dimension: multiplier * (2 * d_F + 1)."""
    return multiplier * (2 * max_gradient_frequency(m, base) + 1)


@dataclass
class LandscapeProfile:
    m: int
    n: int
    j: int
    resolution: int
    angles: np.ndarray        # grid of gamma*x' values, [R] (n=1) or [R, 2] axes
    values: np.ndarray        # L_j on the grid, [R] or [R, R]
    minima_indices: np.ndarray
    maxima_indices: np.ndarray
    global_min_index: tuple
    n_minima: int
    valley_width: float       # angular distance global min -> nearest local max
    has_plateau: bool
    true_angle: np.ndarray    # gamma*x of the hidden input
    seed: int = 0

    @property
    def global_min_angle(self) -> np.ndarray:
        if self.n == 1:
            return np.array([self.angles[self.global_min_index[0]]])
        return np.array([self.angles[self.global_min_index[0]],
                         self.angles[self.global_min_index[1]]])

    def minima_distances(self) -> np.ndarray:
        """Angular distances of every local minimum from the global minimum."""
        gmin = self.global_min_angle
        out = []
        if self.n == 1:
            for i in self.minima_indices:
                out.append(angular_distance(self.angles[i], gmin[0]))
        else:
            for i, k in self.minima_indices:
                out.append(max(angular_distance(self.angles[i], gmin[0]),
                               angular_distance(self.angles[k], gmin[1])))
        return np.asarray(out)


def _extrema_1d(values: np.ndarray):
    left = np.roll(values, 1)
    right = np.roll(values, -1)
    minima = np.where((values < left) & (values < right))[0]
    maxima = np.where((values > left) & (values > right))[0]
    plateau = bool(np.any(values == left))
    return minima, maxima, plateau


def _extrema_2d(values: np.ndarray):
    neighbors = [np.roll(values, s, axis=a) for a in (0, 1) for s in (1, -1)]
    is_min = np.ones_like(values, dtype=bool)
    is_max = np.ones_like(values, dtype=bool)
    plateau = False
    for nb in neighbors:
        is_min &= values < nb
        is_max &= values > nb
        plateau = plateau or bool(np.any(values == nb))
    minima = np.argwhere(is_min)
    maxima = np.argwhere(is_max)
    return minima, maxima, plateau


def scan_landscape(model: ModelSpec, theta: np.ndarray, sample: Sample, j: int,
                   resolution: int = None, seed: int = 0) -> LandscapeProfile:
    """Evaluate L_j on the full periodic grid and classify its critical points."""
    enc = model.encoding
    if enc.n not in (1, 2):
        raise ConfigurationError("landscape scans support n in {1, 2}")
    min_res = minimum_resolution(enc.m, enc.prefactor_base)
    if resolution is None:
        resolution = min_res
    if resolution < min_res:
        raise ConfigurationError(
            f"resolution {resolution} below the 10x-Nyquist floor {min_res}"
        )
    evaluator = FixedThetaEvaluator(model, theta, param_indices=[j])
    target_entry = evaluator.cost_gradient_entries(
        encoding_states(enc, np.asarray(sample.x, dtype=float)[None, :]), sample.y
    )[0, 0]
    angles = np.arange(resolution) * (TWO_PI / resolution)
    if enc.n == 1:
        xs = (angles / enc.gamma)[:, None]
        entries = evaluator.cost_gradient_entries(encoding_states(enc, xs), sample.y)[:, 0]
        values = (entries - target_entry) ** 2
        minima, maxima, plateau = _extrema_1d(values)
        gmin = (int(np.argmin(values)),)
    else:
        grid_a, grid_b = np.meshgrid(angles, angles, indexing="ij")
        xs = np.stack([grid_a.ravel(), grid_b.ravel()], axis=1) / enc.gamma
        entries = evaluator.cost_gradient_entries(encoding_states(enc, xs), sample.y)[:, 0]
        values = ((entries - target_entry) ** 2).reshape(resolution, resolution)
        minima, maxima, plateau = _extrema_2d(values)
        flat = int(np.argmin(values))
        gmin = (flat // resolution, flat % resolution)

    valley = _valley_width(angles, gmin, maxima, enc.n)
    return LandscapeProfile(
        m=enc.m, n=enc.n, j=j, resolution=resolution,
        angles=angles, values=values,
        minima_indices=minima, maxima_indices=maxima,
        global_min_index=gmin, n_minima=len(minima),
        valley_width=valley, has_plateau=plateau,
        true_angle=np.mod(enc.gamma * np.asarray(sample.x, dtype=float), TWO_PI),
        seed=seed,
    )


def _valley_width(angles: np.ndarray, gmin: tuple, maxima, n: int) -> float:
    if len(maxima) == 0:
        return float("nan")
    if n == 1:
        gangle = angles[gmin[0]]
        return float(min(angular_distance(angles[i], gangle) for i in maxima))
    ga, gb = angles[gmin[0]], angles[gmin[1]]
    return float(min(
        max(angular_distance(angles[i], ga), angular_distance(angles[k], gb))
        for i, k in maxima
    ))


# ---------------------------------------------------------------------------
# census across seeds and tower heights

def _non_final_parameter(rng: np.random.Generator, ansatz: AnsatzSpec) -> int:
    """Random gradient index, excluding the final block whose R_Z entries are
    identically zero against the all-Z observable."""
    cutoff = ansatz.num_parameters - 2 * ansatz.num_qubits
    if cutoff <= 0:
        raise ConfigurationError("ansatz too small to exclude its final block")
    return int(rng.integers(0, cutoff))


def landscape_model(m: int, n: int = 1, gamma: float = TWO_PI,
                    base: int = 5, layers: int = None) -> ModelSpec:
    """Overparameterized model used by the census runs."""
    num_qubits = n * m
    if layers is None:
        layers = min_layers_for_overparameterization(num_qubits)
    return ModelSpec(
        EncodingSpec(n=n, m=m, gamma=gamma, prefactor_base=base),
        AnsatzSpec(num_qubits=num_qubits, layers=layers),
    )


def census_run(m: int, seed: int, master_seed: int = 0, n: int = 1,
               resolution: int = None) -> LandscapeProfile:
    """One randomized landscape scan: fresh theta, x, label, and gradient index."""
    rng = derive_rng(master_seed, ROLE_CENSUS, m, seed)
    model = landscape_model(m, n=n)
    theta = random_parameters(model.ansatz, rng)
    x = rng.uniform(0.0, 1.0, size=n)
    y = float(rng.choice((-1.0, 1.0)))
    j = _non_final_parameter(rng, model.ansatz)
    return scan_landscape(model, theta, Sample(x, y), j, resolution=resolution, seed=seed)


def landscape_census(m_values, num_seeds: int, master_seed: int = 0) -> list:
    """Profiles for every (m, seed) pair; shared by both scaling fits."""
    return [census_run(m, seed, master_seed)
            for m in m_values for seed in range(num_seeds)]


def fit_log_scaling(m_values, values_per_m) -> dict:
    """OLS fit of mean(ln value) against m, with the per-m spread.

    Runs with a non-positive value (empty landscapes) are dropped from the
    averages; they do not occur for generic parameters.
    """
    ms, mean_logs, per_m = [], [], {}
    for m, values in zip(m_values, values_per_m):
        logs = np.log([v for v in values if np.isfinite(v) and v > 0])
        if logs.size == 0:
            continue
        ms.append(m)
        mean_logs.append(float(np.mean(logs)))
        per_m[int(m)] = {
            "mean_log": float(np.mean(logs)),
            "std_log": float(np.std(logs)),
            "count": int(logs.size),
        }
    if len(ms) < 2:
        raise ConfigurationError("need at least two tower heights for a scaling fit")
    slope, intercept = np.polyfit(ms, mean_logs, 1)
    return {"slope": float(slope), "intercept": float(intercept), "per_m": per_m}


def _group_by_m(profiles, attribute: str):
    m_values = sorted({p.m for p in profiles})
    grouped = [[getattr(p, attribute) for p in profiles if p.m == m] for m in m_values]
    return m_values, grouped


def minima_scaling_fit(profiles) -> dict:
    """ln N_c versus m across the census."""
    return fit_log_scaling(*_group_by_m(profiles, "n_minima"))


def valley_width_fit(profiles) -> dict:
    """ln r versus m across the census."""
    return fit_log_scaling(*_group_by_m(profiles, "valley_width"))


def minima_scaling_experiment(m_values, num_seeds: int, master_seed: int = 0) -> dict:
    profiles = landscape_census(m_values, num_seeds, master_seed)
    return minima_scaling_fit(profiles)


def valley_width_experiment(m_values, num_seeds: int, master_seed: int = 0) -> dict:
    profiles = landscape_census(m_values, num_seeds, master_seed)
    return valley_width_fit(profiles)


def minima_distance_distribution(profiles) -> dict:
    """Pooled distances of local minima from the global minimum, plus the
    Kolmogorov-Smirnov distance of that sample from uniform on [0, pi].

    The zero-distance entry of the global minimum itself stays in the pooled
    histogram but is excluded from the KS statistic, which measures how the
    spurious minima are spread."""
    from scipy import stats

    ms = {p.m for p in profiles}
    if len(ms) != 1:
        raise ConfigurationError("pooled profiles must share the same m")
    pooled = np.concatenate([p.minima_distances() for p in profiles])
    spurious = pooled[pooled > 0.0]
    ks = float(stats.kstest(spurious, "uniform", args=(0.0, np.pi)).statistic) \
        if spurious.size else float("nan")
    return {"m": ms.pop(), "distances": pooled, "ks_statistic": ks}


def landscape_during_training(model: ModelSpec, theta_snapshots: dict,
                              target_angle: float, y: float, j: int,
                              resolution: int = None) -> list:
    """One profile per training snapshot, against a fixed hidden input.

    `target_angle` is gamma*x of the tracked input; the shared gradients are
    regenerated from each snapshot's theta, mirroring what a server would
    observe at that point of training.
    """
    x = np.array([target_angle / model.encoding.gamma])
    out = []
    for epoch in sorted(theta_snapshots):
        profile = scan_landscape(model, theta_snapshots[epoch], Sample(x, y), j,
                                 resolution=resolution)
        out.append((epoch, profile))
    return out
