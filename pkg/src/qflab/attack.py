"""Gradient-inversion attack: the honest-but-curious server optimizes a dummy
input until the model's gradients match a client's shared gradients.

The attacker knows everything except x: circuit architecture, theta, the cost
function, and (worst-case label leakage) the label y.  Recovered inputs are
scored by the closest on-circle distance between the scaled inputs
gamma*x mod 2*pi, which is the natural metric for a periodic encoding.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import engine, qmodel
from .engine import FixedThetaEvaluator
from .seeding import ROLE_ATTEMPT, ROLE_EXPERIMENT, ROLE_THETA, derive_rng
from .errors import ConfigurationError
from .optim import Adam
from .qmodel import ModelSpec, Sample

TWO_PI = 2.0 * np.pi

DEFAULT_EPSILONS = tuple(np.linspace(np.pi / 50.0, np.pi, 50))


@dataclass(frozen=True)
class AttackConfig:
    iterations: int = 60
    learning_rate: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    num_experiments: int = 100
    attempts_per_experiment: int = 10
    epsilons: tuple = DEFAULT_EPSILONS

    def __post_init__(self):
        if self.iterations < 1:
            raise ConfigurationError(f"iterations must be >= 1, got {self.iterations}")
        eps = np.asarray(self.epsilons, dtype=float)
        if np.any(eps <= 0.0) or np.any(eps > np.pi):
            raise ConfigurationError("epsilon grid values must lie in (0, pi]")


def angular_distance(a: float, b: float) -> float:
    """Closest on-circle distance min(|a - b|, 2*pi - |a - b|), in [0, pi]."""
    diff = abs((a % TWO_PI) - (b % TWO_PI))
    return min(diff, TWO_PI - diff)


def input_error(enc_gamma: float, x: np.ndarray, x_prime: np.ndarray) -> float:
    """Per-coordinate angular distance of the scaled inputs, max over coordinates."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    x_prime = np.atleast_1d(np.asarray(x_prime, dtype=float))
    return max(
        angular_distance(enc_gamma * a, enc_gamma * b) for a, b in zip(x, x_prime)
    )


def attack_loss(spec: ModelSpec, x_prime, y: float, theta: np.ndarray,
                target_gradients: np.ndarray, j_indices=None) -> float:
    """Squared l2 residual between the model's gradients at x' and the targets.

    `j_indices` selects the single-gradient variants L_j used by the
    landscape scans; the sum over all of them equals the full loss.
    """
    target_gradients = np.asarray(target_gradients, dtype=float)
    if target_gradients.shape != (spec.num_parameters,):
        raise ConfigurationError(
            f"target gradients must have shape ({spec.num_parameters},)"
        )
    grads = qmodel.cost_gradient(spec, Sample(np.asarray(x_prime, dtype=float), y), theta)
    diff = grads - target_gradients
    if j_indices is not None:
        diff = diff[list(j_indices)]
    return float(diff @ diff)


@dataclass
class AttackTrace:
    """One inversion attempt.  All positions are scaled inputs gamma*x in
    [0, 2*pi), the units every distance is reported in."""

    target_angle: np.ndarray
    initial_angle: np.ndarray
    angles: np.ndarray      # [iterations + 1, n]
    losses: np.ndarray      # [iterations + 1]
    final_error: float      # angular, in [0, pi]
    diverged: bool = False
    experiment: int = 0
    attempt: int = 0


def run_attack(evaluator: FixedThetaEvaluator, target_gradients: np.ndarray,
               y: float, x_true: np.ndarray, config: AttackConfig,
               rng: np.random.Generator, x_init=None) -> AttackTrace:
    """ADAM descent of the dummy input against one shared gradient vector.

    x' starts uniform on [0, 1)^n (pre-scaling) unless given and is never
    clamped: the encoding is periodic, so iterates wrap on the circle.  The
    descent variable is the scaled input gamma*x', matching the reported
    distance units, so one ADAM step moves about `learning_rate` radians.
    """
    enc = evaluator.model.encoding
    x_true = np.atleast_1d(np.asarray(x_true, dtype=float))
    if x_init is None:
        ang = enc.gamma * rng.uniform(0.0, 1.0, size=enc.n)
    else:
        ang = enc.gamma * np.atleast_1d(np.asarray(x_init, dtype=float))
    adam = Adam(config.learning_rate, config.beta1, config.beta2, config.eps)

    def loss_and_angle_grad(angles):
        loss, grad_x = engine.attack_loss_and_gradient(
            evaluator, angles / enc.gamma, y, target_gradients
        )
        return loss, grad_x / enc.gamma

    trail = [ang.copy()]
    loss, grad = loss_and_angle_grad(ang)
    losses = [loss]
    diverged = False
    for _ in range(config.iterations):
        ang = adam.step(ang, grad)
        loss, grad = loss_and_angle_grad(ang)
        trail.append(ang.copy())
        losses.append(loss)
        if not np.isfinite(loss):
            diverged = True
            break
    target_angle = np.mod(enc.gamma * x_true, TWO_PI)
    return AttackTrace(
        target_angle=target_angle,
        initial_angle=trail[0],
        angles=np.asarray(trail),
        losses=np.asarray(losses),
        final_error=input_error(enc.gamma, x_true, trail[-1] / enc.gamma),
        diverged=diverged,
    )


def run_attack_from_record(model: ModelSpec, record: dict, config: AttackConfig,
                           rng: np.random.Generator) -> AttackTrace:
    """Run an attack from one serialized federated-round message.

    The record needs the spec-named fields plus `y` (labels are assumed
    leaked) and, for scoring only, `x_true`.
    """
    theta = np.asarray(record["theta"], dtype=float)
    evaluator = FixedThetaEvaluator(model, theta)
    return run_attack(
        evaluator,
        np.asarray(record["gradients"], dtype=float),
        float(record["y"]),
        np.asarray(record["x_true"], dtype=float),
        config,
        rng,
    )


def success_rate(errors, epsilon: float) -> float:
    errors = np.asarray(errors, dtype=float)
    return float(np.mean(errors < epsilon))


def success_probability_curve(errors, epsilons=None) -> dict:
    """Empirical P(final error < eps) per eps, with an ordinary linear fit.

    For an attack that is no better than guessing, errors are uniform on
    [0, pi] and the curve is the line eps/pi, so the fit's R^2 measures how
    close to random guessing the attack performs.
    """
    errors = np.asarray(errors, dtype=float)
    if errors.size == 0:
        raise ConfigurationError("need at least one trace to build a success curve")
    eps = np.asarray(DEFAULT_EPSILONS if epsilons is None else epsilons, dtype=float)
    probs = np.array([success_rate(errors, e) for e in eps])
    slope, intercept = np.polyfit(eps, probs, 1)
    fitted = slope * eps + intercept
    ss_res = float(np.sum((probs - fitted) ** 2))
    ss_tot = float(np.sum((probs - np.mean(probs)) ** 2))
    r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return {
        "epsilons": eps,
        "probabilities": probs,
        "slope": float(slope),
        "intercept": float(intercept),
        "r_squared": float(r_squared),
    }


def uniform_ks_statistic(errors) -> float:
    """Kolmogorov-Smirnov distance of the error sample from uniform on [0, pi]."""
    from scipy import stats

    return float(stats.kstest(np.asarray(errors, dtype=float), "uniform",
                              args=(0.0, np.pi)).statistic)


# ---------------------------------------------------------------------------
# the repeated-experiment protocol (fixed theta; fresh x per experiment,
# fresh x' per attempt)

def _run_experiment(evaluator: FixedThetaEvaluator, config: AttackConfig,
                    master_seed: int, experiment: int) -> list:
    model = evaluator.model
    rng = derive_rng(master_seed, ROLE_EXPERIMENT, experiment)
    x_true = rng.uniform(0.0, 1.0, size=model.encoding.n)
    y = float(rng.choice((-1.0, 1.0)))
    target = evaluator.cost_gradient_entries(
        engine.encoding_states(model.encoding, x_true[None, :]), y
    )[0]
    traces = []
    for attempt in range(config.attempts_per_experiment):
        attempt_rng = derive_rng(master_seed, ROLE_ATTEMPT, experiment, attempt)
        trace = run_attack(evaluator, target, y, x_true, config, attempt_rng)
        trace.experiment = experiment
        trace.attempt = attempt
        traces.append(trace)
    return traces


def _experiment_worker(args):
    evaluator, config, master_seed, experiment = args
    return _run_experiment(evaluator, config, master_seed, experiment)


def worker_count() -> int:
    """Worker cap from QFLAB_THREADS (default 1: plain sequential execution)."""
    try:
        return max(1, int(os.environ.get("QFLAB_THREADS", "1")))
    except ValueError:
        return 1


def run_attack_protocol(model: ModelSpec, config: AttackConfig, master_seed: int,
                        theta: np.ndarray = None, workers: int = None) -> list:
    """All experiments x attempts for one model; returns traces in trial order.

    theta is drawn once (seeded) and shared by every experiment.  Trial seeds
    derive from (master_seed, experiment, attempt), so results are identical
    for any worker count.
    """
    from .ansatz import random_parameters

    if theta is None:
        theta = random_parameters(model.ansatz, derive_rng(master_seed, ROLE_THETA))
    evaluator = FixedThetaEvaluator(model, theta)
    if workers is None:
        workers = worker_count()
    jobs = [(evaluator, config, master_seed, e) for e in range(config.num_experiments)]
    if workers <= 1:
        nested = [_experiment_worker(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            nested = list(pool.map(_experiment_worker, jobs))
    return [trace for group in nested for trace in group]
