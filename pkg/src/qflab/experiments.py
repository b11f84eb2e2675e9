"""Named experiment runners: seeded protocols in, CSV/JSON artifacts out.

Each cmd_* function runs one experiment family into an output directory and
returns a report dictionary (also written as report.json).  Artifact layout
per experiment is documented in the README; every directory gets a
manifest.json echoing the resolved configuration.
"""

from __future__ import annotations

import os

import numpy as np

from . import classical as classical_mod
from . import fedsim, landscape, spectral
from .ansatz import random_parameters
from .artifacts import write_csv, write_json, write_manifest
from .attack import (AttackConfig, run_attack_protocol, success_probability_curve,
                     success_rate, uniform_ks_statistic)
from .config import ExperimentConfig
from .errors import ConfigurationError, DivergenceError
from .qmodel import Sample
from .seeding import (ROLE_DATASET, ROLE_EXPERIMENT, ROLE_GRADIENT_INDEX,
                      ROLE_THETA, derive_rng)

TWO_PI = 2.0 * np.pi


def target_function(name: str, table=None):
    """Training targets as functions of the scaled input angle in [0, 2*pi)."""
    if name == "cosine_0p7":
        return lambda ang: 0.7 * np.cos(ang)
    if name == "line":
        return lambda ang: -0.7 + 1.4 * np.asarray(ang) / TWO_PI
    if name == "custom":
        pts = sorted((float(a), float(v)) for a, v in table)
        angs = np.array([p[0] for p in pts])
        vals = np.array([p[1] for p in pts])
        return lambda ang: np.interp(np.mod(ang, TWO_PI), angs, vals,
                                     period=TWO_PI)
    raise ConfigurationError(f"unknown target function {name!r}")


# ---------------------------------------------------------------------------

def cmd_attack(cfg: ExperimentConfig, out_dir: str) -> dict:
    model = cfg.model.build()
    section = cfg.attack
    epsilons = tuple(np.linspace(np.pi / section.epsilon_count, np.pi,
                                 section.epsilon_count))
    attack_cfg = AttackConfig(
        iterations=section.iterations,
        learning_rate=section.learning_rate,
        num_experiments=section.num_experiments,
        attempts_per_experiment=section.attempts_per_experiment,
        epsilons=epsilons,
    )
    traces = run_attack_protocol(model, attack_cfg, cfg.seed)

    trace_rows = []
    for t in traces:
        for it in range(t.angles.shape[0]):
            trace_rows.append((t.experiment, t.attempt, it,
                               *[float(a) for a in t.angles[it]],
                               float(t.losses[it])))
    coord_cols = [f"x_prime_{k}" for k in range(model.encoding.n)] \
        if model.encoding.n > 1 else ["x_prime"]
    write_csv(os.path.join(out_dir, "traces.csv"),
              ["experiment", "attempt", "iteration", *coord_cols, "loss"],
              trace_rows)
    write_csv(os.path.join(out_dir, "summary.csv"),
              ["experiment", "attempt", "final_error", "final_loss"],
              [(t.experiment, t.attempt, t.final_error, float(t.losses[-1]))
               for t in traces])

    errors = np.array([t.final_error for t in traces])
    curve = success_probability_curve(errors, epsilons)
    write_csv(os.path.join(out_dir, "p_epsilon.csv"),
              ["epsilon", "probability"],
              list(zip(curve["epsilons"], curve["probabilities"])))

    # single-gradient loss profile around experiment 0's hidden input, the
    # overlay companion to the error histogram
    exp_rng = derive_rng(cfg.seed, ROLE_EXPERIMENT, 0)
    x_true = exp_rng.uniform(0.0, 1.0, size=model.encoding.n)
    y_true = float(exp_rng.choice((-1.0, 1.0)))
    theta = random_parameters(model.ansatz, derive_rng(cfg.seed, ROLE_THETA))
    j = landscape._non_final_parameter(derive_rng(cfg.seed, ROLE_GRADIENT_INDEX),
                                       model.ansatz)
    if model.encoding.n == 1:
        profile = landscape.scan_landscape(model, theta, Sample(x_true, y_true), j)
        from .attack import angular_distance
        write_csv(os.path.join(out_dir, "loss_curve.csv"),
                  ["angle", "distance_from_target", "single_gradient_loss"],
                  [(a, angular_distance(a, profile.true_angle[0]), v)
                   for a, v in zip(profile.angles, profile.values)])

    report = {
        "num_traces": len(traces),
        "mean_error": float(np.mean(errors)),
        "median_error": float(np.median(errors)),
        "fit_slope": curve["slope"],
        "fit_intercept": curve["intercept"],
        "fit_r_squared": curve["r_squared"],
        "ks_statistic_vs_uniform": uniform_ks_statistic(errors),
        "success_rate_at_0p1": success_rate(errors, 0.1),
        "uniform_guess_rate_at_0p1": 0.1 / np.pi,
        "diverged": int(sum(t.diverged for t in traces)),
    }
    return report


# ---------------------------------------------------------------------------

def cmd_landscape(cfg: ExperimentConfig, out_dir: str) -> dict:
    section = cfg.landscape
    profiles = []
    for m in section.m_values:
        resolution = landscape.minimum_resolution(int(m)) \
            * section.resolution_multiplier // 10
        for seed in range(section.seeds):
            profiles.append(landscape.census_run(int(m), seed, cfg.seed,
                                                 resolution=resolution))

    write_csv(os.path.join(out_dir, "census.csv"),
              ["m", "seed", "j", "n_minima", "valley_width",
               "global_min_angle", "true_angle"],
              [(p.m, p.seed, p.j, p.n_minima, p.valley_width,
                float(p.global_min_angle[0]), float(p.true_angle[0]))
               for p in profiles])

    nc_fit = landscape.minima_scaling_fit(profiles)
    r_fit = landscape.valley_width_fit(profiles)
    distance_rows, distance_ks = [], {}
    for m in section.m_values:
        group = [p for p in profiles if p.m == int(m)]
        dist = landscape.minima_distance_distribution(group)
        distance_ks[int(m)] = dist["ks_statistic"]
        distance_rows.extend((int(m), float(d)) for d in dist["distances"])
    write_csv(os.path.join(out_dir, "distances.csv"), ["m", "distance"],
              distance_rows)

    for m in section.m_values:
        profile = next(p for p in profiles if p.m == int(m) and p.seed == 0)
        write_csv(os.path.join(out_dir, f"profile_m{int(m)}.csv"),
                  ["angle", "single_gradient_loss"],
                  list(zip(profile.angles, profile.values)))

    fits = {"minima_count": nc_fit, "valley_width": r_fit,
            "distance_ks": distance_ks}
    write_json(os.path.join(out_dir, "fits.json"), fits)
    return {
        "minima_slope": nc_fit["slope"],
        "minima_intercept": nc_fit["intercept"],
        "valley_slope": r_fit["slope"],
        "valley_intercept": r_fit["intercept"],
        "distance_ks": distance_ks,
        "num_profiles": len(profiles),
    }


# ---------------------------------------------------------------------------

def build_training_setup(cfg: ExperimentConfig):
    """Model, clients with equispaced-angle datasets, and the metric grid."""
    model = cfg.model.build()
    section = cfg.train
    target = target_function(section.target, section.target_table)
    total = section.clients * section.samples_per_client
    angles = np.arange(total) * (TWO_PI / total)
    grid_x = angles / model.encoding.gamma
    grid_y = np.asarray(target(angles), dtype=float)
    clients = []
    for c in range(section.clients):
        idx = np.arange(c, total, section.clients)  # interleaved round-robin
        samples = [Sample(np.array([grid_x[i]]), float(grid_y[i])) for i in idx]
        seed = int(derive_rng(cfg.seed, ROLE_DATASET, c).integers(2**63))
        clients.append(fedsim.ClientState(client_id=c, samples=samples,
                                          batch_size=section.batch_size,
                                          rng_seed=seed))
    return model, clients, grid_x, grid_y, target


def cmd_train(cfg: ExperimentConfig, out_dir: str) -> dict:
    from . import engine

    section = cfg.train
    model, clients, grid_x, grid_y, target = build_training_setup(cfg)
    theta0 = random_parameters(model.ansatz, derive_rng(cfg.seed, ROLE_THETA))
    server = fedsim.ServerState(model=model, theta=theta0,
                                learning_rate=section.learning_rate,
                                weights=fedsim.dataset_weights(clients))
    snapshots = tuple(e for e in section.snapshot_epochs if e <= section.epochs)
    history = fedsim.run_training(server, clients, section.epochs, grid_x, grid_y,
                                  optimizer=section.optimizer,
                                  snapshot_epochs=snapshots, keep_records=True)

    write_csv(os.path.join(out_dir, "history.csv"), ["epoch", "train_mse"],
              list(zip(history.epochs, history.train_mse)))
    dense = np.linspace(0.0, TWO_PI, 201)
    fit_rows = []
    for epoch in sorted(history.theta_snapshots):
        outputs = engine.model_outputs(model, history.theta_snapshots[epoch],
                                       (dense / model.encoding.gamma)[:, None])
        fit_rows.extend(
            (epoch, a, float(t), float(o))
            for a, t, o in zip(dense, target(dense), outputs)
        )
    write_csv(os.path.join(out_dir, "model_fit.csv"),
              ["epoch", "angle", "target", "model_output"], fit_rows)
    fedsim.write_round_records(os.path.join(out_dir, "rounds.jsonl"),
                               history.records, server)

    report = {
        "final_mse": history.train_mse[-1],
        "initial_mse": history.train_mse[0],
        "epochs": section.epochs,
    }
    if section.track_landscape:
        j = landscape._non_final_parameter(
            derive_rng(cfg.seed, ROLE_GRADIENT_INDEX), model.ansatz
        )
        y_target = float(target(section.attack_target_angle))
        series = landscape.landscape_during_training(
            model, history.theta_snapshots, section.attack_target_angle,
            y_target, j
        )
        rows = []
        summary = {}
        for epoch, profile in series:
            rows.extend((epoch, a, v) for a, v in zip(profile.angles, profile.values))
            summary[epoch] = {"n_minima": profile.n_minima,
                              "valley_width": profile.valley_width}
        write_csv(os.path.join(out_dir, "attack_landscape.csv"),
                  ["epoch", "angle", "single_gradient_loss"], rows)
        write_json(os.path.join(out_dir, "landscape_summary.json"),
                   {"gradient_index": j, "target_angle": section.attack_target_angle,
                    "per_epoch": summary})
        first, last = min(summary), max(summary)
        report.update({
            "gradient_index": j,
            "initial_n_minima": summary[first]["n_minima"],
            "final_n_minima": summary[last]["n_minima"],
            "n_minima_ratio": summary[last]["n_minima"] / max(1, summary[first]["n_minima"]),
        })
    return report


# ---------------------------------------------------------------------------

def cmd_spectrum(cfg: ExperimentConfig, out_dir: str) -> dict:
    section = cfg.spectrum
    reports = []
    for m in section.m_values:
        m = int(m)
        model = landscape.landscape_model(m)
        for seed in range(section.seeds_per_m):
            rng = derive_rng(cfg.seed, ROLE_EXPERIMENT, m, seed)
            theta = random_parameters(model.ansatz, rng)
            sample = Sample(rng.uniform(0.0, 1.0, size=1),
                            float(rng.choice((-1.0, 1.0))))
            j = landscape._non_final_parameter(rng, model.ansatz)
            rep = spectral.verify_gradient_support(model, theta, sample, j)
            reports.append(rep)
            if seed == 0:
                signal = spectral.gradient_signal(model, theta, sample, j)
                spec = spectral.extract_spectrum(
                    signal, 2 * rep.predicted_max_frequency, model.encoding.gamma
                )
                write_csv(os.path.join(out_dir, f"spectrum_m{m}.csv"),
                          ["frequency", "real", "imag", "magnitude"],
                          [(int(f), c.real, c.imag, abs(c))
                           for f, c in zip(spec.frequencies, spec.coefficients)])
    all_passed = all(r.passed for r in reports)
    report = {
        "all_passed": all_passed,
        "checks": [{"m": r.m, "j": r.j,
                    "predicted_max_frequency": r.predicted_max_frequency,
                    "observed_max_frequency": r.observed_max_frequency,
                    "headroom_leak": r.headroom_leak, "passed": r.passed}
                   for r in reports],
    }
    write_json(os.path.join(out_dir, "support_report.json"), report)
    return report


def cmd_bounds(cfg: ExperimentConfig, out_dir: str) -> dict:
    rows = spectral.bounds_table(cfg.bounds.n_values, cfg.bounds.m_values)
    header = list(rows[0].keys())
    write_csv(os.path.join(out_dir, "bounds.csv"),
              header, [[row[k] for k in header] for row in rows])
    return {"rows": len(rows), "max_buchberger_log2": max(r["buchberger_log2"] for r in rows)}


def cmd_classical(cfg: ExperimentConfig, out_dir: str) -> dict:
    section = cfg.classical
    rows = []
    worst = 0.0
    for trial in range(section.trials):
        rng = derive_rng(cfg.seed, ROLE_EXPERIMENT, trial)
        layer = classical_mod.DenseLayer(
            weights=rng.standard_normal((section.input_dim, section.num_classes)),
            biases=rng.standard_normal(section.num_classes),
        )
        x = rng.uniform(0.0, 1.0, size=section.input_dim)
        y = np.zeros(section.num_classes)
        y[rng.integers(section.num_classes)] = 1.0
        grads = classical_mod.gradients(layer, x, y)
        recovered = classical_mod.invert_from_gradients(grads["dW"], grads["db"])
        err = float(np.max(np.abs(recovered - x)))
        worst = max(worst, err)
        rows.append((trial, err))
    write_csv(os.path.join(out_dir, "classical.csv"),
              ["trial", "max_abs_error"], rows)
    counting = classical_mod.batch_counting_report(section.input_dim,
                                                   section.num_classes, 2)
    return {
        "trials": section.trials,
        "max_recovery_error": worst,
        "batch2_equations": counting["equations"],
        "batch2_unknowns": counting["unknowns"],
    }


# ---------------------------------------------------------------------------

_COMMANDS = {
    "attack": cmd_attack,
    "landscape": cmd_landscape,
    "train": cmd_train,
    "spectrum": cmd_spectrum,
    "bounds": cmd_bounds,
    "classical": cmd_classical,
}


def default_out_dir(cfg: ExperimentConfig) -> str:
    name = cfg.preset or cfg.experiment
    if cfg.quick:
        name += "_quick"
    return os.path.join("artifacts", name)


def run_experiment(cfg: ExperimentConfig) -> dict:
    """Validate, run, and write artifacts; returns the report dictionary."""
    cfg.validate()
    out_dir = cfg.out_dir or default_out_dir(cfg)
    os.makedirs(out_dir, exist_ok=True)
    write_manifest(out_dir, cfg, complete=False)
    try:
        report = _COMMANDS[cfg.experiment](cfg, out_dir)
    except DivergenceError as exc:
        write_manifest(out_dir, cfg, complete=False, extra={"error": str(exc)})
        raise
    write_json(os.path.join(out_dir, "report.json"), report)
    write_manifest(out_dir, cfg, complete=True)
    return report


def check_thresholds(cfg: ExperimentConfig, report: dict) -> list:
    """Acceptance-style threshold checks for --check mode; returns failures."""
    failures = []

    def expect(ok: bool, message: str):
        if not ok:
            failures.append(message)

    if cfg.experiment == "attack":
        if cfg.model.m >= 3:
            expect(report["fit_r_squared"] >= 0.95,
                   f"P(eps) linear fit R^2 {report['fit_r_squared']:.4f} < 0.95")
            expect(report["ks_statistic_vs_uniform"] < 0.1,
                   f"KS statistic {report['ks_statistic_vs_uniform']:.4f} >= 0.1")
        if cfg.model.m == 1:
            expect(report["success_rate_at_0p1"] > 0.1 / np.pi,
                   f"success rate {report['success_rate_at_0p1']:.4f} not above "
                   f"the uniform-guess baseline {0.1 / np.pi:.4f}")
    elif cfg.experiment == "landscape":
        expect(1.2 <= report["minima_slope"] <= 1.8,
               f"minima-count slope {report['minima_slope']:.3f} outside [1.2, 1.8]")
        expect(-1.8 <= report["valley_slope"] <= -1.2,
               f"valley-width slope {report['valley_slope']:.3f} outside [-1.8, -1.2]")
    elif cfg.experiment == "train" and cfg.train.target == "cosine_0p7":
        if cfg.model.m == 2:
            expect(report["final_mse"] < 1e-2,
                   f"final MSE {report['final_mse']:.4g} not below 1e-2")
        if cfg.model.m == 4:
            expect(report["final_mse"] < 5e-2,
                   f"final MSE {report['final_mse']:.4g} not below 5e-2")
            if "n_minima_ratio" in report:
                expect(report["n_minima_ratio"] >= 0.5,
                       f"minima ratio {report['n_minima_ratio']:.3f} below 0.5")
    elif cfg.experiment == "spectrum":
        expect(report["all_passed"], "a gradient-support check failed")
    elif cfg.experiment == "classical":
        expect(report["max_recovery_error"] < 1e-9,
               f"recovery error {report['max_recovery_error']:.3g} not below 1e-9")
    return failures
