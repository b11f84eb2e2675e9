"""Figure builders: one function per figure id, consuming artifact directories.

Rendering is read-only over the artifacts and deterministic: fixed figure
geometry, fixed fonts, no timestamps, so the same inputs give the same bytes.
"""

from __future__ import annotations

import glob
import os
import re

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import ArtifactError, load_csv, load_json


def _normalize(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    span = values.max() - values.min()
    if span == 0:
        return np.zeros_like(values)
    return (values - values.min()) / span


def fig3(in_dir: str):
    """Final-error histogram with the single-gradient loss profile overlaid."""
    summary = load_csv(in_dir, "summary.csv", ["final_error"])
    curve = load_csv(in_dir, "loss_curve.csv",
                     ["distance_from_target", "single_gradient_loss"])
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.hist(summary["final_error"], bins=40, range=(0, np.pi),
            color="tab:blue", alpha=0.75, label="attack error")
    ax.set_xlabel("angular error |x - x'|")
    ax.set_ylabel("attempts")
    order = np.argsort(curve["distance_from_target"])
    twin = ax.twinx()
    twin.plot(np.asarray(curve["distance_from_target"])[order],
              np.asarray(curve["single_gradient_loss"])[order],
              color="tab:orange", lw=1.0, label="|C'_j - C_j|^2")
    twin.set_ylabel("single-gradient loss")
    ax.set_title("gradient-inversion attack outcome")
    fig.legend(loc="upper right", bbox_to_anchor=(0.98, 0.92))
    return fig


def _scaling_figure(in_dir: str, key: str, ylabel: str, title: str):
    fits = load_json(in_dir, "fits.json", [key])
    fit = fits[key]
    for field in ("slope", "intercept", "per_m"):
        if field not in fit:
            raise ArtifactError(f"fits.json: missing key {key}.{field}")
    ms = sorted(int(m) for m in fit["per_m"])
    means = [fit["per_m"][str(m)]["mean_log"] for m in ms]
    stds = [fit["per_m"][str(m)]["std_log"] for m in ms]
    fig, ax = plt.subplots(figsize=(5.6, 4.2))
    ax.errorbar(ms, means, yerr=stds, fmt="o", capsize=4, color="tab:blue")
    grid = np.linspace(min(ms) - 0.2, max(ms) + 0.2, 50)
    ax.plot(grid, fit["slope"] * grid + fit["intercept"], "--", color="tab:red",
            label=f"slope {fit['slope']:+.3f}")
    ax.set_xlabel("qubits per input m")
    ax.set_ylabel(ylabel)
    ax.set_xticks(ms)
    ax.set_title(title)
    ax.legend()
    return fig


def fig4(in_dir: str):
    return _scaling_figure(in_dir, "minima_count", "mean ln N_c",
                           "local-minima count scaling")


def fig7(in_dir: str):
    return _scaling_figure(in_dir, "valley_width", "mean ln r",
                           "global-minimum valley width scaling")


def _profile_files(in_dir: str):
    paths = sorted(glob.glob(os.path.join(in_dir, "profile_m*.csv")))
    found = []
    for path in paths:
        match = re.search(r"profile_m(\d+)\.csv$", path)
        if match:
            found.append((int(match.group(1)), os.path.basename(path)))
    if not found:
        raise ArtifactError(f"no profile_m<M>.csv files in {in_dir}")
    return sorted(found)


def fig5(in_dir: str):
    """Single-gradient loss landscapes per tower height, normalized to [0, 1]."""
    files = _profile_files(in_dir)
    fig, axes = plt.subplots(len(files), 1, figsize=(6.4, 2.2 * len(files)),
                             sharex=True, squeeze=False)
    for ax, (m, name) in zip(axes[:, 0], files):
        data = load_csv(in_dir, name, ["angle", "single_gradient_loss"])
        ax.plot(data["angle"], _normalize(data["single_gradient_loss"]),
                lw=0.9, color="tab:blue")
        ax.set_ylabel(f"m = {m}")
        ax.set_ylim(-0.05, 1.05)
    axes[-1, 0].set_xlabel("attack input angle x'")
    axes[0, 0].set_title("attack loss landscapes (normalized)")
    return fig


def fig6(in_dir: str):
    """Distance of local minima from the global minimum, per tower height."""
    data = load_csv(in_dir, "distances.csv", ["m", "distance"])
    ms = sorted(set(int(v) for v in data["m"]))
    fig, axes = plt.subplots(1, len(ms), figsize=(3.4 * len(ms), 3.4),
                             squeeze=False)
    for ax, m in zip(axes[0], ms):
        values = [d for mv, d in zip(data["m"], data["distance"]) if int(mv) == m]
        ax.hist(values, bins=25, range=(0, np.pi), color="tab:blue", alpha=0.8)
        ax.set_title(f"m = {m}")
        ax.set_xlabel("distance from global minimum")
    axes[0][0].set_ylabel("minima")
    return fig


def _training_figure(in_dir: str, title: str):
    history = load_csv(in_dir, "history.csv", ["epoch", "train_mse"])
    fit = load_csv(in_dir, "model_fit.csv",
                   ["epoch", "angle", "target", "model_output"])
    scan = load_csv(in_dir, "attack_landscape.csv",
                    ["epoch", "angle", "single_gradient_loss"])
    epochs = sorted(set(int(e) for e in fit["epoch"]))
    rows = len(epochs)
    fig, axes = plt.subplots(rows, 2, figsize=(9.0, 2.4 * rows), squeeze=False)
    fit_e = np.asarray(fit["epoch"], dtype=int)
    scan_e = np.asarray(scan["epoch"], dtype=int)
    for row, epoch in enumerate(epochs):
        left, right = axes[row]
        mask = scan_e == epoch
        if np.any(mask):
            left.plot(np.asarray(scan["angle"])[mask],
                      _normalize(np.asarray(scan["single_gradient_loss"])[mask]),
                      lw=0.8, color="tab:orange")
        left.set_ylabel(f"epoch {epoch}")
        mask = fit_e == epoch
        right.plot(np.asarray(fit["angle"])[mask],
                   np.asarray(fit["target"])[mask], "--", color="black",
                   label="target")
        right.plot(np.asarray(fit["angle"])[mask],
                   np.asarray(fit["model_output"])[mask], color="tab:blue",
                   label="model")
        if row == 0:
            left.set_title("attack loss landscape (normalized)")
            right.set_title("model fit")
            right.legend(loc="upper right", fontsize=8)
    axes[-1][0].set_xlabel("attack input angle x'")
    axes[-1][1].set_xlabel("input angle x")
    fig.suptitle(f"{title}; final train MSE {history['train_mse'][-1]:.3g}")
    return fig


def fig8(in_dir: str):
    return _training_figure(in_dir, "training on the line target (m = 4)")


def fig9(in_dir: str):
    return _training_figure(in_dir, "training on 0.7 cos(x) (m = 2)")


def fig10(in_dir: str):
    return _training_figure(in_dir, "training on 0.7 cos(x) (m = 4)")


FIGURES = {
    "fig3": fig3,
    "fig4": fig4,
    "fig5": fig5,
    "fig6": fig6,
    "fig7": fig7,
    "fig8": fig8,
    "fig9": fig9,
    "fig10": fig10,
}


def render(figure: str, in_dir: str, out_path: str) -> str:
    """Build one figure from an artifact directory and write the image."""
    if figure not in FIGURES:
        raise ArtifactError(
            f"unknown figure {figure!r}; available: {sorted(FIGURES)}"
        )
    if not os.path.isdir(in_dir):
        raise ArtifactError(f"artifact directory not found: {in_dir}")
    fig = FIGURES[figure](in_dir)
    fig.savefig(out_path, dpi=120, metadata={"Software": "qflab-plot"})
    plt.close(fig)
    return out_path
