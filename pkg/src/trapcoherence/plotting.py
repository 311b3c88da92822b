"""Figure rendering for the CLI report path.

Every plot function writes a PNG next to the delimited output; the data
files remain the primary artifact, figures are a convenience view.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "save_spectrum_figure",
    "save_coherence_figure",
    "save_rates_figure",
    "save_compare_figure",
    "save_fit_figure",
]


def save_spectrum_figure(path, epsilon, converged_count, l):
    fig, ax = plt.subplots(figsize=(5, 4))
    ks = np.arange(len(epsilon))
    ax.plot(ks[:converged_count], epsilon[:converged_count], "o", ms=3,
            label="converged")
    if converged_count < len(epsilon):
        ax.plot(ks[converged_count:], epsilon[converged_count:], "x", ms=3,
                color="0.6", label="unconverged")
    ax.set_xlabel("state index k")
    ax.set_ylabel(r"dimensionless eigenvalue $\epsilon_k$")
    ax.set_title(f"power-law trap spectrum, l = {l}")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_coherence_figure(path, ts, cs, t_1e):
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.plot(np.asarray(ts) * 1e3, cs, "-")
    if np.isfinite(t_1e) and t_1e <= max(ts):
        ax.axvline(t_1e * 1e3, ls="--", lw=0.8, color="0.5")
        ax.axhline(1.0 / np.e, ls="--", lw=0.8, color="0.5")
    ax.set_xlabel("time (ms)")
    ax.set_ylabel("coherence C(t)")
    ax.set_ylim(0, 1.02)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_rates_figure(path, axes_rates):
    names = [a.name for a in axes_rates]
    r_lam = [a.r_parametric for a in axes_rates]
    r_x = [a.r_pointing for a in axes_rates]
    pos = np.arange(len(names))
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.bar(pos - 0.18, r_lam, width=0.36, label=r"$R_\lambda$ (depth noise)")
    ax.bar(pos + 0.18, r_x, width=0.36, label=r"$R_x$ (pointing noise)")
    ax.set_xticks(pos, names)
    ax.set_ylabel("phonon jump rate (1/s)")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_compare_figure(path, models, labels, t_max):
    from .decoherence import coherence

    ts = np.linspace(0.0, t_max, 400)
    fig, ax = plt.subplots(figsize=(5, 4))
    for model, label in zip(models, labels):
        ax.plot(ts * 1e3, coherence(model, ts), "-", label=label)
    ax.axhline(1.0 / np.e, ls="--", lw=0.8, color="0.5")
    ax.set_xlabel("time (ms)")
    ax.set_ylabel("coherence C(t)")
    ax.set_ylim(0, 1.02)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_fit_figure(path, positions, values, model_positions, model_values, waist_m):
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.plot(np.asarray(positions) * 1e6, values, "o", ms=3, label="data")
    ax.plot(np.asarray(model_positions) * 1e6, model_values, "-",
            label=f"fit, w = {waist_m * 1e6:.3f} um")
    ax.set_xlabel("position (um)")
    ax.set_ylabel("intensity (arb.)")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
