"""Figure rendering for the report path.

Every figure is written next to its delimited data file, so plots can be
regenerated later from the CSV alone with any tool.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def plot_energy_trace(result, path, title="energy trace"):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(np.arange(1, result.iterations_run + 1), result.energy_trace, lw=0.9)
    ax.axhline(result.best_energy, color="tab:red", ls="--", lw=0.8, label="best")
    ax.set_xlabel("iteration")
    ax.set_ylabel("energy")
    ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_energy_histogram(summary, path, title="energy distribution"):
    fig, ax = plt.subplots(figsize=(6, 4))
    edges = np.asarray(summary.hist_edges)
    ax.stairs(summary.hist_counts, edges, fill=True, alpha=0.7)
    ax.set_xlabel("best energy per run")
    ax.set_ylabel("runs")
    ax.set_title(f"{title} ({summary.num_runs} runs, {summary.solver})")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_cut_histogram(summary, path, title="cut size distribution"):
    fig, ax = plt.subplots(figsize=(6, 4))
    cuts = np.asarray(summary.cut_sizes)
    ax.hist(cuts, bins="auto", alpha=0.7)
    ax.set_xlabel("cut size")
    ax.set_ylabel("runs")
    ax.set_title(f"{title} ({summary.num_runs} runs)")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_sweep_heatmap(sweep, path, title="mean energy sweep"):
    fig, ax = plt.subplots(figsize=(6, 4.5))
    im = ax.imshow(sweep.mean_energies, origin="lower", aspect="auto", cmap="viridis")
    ax.set_xticks(range(len(sweep.budget_grid)), [str(b) for b in sweep.budget_grid])
    ax.set_yticks(range(len(sweep.mu_grid)), [f"{m:g}" for m in sweep.mu_grid])
    ax.set_xlabel("detection budget")
    ax.set_ylabel("mean photon number")
    ax.set_title(title)
    fig.colorbar(im, ax=ax, label="mean energy")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
