"""Figure rendering for the CLI report path.

Each helper takes already-computed arrays and writes one PNG next to the
delimited output.  Rendering is headless (Agg) and deterministic in content;
figures are a convenience view of the CSV/JSON, never the primary artifact.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "plot_kernel_curve",
    "plot_sensitivity_terms",
    "plot_norm_decay",
    "plot_oracle_trajectory",
    "plot_threshold_scan",
    "plot_recovery",
]

_DPI = 150


def _save(fig, path: str) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def plot_kernel_curve(t, B, dBdt, path: str) -> None:
    fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(6, 6))
    ax1.plot(t, B, "b-")
    ax1.set_ylabel("kernel value")
    ax1.grid(alpha=0.3)
    finite = np.isfinite(dBdt)
    ax2.plot(np.asarray(t)[finite], np.asarray(dBdt)[finite], "r-")
    ax2.set_xlabel("t")
    ax2.set_ylabel("time derivative")
    ax2.grid(alpha=0.3)
    _save(fig, path)


def plot_sensitivity_terms(alphas, totals, terms, fd, path: str) -> None:
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    ax1.plot(alphas, totals, "k-", label="total")
    ax1.plot(alphas, fd, "r--", label="finite difference")
    ax1.axhline(0.0, color="gray", lw=0.5)
    ax1.set_xlabel("alpha")
    ax1.set_ylabel("d(kernel)/d(alpha)")
    ax1.legend()
    ax1.grid(alpha=0.3)
    terms = np.asarray(terms)
    for j in range(terms.shape[1]):
        ax2.plot(alphas, terms[:, j], label=f"term {j + 1}")
    ax2.axhline(0.0, color="gray", lw=0.5)
    ax2.set_xlabel("alpha")
    ax2.set_ylabel("term value")
    ax2.legend(fontsize=8)
    ax2.grid(alpha=0.3)
    _save(fig, path)


def plot_norm_decay(t, U, path: str) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    positive = np.asarray(U) > 0.0
    if np.all(positive):
        ax.semilogy(t, U, "b-")
    else:
        ax.plot(t, U, "b-")
    ax.set_xlabel("t")
    ax.set_ylabel("squared norm")
    ax.grid(alpha=0.3)
    _save(fig, path)


def plot_oracle_trajectory(t, y, path: str) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(t, y, "b-")
    ax.set_xlabel("t")
    ax.set_ylabel("y")
    ax.grid(alpha=0.3)
    _save(fig, path)


def plot_threshold_scan(ts, worst, threshold, path: str) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogx(ts, worst, "bo-")
    ax.axhline(0.0, color="gray", lw=0.5)
    if threshold is not None:
        ax.axvline(threshold, color="r", ls="--", label="threshold estimate")
        ax.legend()
    ax.set_xlabel("t")
    ax.set_ylabel("worst-case sensitivity")
    ax.grid(alpha=0.3)
    _save(fig, path)


def plot_recovery(alpha_samples, u_samples, d0, alpha_hat, path: str) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogy(alpha_samples, u_samples, "bo-", label="observation curve")
    ax.axhline(d0, color="gray", ls=":", label="observed value")
    ax.axvline(alpha_hat, color="r", ls="--", label="recovered order")
    ax.set_xlabel("alpha")
    ax.set_ylabel("U(t0, alpha)")
    ax.legend()
    ax.grid(alpha=0.3)
    _save(fig, path)
