"""Matplotlib figures rendered next to the delimited artifacts."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_SAVE = {"dpi": 130, "bbox_inches": "tight", "metadata": {"Software": "fracplap"}}


def eigenfunction_figure(path, fn, lambda1: float):
    grid = fn.grid
    fig, ax = plt.subplots(figsize=(5.2, 3.4))
    if grid.params.dim == 1:
        order = np.argsort(grid.nodes[:, 0])
        ax.plot(grid.nodes[order, 0], fn.values[order], "o-", ms=3, lw=1)
        ax.set_xlabel("x")
        ax.set_ylabel("u")
    else:
        sc = ax.scatter(grid.nodes[:, 0], grid.nodes[:, 1], c=fn.values, s=14, cmap="viridis")
        fig.colorbar(sc, ax=ax, label="u")
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        ax.set_aspect("equal")
    ax.set_title(f"first eigenfunction, lambda1 = {lambda1:.6g}")
    fig.savefig(path, **_SAVE)
    plt.close(fig)


def spectrum_figure(path, eigenvalues, fit=None, target_slope=None):
    lam = np.asarray(eigenvalues)
    counts = np.arange(1, len(lam) + 1)
    fig, ax = plt.subplots(figsize=(5.2, 3.8))
    ax.loglog(lam, counts, drawstyle="steps-post", lw=1, label="measured N(lambda)")
    if fit is not None:
        lo, hi = fit.window
        xs = np.geomspace(lo, hi, 50)
        ax.loglog(xs, np.exp(fit.intercept) * xs**fit.slope, "r--", lw=1.4,
                  label=f"fit slope {fit.slope:.3f} (r2={fit.r2:.4f})")
        ax.axvspan(lo, hi, color="0.9", zorder=0)
    if target_slope is not None:
        ax.plot([], [], " ", label=f"conjectured slope {target_slope:.3f}")
    ax.set_xlabel("lambda")
    ax.set_ylabel("N(lambda)")
    ax.legend(fontsize=8)
    fig.savefig(path, **_SAVE)
    plt.close(fig)


def bounds_figure(path, report):
    fig, ax = plt.subplots(figsize=(5.2, 3.8))
    lam = report.lambdas
    if report.measured is not None:
        pos = report.measured > 0
        ax.loglog(lam[pos], report.measured[pos], "k.", ms=4, label="measured N")
    for vals, valid, color, name in [
        (report.lower, report.lower_valid, "tab:blue", "lower bound"),
        (report.upper, report.upper_valid, "tab:red", "upper bound"),
    ]:
        if vals is None:
            continue
        ax.loglog(lam[valid], vals[valid], "-", color=color, lw=1.4, label=name)
        if (~valid).any():
            ax.loglog(lam[~valid], vals[~valid], ":", color=color, lw=1,
                      label=f"{name} (below threshold)")
    ax.set_xlabel("lambda")
    ax.set_ylabel("N(lambda)")
    title = "counting-function bounds"
    if not report.calibrated:
        title += " (uncalibrated r=q=1)"
    ax.set_title(title, fontsize=10)
    ax.legend(fontsize=8)
    fig.savefig(path, **_SAVE)
    plt.close(fig)


def kappa_figure(path, grid, kappa):
    fig, ax = plt.subplots(figsize=(5.2, 3.4))
    if grid.params.dim == 1:
        order = np.argsort(grid.nodes[:, 0])
        ax.semilogy(grid.nodes[order, 0], kappa[order], "o-", ms=3, lw=1)
        ax.set_xlabel("x")
        ax.set_ylabel("kappa")
    else:
        sc = ax.scatter(grid.nodes[:, 0], grid.nodes[:, 1], c=np.log10(kappa), s=14,
                        cmap="magma")
        fig.colorbar(sc, ax=ax, label="log10 kappa")
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        ax.set_aspect("equal")
    ax.set_title("complement potential")
    fig.savefig(path, **_SAVE)
    plt.close(fig)
