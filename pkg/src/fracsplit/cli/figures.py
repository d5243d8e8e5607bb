"""PNG figures written next to the CSV outputs (non-interactive backend)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = ["plot_toy_sweep", "plot_cycle", "plot_sharp_ratio", "plot_ct"]


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def plot_toy_sweep(curves, trajectories, path):
    """``curves``: {beta: RErr sequence}; ``trajectories``: {beta: (k+1, 2) iterates}."""
    fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(10, 4))
    for beta, rerr in curves.items():
        ax0.semilogy(np.arange(len(rerr)), np.maximum(rerr, 1e-16), label=f"beta={beta:g}")
    ax0.axhline(1e-6, color="k", lw=0.6, ls=":")
    ax0.set_xlabel("iteration k")
    ax0.set_ylabel("relative error")
    ax0.legend()
    for beta, xs in trajectories.items():
        ax1.plot(xs[:, 0], xs[:, 1], ".-", ms=2, lw=0.8, label=f"beta={beta:g}")
    ax1.plot([1.0], [0.0], "k*", ms=10)
    ax1.set_xlabel("x_1")
    ax1.set_ylabel("x_2")
    ax1.set_xlim(-0.05, 1.05)
    ax1.set_ylim(-0.05, 1.05)
    _save(fig, path)


def plot_cycle(xs, thetas, path):
    fig, ax = plt.subplots(figsize=(7, 3.5))
    k = np.arange(len(xs))
    ax.step(k, xs[:, 0], where="post", label="x_1")
    ax.step(k, xs[:, 1], where="post", label="x_2", ls="--")
    ax.plot(np.arange(1, len(thetas) + 1), thetas, "k.", ms=3, label="theta")
    ax.set_xlabel("iteration k")
    ax.legend(loc="upper right")
    _save(fig, path)


def plot_sharp_ratio(rows, path):
    """Grouped bars of mean objective and CPU time per scenario and method."""
    scen = sorted({(r["n"], r["m1"], r["m2"]) for r in rows})
    methods = sorted({r["method"] for r in rows})
    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    width = 0.8 / max(len(methods), 1)
    for ax, key, label in ((axes[0], "obj", "mean obj"), (axes[1], "cpu", "mean CPU [s]")):
        for i, m in enumerate(methods):
            vals = [next((r[key] for r in rows if (r["n"], r["m1"], r["m2"]) == s and r["method"] == m), np.nan)
                    for s in scen]
            ax.bar(np.arange(len(scen)) + i * width, vals, width, label=m)
        ax.set_xticks(np.arange(len(scen)) + 0.4 - width / 2)
        ax.set_xticklabels([f"({n},{a},{b})" for n, a, b in scen], rotation=30)
        ax.set_ylabel(label)
    axes[0].legend()
    _save(fig, path)


def plot_ct(phantom, recons, path):
    """``recons``: {(range, method): image}; one row per range plus the phantom."""
    ranges = sorted({r for r, _ in recons})
    methods = sorted({m for _, m in recons})
    fig, axes = plt.subplots(len(ranges), len(methods) + 1, figsize=(2.6 * (len(methods) + 1), 2.6 * len(ranges)),
                             squeeze=False)
    for i, rg in enumerate(ranges):
        axes[i, 0].imshow(phantom, cmap="gray", vmin=0, vmax=1)
        axes[i, 0].set_title("phantom" if i == 0 else "")
        axes[i, 0].set_ylabel(f"{rg:g} deg")
        for j, m in enumerate(methods):
            img = recons.get((rg, m))
            if img is not None:
                axes[i, j + 1].imshow(img, cmap="gray", vmin=0, vmax=1)
            axes[i, j + 1].set_title(m if i == 0 else "")
    for ax in axes.ravel():
        ax.set_xticks([])
        ax.set_yticks([])
    _save(fig, path)
