"""Figure rendering for the report paths.

Each writer takes an in-memory report and saves one PNG next to the delimited
output. Rendering is headless (Agg) and deterministic.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _finish(fig, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=130, bbox_inches="tight")
    plt.close(fig)
    return path


def save_sweep_heatmap(report, path):
    """Largest eigenvalue of the certificate matrix over the sweep grid."""
    nx, ny = report.grid.nx, report.grid.ny
    X = report.x.reshape(nx, ny)
    Y = report.y.reshape(nx, ny)
    E = report.eig_max.reshape(nx, ny)
    fig, axes = plt.subplots(1, 2, figsize=(9.2, 3.6))
    pc = axes[0].pcolormesh(X, Y, E, shading="auto", cmap="RdBu_r",
                            vmin=-np.max(np.abs(E)), vmax=np.max(np.abs(E)))
    fig.colorbar(pc, ax=axes[0], label="largest eigenvalue")
    axes[0].set_xlabel("x")
    axes[0].set_ylabel("y")
    axes[0].set_title(f"{report.surface}: certificate eigenvalue")
    R = np.abs(report.rel_residual.reshape(nx, ny))
    pc2 = axes[1].pcolormesh(X, Y, np.log10(R + 1e-18), shading="auto", cmap="viridis")
    fig.colorbar(pc2, ax=axes[1], label="log10 |relative residual|")
    axes[1].set_xlabel("x")
    axes[1].set_title("degeneracy residual")
    return _finish(fig, path)


def save_reconstruction_map(table, path):
    xs = np.unique(table.x)
    ys = np.unique(table.y)
    shape = (xs.size, ys.size)
    fig, ax = plt.subplots(figsize=(5.4, 4.0))
    if table.deviation is not None:
        Z = np.abs(table.deviation.reshape(shape))
        label = "|deviation from closed form|"
    else:
        Z = table.M.reshape(shape)
        label = "reconstructed M"
    pc = ax.pcolormesh(xs, ys, Z.T, shading="auto", cmap="magma")
    fig.colorbar(pc, ax=ax, label=label)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title(f"reconstruction: {table.boundary}")
    return _finish(fig, path)


def save_trace(report, path):
    """Monotonicity trace G(t) with its equilibrium level."""
    ts = [t for t, _ in report.trace]
    gs = [g for _, g in report.trace]
    finite = [(t, g) for t, g in zip(ts, gs) if np.isfinite(t)]
    fig, ax = plt.subplots(figsize=(5.4, 3.4))
    if finite:
        ax.plot(*zip(*finite), "o-", label="G(t)")
    ax.axhline(report.equilibrium_value, color="gray", ls="--",
               label="equilibrium value")
    ax.set_xlabel("t")
    ax.set_ylabel("G(t)")
    ax.set_title(f"{report.surface} / {report.test_function}")
    ax.legend(loc="lower right", fontsize=8)
    return _finish(fig, path)


def save_interpolation(report, path):
    rows = np.asarray([[r[0], r[-2] - r[-1]] for r in report.rows])
    fig, ax = plt.subplots(figsize=(5.4, 3.4))
    ax.plot(rows[:, 0], rows[:, 1], "o", ms=3)
    ax.axhline(0.0, color="gray", lw=0.8)
    ax.set_xlabel("t")
    ax.set_ylabel("lhs - rhs (must stay <= 0)")
    ax.set_title(f"interpolation: {report.surface} / {report.test_function}")
    return _finish(fig, path)


def save_margin_chart(reports, path):
    """Signed margins for a batch of verification reports, log-compressed.

    Small batches get labeled bars; large ones a scatter by case group, which
    stays readable for the several-hundred-case suite.
    """
    margins = np.array([r.margin for r in reports])
    colors = ["tab:blue" if r.passed else "tab:red" for r in reports]
    compressed = np.sign(margins) * np.log10(1.0 + np.abs(margins) / 1e-12)
    if len(reports) <= 60:
        labels = [f"{r.case}:{r.test_function}[n={r.n},s={r.sigma:g}]" for r in reports]
        fig, ax = plt.subplots(figsize=(7.0, max(2.5, 0.16 * len(labels))))
        ax.barh(np.arange(len(labels)), compressed, color=colors)
        ax.set_yticks(np.arange(len(labels)))
        ax.set_yticklabels(labels, fontsize=5)
        ax.axvline(0.0, color="black", lw=0.8)
        ax.set_xlabel("sign(margin) * log10(1 + |margin|/1e-12)")
    else:
        cases = sorted({r.case for r in reports})
        index = {c: i for i, c in enumerate(cases)}
        xs = np.array([index[r.case] for r in reports], dtype=float)
        rng = np.random.default_rng(0)
        xs = xs + rng.uniform(-0.25, 0.25, xs.size)  # jitter within the group
        fig, ax = plt.subplots(figsize=(max(7.0, 0.55 * len(cases)), 4.0))
        ax.scatter(xs, compressed, s=9, c=colors, alpha=0.8)
        ax.set_xticks(np.arange(len(cases)))
        ax.set_xticklabels(cases, rotation=45, ha="right", fontsize=6)
        ax.axhline(0.0, color="black", lw=0.8)
        ax.set_ylabel("sign(margin) * log10(1 + |margin|/1e-12)")
    ax.set_title("verification margins")
    return _finish(fig, path)
