"""Optional PNG figures next to the CSV output (matplotlib, Agg backend)."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import ExportError


def _pyplot():
    try:
        import matplotlib
    except ImportError as exc:
        raise ExportError("figures need matplotlib; install the 'figures' extra") from exc
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def _save(fig, path):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path, dpi=120, metadata={"Software": None})
    except OSError as exc:
        raise ExportError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def plot_profile(sample, path, title: str = "") -> Path:
    """Stereographic profile and the filament in two panels."""
    plt = _pyplot()
    fig = plt.figure(figsize=(10, 4.5))
    ax = fig.add_subplot(1, 2, 1)
    ax.plot(sample.z0.real, sample.z0.imag, lw=1.2)
    ax.set_aspect("equal")
    ax.set_xlabel("Re z")
    ax.set_ylabel("Im z")
    ax3 = fig.add_subplot(1, 2, 2, projection="3d")
    X = sample.X
    ax3.plot(X[:, 0], X[:, 1], X[:, 2], lw=1.2)
    ax3.set_xlabel("X1")
    ax3.set_ylabel("X2")
    ax3.set_zlabel("X3")
    if title:
        fig.suptitle(title)
    out = _save(fig, path)
    plt.close(fig)
    return out


def plot_branch(branch, path, title: str = "") -> Path:
    """R and lambda against the amplitude."""
    plt = _pyplot()
    fig, (a1, a2) = plt.subplots(1, 2, figsize=(9, 3.8))
    eta = np.concatenate(([0.0], branch.etas))
    a1.plot(eta, np.concatenate(([branch.eigenpair.R], branch.radii)), "o-", ms=3)
    a1.set_xlabel("eta")
    a1.set_ylabel("R")
    a2.plot(eta, np.concatenate(([0.0], branch.lambdas)), "o-", ms=3)
    a2.set_xlabel("eta")
    a2.set_ylabel("lambda")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    out = _save(fig, path)
    plt.close(fig)
    return out
