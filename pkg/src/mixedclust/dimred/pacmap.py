"""Simplified PaCMAP on mixed data.

Three fixed pair sets (neighbors, mid-near, far) are sampled once from the
Huang distance matrix; the layout starts from a shrunken FAMD projection and
follows 450 Adam steps of the phase-weighted inverse-quadratic losses.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dataset import MixedDataset
from ..distance import pairwise
from .base import Embedding
from .famd import famd

_ADAM_BETA1 = 0.9
_ADAM_BETA2 = 0.999
_ADAM_EPS = 1e-7


def pacmap_weights(t: int) -> tuple[float, float, float]:
    """(w_nb, w_mn, w_fp) for 1-based iteration t of the three-phase schedule."""
    if t < 1:
        raise ValueError(f"iteration index must be >= 1, got {t}")
    if t <= 100:
        frac = (t - 1) / 99
        return 2.0, 1000.0 - 997.0 * frac, 1.0
    if t <= 200:
        return 3.0, 3.0, 1.0
    return 1.0, 0.0, 1.0


# Eq. 6 per-pair terms on dt = 1 + |ya - yb|^2, exposed for gradient checks


def pair_loss(y_a: np.ndarray, y_b: np.ndarray, kind: str, weight: float = 1.0) -> float:
    delta = np.asarray(y_a, dtype=float) - np.asarray(y_b, dtype=float)
    dt = 1.0 + float(delta @ delta)
    if kind == "neighbor":
        return weight * dt / (10.0 + dt)
    if kind == "mid":
        return weight * dt / (1000.0 + dt)
    if kind == "far":
        return weight / (1.0 + dt)
    raise ValueError(f"unknown pair kind: {kind!r}")


def pair_grad(y_a: np.ndarray, y_b: np.ndarray, kind: str, weight: float = 1.0) -> np.ndarray:
    """Gradient of pair_loss with respect to the anchor y_a."""
    delta = np.asarray(y_a, dtype=float) - np.asarray(y_b, dtype=float)
    dt = 1.0 + float(delta @ delta)
    if kind == "neighbor":
        coef = weight * 20.0 / (10.0 + dt) ** 2
    elif kind == "mid":
        coef = weight * 2000.0 / (1000.0 + dt) ** 2
    elif kind == "far":
        coef = -weight * 2.0 / (1.0 + dt) ** 2
    else:
        raise ValueError(f"unknown pair kind: {kind!r}")
    return coef * delta


@dataclass(frozen=True)
class PairSets:
    """Row-indexed companion sets fixed for the whole optimization."""

    neighbors: np.ndarray
    mid_near: np.ndarray
    far: np.ndarray


def sample_pairs(
    dist: np.ndarray,
    n_neighbors: int,
    n_mid: int,
    n_far: int,
    rng: np.random.Generator,
) -> PairSets:
    n = dist.shape[0]
    if not 1 <= n_neighbors < n:
        raise ValueError(f"n_neighbors must be in [1, n-1], got {n_neighbors} with n={n}")
    if n < 7:
        raise ValueError(f"mid-near sampling needs n >= 7, got {n}")
    vals = dist.copy()
    np.fill_diagonal(vals, np.inf)
    neighbors = np.argsort(vals, axis=1, kind="stable")[:, :n_neighbors]

    mid = np.empty((n, n_mid), dtype=int)
    others = np.arange(n)
    for i in range(n):
        pool = np.delete(others, i)
        for j in range(n_mid):
            cand = rng.choice(pool, size=6, replace=False)
            order = np.lexsort((cand, dist[i, cand]))
            mid[i, j] = cand[order[1]]

    far_rows = []
    for i in range(n):
        forbidden = np.zeros(n, dtype=bool)
        forbidden[i] = True
        forbidden[neighbors[i]] = True
        pool = others[~forbidden]
        take = min(n_far, pool.size)
        if take < 1:
            raise ValueError("no far-pair candidates; dataset too small for n_neighbors")
        far_rows.append(rng.choice(pool, size=take, replace=False))
    width = min(len(r) for r in far_rows)
    far = np.stack([r[:width] for r in far_rows])
    return PairSets(neighbors=neighbors, mid_near=mid, far=far)


def _anchor_grad_and_loss(Y, idx, const, scale, weight):
    """Summed anchor gradients and loss for one pair family.

    const is the denominator offset (10, 1000, or 1 for far pairs);
    scale is +1 for attractive families, -1 for the repulsive far family.
    """
    delta = Y[:, None, :] - Y[idx]
    dt = 1.0 + (delta**2).sum(axis=2)
    if scale > 0:
        loss = weight * (dt / (const + dt)).sum()
        coef = weight * 2.0 * const / (const + dt) ** 2
    else:
        loss = weight * (1.0 / (const + dt)).sum()
        coef = -weight * 2.0 / (const + dt) ** 2
    grad = (coef[:, :, None] * delta).sum(axis=1)
    return grad, loss


def pacmap(
    d: MixedDataset,
    m: int = 2,
    n_neighbors: int = 10,
    n_mid: int = 5,
    n_far: int = 20,
    iters: int = 450,
    lr: float = 1.0,
    seed: int = 0,
    gamma: float | None = None,
) -> Embedding:
    if iters < 1:
        raise ValueError("iters must be >= 1")
    D = pairwise(d, metric="huang", gamma=gamma)
    if D.values.max() == 0:
        raise ValueError("all rows identical; pair sampling is degenerate")
    rng = np.random.default_rng(seed)
    pairs = sample_pairs(D.values, n_neighbors, n_mid, n_far, rng)

    Y = famd(d, m).coords * 0.01
    mom = np.zeros_like(Y)
    vel = np.zeros_like(Y)
    trace = []
    for t in range(1, iters + 1):
        w_nb, w_mn, w_fp = pacmap_weights(t)
        g_nb, l_nb = _anchor_grad_and_loss(Y, pairs.neighbors, 10.0, +1, w_nb)
        g_fp, l_fp = _anchor_grad_and_loss(Y, pairs.far, 1.0, -1, w_fp)
        if w_mn > 0:
            g_mn, l_mn = _anchor_grad_and_loss(Y, pairs.mid_near, 1000.0, +1, w_mn)
        else:
            g_mn, l_mn = 0.0, 0.0
        grad = g_nb + g_mn + g_fp
        trace.append(l_nb + l_mn + l_fp)

        mom = _ADAM_BETA1 * mom + (1.0 - _ADAM_BETA1) * grad
        vel = _ADAM_BETA2 * vel + (1.0 - _ADAM_BETA2) * grad**2
        mhat = mom / (1.0 - _ADAM_BETA1**t)
        vhat = vel / (1.0 - _ADAM_BETA2**t)
        Y = Y - lr * mhat / (np.sqrt(vhat) + _ADAM_EPS)

    return Embedding(
        coords=Y,
        method="pacmap",
        params={
            "m": m,
            "n_neighbors": n_neighbors,
            "n_mid": n_mid,
            "n_far": n_far,
            "iters": iters,
            "lr": lr,
            "seed": seed,
            "loss_trace": tuple(float(v) for v in trace),
        },
    )
