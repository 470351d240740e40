"""Lloyd's k-means with k-means++ seeding and deterministic restarts."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from ..models import rng_from_seed


@dataclass(frozen=True)
class KMeansResult:
    centers: np.ndarray
    labels: np.ndarray
    objective: float
    history: tuple = ()


def _sq_dists(X, C):
    d = (X * X).sum(1)[:, None] - 2.0 * X @ C.T + (C * C).sum(1)[None, :]
    return np.maximum(d, 0.0)


def kmeans_plus_plus(X: np.ndarray, L: int, rng: np.random.Generator) -> np.ndarray:
    """Greedy k-means++ seeding.

    Each step samples ``2 + floor(ln L)`` candidates with probability
    proportional to the squared distance to the nearest chosen center and
    keeps the one giving the smallest potential.
    """
    n = X.shape[0]
    trials = 2 + int(np.log(L))
    centers = np.empty((L, X.shape[1]))
    centers[0] = X[rng.integers(n)]
    closest = _sq_dists(X, centers[:1]).ravel()
    for j in range(1, L):
        total = closest.sum()
        if total <= 0:
            centers[j] = X[rng.integers(n)]
            continue
        cand = rng.choice(n, size=trials, p=closest / total)
        d = np.minimum(closest[None, :], _sq_dists(X, X[cand]).T)
        best = int(np.argmin(d.sum(axis=1)))
        centers[j] = X[cand[best]]
        closest = d[best]
    return centers


def lloyd(X: np.ndarray, centers: np.ndarray, max_iter: int = 300) -> KMeansResult:
    """Lloyd iterations until the assignment stops changing.

    An emptied cluster keeps its previous center.
    """
    C = centers.copy()
    labels = None
    history = []
    for _ in range(max_iter):
        d = _sq_dists(X, C)
        new = np.argmin(d, axis=1)
        history.append(float(d[np.arange(X.shape[0]), new].sum()))
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        for j in range(C.shape[0]):
            m = labels == j
            if m.any():
                C[j] = X[m].mean(axis=0)
    obj = float(((X - C[labels]) ** 2).sum())
    return KMeansResult(C, labels, obj, tuple(history))


def kmeans(points, L: int, seed=0, n_init: int = 20, max_iter: int = 300) -> KMeansResult:
    """Best of ``n_init`` k-means++ / Lloyd runs by within-cluster sum of squares.

    Parameters
    ----------
    points : array_like, shape (n, d)
    L : int
        Number of clusters, ``1 <= L <= n``.
    seed : int or Generator
        All restarts draw from one Philox stream seeded here.
    """
    X = np.asarray(points, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n = X.shape[0]
    if not 1 <= L <= n:
        raise ValueError(f"L={L} must be in [1, {n}]")
    if L > 1 and np.ptp(X, axis=0).max(initial=0.0) == 0.0:
        warnings.warn("all points identical; returning duplicate centers", stacklevel=2)
        return KMeansResult(np.repeat(X[:1], L, axis=0), np.zeros(n, dtype=np.int64), 0.0)
    rng = rng_from_seed(seed)
    best = None
    for _ in range(n_init):
        res = lloyd(X, kmeans_plus_plus(X, L, rng), max_iter)
        if best is None or res.objective < best.objective - 1e-12 * max(1.0, abs(best.objective)):
            best = res
    return best
