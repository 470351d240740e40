"""Vertex hunting and mixed-membership inversion on an embedded simplex."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eigen import EigenPairs
from .embedding import Embedding
from .kmeans import kmeans

CALIBRATION_EPS = 1e-12


class SimplexError(ValueError):
    pass


@dataclass(frozen=True)
class SimplexModel:
    """Simplex vertices, barycentric weights and (optionally) memberships.

    ``weights`` and ``memberships`` have NaN rows where the embedding is
    invalid. ``calibration`` is the positive vector ``h`` with
    ``w_i ∝ pi_i * h``.
    """

    vertices: np.ndarray
    weights: np.ndarray
    memberships: np.ndarray | None = None
    calibration: np.ndarray | None = None

    @property
    def K(self) -> int:
        return self.vertices.shape[0]


def order_vertices(V: np.ndarray) -> np.ndarray:
    """Sort rows by first coordinate, then the rest lexicographically."""
    keys = [V[:, j] for j in range(V.shape[1] - 1, -1, -1)]
    return V[np.lexsort(keys)]


def successive_projection(points: np.ndarray, K: int) -> np.ndarray:
    """Pick ``K`` rows spanning the largest affine hull, greedily.

    Rows are lifted to ``(1, x)``; each step takes the row with the largest
    residual after projecting out the rows already chosen.
    """
    Y = np.hstack([np.ones((points.shape[0], 1)), points])
    R = Y.copy()
    chosen = []
    for _ in range(K):
        norms = np.einsum("ij,ij->i", R, R)
        norms[chosen] = -1.0
        j = int(np.argmax(norms))
        chosen.append(j)
        u = R[j] / np.linalg.norm(R[j])
        R = R - np.outer(R @ u, u)
    return points[chosen]


def vertex_hunt(e: Embedding, K: int, seed=0, n_init: int = 20) -> np.ndarray:
    """Estimate the ``K`` simplex vertices of an embedded point cloud.

    The valid rows are first summarised by ``max(10, 3K)`` k-means centers
    (or by the distinct rows themselves when there are no more of them),
    then ``K`` centers are chosen by successive projection.
    """
    X = e.valid_coords()
    if X.shape[0] < K:
        raise SimplexError(f"{X.shape[0]} valid rows for K={K}")
    if X.shape[1] != K - 1:
        raise SimplexError(f"embedding has dimension {X.shape[1]}, expected {K - 1}")
    L = max(10, 3 * K)
    distinct = np.unique(X, axis=0)
    if distinct.shape[0] <= L:
        centers = distinct
    else:
        centers = kmeans(X, L, seed=seed, n_init=n_init).centers
    return order_vertices(successive_projection(centers, K))


def barycentric(coords: np.ndarray, vertices: np.ndarray) -> np.ndarray:
    """Exact barycentric coordinates of each row w.r.t. ``K`` affinely independent vertices."""
    K = vertices.shape[0]
    Msys = np.vstack([vertices.T, np.ones((1, K))])
    if np.linalg.matrix_rank(Msys) < K:
        raise SimplexError("degenerate vertex set")
    rhs = np.vstack([coords.T, np.ones((1, coords.shape[0]))])
    return np.linalg.solve(Msys, rhs).T


def _to_simplex(W: np.ndarray) -> np.ndarray:
    W = np.maximum(W, 0.0)
    s = W.sum(axis=1, keepdims=True)
    s[s == 0] = 1.0
    return W / s


def membership_calibration(vertices: np.ndarray, pairs: EigenPairs) -> np.ndarray:
    """``h(k) = (lam_1 + v_k' diag(lam_2..lam_K) v_k)^(-1/2)``.

    With unit-diagonal ``P`` this is the first column of the matrix
    ``P Pi' Theta Xi Lambda^{-1}`` at the reference window, so that
    ``w_i ∝ pi_i * h``.
    """
    lam = pairs.adjacency_values()
    q = lam[0] + np.einsum("kj,j,kj->k", vertices, lam[1:], vertices)
    return np.maximum(q, CALIBRATION_EPS) ** -0.5


def estimate_memberships(e: Embedding, vertices: np.ndarray, pairs: EigenPairs | None = None) -> SimplexModel:
    """Barycentric weights, then memberships ``pi_i ∝ w_i / h``.

    Negative weights are clipped to 0 and rows renormalised. Without
    ``pairs`` only the weights are returned.
    """
    vertices = np.asarray(vertices, dtype=float)
    W = np.full((e.n, vertices.shape[0]), np.nan)
    W[e.valid] = _to_simplex(barycentric(e.valid_coords(), vertices))
    if pairs is None:
        return SimplexModel(vertices, W)
    h = membership_calibration(vertices, pairs)
    Pi = np.full_like(W, np.nan)
    Pi[e.valid] = _to_simplex(W[e.valid] / h)
    return SimplexModel(vertices, W, Pi, h)
