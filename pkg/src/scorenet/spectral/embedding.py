"""SCORE, truncated SCORE and dynamic (reference-window) embeddings."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..graph import Graph
from .eigen import EigenPairs

DENOM_FLOOR = 1e-12


class EmbeddingError(ValueError):
    pass


@dataclass(frozen=True)
class Embedding:
    """Per-node ``(K-1)``-dimensional coordinates with a validity mask.

    Invalid rows hold NaN.
    """

    coords: np.ndarray
    valid: np.ndarray
    K: int
    window: int | None = None

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    def valid_coords(self) -> np.ndarray:
        return self.coords[self.valid]


def _ratios(numer: np.ndarray, denom: np.ndarray, floor: float):
    valid = np.abs(denom) >= floor
    out = np.full(numer.shape, np.nan)
    out[valid] = numer[valid] / denom[valid, None]
    return out, valid


def score_embed(pairs: EigenPairs) -> Embedding:
    """``r_i(k) = xi_{k+1}(i) / xi_1(i)``; tiny denominators are masked."""
    if pairs.K < 2:
        raise EmbeddingError("embedding dimension zero")
    xi = pairs.vectors
    floor = DENOM_FLOOR * np.abs(xi[:, 0]).max()
    coords, valid = _ratios(xi[:, 1:], xi[:, 0], floor)
    return Embedding(coords, valid, pairs.K)


def truncate_embedding(e: Embedding, t: float) -> Embedding:
    """Entrywise ``sign(x) * min(|x|, t)``."""
    if t <= 0:
        raise ValueError("truncation threshold must be positive")
    return Embedding(np.clip(e.coords, -t, t), e.valid.copy(), e.K, e.window)


def project_window(pairs: EigenPairs, M) -> Embedding:
    """Embed the rows of ``M`` on reference eigenpairs.

    ``r_i(k) = lam_1 (M xi_{k+1})_i / (lam_{k+1} (M xi_1)_i)``, with the
    eigenvalues of the unshifted reference matrix. Rows whose projection on
    ``xi_1`` is zero (isolated nodes included) are masked.
    """
    if pairs.K < 2:
        raise EmbeddingError("embedding dimension zero")
    lam = pairs.adjacency_values()
    Y = np.asarray(M @ pairs.vectors)
    scaled = Y[:, 1:] * (lam[0] / lam[1:])
    denom = Y[:, 0]
    floor = DENOM_FLOOR * max(np.abs(denom).max(initial=0.0), np.finfo(float).tiny)
    return Embedding(*_ratios(scaled, denom, floor), pairs.K)


def dynamic_embed(reference_pairs: EigenPairs, window_graphs: list[Graph]) -> list[Embedding]:
    """Project every window's adjacency on the reference eigenpairs."""
    n = reference_pairs.vectors.shape[0]
    out = []
    for t, g in enumerate(window_graphs, 1):
        if g.n != n:
            raise EmbeddingError(f"window {t} has {g.n} nodes, reference has {n}")
        e = project_window(reference_pairs, g.adjacency)
        isolated = np.asarray(g.adjacency.sum(axis=1)).ravel() == 0
        valid = e.valid & ~isolated
        coords = np.where(valid[:, None], e.coords, np.nan)
        out.append(Embedding(coords, valid, e.K, t))
    return out
