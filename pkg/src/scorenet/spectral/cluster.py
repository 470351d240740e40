"""Community detection by SCORE on A + c0 I with entrywise truncation."""

from __future__ import annotations

import math

import numpy as np

from ..graph import Graph
from .eigen import top_eigs
from .embedding import score_embed, truncate_embedding
from .kmeans import kmeans


def canonical_labels(labels: np.ndarray) -> np.ndarray:
    """Relabel so clusters are numbered by first appearance."""
    _, first, inv = np.unique(labels, return_index=True, return_inverse=True)
    rank = np.argsort(np.argsort(first))
    return rank[inv]


def modified_score_cluster(g: Graph, K0: int, c0: float = 1.0, t: float | None = None,
                           seed=0, n_init: int = 20) -> np.ndarray:
    """Cluster nodes into at most ``K0`` groups.

    Leading ``K0`` eigenvectors of ``A + c0 I`` -> SCORE ratios ->
    truncation at ``t`` (default ``log n``) -> k-means with ``K0``
    clusters. Labels are ``0..K0-1`` numbered by first appearance. Rows
    with a vanishing leading entry are placed at the origin.
    """
    if K0 < 2:
        raise ValueError("K0 must be at least 2")
    if t is None:
        t = math.log(g.n)
    emb = truncate_embedding(score_embed(top_eigs(g, K0, c0)), t)
    X = np.where(emb.valid[:, None], emb.coords, 0.0)
    res = kmeans(X, K0, seed=seed, n_init=n_init)
    return canonical_labels(res.labels)
