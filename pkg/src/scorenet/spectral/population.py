"""Exact population embeddings and simplex geometry for dynamic DCMM.

These are the noiseless counterparts used as test oracles: eigenpairs come
from the dense reference-window ``Omega``, and vertices and calibration are
read off ``M_t = P Pi_t' Theta_t Xi Lambda^{-1}``.
"""

from __future__ import annotations

import numpy as np

from ..models import DCMMParams, DynamicDCMMParams, omega
from .eigen import EigenPairs, top_eigs_matrix
from .embedding import Embedding, project_window
from .simplex import SimplexModel


class PopulationError(ValueError):
    pass


def population_pairs(params: DCMMParams, K: int | None = None) -> EigenPairs:
    K = params.K if K is None else K
    return top_eigs_matrix(omega(params), K)


def structure_matrix(params: DCMMParams, pairs: EigenPairs) -> np.ndarray:
    """``M = P Pi' Theta Xi Lambda^{-1}`` (K x K)."""
    X = params.theta[:, None] * params.Pi
    return params.P @ X.T @ pairs.vectors / pairs.values


def population_dynamic_embed(params: DynamicDCMMParams, reference: int = 1):
    """Exact embeddings and simplex models for every window.

    Returns
    -------
    embeddings : list of Embedding
        ``r_i^(t)`` from ``Omega_t`` projected on the reference eigenpairs.
    models : list of SimplexModel
        Vertices ``v_k = M_t(k, 2:) / M_t(k, 1)``, weights
        ``(pi_i * h_t) / |pi_i * h_t|_1`` and calibration ``h_t = M_t(:, 1)``.

    Raises
    ------
    PopulationError
        If a reference eigenvalue vanishes, ``M_t`` is rank deficient, or
        its first column is not positive.
    """
    ref = params.windows[reference - 1]
    pairs = population_pairs(ref)
    if np.any(np.abs(pairs.values) < 1e-12 * np.abs(pairs.values).max()):
        raise PopulationError("reference Omega has a zero leading eigenvalue")
    embeddings, models = [], []
    for t, w in enumerate(params.windows, 1):
        M = structure_matrix(w, pairs)
        if np.linalg.matrix_rank(M) < params.K:
            raise PopulationError(f"window {t}: rank(M_t) < K")
        h = M[:, 0]
        if np.any(h <= 0):
            raise PopulationError(f"window {t}: first column of M_t is not positive")
        V = M[:, 1:] / h[:, None]
        W = w.Pi * h
        W = W / W.sum(axis=1, keepdims=True)
        e = project_window(pairs, omega(w))
        embeddings.append(Embedding(e.coords, e.valid, e.K, t))
        models.append(SimplexModel(V, W, w.Pi.copy(), h))
    return embeddings, models
