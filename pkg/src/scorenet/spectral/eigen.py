"""Leading eigenpairs (by magnitude) of A + c0 I, and scree exports."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..graph import Graph, components

DENSE_MAX_N = 500
RESIDUAL_TOL = 1e-10


class EigenError(RuntimeError):
    pass


@dataclass(frozen=True)
class EigenPairs:
    """Eigenvalues ordered by decreasing magnitude and unit eigenvectors.

    ``vectors[:, k]`` pairs with ``values[k]``. ``ridge`` is the ``c0`` of
    the matrix ``M = A + c0 I`` the pairs belong to; ``values`` are
    eigenvalues of ``M`` itself.
    """

    values: np.ndarray
    vectors: np.ndarray
    ridge: float = 0.0
    residuals: np.ndarray | None = None

    @property
    def K(self) -> int:
        return self.values.size

    @property
    def source(self) -> str:
        return "A" if self.ridge == 0 else f"A + {self.ridge:g} I"

    def adjacency_values(self) -> np.ndarray:
        """Eigenvalues of the unshifted matrix."""
        return self.values - self.ridge


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(vecs), axis=0)
    s = np.sign(vecs[idx, np.arange(vecs.shape[1])])
    s[s == 0] = 1.0
    return vecs * s


def top_eigs_matrix(M, K: int, ridge: float = 0.0) -> EigenPairs:
    """Top-``K`` eigenpairs by magnitude of a symmetric matrix.

    Dense ``eigh`` is used up to ``DENSE_MAX_N`` rows; larger inputs go to
    ARPACK's implicitly restarted Lanczos with a fixed start vector.
    """
    n = M.shape[0]
    if not 1 <= K <= n:
        raise ValueError(f"K={K} must be in [1, {n}]")
    if n <= DENSE_MAX_N or K >= n - 1:
        dense = M.toarray() if sp.issparse(M) else np.asarray(M, dtype=float)
        w, V = np.linalg.eigh((dense + dense.T) / 2)
    else:
        v0 = np.random.Generator(np.random.Philox(n)).uniform(0.5, 1.5, n)
        try:
            w, V = spla.eigsh(M, k=K, which="LM", v0=v0, maxiter=10 * n, tol=0)
        except spla.ArpackNoConvergence as exc:
            raise EigenError(f"eigensolver did not converge: {exc}") from None
    order = np.argsort(-np.abs(w), kind="stable")[:K]
    vals, vecs = w[order], _fix_signs(V[:, order])
    resid = np.linalg.norm(M @ vecs - vecs * vals, axis=0)
    scale = max(1.0, float(np.abs(vals).max()))
    if (resid > RESIDUAL_TOL * scale * max(1.0, np.sqrt(n))).any():
        raise EigenError(f"eigenpair residuals too large: {resid}")
    return EigenPairs(vals, vecs, float(ridge), resid)


def top_eigs(g: Graph, K: int, ridge_c0: float = 0.0) -> EigenPairs:
    """Top-``K`` eigenpairs by magnitude of ``A + c0 I``.

    Each eigenvector is flipped so its largest-magnitude entry is
    positive; for a connected graph this makes the leading one positive.
    """
    ncomp, _ = components(g)
    if ncomp > 1:
        warnings.warn(f"graph has {ncomp} components; leading eigenvector may not be Perron",
                      stacklevel=2)
    M = g.adjacency
    if ridge_c0:
        M = (M + ridge_c0 * sp.identity(g.n, format="csr")).tocsr()
    return top_eigs_matrix(M, K, ridge_c0)


@dataclass(frozen=True)
class ScreeRow:
    ridge: float
    rank: int
    eigenvalue: float
    magnitude: float
    sign: int


def scree_data(g: Graph, kmax: int, ridge_c0: float = 0.0) -> list[ScreeRow]:
    """Top-``kmax`` eigenvalues of ``A`` and, if ``ridge_c0 != 0``, of ``A + c0 I``."""
    if kmax > g.n:
        raise ValueError("kmax exceeds node count")
    rows = []
    for c0 in sorted({0.0, float(ridge_c0)}):
        pairs = top_eigs(g, kmax, c0)
        for r, v in enumerate(pairs.values, 1):
            rows.append(ScreeRow(c0, r, float(v), float(abs(v)), 1 if v >= 0 else -1))
    return rows
