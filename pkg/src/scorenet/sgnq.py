"""Signed-quadrilateral (SgnQ) global test for one community vs. several.

With ``eta = A 1 / sqrt(1'A1)`` and ``A* = A - eta eta'`` the statistic is

    psi = (C / (2 (|eta|^2 - 1)^2) - 1) / sqrt(2)

where ``C`` sums ``A*_{ab} A*_{bc} A*_{cd} A*_{da}`` over ordered 4-tuples
of distinct indices. The p-value is the upper normal tail of ``psi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations

import numpy as np
import scipy.sparse as sp
from scipy.stats import norm

from .graph import Graph

MIN_NODES = 5
MIN_EGO_NODES = 10
BRUTEFORCE_MAX_N = 14
_DENSE_FRACTION = 0.05


class SgnQError(ValueError):
    pass


@dataclass(frozen=True)
class SgnQResult:
    psi: float
    p_value: float
    n: int
    edge_count: int
    eta_norm_sq: float


def _validate(g: Graph) -> np.ndarray:
    if not g.is_binary and g.edge_count:
        raise SgnQError("SgnQ needs a binary graph; weighted input is rejected")
    if g.n < MIN_NODES or g.edge_count < 1:
        raise SgnQError("network too small for SgnQ")
    deg = np.asarray(g.adjacency.sum(axis=1)).ravel()
    eta = deg / math.sqrt(deg.sum())
    return eta


def _finish(cycle_sum: float, eta: np.ndarray, g: Graph) -> SgnQResult:
    e2 = float(eta @ eta)
    # |eta|^2 = sum d^2 / sum d >= 1, with equality when all degrees are 0 or 1
    if e2 <= 1.0 + 1e-12:
        raise SgnQError("degenerate eta: |eta|^2 <= 1")
    psi = (cycle_sum / (2.0 * (e2 - 1.0) ** 2) - 1.0) / math.sqrt(2.0)
    return SgnQResult(float(psi), float(norm.sf(psi)), g.n, g.edge_count, e2)


def distinct_cycle_sum(g: Graph) -> float:
    """Distinct-index 4-cycle sum of ``A - eta eta'`` without forming it densely.

    Let ``B`` be ``A*`` with its diagonal removed and ``G = A + diag(eta^2)``
    so that ``B = G - eta eta'``. Closed 4-walks of ``B`` whose indices
    repeat are those with ``i1 = i3`` or ``i2 = i4``, which gives

        C = tr(B^4) - 2 sum_i (B^2)_ii^2 + sum_ij B_ij^4

    and ``tr(B^4) = |B^2|_F^2`` expands into ``|G^2|_F^2`` plus scalar
    rank-one corrections built from ``u = G eta``.
    """
    eta = _validate(g)
    A = g.adjacency
    n = g.n
    e2 = float(eta @ eta)
    G = A + sp.diags(eta**2)

    if A.nnz > _DENSE_FRACTION * n * n:
        Gd = G.toarray()
        G2_fro = float(np.square(Gd @ Gd).sum())
    else:
        G2 = (G @ G).tocsr()
        G2_fro = float(np.square(G2.data).sum())

    u = G @ eta
    a = float(u @ u)
    b = float(u @ eta)
    uGu = float(u @ (G @ u))
    # |G^2 - (u eta' + eta u' - e2 eta eta')|_F^2
    cross = 2.0 * uGu - e2 * a
    rank1 = 2.0 * a * e2 + 2.0 * b * b - 4.0 * b * e2 * e2 + e2**4
    trace4 = G2_fro - 2.0 * cross + rank1

    # off-diagonal entries: eta_i eta_j everywhere, (1 - eta_i eta_j) on edges
    coo = A.tocoo()
    x = eta[coo.row] * eta[coo.col]
    e4 = eta**4
    fourth = float(e4.sum() ** 2 - (e4**2).sum()) + float(np.sum((1 - x) ** 4 - x**4))

    # (B^2)_ii = sum_{j != i} B_ij^2
    edge_corr = np.bincount(coo.row, weights=1.0 - 2.0 * x, minlength=n)
    diag2 = eta**2 * (e2 - eta**2) + edge_corr
    return trace4 - 2.0 * float(diag2 @ diag2) + fourth


def sgnq_statistic(g: Graph) -> SgnQResult:
    """SgnQ statistic and one-sided p-value for a binary graph."""
    eta = _validate(g)
    return _finish(distinct_cycle_sum(g), eta, g)


def sgnq_bruteforce(g: Graph) -> float:
    """Literal quadruple loop over distinct ordered indices; returns psi.

    Only meant as a test oracle for ``n <= 14``.
    """
    if g.n > BRUTEFORCE_MAX_N:
        raise SgnQError(f"bruteforce limited to n <= {BRUTEFORCE_MAX_N}")
    eta = _validate(g)
    As = g.to_dense() - np.outer(eta, eta)
    total = 0.0
    for a, b, c, d in permutations(range(g.n), 4):
        total += As[a, b] * As[b, c] * As[c, d] * As[d, a]
    return _finish(total, eta, g).psi
