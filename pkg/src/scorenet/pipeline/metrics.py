"""Partition agreement scores."""

from __future__ import annotations

from itertools import permutations

import numpy as np


def contingency(a, b) -> np.ndarray:
    _, ia = np.unique(np.asarray(a), return_inverse=True)
    _, ib = np.unique(np.asarray(b), return_inverse=True)
    table = np.zeros((ia.max() + 1, ib.max() + 1), dtype=np.int64)
    np.add.at(table, (ia, ib), 1)
    return table


def adjusted_rand_index(a, b) -> float:
    """Hubert-Arabie adjusted Rand index of two labelings."""
    t = contingency(a, b)
    n = t.sum()

    def pairs(x):
        x = np.asarray(x, dtype=float)
        return float((x * (x - 1) / 2).sum())
    s_ij, s_a, s_b = pairs(t), pairs(t.sum(1)), pairs(t.sum(0))
    total = n * (n - 1) / 2
    expected = s_a * s_b / total
    top = 0.5 * (s_a + s_b)
    if top == expected:
        return 1.0
    return (s_ij - expected) / (top - expected)


def matched_accuracy(truth, pred) -> float:
    """Fraction agreeing under the best one-to-one relabeling (small K only)."""
    t = contingency(truth, pred)
    k = max(t.shape)
    pad = np.zeros((k, k), dtype=np.int64)
    pad[:t.shape[0], :t.shape[1]] = t
    best = max(pad[np.arange(k), list(p)].sum() for p in permutations(range(k)))
    return best / t.sum()
