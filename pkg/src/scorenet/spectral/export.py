"""CSV exports for embeddings, memberships and scree data."""

from __future__ import annotations

import numpy as np

from ..csvio import parse_float, parse_id, read_csv, write_csv
from .eigen import ScreeRow
from .embedding import Embedding
from .simplex import SimplexModel


def write_embedding(e: Embedding, path, node_ids=None, model: SimplexModel | None = None) -> None:
    """Columns ``node_id, coord_1.., valid, w_1.., pi_1..`` (weights and memberships when given)."""
    d = e.coords.shape[1]
    ids = range(e.n) if node_ids is None else node_ids
    header = ["node_id"] + [f"coord_{k}" for k in range(1, d + 1)] + ["valid"]
    K = 0
    if model is not None:
        K = model.weights.shape[1]
        header += [f"w_{k}" for k in range(1, K + 1)]
        if model.memberships is not None:
            header += [f"pi_{k}" for k in range(1, K + 1)]

    def row(i, v):
        r = [v, *e.coords[i], bool(e.valid[i])]
        if model is not None:
            r += list(model.weights[i])
            if model.memberships is not None:
                r += list(model.memberships[i])
        return r
    write_csv(path, header, (row(i, v) for i, v in enumerate(ids)))


def read_embedding(path) -> tuple[list, Embedding, np.ndarray | None, np.ndarray | None]:
    """Inverse of :func:`write_embedding`: ``(node_ids, embedding, weights, memberships)``."""
    header, rows = read_csv(path)

    def block(prefix):
        cols = [h for h in header if h.startswith(prefix)]
        if not cols:
            return None
        return np.array([[parse_float(r[c]) for c in cols] for r in rows]).reshape(len(rows), len(cols))
    coords = block("coord_")
    valid = np.array([r["valid"] == "1" for r in rows], dtype=bool)
    emb = Embedding(coords, valid, coords.shape[1] + 1)
    return [parse_id(r["node_id"]) for r in rows], emb, block("w_"), block("pi_")


SCREE_HEADER = ("ridge", "rank", "eigenvalue", "magnitude", "sign")


def write_scree(rows, path) -> None:
    write_csv(path, SCREE_HEADER, ((r.ridge, r.rank, r.eigenvalue, r.magnitude, r.sign) for r in rows))


def read_scree(path) -> list[ScreeRow]:
    _, rows = read_csv(path)
    return [ScreeRow(float(r["ridge"]), int(r["rank"]), float(r["eigenvalue"]), float(r["magnitude"]),
                     int(r["sign"])) for r in rows]
