"""Research map: k-means sub-areas over a K = 3 SCORE embedding."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..spectral import Embedding, kmeans
from ..csvio import parse_float, parse_id, read_csv, write_csv


@dataclass(frozen=True)
class ResearchMap:
    """Cluster centers over the valid rows; ``labels`` is -1 on invalid rows."""

    centers: np.ndarray
    labels: np.ndarray
    objective: float
    sizes: np.ndarray
    top_members: tuple
    vertices: np.ndarray

    def assign(self, points) -> np.ndarray:
        """Nearest-center rule."""
        d = ((np.asarray(points)[:, None, :] - self.centers[None]) ** 2).sum(axis=2)
        return d.argmin(axis=1)


def research_map(e: Embedding, vertices, L: int = 15, seed=0, degrees=None, node_ids=None,
                 top: int = 5, n_init: int = 20) -> ResearchMap:
    """Partition the embedded points into ``L`` sub-areas.

    ``top_members`` lists, per cluster, the ``top`` highest-degree node ids
    (all members by index order when ``degrees`` is None).
    """
    if L < 2:
        raise ValueError("L must be at least 2")
    rows = np.flatnonzero(e.valid)
    res = kmeans(e.coords[rows], L, seed=seed, n_init=n_init)
    labels = np.full(e.n, -1, dtype=np.int64)
    labels[rows] = res.labels
    ids = tuple(range(e.n)) if node_ids is None else tuple(node_ids)
    deg = np.zeros(e.n) if degrees is None else np.asarray(degrees, dtype=float)
    tops = []
    for k in range(L):
        m = rows[res.labels == k]
        m = m[np.lexsort((m, -deg[m]))][:top]
        tops.append(tuple(ids[i] for i in m))
    return ResearchMap(res.centers, labels, res.objective, np.bincount(res.labels, minlength=L),
                       tuple(tops), np.asarray(vertices, dtype=float))


MAP_HEADER = ("kind", "index", "x", "y", "size", "top_members")


def write_research_map(m: ResearchMap, path) -> None:
    rows = [("center", k + 1, *m.centers[k, :2], int(m.sizes[k]), ";".join(map(str, m.top_members[k])))
            for k in range(m.centers.shape[0])]
    rows += [("vertex", k + 1, *m.vertices[k, :2], "", "") for k in range(m.vertices.shape[0])]
    write_csv(path, MAP_HEADER, rows)


def read_research_map(path) -> dict:
    """Centers, sizes, top members and vertices as plain arrays."""
    _, rows = read_csv(path)
    c = [r for r in rows if r["kind"] == "center"]
    v = [r for r in rows if r["kind"] == "vertex"]
    return {
        "centers": np.array([[parse_float(r["x"]), parse_float(r["y"])] for r in c]),
        "sizes": np.array([int(r["size"]) for r in c]),
        "top_members": [tuple(parse_id(s) for s in r["top_members"].split(";") if s) for r in c],
        "vertices": np.array([[parse_float(r["x"]), parse_float(r["y"])] for r in v]),
    }
