"""Immutable sparse symmetric graphs, components, degrees and centrality."""

from __future__ import annotations

import io
import os
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph


class GraphError(ValueError):
    """Raised for invalid graph construction or queries."""


class Graph:
    """Undirected graph backed by a CSR adjacency matrix.

    The adjacency is symmetric with a zero diagonal and nonnegative
    weights; binary graphs store weight 1. Instances are never mutated
    after construction, so they can be shared freely.

    Parameters
    ----------
    adjacency : sparse or dense square matrix
        Symmetric nonnegative weights. Explicit zeros are dropped.
    node_ids : sequence, optional
        External identifier per index. Defaults to ``0..n-1``.
    """

    __slots__ = ("_adj", "_node_ids", "_index")

    def __init__(self, adjacency, node_ids: Sequence | None = None, *, check: bool = True):
        adj = sp.csr_matrix(adjacency, dtype=np.float64, copy=True)
        if adj.shape[0] != adj.shape[1]:
            raise GraphError(f"adjacency must be square, got {adj.shape}")
        adj.eliminate_zeros()
        adj.sum_duplicates()
        adj.sort_indices()
        n = adj.shape[0]
        if node_ids is None:
            node_ids = list(range(n))
        node_ids = tuple(node_ids)
        if len(node_ids) != n:
            raise GraphError(f"{len(node_ids)} node ids for {n} nodes")
        if check:
            if adj.nnz and adj.data.min() < 0:
                raise GraphError("negative edge weight")
            if adj.diagonal().any():
                raise GraphError("self-loops are not allowed")
            if (abs(adj - adj.T) > 0).nnz:
                raise GraphError("adjacency is not symmetric")
            if len(set(node_ids)) != n:
                raise GraphError("node ids are not unique")
        adj.data.setflags(write=False)
        self._adj = adj
        self._node_ids = node_ids
        self._index = None

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple], node_ids: Sequence | None = None) -> "Graph":
        """Build from ``(i, j)`` or ``(i, j, w)`` index tuples; duplicates are summed."""
        rows, cols, vals = [], [], []
        for e in edges:
            i, j = int(e[0]), int(e[1])
            w = float(e[2]) if len(e) > 2 else 1.0
            if i == j:
                raise GraphError(f"self-loop at node {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise GraphError(f"edge ({i}, {j}) out of range for n={n}")
            rows += [i, j]
            cols += [j, i]
            vals += [w, w]
        adj = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
        return cls(adj, node_ids)

    @property
    def adjacency(self) -> sp.csr_matrix:
        return self._adj

    @property
    def n(self) -> int:
        return self._adj.shape[0]

    @property
    def node_ids(self) -> tuple:
        return self._node_ids

    @property
    def edge_count(self) -> int:
        return self._adj.nnz // 2

    @property
    def is_binary(self) -> bool:
        return bool(np.all(self._adj.data == 1.0))

    def index_of(self, node_id) -> int:
        if self._index is None:
            self._index = {v: i for i, v in enumerate(self._node_ids)}
        try:
            return self._index[node_id]
        except KeyError:
            raise GraphError(f"unknown node id {node_id!r}") from None

    def neighbors(self, i: int) -> np.ndarray:
        a = self._adj
        return a.indices[a.indptr[i]:a.indptr[i + 1]]

    def degrees(self) -> np.ndarray:
        return degrees(self)

    def to_dense(self) -> np.ndarray:
        return self._adj.toarray()

    def binarized(self, min_weight: float = 0.0) -> "Graph":
        """Binary graph keeping edges with weight >= ``min_weight``."""
        a = self._adj.copy()
        a.data = (a.data >= min_weight).astype(np.float64)
        return Graph(a, self._node_ids, check=False)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self._node_ids == other._node_ids
            and self._adj.shape == other._adj.shape
            and (self._adj != other._adj).nnz == 0
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.edge_count})"


def degrees(g: Graph) -> np.ndarray:
    """Weighted degree of every node (row sums of the adjacency)."""
    return np.asarray(g.adjacency.sum(axis=1)).ravel()


def components(g: Graph) -> tuple[int, np.ndarray]:
    """Connected components; labels are ordered by smallest member index."""
    return csgraph.connected_components(g.adjacency, directed=False)


def induced_subgraph(g: Graph, nodes, *, allow_empty: bool = False) -> Graph:
    """Subgraph on ``nodes`` (in the given order), keeping weights and ids."""
    idx = np.asarray(list(nodes) if not isinstance(nodes, np.ndarray) else nodes, dtype=np.int64)
    if idx.size == 0 and not allow_empty:
        raise GraphError("empty node set")
    if idx.size and (idx.min() < 0 or idx.max() >= g.n):
        raise GraphError("node index out of range")
    if np.unique(idx).size != idx.size:
        raise GraphError("duplicate node index")
    sub = g.adjacency[idx][:, idx]
    return Graph(sub, [g.node_ids[i] for i in idx], check=False)


def giant_component(g: Graph) -> tuple[Graph, np.ndarray]:
    """Largest connected component and the new-to-old index map.

    Ties go to the component containing the smallest node index.
    """
    if g.n == 0:
        raise GraphError("empty graph")
    _, labels = components(g)
    sizes = np.bincount(labels)
    keep = np.flatnonzero(labels == int(np.argmax(sizes)))
    if keep.size == g.n:
        return g, keep
    return induced_subgraph(g, keep), keep


def hop_distances(g: Graph) -> np.ndarray:
    """All-pairs hop counts (``inf`` between components)."""
    return csgraph.shortest_path(g.adjacency, method="D", directed=False, unweighted=True)


class CentralityScores:
    """Pair-count betweenness and closeness per node."""

    __slots__ = ("betweenness", "closeness")

    def __init__(self, betweenness: np.ndarray, closeness: np.ndarray):
        self.betweenness = betweenness
        self.closeness = closeness

    def __repr__(self) -> str:
        return f"CentralityScores(n={len(self.betweenness)})"


def centrality(g: Graph) -> CentralityScores:
    """Betweenness and closeness on hop distances.

    Betweenness of ``i`` counts unordered pairs ``{u, w}`` (both distinct
    from ``i``) for which at least one shortest ``u``-``w`` path visits
    ``i``. A pair counts once no matter how many such paths exist, unlike
    the fractional Brandes score. Closeness is ``1 / sum of distances`` to
    the nodes of the same component, and 0 for isolated nodes.
    """
    n = g.n
    if n == 0:
        return CentralityScores(np.zeros(0), np.zeros(0))
    dist = hop_distances(g)
    finite = np.isfinite(dist)
    d = np.where(finite, dist, -1.0)

    # i lies on a shortest u-w path iff d(u,i) + d(i,w) == d(u,w)
    between = np.zeros(n)
    for i in range(n):
        col = d[:, i]
        reach = col > 0
        if reach.sum() < 2:
            continue
        sub = d[np.ix_(reach, reach)]
        c = col[reach]
        hits = (c[:, None] + c[None, :]) == sub
        between[i] = (hits.sum() - np.trace(hits)) / 2

    close = np.zeros(n)
    tot = np.where(finite, dist, 0.0).sum(axis=1)
    nz = tot > 0
    close[nz] = 1.0 / tot[nz]
    return CentralityScores(between, close)


# -- edge-list text format --------------------------------------------------

EDGE_HEADER = "src_id\tdst_id\tweight"


def _parse_id(tok: str):
    try:
        return int(tok)
    except ValueError:
        return tok


def write_edge_list(g: Graph, path) -> None:
    """Write ``src_id<TAB>dst_id<TAB>weight`` lines, one per undirected edge.

    A ``# nodes:`` comment carries the node order so isolated nodes and
    indexing survive a round trip.
    """
    coo = sp.triu(g.adjacency, k=1).tocoo()
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("# nodes: " + "\t".join(str(v) for v in g.node_ids) + "\n")
        fh.write(EDGE_HEADER + "\n")
        for k in order:
            w = coo.data[k]
            ws = str(int(w)) if float(w).is_integer() else repr(float(w))
            fh.write(f"{g.node_ids[coo.row[k]]}\t{g.node_ids[coo.col[k]]}\t{ws}\n")


def read_edge_list(path) -> Graph:
    """Inverse of :func:`write_edge_list` (edge order is not preserved).

    Files without a ``# nodes:`` line get nodes in order of first
    appearance. A missing weight column means weight 1.
    """
    if isinstance(path, (str, os.PathLike)):
        fh = open(path, encoding="utf-8")
    else:
        fh = io.StringIO(path.read()) if hasattr(path, "read") else path
    ids: list = []
    index: dict = {}
    rows, cols, vals = [], [], []

    def idx(tok):
        key = _parse_id(tok)
        if key not in index:
            index[key] = len(ids)
            ids.append(key)
        return index[key]

    with fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\r\n")
            if not line.strip():
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("nodes:"):
                    for tok in body[len("nodes:"):].strip("\t ").split("\t"):
                        if tok:
                            idx(tok)
                continue
            parts = line.split("\t")
            if parts[:2] == ["src_id", "dst_id"]:
                continue
            if len(parts) < 2 or len(parts) > 3:
                raise GraphError(f"line {lineno}: expected 2 or 3 tab-separated fields")
            try:
                w = float(parts[2]) if len(parts) == 3 else 1.0
            except ValueError:
                raise GraphError(f"line {lineno}: bad weight {parts[2]!r}") from None
            i, j = idx(parts[0]), idx(parts[1])
            if i == j:
                raise GraphError(f"line {lineno}: self-loop")
            rows += [i, j]
            cols += [j, i]
            vals += [w, w]
    n = len(ids)
    adj = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    return Graph(adj, ids)
