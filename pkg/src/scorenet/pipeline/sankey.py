"""Community flows between consecutive windows of a dynamic network."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..graph import Graph, giant_component
from ..spectral import modified_score_cluster
from ..csvio import read_csv, write_csv

OUTSIDE = "O"


@dataclass
class SankeyFlows:
    """Flows of the node set ``V`` between labeled communities.

    ``assignments[t][v]`` is ``"C<k>"`` or ``"O"`` (outside the window's
    giant component); ``flows[t]`` maps ``(source, target)`` label pairs to
    counts between windows ``t+1`` and ``t+2``. ``names`` holds editable
    display names per window and label.
    """

    V: tuple
    assignments: list
    flows: list
    names: list = field(default_factory=list)

    @property
    def T(self) -> int:
        return len(self.assignments)

    def sizes(self, t: int) -> dict:
        """Community sizes within ``V`` for window ``t`` (0-based)."""
        out: dict = {}
        for v in self.V:
            lab = self.assignments[t][v]
            out[lab] = out.get(lab, 0) + 1
        return dict(sorted(out.items()))

    def matrix(self, t: int) -> tuple[list, list, np.ndarray]:
        src = sorted(self.sizes(t))
        dst = sorted(self.sizes(t + 1))
        F = np.zeros((len(src), len(dst)), dtype=np.int64)
        for (a, b), c in self.flows[t].items():
            F[src.index(a), dst.index(b)] = c
        return src, dst, F

    def rename(self, t: int, label: str, name: str) -> None:
        self.names[t][label] = name


def _match(prev: dict, cur_groups: list[set], next_index: int) -> tuple[list[int], int]:
    """Greedy maximum-overlap matching of current groups onto previous labels."""
    pairs = sorted(((-len(g & members), lab, j) for lab, members in prev.items()
                    for j, g in enumerate(cur_groups)), key=lambda x: (x[0], x[1], x[2]))
    assigned: list = [None] * len(cur_groups)
    used = set()
    for neg, lab, j in pairs:
        if neg == 0:
            break
        if assigned[j] is None and lab not in used:
            assigned[j] = lab
            used.add(lab)
    for j in range(len(cur_groups)):
        if assigned[j] is None:
            assigned[j] = next_index
            next_index += 1
    return assigned, next_index


def sankey(window_graphs: Sequence[Graph], Ks: Sequence[int], seed=0, c0: float = 1.0) -> SankeyFlows:
    """Cluster each window's giant component and count moves between windows.

    ``V`` is the union over adjacent windows of nodes in both giant
    components. Community indices are carried forward by greedy maximum
    overlap within ``V``; unmatched communities get fresh indices.
    """
    T = len(window_graphs)
    if T < 2:
        raise ValueError("sankey needs at least 2 windows")
    if len(Ks) != T:
        raise ValueError("one K per window is required")
    ids = window_graphs[0].node_ids
    if any(g.node_ids != ids for g in window_graphs):
        raise ValueError("window graphs must share node ids")
    giants, groups = [], []
    for g, K in zip(window_graphs, Ks):
        giant, keep = giant_component(g)
        giants.append(set(keep.tolist()))
        if K <= 1:
            groups.append([set(keep.tolist())])
        else:
            lab = modified_score_cluster(giant, K, c0=c0, seed=seed)
            groups.append([set(keep[lab == k].tolist()) for k in range(K)])
    V = sorted(set().union(*(giants[t] & giants[t + 1] for t in range(T - 1))))
    Vset = set(V)

    labels_per_window = []
    prev: dict = {}
    next_index = 1
    for t in range(T):
        restricted = [g & Vset for g in groups[t]]
        if t == 0:
            idx = list(range(1, len(restricted) + 1))
            next_index = len(restricted) + 1
        else:
            idx, next_index = _match(prev, restricted, next_index)
        prev = {k: s for k, s in zip(idx, restricted)}
        lab = {v: OUTSIDE for v in V}
        for k, s in zip(idx, restricted):
            for v in s:
                lab[v] = f"C{k}"
        labels_per_window.append(lab)

    assignments = [{ids[v]: lab[v] for v in V} for lab in labels_per_window]
    flows = []
    for t in range(T - 1):
        f: dict = {}
        for v in V:
            key = (labels_per_window[t][v], labels_per_window[t + 1][v])
            f[key] = f.get(key, 0) + 1
        flows.append(dict(sorted(f.items())))
    Vids = tuple(ids[v] for v in V)
    names = [{lab: lab if lab != OUTSIDE else f"O{t + 1}" for lab in set(a.values())} for t, a in enumerate(assignments)]
    return SankeyFlows(Vids, assignments, flows, names)


SANKEY_HEADER = ("window_from", "window_to", "source", "target", "count")


def write_sankey(s: SankeyFlows, path) -> None:
    write_csv(path, SANKEY_HEADER, ((t + 1, t + 2, a, b, c)
                                    for t, f in enumerate(s.flows) for (a, b), c in f.items()))


def write_sankey_nodes(s: SankeyFlows, path) -> None:
    header = ("node_id",) + tuple(f"window_{t + 1}" for t in range(s.T))
    write_csv(path, header, ((v, *(s.assignments[t][v] for t in range(s.T))) for v in s.V))


def read_sankey(path) -> list[dict]:
    """Per window pair, ``{(source, target): count}``."""
    _, rows = read_csv(path)
    T = max((int(r["window_to"]) for r in rows), default=1)
    out: list = [dict() for _ in range(T - 1)]
    for r in rows:
        out[int(r["window_from"]) - 1][(r["source"], r["target"])] = int(r["count"])
    return out
