"""Recursive community tree: modified SCORE splits with SgnQ stopping."""

from __future__ import annotations

import json
import warnings
import zlib
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from ..graph import Graph, centrality, components, giant_component, induced_subgraph
from ..sgnq import SgnQError, sgnq_statistic
from ..spectral import modified_score_cluster

CANDIDATE_LEAF_MIN = 50


@dataclass
class TreeNode:
    """One community; ``members`` index the root graph."""

    label: str
    members: np.ndarray
    depth: int
    giant_size: int = 0
    p_value: float | None = None
    psi: float | None = None
    K0: int | None = None
    children: list = field(default_factory=list)
    tags: list = field(default_factory=list)
    name: str = ""
    annotations: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return int(self.members.size)

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()


@dataclass
class CommunityTree:
    root: TreeNode
    node_ids: tuple
    params: dict = field(default_factory=dict)

    def leaves(self) -> list[TreeNode]:
        return [t for t in self.root.walk() if t.is_leaf]

    def nodes(self) -> list[TreeNode]:
        return list(self.root.walk())

    def leaf_labels(self) -> np.ndarray:
        """Per root node, the index of its leaf in :meth:`leaves` order."""
        out = np.full(len(self.node_ids), -1, dtype=np.int64)
        for k, leaf in enumerate(self.leaves()):
            out[leaf.members] = k
        return out

    def find(self, label: str) -> TreeNode:
        for t in self.root.walk():
            if t.label == label:
                return t
        raise KeyError(label)

    # -- export -------------------------------------------------------------

    def to_dict(self) -> dict:
        def enc(t: TreeNode) -> dict:
            return {
                "label": t.label, "name": t.name, "depth": t.depth, "size": t.size,
                "giant_size": t.giant_size, "p_value": t.p_value, "psi": t.psi, "K0": t.K0,
                "tags": list(t.tags), "annotations": t.annotations,
                "members": [self.node_ids[i] for i in t.members] if t.is_leaf else None,
                "children": [enc(c) for c in t.children],
            }
        return {"params": self.params, "node_ids": list(self.node_ids), "root": enc(self.root)}

    @classmethod
    def from_dict(cls, d: dict) -> "CommunityTree":
        ids = tuple(d["node_ids"])
        index = {v: i for i, v in enumerate(ids)}

        def dec(x: dict) -> TreeNode:
            kids = [dec(c) for c in x["children"]]
            if kids:
                members = np.sort(np.concatenate([k.members for k in kids]))
            else:
                members = np.array(sorted(index[v] for v in x["members"]), dtype=np.int64)
            return TreeNode(x["label"], members, x["depth"], x["giant_size"], x["p_value"], x["psi"],
                            x["K0"], kids, list(x["tags"]), x["name"], x["annotations"])
        return cls(dec(d["root"]), ids, d.get("params", {}))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)

    def to_text(self) -> str:
        lines = []
        for t in self.root.walk():
            p = "-" if t.p_value is None else f"{t.p_value:.4g}"
            extra = f" K0={t.K0}" if t.K0 else ""
            tags = f" [{', '.join(t.tags)}]" if t.tags else ""
            lines.append(f"{'  ' * t.depth}{t.label} size={t.size} p={p}{extra}{tags}")
        return "\n".join(lines) + "\n"


def write_tree(tree: CommunityTree, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(tree.to_json())


def read_tree(path) -> CommunityTree:
    with open(path, encoding="utf-8") as fh:
        return CommunityTree.from_dict(json.load(fh))


K0Schedule = int | Sequence[int] | Callable[[str, int], int]


def _schedule(k0: K0Schedule, overrides: Mapping[str, int] | None) -> Callable[[str, int], int]:
    overrides = dict(overrides or {})

    def pick(label: str, depth: int) -> int:
        if label in overrides:
            return int(overrides[label])
        if callable(k0):
            return int(k0(label, depth))
        if isinstance(k0, int):
            return k0 if depth == 0 else 2
        return int(k0[min(depth, len(k0) - 1)])
    return pick


def _node_seed(seed: int, label: str) -> np.random.Generator:
    ss = np.random.SeedSequence([int(seed), zlib.crc32(label.encode())])
    return np.random.Generator(np.random.Philox(ss))


def annotate(g: Graph, top: int = 5) -> dict:
    """Top-degree, top-2 betweenness and top closeness node ids of ``g``'s giant component."""
    giant, _ = giant_component(g)
    deg = giant.degrees()
    cen = centrality(giant)
    ids = giant.node_ids

    def best(x, k):
        order = np.lexsort((np.arange(x.size), -x))
        return [ids[i] for i in order[:k]]
    return {
        "top_degree": best(deg, top),
        "top_betweenness": best(cen.betweenness, 2),
        "top_closeness": best(cen.closeness, 1),
        "centrality_scope": "giant component" if giant.n < g.n else "all",
    }


def build_tree(g: Graph, k0_schedule: K0Schedule = 2, p_stop: float = 1e-3, size_stop: int = 250,
               seed: int = 0, *, overrides: Mapping[str, int] | None = None, c0: float = 1.0,
               max_depth: int = 20, annotate_leaves: bool = True) -> CommunityTree:
    """Recursively split ``g`` into a community tree.

    A non-root community becomes a leaf when the SgnQ p-value of its giant
    component exceeds ``p_stop`` or the giant component has at most
    ``size_stop`` nodes; the root is split without testing. Splits run
    modified SCORE on the giant component; nodes outside it form a
    ``residue`` leaf. An empty cluster triggers a retry with ``K0 - 1``.

    ``k0_schedule`` is an int (used at the root, 2 below it), a per-depth
    list (last entry repeats), or ``f(label, depth)``; ``overrides`` maps
    community labels such as ``"C1-2"`` to K0.
    """
    pick = _schedule(k0_schedule, overrides)
    if g.n and components(g)[0] > 1:
        warnings.warn("input graph is disconnected; nodes outside its giant component form a residue leaf",
                      stacklevel=2)
    root = TreeNode("root", np.arange(g.n), 0)
    stack = [root]
    while stack:
        node = stack.pop()
        sub = induced_subgraph(g, node.members)
        if sub.edge_count == 0:
            node.tags.append("no-edges")
            continue
        giant, gmap = giant_component(sub)
        node.giant_size = giant.n

        if node.depth > 0:
            try:
                res = sgnq_statistic(giant)
                node.p_value, node.psi = res.p_value, res.psi
            except SgnQError:
                node.tags.append("sgnq-undefined")
                continue
            if node.p_value > p_stop:
                node.tags.append("p-stop")
                continue
        if giant.n <= size_stop:
            node.tags.append("size-stop")
            if node.size > size_stop:
                node.tags.append("giant-below-size-stop")
            continue
        if node.depth >= max_depth:
            node.tags.append("max-depth")
            continue

        K0 = pick(node.label, node.depth)
        rng = _node_seed(seed, node.label)
        parts = None
        while K0 >= 2:
            labels = modified_score_cluster(giant, K0, c0=c0, seed=rng)
            if np.unique(labels).size == K0:
                parts = [gmap[labels == k] for k in range(K0)]
                break
            K0 -= 1
        if parts is None:
            node.tags.append("degenerate-split")
            continue

        node.K0 = K0
        prefix = "C" if node.depth == 0 else node.label + "-"
        for k, part in enumerate(parts, 1):
            child = TreeNode(f"{prefix}{k}", np.sort(node.members[part]), node.depth + 1)
            node.children.append(child)
        residue = np.setdiff1d(np.arange(sub.n), gmap)
        if residue.size:
            child = TreeNode(f"{prefix}r" if node.depth == 0 else f"{node.label}-r",
                             np.sort(node.members[residue]), node.depth + 1, tags=["residue"])
            rsub = induced_subgraph(g, child.members)
            _, lab = components(rsub)
            if np.bincount(lab).max() >= CANDIDATE_LEAF_MIN:
                child.tags.append("candidate-leaf")
            node.children.append(child)
        stack.extend(c for c in reversed(node.children) if "residue" not in c.tags)

    tree = CommunityTree(root, g.node_ids, {
        "k0_schedule": k0_schedule if not callable(k0_schedule) else "callable",
        "overrides": dict(overrides or {}), "p_stop": p_stop, "size_stop": size_stop,
        "seed": seed, "c0": c0,
    })
    if annotate_leaves:
        for leaf in tree.leaves():
            sub = induced_subgraph(g, leaf.members)
            if sub.edge_count:
                leaf.annotations = annotate(sub)
    return tree
