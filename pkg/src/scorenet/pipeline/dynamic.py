"""Research trajectories across windows and the diversity metrics E and M."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..graph import Graph
from ..ingest import giant_membership
from ..spectral import Embedding, dynamic_embed, top_eigs
from ..csvio import parse_float, parse_id, read_csv, write_csv


@dataclass(frozen=True)
class TrajectorySet:
    """Per-node knots ``r_i^(1..T)`` and diversity metrics.

    ``E`` and ``M`` are NaN for ineligible nodes and ``None`` when ``T = 1``.
    """

    node_ids: tuple
    knots: np.ndarray
    valid: np.ndarray
    always_giant: np.ndarray
    t0: int = 1
    E: np.ndarray | None = None
    M: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.knots.shape[0]

    @property
    def T(self) -> int:
        return self.knots.shape[1]

    @property
    def eligible(self) -> np.ndarray:
        return self.always_giant & self.valid.all(axis=1)

    @classmethod
    def from_embeddings(cls, embeddings: Sequence[Embedding], always_giant=None,
                        node_ids=None, t0: int = 1) -> "TrajectorySet":
        knots = np.stack([e.coords for e in embeddings], axis=1)
        valid = np.stack([e.valid for e in embeddings], axis=1)
        n = knots.shape[0]
        ag = np.ones(n, dtype=bool) if always_giant is None else np.asarray(always_giant, dtype=bool)
        ids = tuple(range(n)) if node_ids is None else tuple(node_ids)
        E, M = diversity_metrics(knots, ag & valid.all(axis=1))
        return cls(ids, knots, valid, ag, t0, E, M)


def diversity_metrics(knots: np.ndarray, eligible: np.ndarray):
    """``E_i = |r^(T) - r^(1)|`` and ``M_i = max_t |r^(t) - r^(1)|`` for eligible rows."""
    if knots.shape[1] < 2:
        return None, None
    d = np.linalg.norm(knots[:, 1:] - knots[:, :1], axis=2)
    E = np.where(eligible, d[:, -1], np.nan)
    M = np.where(eligible, d.max(axis=1) if d.size else np.nan, np.nan)
    return E, M


def trajectories(window_graphs: Sequence[Graph], t0: int = 1, K: int = 3) -> TrajectorySet:
    """Embed every window on the eigenpairs of window ``t0`` and measure drift."""
    T = len(window_graphs)
    if T == 0:
        raise ValueError("no windows")
    if not 1 <= t0 <= T:
        raise ValueError(f"t0 must lie in [1, {T}]")
    n = window_graphs[0].n
    if any(g.n != n for g in window_graphs):
        raise ValueError("window graphs disagree on node count")
    if T == 1:
        warnings.warn("diversity undefined for single window", stacklevel=2)
    pairs = top_eigs(window_graphs[t0 - 1], K)
    embs = dynamic_embed(pairs, list(window_graphs))
    ag = giant_membership(window_graphs).all(axis=0)
    return TrajectorySet.from_embeddings(embs, ag, window_graphs[0].node_ids, t0)


TRAJECTORY_HEADER_BASE = ("node_id", "window", "valid", "always_giant")


def write_trajectories(ts: TrajectorySet, path) -> None:
    d = ts.knots.shape[2]
    header = list(TRAJECTORY_HEADER_BASE) + [f"r{k}" for k in range(1, d + 1)]
    rows = ([ts.node_ids[i], t + 1, bool(ts.valid[i, t]), bool(ts.always_giant[i]), *ts.knots[i, t]]
            for i in range(ts.n) for t in range(ts.T))
    write_csv(path, header, rows)


def read_trajectories(path, t0: int = 1) -> TrajectorySet:
    header, rows = read_csv(path)
    d = len(header) - len(TRAJECTORY_HEADER_BASE)
    ids = list(dict.fromkeys(parse_id(r["node_id"]) for r in rows))
    T = max(int(r["window"]) for r in rows)
    knots = np.full((len(ids), T, d), np.nan)
    valid = np.zeros((len(ids), T), dtype=bool)
    ag = np.zeros(len(ids), dtype=bool)
    pos = {v: i for i, v in enumerate(ids)}
    for r in rows:
        i, t = pos[parse_id(r["node_id"])], int(r["window"]) - 1
        valid[i, t] = r["valid"] == "1"
        ag[i] = r["always_giant"] == "1"
        knots[i, t] = [parse_float(r[f"r{k}"]) for k in range(1, d + 1)]
    E, M = diversity_metrics(knots, ag & valid.all(axis=1))
    return TrajectorySet(tuple(ids), knots, valid, ag, t0, E, M)


@dataclass(frozen=True)
class DiversityRow:
    node_id: object
    E: float
    M: float
    gap: float
    SP: bool
    SnP: bool


def diversity_report(ts: TrajectorySet, top_n: int | None = None, degrees=None,
                     high: float = 0.9, low: float = 0.5) -> list[DiversityRow]:
    """Rank eligible nodes by ``E`` and flag SP and SnP.

    SP: ``E`` and ``M`` both at or above their ``high`` quantiles. SnP:
    ``M`` at or above its ``high`` quantile while ``E`` is at or below its
    ``low`` quantile. Quantiles are taken over the reported nodes; zero
    metrics never earn a flag. With ``top_n`` only the ``top_n``
    highest-degree eligible nodes are reported.
    """
    if ts.E is None:
        raise ValueError("diversity undefined for single window")
    idx = np.flatnonzero(ts.eligible)
    if top_n is not None:
        if degrees is None:
            raise ValueError("top_n needs degrees")
        deg = np.asarray(degrees)[idx]
        idx = idx[np.lexsort((idx, -deg))[:top_n]]
    if idx.size == 0:
        return []
    E, M = ts.E[idx], ts.M[idx]
    e_hi, e_lo = np.quantile(E, high), np.quantile(E, low)
    m_hi = np.quantile(M, high)
    sp_flag = (E >= e_hi) & (M >= m_hi) & (E > 0)
    snp_flag = (M >= m_hi) & (E <= e_lo) & (M > 0) & ~sp_flag
    order = np.lexsort((idx, -E))
    return [DiversityRow(ts.node_ids[idx[j]], float(E[j]), float(M[j]), float(M[j] - E[j]),
                         bool(sp_flag[j]), bool(snp_flag[j])) for j in order]


DIVERSITY_HEADER = ("node_id", "E", "M", "M_minus_E", "SP", "SnP")


def write_diversity(rows: Sequence[DiversityRow], path) -> None:
    write_csv(path, DIVERSITY_HEADER, ((r.node_id, r.E, r.M, r.gap, r.SP, r.SnP) for r in rows))


def read_diversity(path) -> list[DiversityRow]:
    _, rows = read_csv(path)
    return [DiversityRow(parse_id(r["node_id"]), float(r["E"]), float(r["M"]), float(r["M_minus_E"]),
                         r["SP"] == "1", r["SnP"] == "1") for r in rows]
