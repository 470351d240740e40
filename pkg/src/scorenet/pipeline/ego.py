"""Personalised-network diversity: SgnQ on ego, citer and citee networks."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import Sequence

import numpy as np

from ..graph import Graph, GraphError, giant_component, induced_subgraph
from ..ingest import AuthorPaperTable, CitationIndex, CitationTable, IngestError
from ..sgnq import MIN_EGO_NODES, SgnQError, sgnq_statistic
from ..spectral import modified_score_cluster
from ..csvio import parse_float, parse_id, read_csv, write_csv


@dataclass(frozen=True)
class EgoRow:
    """SgnQ outcome for one author's ego network (``n_ego`` counts the center)."""

    node_id: object
    n_ego: int
    psi: float | None
    p_value: float | None
    status: str
    groups: tuple = ()


def _score(g: Graph) -> tuple[float | None, float | None, str]:
    if g.n < MIN_EGO_NODES:
        return None, None, "insufficient"
    try:
        r = sgnq_statistic(g)
    except SgnQError as exc:
        return None, None, "insufficient" if "too small" in str(exc) else "degenerate"
    return r.psi, r.p_value, "ok"


def _drill(ego: Graph, seed) -> tuple:
    """Two-way split of the ego network without its center (giant component only)."""
    rest = induced_subgraph(ego, np.arange(1, ego.n))
    if rest.edge_count == 0:
        return ()
    giant, _ = giant_component(rest)
    if giant.n < 3:
        return ()
    labels = modified_score_cluster(giant, 2, seed=seed)
    return tuple(tuple(giant.node_ids[i] for i in np.flatnonzero(labels == k)) for k in range(2))


def ego_diversity(g: Graph, author, min_size: int = MIN_EGO_NODES, drill_p: float | None = None,
                  seed=0) -> EgoRow:
    """SgnQ for the ego network of ``author`` (a node id of ``g``)."""
    center = g.index_of(author)
    nb = g.neighbors(center)
    if nb.size + 1 < min_size:
        return EgoRow(author, int(nb.size) + 1, None, None, "insufficient")
    ego = induced_subgraph(g, np.r_[center, nb])
    psi, p, status = _score(ego)
    groups = _drill(ego, seed) if (drill_p is not None and p is not None and p < drill_p) else ()
    return EgoRow(author, ego.n, psi, p, status, groups)


def ego_diversity_batch(g: Graph, authors: Sequence, min_size: int = MIN_EGO_NODES,
                        drill_p: float | None = None, seed=0, workers: int = 1) -> list[EgoRow]:
    """:func:`ego_diversity` over ``authors``; output order and values do not depend on ``workers``.

    Raises
    ------
    GraphError
        If an author id is not a node of ``g`` (checked before any work).
    """
    for a in authors:
        g.index_of(a)
    fn = partial(ego_diversity, g, min_size=min_size, drill_p=drill_p, seed=seed)
    if workers <= 1 or len(authors) < 2:
        return [fn(a) for a in authors]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, authors, chunksize=max(1, len(authors) // (4 * workers))))


EGO_HEADER = ("node_id", "n_ego", "psi", "p_value", "status", "group_sizes", "groups")


def write_ego(rows: Sequence[EgoRow], path) -> None:
    write_csv(path, EGO_HEADER, (
        (r.node_id, r.n_ego, r.psi, r.p_value, r.status,
         ";".join(str(len(x)) for x in r.groups),
         "|".join(";".join(map(str, x)) for x in r.groups)) for r in rows))


def read_ego(path) -> list[EgoRow]:
    _, rows = read_csv(path)
    out = []
    for r in rows:
        groups = tuple(tuple(parse_id(s) for s in part.split(";")) for part in r["groups"].split("|")
                       ) if r["groups"] else ()
        psi = None if r["psi"] == "" else parse_float(r["psi"])
        p = None if r["p_value"] == "" else parse_float(r["p_value"])
        out.append(EgoRow(parse_id(r["node_id"]), int(r["n_ego"]), psi, p, r["status"], groups))
    return out


@dataclass(frozen=True)
class CiterCiteeRow:
    node_id: object
    n_citer: int
    psi_citer: float | None
    p_citer: float | None
    status_citer: str
    n_citee: int
    psi_citee: float | None
    p_citee: float | None
    status_citee: str


def _side(fn, author, min_count):
    try:
        g = fn(author, min_count)
    except IngestError as exc:
        if "insufficient" in str(exc):
            return 0, None, None, "insufficient"
        raise
    psi, p, status = _score(g)
    return g.n, psi, p, status


def citer_citee_scores(ap: AuthorPaperTable, ct: CitationTable, authors: Sequence,
                       min_count: int = 1, index: CitationIndex | None = None) -> list[CiterCiteeRow]:
    """SgnQ on each author's personalised citer and citee networks.

    A side with no usable citation activity, or fewer than the minimum
    ego size, is reported as ``insufficient`` on its own.
    """
    ci = CitationIndex(ap, ct) if index is None else index
    out = []
    for a in authors:
        try:
            ci.position(a)
        except IngestError as exc:
            raise GraphError(f"unknown author id {a!r}") from exc
        out.append(CiterCiteeRow(a, *_side(ci.citer_ego, a, min_count), *_side(ci.citee_ego, a, min_count)))
    return out


CITER_CITEE_HEADER = ("node_id", "n_citer", "psi_citer", "p_citer", "status_citer",
                      "n_citee", "psi_citee", "p_citee", "status_citee")


def write_citer_citee(rows: Sequence[CiterCiteeRow], path) -> None:
    write_csv(path, CITER_CITEE_HEADER, (
        (r.node_id, r.n_citer, r.psi_citer, r.p_citer, r.status_citer,
         r.n_citee, r.psi_citee, r.p_citee, r.status_citee) for r in rows))


def read_citer_citee(path) -> list[CiterCiteeRow]:
    _, rows = read_csv(path)

    def opt(s):
        return None if s == "" else float(s)
    return [CiterCiteeRow(parse_id(r["node_id"]), int(r["n_citer"]), opt(r["psi_citer"]), opt(r["p_citer"]),
                          r["status_citer"], int(r["n_citee"]), opt(r["psi_citee"]), opt(r["p_citee"]),
                          r["status_citee"]) for r in rows]
