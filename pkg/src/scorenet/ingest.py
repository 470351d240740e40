"""MADStat-layout tables and the network families built from them.

``AuPapMat`` rows are ``(idxAu, idxPap, year, journal)``; ``PapPapMat``
rows are ``(FromPap, ToPap, FromYear, ToYear, SelfCite)``. Files are UTF-8,
tab- or comma-separated, with a header row.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .graph import Graph, giant_component, induced_subgraph

log = logging.getLogger(__name__)


class IngestError(ValueError):
    pass


# the 21 default trajectory windows
DEFAULT_WINDOWS = (
    (1991, 2000), (1992, 2001), (1993, 2001), (1994, 2002), (1995, 2003),
    (1996, 2004), (1997, 2004), (1998, 2005), (1999, 2006), (2000, 2007),
    (2001, 2007), (2002, 2008), (2003, 2009), (2004, 2010), (2005, 2010),
    (2006, 2011), (2007, 2012), (2008, 2013), (2009, 2013), (2010, 2014),
    (2011, 2015),
)


@dataclass(frozen=True)
class WindowSpec:
    windows: tuple = DEFAULT_WINDOWS

    def __post_init__(self):
        wins = tuple((int(a), int(b)) for a, b in self.windows)
        for a, b in wins:
            if a > b:
                raise IngestError(f"window {a}-{b} has start after end")
        if any(w1[0] > w2[0] for w1, w2 in zip(wins, wins[1:])):
            raise IngestError("windows must be ordered by start year")
        object.__setattr__(self, "windows", wins)

    @classmethod
    def parse(cls, text: str) -> "WindowSpec":
        """``"1991-2000,1992-2001"`` -> WindowSpec."""
        out = []
        for part in text.split(","):
            a, b = part.strip().split("-")
            out.append((int(a), int(b)))
        return cls(tuple(out))

    def __len__(self) -> int:
        return len(self.windows)

    def __iter__(self):
        return iter(self.windows)

    def __getitem__(self, i):
        return self.windows[i]


@dataclass(frozen=True)
class AuthorPaperTable:
    author: np.ndarray
    paper: np.ndarray
    year: np.ndarray
    journal: np.ndarray

    def __len__(self) -> int:
        return self.author.size

    def select(self, mask: np.ndarray) -> "AuthorPaperTable":
        return AuthorPaperTable(self.author[mask], self.paper[mask], self.year[mask], self.journal[mask])


@dataclass(frozen=True)
class CitationTable:
    from_paper: np.ndarray
    to_paper: np.ndarray
    from_year: np.ndarray
    to_year: np.ndarray
    self_cite: np.ndarray

    def __len__(self) -> int:
        return self.from_paper.size

    @property
    def backward_anomalies(self) -> int:
        """Citations whose cited paper is newer than the citing one (kept)."""
        return int(np.sum(self.from_year < self.to_year))


# -- parsing ----------------------------------------------------------------

def _open_rows(path):
    fh = open(path, encoding="utf-8", newline="")
    first = fh.readline()
    delim = "\t" if "\t" in first else ","
    header = [h.strip() for h in next(csv.reader([first], delimiter=delim))]
    return fh, header, csv.reader(fh, delimiter=delim)


def _column_index(header, names, path):
    lower = [h.lower() for h in header]
    out = []
    for nm in names:
        if nm.lower() not in lower:
            raise IngestError(f"{path}: missing column {nm!r} (have {header})")
        out.append(lower.index(nm.lower()))
    return out


def _read(path, names, convert, permissive):
    fh, header, reader = _open_rows(path)
    cols = _column_index(header, names, path)
    rows = []
    with fh:
        for lineno, rec in enumerate(reader, 2):
            if not rec or all(not f.strip() for f in rec):
                continue
            try:
                rows.append(convert([rec[c].strip() for c in cols]))
            except (IndexError, ValueError) as exc:
                msg = f"{path}:{lineno}: malformed row {rec!r} ({exc})"
                if not permissive:
                    raise IngestError(msg) from None
                log.warning("skipping %s", msg)
    return rows


def read_author_paper(path, *, permissive: bool = False, year_range=(1975, 2015)) -> AuthorPaperTable:
    rows = _read(path, ["idxAu", "idxPap", "year", "journal"],
                 lambda r: (int(r[0]), int(r[1]), int(r[2]), r[3]), permissive)
    if not rows:
        return AuthorPaperTable(*(np.zeros(0, np.int64),) * 3, np.zeros(0, object))
    au, pa, yr, jr = zip(*rows)
    t = AuthorPaperTable(np.array(au, np.int64), np.array(pa, np.int64),
                         np.array(yr, np.int64), np.array(jr, dtype=object))
    pairs = t.author * (t.paper.max() + 1) + t.paper
    if np.unique(pairs).size != pairs.size:
        raise IngestError(f"{path}: duplicate (author, paper) rows")
    if year_range is not None:
        lo, hi = year_range
        bad = (t.year < lo) | (t.year > hi)
        if bad.any():
            msg = f"{path}: {int(bad.sum())} rows outside years {lo}-{hi}"
            if not permissive:
                raise IngestError(msg)
            log.warning("dropping %s", msg)
            t = t.select(~bad)
    return t


def read_citations(path, *, permissive: bool = False) -> CitationTable:
    rows = _read(path, ["FromPap", "ToPap", "FromYear", "ToYear", "SelfCite"],
                 lambda r: (int(r[0]), int(r[1]), int(r[2]), int(r[3]), int(float(r[4])) != 0),
                 permissive)
    if not rows:
        z = np.zeros(0, np.int64)
        return CitationTable(z, z, z, z, np.zeros(0, bool))
    fp, tp, fy, ty, sc = zip(*rows)
    ct = CitationTable(np.array(fp, np.int64), np.array(tp, np.int64), np.array(fy, np.int64),
                       np.array(ty, np.int64), np.array(sc, bool))
    key = ct.from_paper * (max(ct.to_paper.max(), ct.from_paper.max()) + 1) + ct.to_paper
    if np.unique(key).size != key.size:
        raise IngestError(f"{path}: duplicate (FromPap, ToPap) rows")
    return ct


def read_author_names(path, base: int = 1) -> dict:
    """Map author id -> display name; line ``k`` holds id ``k - 1 + base``."""
    with open(path, encoding="utf-8") as fh:
        return {i + base: line.rstrip("\r\n") for i, line in enumerate(fh)}


def validation_report(ap: AuthorPaperTable, ct: CitationTable) -> dict:
    papers = np.unique(ap.paper)
    known = np.isin(ct.from_paper, papers) & np.isin(ct.to_paper, papers)
    return {
        "author_paper_rows": len(ap),
        "authors": int(np.unique(ap.author).size),
        "papers": int(papers.size),
        "journals": int(np.unique(ap.journal).size),
        "year_min": int(ap.year.min()) if len(ap) else None,
        "year_max": int(ap.year.max()) if len(ap) else None,
        "author_id_range": [int(ap.author.min()), int(ap.author.max())] if len(ap) else None,
        "paper_id_range": [int(ap.paper.min()), int(ap.paper.max())] if len(ap) else None,
        "citation_rows": len(ct),
        "self_citations": int(ct.self_cite.sum()),
        "citations_to_unknown_papers": int((~known).sum()),
        "backward_citations": ct.backward_anomalies,
    }


# -- incidence helpers -------------------------------------------------------

@dataclass
class _Index:
    """Compact indices for authors and papers of an author-paper table."""

    ap: AuthorPaperTable
    author_ids: np.ndarray = field(init=False)
    paper_ids: np.ndarray = field(init=False)
    X: sp.csr_matrix = field(init=False)  # papers x authors

    def __post_init__(self):
        self.author_ids, a = np.unique(self.ap.author, return_inverse=True)
        self.paper_ids, p = np.unique(self.ap.paper, return_inverse=True)
        self.X = sp.csr_matrix((np.ones(a.size), (p, a)),
                               shape=(self.paper_ids.size, self.author_ids.size))

    def paper_pos(self, ids: np.ndarray) -> np.ndarray:
        pos = np.searchsorted(self.paper_ids, ids)
        pos = np.minimum(pos, max(self.paper_ids.size - 1, 0))
        ok = self.paper_ids[pos] == ids if self.paper_ids.size else np.zeros(ids.size, bool)
        return np.where(ok, pos, -1)

    def author_pos(self, author_id) -> int:
        pos = int(np.searchsorted(self.author_ids, author_id))
        if pos >= self.author_ids.size or self.author_ids[pos] != author_id:
            raise IngestError(f"unknown author id {author_id}")
        return pos


def _binary(m: sp.spmatrix) -> sp.csr_matrix:
    m = sp.csr_matrix(m)
    m.data = np.ones_like(m.data)
    m.eliminate_zeros()
    return m


def citee_weights(ap: AuthorPaperTable, ct: CitationTable, years: tuple, fresh_years: int = 10,
                  _index: _Index | None = None) -> tuple[sp.csr_matrix, np.ndarray]:
    """Summed yearly co-citation weights for citing years in ``years``.

    ``W(i, j)`` counts citing papers published in year ``t`` of the range,
    authored by neither ``i`` nor ``j``, that cite a paper of ``i`` and a
    paper of ``j`` both published in ``[t - fresh_years + 1, t]``.
    Returns the author x author weight matrix and the author ids.
    """
    idx = _index or _Index(ap)
    lo, hi = years
    m = (ct.from_year >= lo) & (ct.from_year <= hi)
    m &= (ct.to_year <= ct.from_year) & (ct.to_year > ct.from_year - fresh_years)
    src = idx.paper_pos(ct.from_paper[m])
    dst = idx.paper_pos(ct.to_paper[m])
    ok = (src >= 0) & (dst >= 0)
    src, dst = src[ok], dst[ok]
    npap = idx.paper_ids.size
    if src.size == 0:
        na = idx.author_ids.size
        return sp.csr_matrix((na, na)), idx.author_ids
    cites = sp.csr_matrix((np.ones(src.size), (src, dst)), shape=(npap, npap))
    # citing paper x cited author, minus the citing paper's own authors
    B = _binary(cites @ idx.X)
    B = _binary(B - B.multiply(idx.X))
    W = (B.T @ B).tocsr()
    W.setdiag(0)
    W.eliminate_zeros()
    return W, idx.author_ids


def build_citee_network(ap: AuthorPaperTable, ct: CitationTable, window: tuple = DEFAULT_WINDOWS[0],
                        degree_min: float = 60, weight_min: float = 2, fresh_years: int = 10) -> Graph:
    """Reference citee network: degree filter, binarize, giant component.

    Node ids are author ids.
    """
    W, ids = citee_weights(ap, ct, window, fresh_years)
    deg = np.asarray(W.sum(axis=1)).ravel()
    keep = np.flatnonzero(deg >= degree_min)
    if keep.size == 0:
        raise IngestError("thresholds eliminate all nodes")
    sub = W[keep][:, keep]
    g = Graph(sub, ids[keep].tolist(), check=False).binarized(weight_min)
    if g.edge_count == 0:
        raise IngestError("thresholds eliminate all nodes")
    return giant_component(g)[0]


def build_citee_window_sequence(ap: AuthorPaperTable, ct: CitationTable, windows: WindowSpec | Sequence,
                                reference_ids: Sequence, weight_min: float = 2,
                                fresh_years: int = 10) -> list[Graph]:
    """One binarized citee graph per window, all on ``reference_ids`` in that order.

    No degree filter or giant-component step is applied per window; see
    :func:`giant_membership` for per-window giant components.
    """
    idx = _Index(ap)
    years_lo, years_hi = int(ap.year.min()), int(ap.year.max())
    ref = np.asarray(list(reference_ids))
    pos = np.searchsorted(idx.author_ids, ref)
    if np.any(pos >= idx.author_ids.size) or np.any(idx.author_ids[np.minimum(pos, idx.author_ids.size - 1)] != ref):
        raise IngestError("reference ids not all present in the author table")
    out = []
    for lo, hi in windows:
        if hi < years_lo or lo > years_hi:
            raise IngestError(f"window {lo}-{hi} outside the data range {years_lo}-{years_hi}")
        W, _ = citee_weights(ap, ct, (lo, hi), fresh_years, _index=idx)
        sub = W[pos][:, pos]
        out.append(Graph(sub, ref.tolist(), check=False).binarized(weight_min))
    return out


def giant_membership(graphs: Sequence[Graph]) -> np.ndarray:
    """Boolean (T, n) matrix: node in the giant component of window t."""
    out = np.zeros((len(graphs), graphs[0].n), dtype=bool)
    for t, g in enumerate(graphs):
        if g.edge_count:
            out[t, giant_component(g)[1]] = True
    return out


def coauthorship_graph(ap: AuthorPaperTable, m0: int = 1, journals: Iterable | None = None,
                       year_range: tuple | None = None) -> Graph:
    """Author graph with an edge iff the pair co-wrote at least ``m0`` papers.

    Every author with a paper in the filtered table is a node.
    """
    if m0 < 1:
        raise ValueError("m0 must be >= 1")
    mask = np.ones(len(ap), dtype=bool)
    if journals is not None:
        mask &= np.isin(ap.journal, list(journals))
    if year_range is not None:
        mask &= (ap.year >= year_range[0]) & (ap.year <= year_range[1])
    idx = _Index(ap.select(mask))
    C = (idx.X.T @ idx.X).tocsr()
    C.setdiag(0)
    C.eliminate_zeros()
    C.data = (C.data >= m0).astype(float)
    return Graph(C, idx.author_ids.tolist(), check=False)


def build_coauthorship(ap: AuthorPaperTable, m0: int, journals: Iterable | None = None,
                       year_range: tuple | None = None) -> tuple[Graph, np.ndarray]:
    """Giant component of the ``m0`` coauthorship graph and its index map.

    The map gives, per giant-component node, its index in the full graph
    (authors sorted by id).
    """
    return giant_component(coauthorship_graph(ap, m0, journals, year_range))


def coauthorship_window_sequence(ap: AuthorPaperTable, windows: WindowSpec | Sequence, m0: int = 1,
                                 journals: Iterable | None = None) -> list[Graph]:
    """One ``m0`` coauthorship graph per window over a shared author index.

    Nodes are all authors of the (journal-filtered) table, sorted by id, so
    node ``i`` is the same author in every window.
    """
    if m0 < 1:
        raise ValueError("m0 must be >= 1")
    if journals is not None:
        ap = ap.select(np.isin(ap.journal, list(journals)))
    idx = _Index(ap)
    _, first = np.unique(ap.paper, return_index=True)
    paper_year = ap.year[first]
    out = []
    for lo, hi in windows:
        keep = (paper_year >= lo) & (paper_year <= hi)
        Xw = idx.X[np.flatnonzero(keep)]
        C = (Xw.T @ Xw).tocsr()
        C.setdiag(0)
        C.eliminate_zeros()
        C.data = (C.data >= m0).astype(float)
        out.append(Graph(C, idx.author_ids.tolist(), check=False))
    return out


def ego_network(g: Graph, center: int, include_center: bool = True) -> Graph:
    """Induced subgraph on ``center`` and its neighbours (center first)."""
    if not 0 <= center < g.n:
        raise IngestError(f"center {center} out of range")
    nb = g.neighbors(center)
    if nb.size == 0:
        raise IngestError("ego network empty")
    nodes = np.r_[center, nb] if include_center else nb
    return induced_subgraph(g, nodes)


class CitationIndex:
    """Author-level citation relation for personalised citer/citee graphs.

    ``C(u, w) = 1`` when some paper by ``u`` cites some paper by ``w``.
    Citer graph: ``u ~ v`` when they cited at least ``min_count`` common
    third authors; citee graph: when at least ``min_count`` common third
    authors cited both.
    """

    def __init__(self, ap: AuthorPaperTable, ct: CitationTable, year_range: tuple | None = None):
        self._idx = _Index(ap)
        m = np.ones(len(ct), dtype=bool)
        if year_range is not None:
            m &= (ct.from_year >= year_range[0]) & (ct.from_year <= year_range[1])
        src = self._idx.paper_pos(ct.from_paper[m])
        dst = self._idx.paper_pos(ct.to_paper[m])
        ok = (src >= 0) & (dst >= 0)
        npap = self._idx.paper_ids.size
        cites = sp.csr_matrix((np.ones(int(ok.sum())), (src[ok], dst[ok])), shape=(npap, npap))
        X = self._idx.X
        self.C = _binary(X.T @ cites @ X)
        self.CT = self.C.T.tocsr()

    @property
    def author_ids(self) -> np.ndarray:
        return self._idx.author_ids

    def position(self, author_id) -> int:
        """Row of ``author_id`` in :attr:`C`; raises IngestError if unknown."""
        return self._idx.author_pos(author_id)

    @staticmethod
    def _shared_third(R: sp.csr_matrix, rows: np.ndarray) -> np.ndarray:
        """``S(u, v) = #{w not in {u, v}: R(u, w) = R(v, w) = 1}`` for u, v in ``rows``."""
        sub = R[rows]
        S = (sub @ sub.T).toarray()
        diag = np.asarray(R[rows][:, rows].toarray())
        self_w = np.diag(diag)
        # remove w = v and w = u
        S -= diag * self_w[None, :]
        S -= self_w[:, None] * diag.T
        np.fill_diagonal(S, 0)
        return S

    def _ego(self, R: sp.csr_matrix, RT: sp.csr_matrix, author_id, min_count: int) -> Graph:
        a = self._idx.author_pos(author_id)
        row = R[a].toarray().ravel()
        row[a] = 0
        if not row.any():
            raise IngestError("insufficient citation activity")
        targets = np.flatnonzero(row)
        # candidate neighbours share at least one target with a
        cand = np.unique(RT[targets].indices)
        cand = cand[cand != a]
        if cand.size == 0:
            raise IngestError("insufficient citation activity")
        S_a = self._shared_third(R, np.r_[a, cand])[0, 1:]
        nb = cand[S_a >= min_count]
        if nb.size == 0:
            raise IngestError("insufficient citation activity")
        nodes = np.r_[a, nb]
        S = self._shared_third(R, nodes)
        adj = (S >= min_count).astype(float)
        return Graph(adj, self._idx.author_ids[nodes].tolist(), check=False)

    def citer_ego(self, author_id, min_count: int = 1) -> Graph:
        return self._ego(self.C, self.CT, author_id, min_count)

    def citee_ego(self, author_id, min_count: int = 1) -> Graph:
        return self._ego(self.CT, self.C, author_id, min_count)


def build_citer_and_citee_ego(ap: AuthorPaperTable, ct: CitationTable, author,
                              min_count: int = 1) -> tuple[Graph, Graph]:
    """Personalised citer and citee networks around ``author`` (center first)."""
    ci = CitationIndex(ap, ct)
    return ci.citer_ego(author, min_count), ci.citee_ego(author, min_count)
