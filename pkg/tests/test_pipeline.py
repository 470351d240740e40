import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import complete_graph, planted_hierarchy, random_dynamic_params
from scorenet.graph import Graph, GraphError, giant_component, induced_subgraph
from scorenet.ingest import AuthorPaperTable, CitationIndex, CitationTable
from scorenet.models import DCBMParams, DynamicDCMMParams, rng_from_seed, sample_dcbm
from scorenet.pipeline import (
    CommunityTree,
    TrajectorySet,
    adjusted_rand_index,
    build_tree,
    citer_citee_scores,
    diversity_metrics,
    diversity_report,
    ego_diversity,
    ego_diversity_batch,
    matched_accuracy,
    read_citer_citee,
    read_diversity,
    read_ego,
    read_research_map,
    read_sankey,
    read_trajectories,
    read_tree,
    research_map,
    sankey,
    trajectories,
    write_citer_citee,
    write_diversity,
    write_ego,
    write_research_map,
    write_sankey,
    write_trajectories,
    write_tree,
)
from scorenet.pipeline import tree as tree_mod
from scorenet.sgnq import sgnq_bruteforce
from scorenet.spectral import Embedding, population_dynamic_embed


def three_block_graph(seed, n=600, off=0.05, theta=(0.2, 0.5)):
    labels = np.repeat(np.arange(3), n // 3)
    P = np.full((3, 3), off) + (1 - off) * np.eye(3)
    th = rng_from_seed(500 + seed).uniform(*theta, n)
    return sample_dcbm(DCBMParams(P, th, labels), seed), labels


# -- metrics --------------------------------------------------------------------

def test_ari_and_accuracy_basics():
    a = np.array([0, 0, 1, 1, 2, 2])
    assert adjusted_rand_index(a, a) == pytest.approx(1.0)
    assert adjusted_rand_index(a, [5, 5, 7, 7, 9, 9]) == pytest.approx(1.0)
    assert matched_accuracy(a, [2, 2, 0, 0, 1, 1]) == 1.0
    assert matched_accuracy(a, [0, 0, 0, 1, 2, 2]) == pytest.approx(5 / 6)


def test_ari_hand_value():
    # Hubert-Arabie: index 1, expected index 1, max index 2.5
    a = [0, 0, 1, 1]
    b = [0, 1, 1, 1]
    assert adjusted_rand_index(a, b) == pytest.approx(0.0)


# -- tree ---------------------------------------------------------------------------

def check_tree_invariants(tree: CommunityTree, p_stop, size_stop):
    root = tree.root
    leaves = tree.leaves()
    allm = np.sort(np.concatenate([lf.members for lf in leaves]))
    assert np.array_equal(allm, np.arange(root.size))
    for node in tree.nodes():
        if node.children:
            kids = np.sort(np.concatenate([c.members for c in node.children]))
            assert np.array_equal(kids, node.members)
            assert all(c.size < node.size for c in node.children)
            assert node.K0 >= 2
        else:
            ok = (node.p_value is not None and node.p_value > p_stop) or node.giant_size <= size_stop
            assert ok or node.tags


def test_tree_clique_is_single_leaf():
    tree = build_tree(complete_graph(50), k0_schedule=3)
    assert len(tree.leaves()) == 1
    assert tree.root.is_leaf and "size-stop" in tree.root.tags and tree.root.p_value is None


def test_tree_three_blocks_and_invariants():
    g, labels = three_block_graph(0)
    tree = build_tree(g, k0_schedule=3, size_stop=100)
    check_tree_invariants(tree, 1e-3, 100)
    assert tree.root.K0 == 3 and tree.root.p_value is None
    assert [c.label for c in tree.root.children] == ["C1", "C2", "C3"]
    assert adjusted_rand_index(labels, tree.leaf_labels()) > 0.95
    for leaf in tree.leaves():
        assert leaf.p_value > 1e-3
        assert set(leaf.annotations) == {"top_degree", "top_betweenness", "top_closeness", "centrality_scope"}
        deg = induced_subgraph(g, leaf.members).degrees()
        top = leaf.annotations["top_degree"][0]
        assert deg[list(leaf.members).index(g.index_of(top))] == deg.max()


def test_tree_is_deterministic_and_round_trips(tmp_path):
    g, _ = three_block_graph(1)
    t1 = build_tree(g, k0_schedule=3, size_stop=100, seed=4)
    t2 = build_tree(g, k0_schedule=3, size_stop=100, seed=4)
    assert t1.to_json() == t2.to_json()
    write_tree(t1, tmp_path / "tree.json")
    back = read_tree(tmp_path / "tree.json")
    assert back.to_json() == t1.to_json()
    assert np.array_equal(back.leaf_labels(), t1.leaf_labels())
    assert "C1 size=" in t1.to_text()


def test_tree_overrides_and_schedule():
    g, _ = three_block_graph(2)
    t = build_tree(g, k0_schedule=2, overrides={"root": 3}, size_stop=100, annotate_leaves=False)
    assert t.root.K0 == 3
    t = build_tree(g, k0_schedule=[3, 2], size_stop=100, annotate_leaves=False)
    assert t.root.K0 == 3
    seen = []
    build_tree(g, k0_schedule=lambda label, depth: seen.append((label, depth)) or 3,
               size_stop=100, annotate_leaves=False)
    assert seen[0] == ("root", 0)


def test_tree_degenerate_split(monkeypatch):
    g, _ = three_block_graph(3)
    monkeypatch.setattr(tree_mod, "modified_score_cluster", lambda sub, K0, **kw: np.zeros(sub.n, int))
    t = build_tree(g, k0_schedule=4, annotate_leaves=False)
    assert t.root.is_leaf and "degenerate-split" in t.root.tags


def test_tree_empty_part_retries_smaller_k(monkeypatch):
    g, _ = three_block_graph(3)
    calls = []
    real = tree_mod.modified_score_cluster

    def fake(sub, K0, **kw):
        calls.append(K0)
        if K0 == 4:
            return np.arange(sub.n) % 3
        return real(sub, K0, **kw)
    monkeypatch.setattr(tree_mod, "modified_score_cluster", fake)
    t = build_tree(g, k0_schedule=4, size_stop=100, annotate_leaves=False)
    assert calls[:2] == [4, 3] and t.root.K0 == 3


def test_tree_residue_leaf():
    g, _ = three_block_graph(4)
    A = g.adjacency.tolil()
    A.resize((g.n + 3, g.n + 3))
    A[g.n, g.n + 1] = A[g.n + 1, g.n] = 1
    g2 = Graph(A.tocsr())
    with pytest.warns(UserWarning, match="disconnected"):
        t = build_tree(g2, k0_schedule=3, size_stop=100, annotate_leaves=False)
    res = t.find("Cr")
    assert "residue" in res.tags and res.members.tolist() == [g.n, g.n + 1, g.n + 2]
    check_tree_invariants(t, 1e-3, 100)


def test_tree_planted_hierarchy_structure():
    g, labels = planted_hierarchy(0)
    g, keep = giant_component(g)
    t = build_tree(g, k0_schedule=2, annotate_leaves=False)
    assert len(t.leaves()) == 4
    assert adjusted_rand_index(labels[keep], t.leaf_labels()) > 0.9
    assert all(c.p_value < 1e-3 for c in t.root.children)


# -- research map ---------------------------------------------------------------

def test_research_map_L_equals_n():
    rng = np.random.default_rng(0)
    pts = rng.normal(size=(12, 2))
    e = Embedding(pts, np.ones(12, bool), 3)
    m = research_map(e, np.eye(3, 2), L=12, seed=1)
    assert m.objective == pytest.approx(0.0, abs=1e-24)
    assert sorted(m.labels.tolist()) == list(range(12))


def test_research_map_planted_blobs(tmp_path):
    rng = np.random.default_rng(3)
    gx, gy = np.meshgrid(np.arange(5), np.arange(3))
    centers = np.c_[gx.ravel(), gy.ravel()] * 2.0 + rng.uniform(-0.2, 0.2, (15, 2))
    truth = np.repeat(np.arange(15), 20)
    pts = centers[truth] + rng.normal(scale=0.05, size=(300, 2))
    valid = np.ones(302, bool)
    valid[-2:] = False
    coords = np.vstack([pts, np.full((2, 2), np.nan)])
    deg = np.arange(302.0)
    e = Embedding(coords, valid, 3)
    m = research_map(e, np.eye(3, 2), L=15, seed=0, degrees=deg)
    assert np.all(m.labels[-2:] == -1)
    assert adjusted_rand_index(truth, m.labels[:300]) == 1.0
    assert np.array_equal(m.assign(pts), m.labels[:300])
    for k in range(15):
        mem = np.flatnonzero(m.labels == k)
        assert m.top_members[k] == tuple(sorted(mem, reverse=True)[:5])
    write_research_map(m, tmp_path / "map.csv")
    back = read_research_map(tmp_path / "map.csv")
    assert np.allclose(back["centers"], m.centers) and back["sizes"].tolist() == m.sizes.tolist()
    assert back["vertices"].shape == (3, 2)
    with pytest.raises(ValueError):
        research_map(e, np.eye(3, 2), L=1)


# -- trajectories and diversity ------------------------------------------------

def test_single_window_has_no_metrics():
    g, _ = three_block_graph(0, n=300)
    with pytest.warns(UserWarning, match="diversity undefined for single window"):
        ts = trajectories([g], K=3)
    assert ts.E is None and ts.M is None and ts.T == 1
    with pytest.raises(ValueError, match="single window"):
        diversity_report(ts)


def test_identical_windows_give_zero_metrics():
    g, _ = three_block_graph(0, n=300)
    ts = trajectories([g, g, g], K=3)
    e = ts.eligible
    assert e.any()
    assert np.all(ts.E[e] == 0) and np.all(ts.M[e] == 0)
    assert np.all(np.isnan(ts.E[~e]))
    rows = diversity_report(ts)
    assert not any(r.SP or r.SnP for r in rows)


def test_constant_population_trajectories():
    p = random_dynamic_params(3, 1, 200, seed=5)
    dyn = DynamicDCMMParams(p.P, p.thetas * 4, p.Pis * 4)
    embs, _ = population_dynamic_embed(dyn)
    ts = TrajectorySet.from_embeddings(embs)
    assert np.abs(ts.E).max() < 1e-10 and np.abs(ts.M).max() < 1e-10


def test_trajectory_mismatch_and_t0():
    g, _ = three_block_graph(0, n=300)
    h = induced_subgraph(g, np.arange(200))
    with pytest.raises(ValueError, match="node count"):
        trajectories([g, h])
    with pytest.raises(ValueError, match="t0"):
        trajectories([g, g], t0=3)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 30), st.integers(2, 8), st.integers(0, 10_000))
def test_M_at_least_E(n, T, seed):
    rng = np.random.default_rng(seed)
    knots = rng.normal(size=(n, T, 2))
    elig = rng.random(n) < 0.8
    E, M = diversity_metrics(knots, elig)
    assert np.all(M[elig] >= E[elig])
    assert np.all(np.isnan(E[~elig]))


def test_diversity_flags_and_round_trip(tmp_path):
    n = 20
    knots = np.zeros((n, 3, 2))
    knots[:, 1, 0] = np.linspace(0, 1, n)       # excursion
    knots[:, 2, 0] = np.linspace(0, 1, n) ** 2  # final displacement
    knots[0, 1, 0] = 5.0                        # big excursion, back home
    ts = TrajectorySet.from_embeddings([Embedding(knots[:, t], np.ones(n, bool), 3) for t in range(3)])
    rows = diversity_report(ts)
    assert rows[0].node_id == n - 1 and rows[0].SP
    snp = [r.node_id for r in rows if r.SnP]
    assert snp == [0]
    assert all(r.gap >= 0 for r in rows)
    write_diversity(rows, tmp_path / "d.csv")
    assert read_diversity(tmp_path / "d.csv") == rows
    top = diversity_report(ts, top_n=5, degrees=np.arange(n))
    assert sorted(r.node_id for r in top) == list(range(15, 20))
    with pytest.raises(ValueError):
        diversity_report(ts, top_n=5)


def test_trajectory_csv_round_trip(tmp_path):
    g, _ = three_block_graph(0, n=300)
    h, _ = three_block_graph(1, n=300)
    ts = trajectories([g, h], K=3)
    write_trajectories(ts, tmp_path / "t.csv")
    back = read_trajectories(tmp_path / "t.csv")
    assert back.node_ids == ts.node_ids
    assert np.array_equal(back.valid, ts.valid) and np.array_equal(back.always_giant, ts.always_giant)
    assert np.allclose(back.knots, ts.knots, equal_nan=True)
    assert np.allclose(back.E, ts.E, equal_nan=True)


# -- ego -----------------------------------------------------------------------------

def test_ego_few_coauthors_insufficient():
    g = Graph.from_edges(5, [(0, 1), (0, 2), (0, 3), (3, 4)])
    r = ego_diversity(g, 0)
    assert r.status == "insufficient" and r.n_ego == 4 and r.p_value is None


def test_ego_star_matches_enumeration():
    g = Graph.from_edges(12, [(0, i) for i in range(1, 11)] + [(10, 11)])
    r = ego_diversity(g, 0)
    star = Graph.from_edges(11, [(0, i) for i in range(1, 11)])
    assert r.status == "ok" and r.n_ego == 11
    assert r.psi == pytest.approx(sgnq_bruteforce(star), abs=1e-12)


def test_complete_egos_never_reject():
    n_cliques, size = 100, 30
    blocks = [complete_graph(size).adjacency] * n_cliques
    from scipy.sparse import block_diag
    g = Graph(block_diag(blocks).tocsr())
    rows = ego_diversity_batch(g, [k * size for k in range(n_cliques)])
    assert all(r.status == "ok" and r.n_ego == size for r in rows)
    assert min(r.p_value for r in rows) > 1e-3


def test_ego_batch_workers_and_errors(tmp_path):
    g, _ = three_block_graph(0, n=300)
    authors = list(range(0, 300, 15))
    one = ego_diversity_batch(g, authors, drill_p=0.5, workers=1)
    two = ego_diversity_batch(g, authors, drill_p=0.5, workers=2)
    assert one == two
    with pytest.raises(GraphError):
        ego_diversity_batch(g, [0, 10_000])
    write_ego(one, tmp_path / "ego.csv")
    assert read_ego(tmp_path / "ego.csv") == one


def test_ego_drill_down_splits_two_groups():
    # center joined to two dense groups with a few links between them
    rng = np.random.default_rng(0)
    edges = [(0, i) for i in range(1, 41)]
    for i in range(1, 41):
        for j in range(i + 1, 41):
            if rng.random() < (0.6 if (i <= 20) == (j <= 20) else 0.03):
                edges.append((i, j))
    g = Graph.from_edges(41, edges)
    r = ego_diversity(g, 0, drill_p=1e-3)
    assert r.p_value < 1e-3 and len(r.groups) == 2
    assert sorted(map(sorted, r.groups)) == [list(range(1, 21)), list(range(21, 41))]


def citer_corpus(seed, N=60, pool=400, q=0.03, qa=0.5, split=False):
    """Center 1 and citers 2..N+1 citing third authors from a shared pool.

    With ``split`` the citers fall in two halves citing disjoint halves of the pool.
    """
    rng = np.random.default_rng(seed)
    n_auth = 1 + N + pool
    f, t = [], []
    for a in range(1, N + 2):
        if a == 1:
            tg = np.flatnonzero(rng.random(pool) < qa)
        elif split:
            half = (a % 2) * (pool // 2)
            tg = half + np.flatnonzero(rng.random(pool // 2) < 2 * q)
        else:
            tg = np.flatnonzero(rng.random(pool) < q)
        f += [a] * tg.size
        t += (tg + N + 2).tolist()
    ids = np.arange(1, n_auth + 1)
    ap = AuthorPaperTable(ids, ids, np.full(n_auth, 1995), np.array(["J"] * n_auth, dtype=object))
    f, t = np.array(f), np.array(t)
    ct = CitationTable(f, t, np.full(f.size, 1995), np.full(f.size, 1990), np.zeros(f.size, bool))
    return ap, ct


def test_citer_one_community_null_band():
    psi = np.array([citer_citee_scores(*citer_corpus(s), [1])[0].psi_citer for s in range(60)])
    assert abs(psi.mean()) < 0.5
    assert np.mean(psi > 1.645) <= 0.1
    split = citer_citee_scores(*citer_corpus(0, split=True), [1])[0]
    assert split.psi_citer > 5


def test_citer_citee_sides_and_round_trip(tmp_path):
    ap, ct = citer_corpus(1)
    rows = citer_citee_scores(ap, ct, [1, 70])
    assert rows[0].status_citer == "ok" and rows[0].status_citee == "insufficient"
    assert rows[1].status_citer == "insufficient"
    with pytest.raises(GraphError):
        citer_citee_scores(ap, ct, [10_000])
    ci = CitationIndex(ap, ct)
    assert citer_citee_scores(ap, ct, [1, 70], index=ci) == rows
    write_citer_citee(rows, tmp_path / "cc.csv")
    assert read_citer_citee(tmp_path / "cc.csv") == rows


# -- sankey ----------------------------------------------------------------------

def test_sankey_identical_windows_diagonal(tmp_path):
    g, _ = three_block_graph(0, n=300)
    s = sankey([g, g, g], [3, 3, 3], seed=1)
    for t in range(2):
        assert all(a == b for a, b in s.flows[t])
    write_sankey(s, tmp_path / "s.csv")
    assert read_sankey(tmp_path / "s.csv") == s.flows


def planted_migration(seed, n=900, frac=0.1):
    labels0 = np.repeat(np.arange(3), n // 3)
    rng = np.random.default_rng(seed)
    labels1 = labels0.copy()
    move = rng.choice(n, int(frac * n), replace=False)
    labels1[move] = (labels0[move] + rng.integers(1, 3, move.size)) % 3
    P = np.full((3, 3), 0.05) + 0.95 * np.eye(3)
    th = rng.uniform(0.3, 0.6, n)
    gs = [sample_dcbm(DCBMParams(P, th, lab), seed + k) for k, lab in enumerate([labels0, labels1])]
    return gs, labels0, labels1, move


@pytest.mark.parametrize("seed", range(3))
def test_sankey_planted_migration(seed):
    gs, _, _, move = planted_migration(seed)
    s = sankey(gs, [3, 3], seed=0)
    src, dst, F = s.matrix(0)
    off = F.sum() - sum(c for (a, b), c in s.flows[0].items() if a == b)
    assert abs(off / len(s.V) - 0.1) < 0.03
    # conservation
    assert F.sum() == len(s.V)
    assert dict(zip(src, F.sum(axis=1))) == s.sizes(0)
    assert dict(zip(dst, F.sum(axis=0))) == s.sizes(1)


def test_sankey_outside_and_errors():
    g, _ = three_block_graph(0, n=300)
    A = g.adjacency.tolil()
    for j in g.neighbors(0):
        A[0, j] = A[j, 0] = 0
    h = Graph(A.tocsr(), g.node_ids)
    s = sankey([h, g, g], [3, 3, 3])
    assert 0 in s.V and s.assignments[0][0] == "O" and s.assignments[1][0] != "O"
    assert s.names[0]["O"] == "O1"
    s.rename(0, "C1", "theory")
    assert s.names[0]["C1"] == "theory"
    with pytest.raises(ValueError, match="at least 2"):
        sankey([g], [3])
    with pytest.raises(ValueError, match="one K"):
        sankey([g, g], [3])
    with pytest.raises(ValueError, match="share node ids"):
        sankey([g, Graph(g.adjacency, [f"x{i}" for i in range(g.n)])], [3, 3])
