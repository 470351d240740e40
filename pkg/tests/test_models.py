import numpy as np
import pytest

from scorenet.models import (DCBMParams, DCMMParams, DynamicDCMMParams, ModelError, omega, random_memberships,
                             read_param_file, rng_from_seed, sample_dcbm, sample_dcmm, sample_dynamic_dcmm)


def random_params(n, K, seed, theta=(0.2, 0.6)):
    rng = rng_from_seed(seed)
    B = rng.uniform(0.05, 0.4, (K, K))
    P = (B + B.T) / 2
    np.fill_diagonal(P, 1.0)
    return DCMMParams(P, rng.uniform(*theta, n), random_memberships(n, K, rng, alpha=0.7, pure_fraction=0.1))


class TestParams:
    @pytest.mark.parametrize("P", [
        [[1, 0.2], [0.3, 1]],
        [[0.9, 0.2], [0.2, 1]],
        [[1, -0.1], [-0.1, 1]],
    ])
    def test_bad_P(self, P):
        with pytest.raises(ModelError):
            DCMMParams(np.array(P, float), np.ones(2), np.eye(2))

    def test_bad_theta_and_pi(self):
        with pytest.raises(ModelError, match="theta"):
            DCMMParams(np.eye(2), np.array([1.0, 0.0]), np.eye(2))
        with pytest.raises(ModelError, match="simplex"):
            DCMMParams(np.eye(2), np.ones(2), np.array([[0.5, 0.4], [0, 1]]))

    def test_dynamic_windows(self):
        w = random_params(20, 2, 0)
        d = DynamicDCMMParams(w.P, [w.theta, w.theta * 0.5], [w.Pi, w.Pi])
        assert d.T == 2 and d.n == 20 and d.K == 2
        assert np.array_equal(d.windows[1].theta, w.theta * 0.5)


class TestOmega:
    def test_rank_one(self):
        Om = omega(DCMMParams(np.ones((1, 1)), np.full(5, 0.5), np.ones((5, 1))))
        assert np.allclose(Om, 0.25)

    def test_pure_nodes_block_formula(self):
        P = np.array([[1, 0.3], [0.3, 1]])
        th = np.array([0.5, 0.8, 0.4])
        labels = np.array([0, 1, 1])
        Om = omega(DCBMParams(P, th, labels))
        assert Om[0, 1] == pytest.approx(0.5 * 0.8 * 0.3)
        assert Om[1, 2] == pytest.approx(0.8 * 0.4)

    def test_matches_triple_loop(self):
        p = random_params(5, 3, 1)
        ref = np.zeros((5, 5))
        for i in range(5):
            for j in range(5):
                ref[i, j] = sum(p.theta[i] * p.theta[j] * p.Pi[i, k] * p.P[k, l] * p.Pi[j, l]
                                for k in range(3) for l in range(3))
        Om = omega(p)
        assert np.allclose(Om, ref, atol=1e-15)
        assert np.array_equal(Om, Om.T)

    def test_theta_scaling(self):
        p = random_params(30, 2, 2)
        q = DCMMParams(p.P, 1.7 * p.theta, p.Pi)
        assert np.allclose(omega(q), 1.7**2 * omega(p), rtol=1e-14)


class TestSampling:
    def test_probability_above_one(self):
        p = DCMMParams(np.eye(1), np.full(10, 1.5), np.ones((10, 1)))
        with pytest.raises(ModelError, match="exceeds 1"):
            sample_dcmm(p, 0)

    def test_zero_omega_gives_empty_graph(self):
        # singleton communities with P = I: every off-diagonal probability is 0
        g = sample_dcmm(DCMMParams(np.eye(4), np.ones(4), np.eye(4)), 0)
        assert g.n == 4 and g.edge_count == 0

    def test_seed_determinism_and_graph_invariants(self):
        p = random_params(150, 3, 3)
        a, b = sample_dcmm(p, 11), sample_dcmm(p, 11)
        assert a == b
        assert sample_dcmm(p, 12) != a
        A = a.to_dense()
        assert np.array_equal(A, A.T) and not np.diag(A).any() and a.is_binary

    def test_dcbm_equals_dcmm_encoding(self):
        P = np.array([[1, 0.2], [0.2, 1]])
        th = rng_from_seed(0).uniform(0.3, 0.9, 80)
        lab = np.arange(80) % 2
        assert sample_dcbm(DCBMParams(P, th, lab), 5) == sample_dcmm(DCMMParams(P, th, np.eye(2)[lab]), 5)

    def test_iid_bernoulli_case(self):
        n, p = 300, 0.1
        g = sample_dcbm(DCBMParams(np.eye(1), np.full(n, np.sqrt(p)), np.zeros(n, int)), 4)
        pairs = n * (n - 1) / 2
        se = np.sqrt(pairs * p * (1 - p))
        assert abs(g.edge_count - pairs * p) < 4 * se

    def test_edge_frequencies(self):
        p = random_params(200, 3, 5)
        Om = omega(p)
        reps = 5000
        rng = rng_from_seed(6)
        counts = np.zeros((200, 200))
        for _ in range(reps):
            counts += sample_dcmm(p, rng).to_dense()
        iu = np.triu_indices(200, 1)
        freq = counts[iu] / reps
        q = Om[iu]
        se = np.sqrt(q * (1 - q) / reps)
        assert np.mean(np.abs(freq - q) <= 3 * se) >= 0.99

    def test_dynamic_single_window_matches_static(self):
        p = random_params(60, 2, 7)
        d = DynamicDCMMParams(p.P, [p.theta], [p.Pi])
        assert sample_dynamic_dcmm(d, 9)[0] == sample_dcmm(p, 9)

    def test_dynamic_constant_windows_are_iid(self):
        p = random_params(100, 2, 8)
        d = DynamicDCMMParams(p.P, [p.theta] * 2, [p.Pi] * 2)
        e1, e2 = [], []
        for s in range(300):
            g1, g2 = sample_dynamic_dcmm(d, s)
            e1.append(g1.edge_count)
            e2.append(g2.edge_count)
        e1, e2 = np.array(e1, float), np.array(e2, float)
        expected = np.triu(omega(p), 1).sum()
        se = np.sqrt(e1.var() / 300)
        assert abs(e1.mean() - e2.mean()) < 4 * np.sqrt(2) * se
        assert abs(e1.mean() - expected) < 4 * se
        assert 0.6 < e1.var() / e2.var() < 1.6
        assert np.corrcoef(e1, e2)[0, 1] < 0.25

    def test_dynamic_degree_trace(self):
        n, K, T = 120, 2, 4
        rng = rng_from_seed(9)
        P = np.array([[1, 0.1], [0.1, 1]])
        theta = rng.uniform(0.3, 0.7, n)
        pure = np.eye(K)[np.arange(n) % K]
        Pis = [(1 - s) * pure + s * 0.5 for s in np.linspace(0, 0.8, T)]
        d = DynamicDCMMParams(P, [theta] * T, Pis)
        reps = 200
        deg = np.zeros((T, n))
        for s in range(reps):
            for t, g in enumerate(sample_dynamic_dcmm(d, s)):
                deg[t] += g.degrees()
        for t in range(T):
            Om = omega(d.windows[t])
            expected = Om.sum(axis=1) - np.diag(Om)
            assert abs(deg[t].sum() / reps - expected.sum()) < 0.02 * expected.sum()


class TestParamFile:
    def test_read(self, tmp_path):
        f = tmp_path / "p.txt"
        f.write_text("n = 30\nK = 2\nP = 1 0.1; 0.1 1\ntheta = uniform 0.2 0.4\n"
                     "pi = dirichlet 0.5\npure_fraction = 0.2  # six per community\n")
        p = read_param_file(f, seed=1)
        assert p.n == 30 and p.K == 2
        assert np.all((p.theta >= 0.2) & (p.theta <= 0.4))
        assert np.array_equal(p.Pi[:6], np.tile([1.0, 0.0], (6, 1)))
        assert read_param_file(f, seed=1).theta.tolist() == p.theta.tolist()

    def test_labels_and_unknown_key(self, tmp_path):
        f = tmp_path / "p.txt"
        f.write_text("n = 3\nK = 2\nP = 1 0; 0 1\ntheta = 0.5 0.5 0.5\npi = labels 0 1 1\n")
        assert read_param_file(f).Pi.argmax(axis=1).tolist() == [0, 1, 1]
        f.write_text("n = 3\nK = 2\nP = 1 0; 0 1\ncolour = red\n")
        with pytest.raises(ModelError, match="unknown"):
            read_param_file(f)
