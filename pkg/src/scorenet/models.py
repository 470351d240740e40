"""DCMM / DCBM / dynamic DCMM parameters, population matrices and samplers.

Random draws use numpy's Philox counter-based bit generator, keyed by the
caller's seed, so every sampler is a pure function of (params, seed).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .graph import Graph

_ROW_BLOCK = 512


class ModelError(ValueError):
    pass


def rng_from_seed(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(seed))


def _check_P(P: np.ndarray) -> np.ndarray:
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ModelError("P must be square")
    if not np.allclose(P, P.T, atol=0, rtol=0):
        raise ModelError("P must be symmetric")
    if not np.allclose(np.diag(P), 1.0):
        raise ModelError("P must have unit diagonal")
    if (P < 0).any():
        raise ModelError("P must be nonnegative")
    return P


def _check_theta_pi(theta, Pi, K):
    theta = np.asarray(theta, dtype=float)
    Pi = np.asarray(Pi, dtype=float)
    if theta.ndim != 1 or (theta <= 0).any():
        raise ModelError("theta must be a positive vector")
    if Pi.shape != (theta.size, K):
        raise ModelError(f"Pi must be {theta.size}x{K}, got {Pi.shape}")
    if (Pi < 0).any() or not np.allclose(Pi.sum(axis=1), 1.0, atol=1e-12):
        raise ModelError("rows of Pi must lie on the simplex")
    return theta, Pi


@dataclass(frozen=True)
class DCMMParams:
    """Degree-corrected mixed membership: Omega = Theta Pi P Pi' Theta."""

    P: np.ndarray
    theta: np.ndarray
    Pi: np.ndarray

    def __post_init__(self):
        P = _check_P(self.P)
        theta, Pi = _check_theta_pi(self.theta, self.Pi, P.shape[0])
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "Pi", Pi)

    @property
    def n(self) -> int:
        return self.theta.size

    @property
    def K(self) -> int:
        return self.P.shape[0]


@dataclass(frozen=True)
class DCBMParams:
    """Degree-corrected block model with hard labels in ``0..K-1``."""

    P: np.ndarray
    theta: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        P = _check_P(self.P)
        labels = np.asarray(self.labels, dtype=np.int64)
        theta = np.asarray(self.theta, dtype=float)
        if labels.shape != theta.shape:
            raise ModelError("labels and theta lengths differ")
        if labels.size and (labels.min() < 0 or labels.max() >= P.shape[0]):
            raise ModelError("label out of range")
        if (theta <= 0).any():
            raise ModelError("theta must be positive")
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.theta.size

    @property
    def K(self) -> int:
        return self.P.shape[0]

    def as_dcmm(self) -> DCMMParams:
        Pi = np.zeros((self.n, self.K))
        Pi[np.arange(self.n), self.labels] = 1.0
        return DCMMParams(self.P, self.theta, Pi)


@dataclass(frozen=True)
class DynamicDCMMParams:
    """Shared P with per-window (theta_t, Pi_t)."""

    P: np.ndarray
    thetas: tuple
    Pis: tuple
    windows: tuple = field(init=False, repr=False)

    def __post_init__(self):
        if len(self.thetas) != len(self.Pis) or not self.thetas:
            raise ModelError("need matching, nonempty theta/Pi sequences")
        wins = tuple(DCMMParams(self.P, th, pi) for th, pi in zip(self.thetas, self.Pis))
        if len({w.n for w in wins}) != 1:
            raise ModelError("all windows must have the same node count")
        object.__setattr__(self, "P", wins[0].P)
        object.__setattr__(self, "thetas", tuple(w.theta for w in wins))
        object.__setattr__(self, "Pis", tuple(w.Pi for w in wins))
        object.__setattr__(self, "windows", wins)

    @property
    def T(self) -> int:
        return len(self.windows)

    @property
    def n(self) -> int:
        return self.windows[0].n

    @property
    def K(self) -> int:
        return self.P.shape[0]


def omega(params) -> np.ndarray:
    """Dense population matrix Omega(i, j) = theta_i theta_j pi_i' P pi_j.

    The diagonal is kept (it enters the population eigen-decomposition) and
    nothing is clipped.
    """
    if isinstance(params, DCBMParams):
        params = params.as_dcmm()
    X = params.theta[:, None] * params.Pi
    Om = X @ params.P @ X.T
    return (Om + Om.T) / 2


def _sample_upper(X: np.ndarray, P: np.ndarray, rng: np.random.Generator) -> Graph:
    n = X.shape[0]
    rows, cols = [], []
    XP = X @ P
    for start in range(0, n, _ROW_BLOCK):
        stop = min(n, start + _ROW_BLOCK)
        prob = XP[start:stop] @ X.T
        r, c = np.triu_indices(stop - start, k=1, m=n - start)
        c = c + start
        r = r + start
        p = prob[r - start, c]
        if p.size and p.max() > 1.0 + 1e-12:
            raise ModelError(f"edge probability {p.max():.4g} exceeds 1")
        hit = rng.random(p.size) < p
        rows.append(r[hit])
        cols.append(c[hit])
    r = np.concatenate(rows) if rows else np.zeros(0, np.int64)
    c = np.concatenate(cols) if cols else np.zeros(0, np.int64)
    data = np.ones(2 * r.size)
    adj = sp.csr_matrix((data, (np.r_[r, c], np.r_[c, r])), shape=(n, n))
    return Graph(adj, check=False)


def sample_dcmm(params: DCMMParams, seed) -> Graph:
    """Independent Bernoulli upper triangle with success probabilities Omega."""
    X = params.theta[:, None] * params.Pi
    return _sample_upper(X, params.P, rng_from_seed(seed))


def sample_dcbm(params: DCBMParams, seed) -> Graph:
    return sample_dcmm(params.as_dcmm(), seed)


def sample_dynamic_dcmm(params: DynamicDCMMParams, seed) -> list[Graph]:
    """Independent draws per window; window ``t`` uses stream ``(seed, t)``."""
    if params.T == 1:
        return [sample_dcmm(params.windows[0], seed)]
    if isinstance(seed, np.random.Generator):
        return [sample_dcmm(w, seed) for w in params.windows]
    base = np.random.SeedSequence(seed)
    out = []
    for w, child in zip(params.windows, base.spawn(params.T)):
        out.append(sample_dcmm(w, np.random.Generator(np.random.Philox(child))))
    return out


# -- parameter files --------------------------------------------------------

def random_memberships(n: int, K: int, rng, *, alpha=1.0, pure_fraction=0.0) -> np.ndarray:
    """Dirichlet(alpha) memberships with ``pure_fraction`` of nodes pure per community."""
    rng = rng_from_seed(rng)
    alpha = np.broadcast_to(np.asarray(alpha, dtype=float), (K,))
    Pi = rng.dirichlet(alpha, size=n)
    n_pure = int(round(pure_fraction * n))
    if n_pure * K > n:
        raise ModelError("pure fractions exceed 1")
    for k in range(K):
        Pi[k * n_pure:(k + 1) * n_pure] = np.eye(K)[k]
    return Pi


def read_param_file(path, seed=0) -> DCMMParams:
    """Parse a plain-text ``key = value`` DCMM parameter file.

    Keys::

        n = 300
        K = 2
        P = 1 0.1; 0.1 1          # rows separated by ';'
        theta = uniform 0.3 1     # or: theta = 0.5 0.7 ... (n values)
        pi = dirichlet 1 1        # or: pi = labels 0 0 1 ... / pi = balanced
        pure_fraction = 0.1       # used with dirichlet
        theta_scale = 1.0         # optional multiplier

    Random draws use ``seed``. Lines starting with ``#`` are ignored.
    """
    kv = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ModelError(f"{path}:{lineno}: expected key = value")
            k, v = (s.strip() for s in line.split("=", 1))
            kv[k] = v
    known = {"n", "K", "P", "theta", "pi", "pure_fraction", "theta_scale"}
    unknown = set(kv) - known
    if unknown:
        raise ModelError(f"unknown parameter keys: {sorted(unknown)}")
    rng = rng_from_seed(seed)
    n, K = int(kv["n"]), int(kv["K"])
    P = np.array([[float(x) for x in row.split()] for row in kv["P"].split(";")])
    th = kv.get("theta", "uniform 1 1").split()
    if th[0] == "uniform":
        theta = rng.uniform(float(th[1]), float(th[2]), size=n)
    else:
        theta = np.array([float(x) for x in th])
    theta = theta * float(kv.get("theta_scale", 1.0))
    pi = kv.get("pi", "balanced").split()
    if pi[0] == "dirichlet":
        alpha = [float(x) for x in pi[1:]] or [1.0]
        Pi = random_memberships(n, K, rng, alpha=alpha if len(alpha) > 1 else alpha[0],
                                pure_fraction=float(kv.get("pure_fraction", 0.0)))
    elif pi[0] == "labels":
        labels = np.array([int(x) for x in pi[1:]])
        Pi = np.eye(K)[labels]
    elif pi[0] == "balanced":
        Pi = np.eye(K)[np.arange(n) * K // n]
    else:
        raise ModelError(f"unknown pi source {pi[0]!r}")
    return DCMMParams(P, theta, Pi)
