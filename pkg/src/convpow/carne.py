"""Chebyshev transmutation for powers of banded Hermitian contractions and Carne-type bounds.

For a contraction M, Hermitian on l^2(pi), with spectrum in [a, 1], set
L = (2M - (1 + a) I) / (1 - a), s = (1 - a)/2 and M_k = I - (I - M)^k.  Then

    M_k^n = sum_m psi_{s,k}^{(n)}(m) T_{|m|}(L),

where psi_{s,k} = delta_0 - (delta_0 - beta_s)^{*k} and T_j are Chebyshev polynomials.

Kernel convention: (M f)(x) = sum_y M(x, y) f(y) and M(x, y) pi(x) = conj(M(y, x)) pi(y).
Under this convention |M_k^n(x, y)| <= (pi(y)/pi(x))^{1/2} for a contraction.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import sparse

from .zfun import power, psi

HERMITIAN_TOL = 1e-12
SPECTRUM_TOL = 1e-9


class SpectrumWarning(UserWarning):
    pass


class TruncationError(ValueError):
    pass


def _gershgorin(S: sparse.csr_matrix) -> tuple[float, float]:
    diag = S.diagonal().real
    radius = np.asarray(abs(S).sum(axis=1)).ravel() - np.abs(S.diagonal())
    return float(np.min(diag - radius)), float(np.max(diag + radius))


def _power_iteration_extremes(S: sparse.csr_matrix, steps: int = 200, seed: int = 42):
    rng = np.random.default_rng(seed)
    n = S.shape[0]

    def dominant(op):
        v = rng.standard_normal(n)
        lam = 0.0
        for _ in range(steps):
            w = op(v)
            lam = float(np.real(np.vdot(v, w)) / np.real(np.vdot(v, v)))
            nrm = np.linalg.norm(w)
            if nrm == 0:
                return 0.0
            v = w / nrm
        return lam

    shift = max(abs(x) for x in _gershgorin(S))
    top = dominant(lambda v: S @ v + shift * v) - shift
    bottom = -(dominant(lambda v: -(S @ v) + shift * v) - shift)
    return bottom, top


@dataclass(frozen=True, eq=False)
class BandedHermitian:
    """A banded operator on {0, ..., dim-1}, Hermitian in l^2(pi), spectrum in [a, 1].

    The metric is d(x, y) = ceil(|x - y| / band), so M(x, y) = 0 when d > 1.
    """

    matrix: sparse.csr_matrix
    pi: np.ndarray
    a: float = 0.0
    band: int = field(init=False)
    spectrum_bounds: tuple = field(init=False)
    certified: bool = field(init=False)

    def __post_init__(self):
        M = sparse.csr_matrix(self.matrix)
        pi = np.asarray(self.pi, dtype=float).ravel()
        n = M.shape[0]
        if M.shape != (n, n) or pi.shape != (n,):
            raise ValueError("matrix must be square and pi must match its size")
        if not np.all(pi > 0) or not np.all(np.isfinite(pi)):
            raise ValueError("pi must be positive")
        if not -1 <= self.a < 1:
            raise ValueError("need a in [-1, 1)")
        # M(x,y) pi(x) = conj(M(y,x)) pi(y)
        W = sparse.diags(pi) @ M
        asym = abs(W - W.conj().T).max() if W.nnz else 0.0
        if asym > HERMITIAN_TOL * max(1.0, abs(W).max()):
            raise ValueError(f"not Hermitian in l^2(pi): mismatch {asym:.3g}")
        coo = M.tocoo()
        band = int(np.max(np.abs(coo.row - coo.col))) if M.nnz else 1
        band = max(band, 1)
        sq = np.sqrt(pi)
        S = sparse.csr_matrix(sparse.diags(sq) @ M @ sparse.diags(1 / sq))
        # S and M are similar, so both sets of discs bound the same spectrum
        lo_s, hi_s = _gershgorin(S)
        lo_m, hi_m = _gershgorin(M)
        lo, hi = max(lo_s, lo_m), min(hi_s, hi_m)
        certified = lo >= self.a - SPECTRUM_TOL and hi <= 1 + SPECTRUM_TOL
        if not certified:
            warnings.warn("Gershgorin certificate failed; estimating extreme eigenvalues",
                          SpectrumWarning, stacklevel=2)
            lo, hi = _power_iteration_extremes(S)
            if lo < self.a - 1e-6 or hi > 1 + 1e-6:
                raise ValueError(f"spectrum estimate [{lo:.6g}, {hi:.6g}] not inside [{self.a}, 1]")
        object.__setattr__(self, "matrix", M)
        object.__setattr__(self, "pi", pi)
        object.__setattr__(self, "band", band)
        object.__setattr__(self, "spectrum_bounds", (lo, hi))
        object.__setattr__(self, "certified", certified)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def distance(self, x, y):
        return np.ceil(np.abs(np.asarray(x) - np.asarray(y)) / self.band).astype(int)

    def distance_matrix(self) -> np.ndarray:
        idx = np.arange(self.dim)
        return self.distance(idx[:, None], idx[None, :])

    def apply(self, v: np.ndarray) -> np.ndarray:
        return self.matrix @ v

    def apply_mk(self, v: np.ndarray, k: int) -> np.ndarray:
        """M_k v = v - (I - M)^k v."""
        w = v
        for _ in range(k):
            w = w - self.matrix @ w
        return v - w

    def pi_norm(self, v: np.ndarray) -> np.ndarray:
        """Weighted l^2 norms of the columns of ``v``."""
        v = v.reshape(self.dim, -1)
        return np.sqrt(np.sum(np.abs(v) ** 2 * self.pi[:, None], axis=0))

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    # -- constructors --------------------------------------------------------
    @classmethod
    def path_walk(cls, dim: int) -> "BandedHermitian":
        """Lazy simple walk on a path: 1/4 to each neighbour, 1/2 (3/4 at the ends) to stay."""
        if dim < 2:
            raise ValueError("dim must be at least 2")
        main = np.full(dim, 0.5)
        main[0] = main[-1] = 0.75
        off = np.full(dim - 1, 0.25)
        M = sparse.diags([off, main, off], [-1, 0, 1], format="csr")
        return cls(M, np.ones(dim), 0.0)

    @classmethod
    def identity(cls, dim: int) -> "BandedHermitian":
        return cls(sparse.identity(dim, format="csr"), np.ones(dim), 0.0)

    @classmethod
    def from_edges(cls, edges, dim: Optional[int] = None, a: Optional[float] = None):
        """Reversible walk M(x, y) = w_xy / pi(x) with pi(x) = sum_y w_xy.

        ``edges`` are (x, y, weight) triples on vertices 0..dim-1, each undirected
        edge listed once; (x, x, w) adds a loop.  ``a`` defaults to the
        Gershgorin lower bound of the symmetrised matrix, clipped to [-1, 1).
        """
        edges = [(int(x), int(y), float(w)) for x, y, w in edges]
        if not edges:
            raise ValueError("empty edge list")
        if any(w <= 0 for _, _, w in edges) or any(min(x, y) < 0 for x, y, _ in edges):
            raise ValueError("weights must be positive and vertices nonnegative")
        n = dim if dim is not None else 1 + max(max(x, y) for x, y, _ in edges)
        rows, cols, vals = [], [], []
        for x, y, w in edges:
            rows.append(x); cols.append(y); vals.append(w)
            if x != y:
                rows.append(y); cols.append(x); vals.append(w)
        Wm = sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))
        pi = np.asarray(Wm.sum(axis=1)).ravel()
        if np.any(pi <= 0):
            raise ValueError("isolated vertex")
        M = sparse.csr_matrix(sparse.diags(1 / pi) @ Wm)
        if a is None:
            sq = np.sqrt(pi)
            lo = max(_gershgorin(sparse.csr_matrix(sparse.diags(sq) @ M @ sparse.diags(1 / sq)))[0],
                     _gershgorin(M)[0])
            a = min(max(lo, -1.0), 1 - 1e-12)
        return cls(M, pi, a)


@dataclass(frozen=True)
class WalkParams:
    """Step parameter s = (1 - a)/2 of the lazy walk beta_s, with s < 2^{-1 + 1/k}."""

    s: float
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be a positive integer")
        if not 0 < self.s < 2 ** (-1 + 1 / self.k):
            raise ValueError(f"need 0 < s < 2^(-1+1/k) = {2 ** (-1 + 1 / self.k):.6g}")

    @property
    def a(self) -> float:
        return 1 - 2 * self.s

    @classmethod
    def for_operator(cls, M: BandedHermitian, k: int) -> "WalkParams":
        return cls((1 - M.a) / 2, k)


# -- Chebyshev ------------------------------------------------------------------

def chebyshev_Q(m: int, z):
    """T_{|m|}(z) by the three-term recurrence."""
    m = abs(int(m))
    if m > 10**6:
        raise ValueError("|m| must be at most 1e6")
    z = np.asarray(z, dtype=complex) if np.iscomplexobj(z) else np.asarray(z, dtype=float)
    prev, cur = np.ones_like(z), z
    if m == 0:
        return prev[()] if prev.ndim == 0 else prev
    for _ in range(m - 1):
        prev, cur = cur, 2 * z * cur - prev
    return cur[()] if np.ndim(cur) == 0 else cur


def _shifted_operator(M: BandedHermitian, a: float):
    if a >= 1:
        raise ValueError("invalid interval: a must be < 1")
    if a > M.a + 1e-12 and M.spectrum_bounds[0] < a - SPECTRUM_TOL:
        raise ValueError("spectrum not contained in [a, 1]")
    return lambda v: (2 * (M.matrix @ v) - (1 + a) * v) / (1 - a)


def shifted_cheb_apply(M: BandedHermitian, a: float, m: int, v: np.ndarray) -> np.ndarray:
    """T_{|m|}((2M - (1 + a) I)/(1 - a)) v."""
    L = _shifted_operator(M, a)
    m = abs(int(m))
    prev, cur = v, (L(v) if m else v)
    for _ in range(m - 1):
        prev, cur = cur, 2 * L(cur) - prev
    return cur


def transmutation_apply(M: BandedHermitian, params: WalkParams, n: int, v: np.ndarray) -> np.ndarray:
    """sum_m psi_{s,k}^{(n)}(m) T_{|m|}(L) v over the finite support of psi^{(n)}."""
    if n == 0:
        return v.copy()
    w = power(psi(params.s, params.k), n, "squaring")
    coef = w.to_dict()
    top = max(abs(x) for x in coef)
    L = _shifted_operator(M, params.a)
    out = coef.get(0, 0) * v
    prev, cur = v, L(v)
    for j in range(1, top + 1):
        c = coef.get(j, 0) + coef.get(-j, 0)
        if c:
            out = out + c * cur
        prev, cur = cur, 2 * L(cur) - prev
    return out if np.iscomplexobj(v) or np.iscomplexobj(M.matrix.data) else out.real


def direct_apply(M: BandedHermitian, k: int, n: int, v: np.ndarray) -> np.ndarray:
    for _ in range(n):
        v = M.apply_mk(v, k)
    return v


def transmutation_check(M: BandedHermitian, params: WalkParams, n: int,
                        probes: int = 20, seed: int = 42) -> float:
    """max over random probes of ||direct - transmutation||_pi / ||v||_pi."""
    if n < 0 or n > 200 or M.dim > 2001:
        raise ValueError("need 0 <= n <= 200 and dim <= 2001")
    if M.spectrum_bounds[0] < params.a - SPECTRUM_TOL:
        raise ValueError("spectrum not contained in [a, 1]")
    if n == 0:
        return 0.0
    rng = np.random.default_rng(seed)
    V = rng.standard_normal((M.dim, probes))
    if np.iscomplexobj(M.matrix.data):
        V = V + 1j * rng.standard_normal((M.dim, probes))
    lhs = direct_apply(M, params.k, n, V)
    rhs = transmutation_apply(M, params, n, V)
    return float(np.max(M.pi_norm(lhs - rhs) / M.pi_norm(V)))


def dense_mk_power(M: BandedHermitian, k: int, n: int) -> np.ndarray:
    """Dense oracle (I - (I - M)^k)^n by numpy matrix powers."""
    D = M.dense()
    I = np.eye(M.dim)
    Mk = I - np.linalg.matrix_power(I - D, k)
    return np.linalg.matrix_power(Mk, n)


def mk_power_matrix(M: BandedHermitian, k: int, n: int) -> np.ndarray:
    """M_k^n as a dense array, built by banded recurrences on the identity."""
    return direct_apply(M, k, n, np.eye(M.dim, dtype=M.matrix.dtype))


# -- bounds -------------------------------------------------------------------------

@dataclass(frozen=True)
class CarneReport:
    k: int
    c: float
    C_of_n: dict
    classical: Optional[dict]  # k = 1: max |M^n| (pi(x)/pi(y))^{1/2} e^{d^2/(2n)}
    locality_violations: int

    @property
    def spread(self) -> float:
        v = list(self.C_of_n.values())
        return max(v) / min(v)

    def to_dict(self) -> dict:
        return {"k": self.k, "c": self.c, "C_of_n": {str(n): v for n, v in self.C_of_n.items()},
                "classical": None if self.classical is None
                else {str(n): v for n, v in self.classical.items()},
                "locality_violations": self.locality_violations}


def _weight_ratio(M: BandedHermitian) -> np.ndarray:
    # (pi(y)/pi(x))^{1/2} indexed [x, y]
    sq = np.sqrt(M.pi)
    return sq[None, :] / sq[:, None]


def _log_ratio_max(K: np.ndarray, log_bound: np.ndarray) -> float:
    a = np.abs(K)
    keep = a > 1e-290
    if not keep.any():
        return 0.0
    return float(np.exp(np.max(np.log(a[keep]) - log_bound[keep])))


def _exponent(d: np.ndarray, n: int, k: int, c: float) -> np.ndarray:
    return -c * (d / n ** (1 / (2 * k))) ** (2 * k / (2 * k - 1))


def carne_bound_report(M: BandedHermitian, k: int, n_list, c: float = 0.1) -> CarneReport:
    """Minimal C with |M_k^n(x,y)| <= C (pi(y)/pi(x))^{1/2} exp(-c (d/n^{1/(2k)})^{2k/(2k-1)})."""
    WalkParams.for_operator(M, k)
    d = M.distance_matrix()
    logw = np.log(_weight_ratio(M))
    out, classical, violations = {}, ({} if k == 1 else None), 0
    for n in n_list:
        n = int(n)
        K = mk_power_matrix(M, k, n)
        violations += int(np.count_nonzero(K[d > k * n]))
        out[n] = _log_ratio_max(K, logw + _exponent(d, n, k, c))
        if classical is not None:
            classical[n] = _log_ratio_max(K, logw - d.astype(float) ** 2 / (2 * n))
    return CarneReport(k, c, out, classical, violations)


@dataclass(frozen=True)
class RegularizedReport:
    k: int
    ell: int
    c: float
    C_of_n: dict  # pointwise display, constant K = C^ell
    annulus_of_n: dict  # annulus l^2 display at r = 2 n^{1/(2k)}, R = 4 r


def regularized_bound_report(M: BandedHermitian, k: int, ell: int, n_list,
                             c: float = 0.1, x: Optional[int] = None) -> RegularizedReport:
    """Minimal constants for |(I - M)^ell M_k^n| and for its annulus sum around ``x``."""
    if not 0 <= ell <= 3:
        raise ValueError("ell must be in 0..3")
    WalkParams.for_operator(M, k)
    d = M.distance_matrix()
    logw = np.log(_weight_ratio(M))
    x = M.dim // 2 if x is None else int(x)
    point, ann = {}, {}
    for n in n_list:
        n = int(n)
        K = mk_power_matrix(M, k, n)
        for _ in range(ell):
            K = K - M.matrix @ K
        decay = -ell / k * math.log(1 + n)
        point[n] = _log_ratio_max(K, logw + decay + _exponent(d, n, k, c))
        r = 2 * n ** (1 / (2 * k))
        sel = (d[x] > r) & (d[x] <= 4 * r)
        total = float(np.sum(np.abs(K[x, sel]) ** 2 * M.pi[sel]))
        scale = math.sqrt(M.pi[x]) * math.exp(decay + float(_exponent(np.array(r), n, k, c)))
        ann[n] = total / scale
    return RegularizedReport(k, ell, c, point, ann)


@dataclass(frozen=True)
class DiagReport:
    k: int
    x: int
    diagonal: dict
    ratios: dict

    @property
    def median(self) -> float:
        return float(np.median(list(self.ratios.values())))

    @property
    def ok(self) -> bool:
        med = self.median
        return med > 0 and all(0.1 * med <= r <= 10 * med for r in self.ratios.values())


def diag_lower_check(M: BandedHermitian, k: int, n_list, x: Optional[int] = None,
                     D: int = 1) -> DiagReport:
    """Ratios M_k^{2n}(x,x) [(1+n) log(1+n)]^{D/(2k)} / pi(x) along ``n_list``."""
    ns = sorted(int(n) for n in n_list)
    x = M.dim // 2 if x is None else int(x)
    nmax = ns[-1]
    margin = 4 * nmax ** (1 / (2 * k)) * math.log(nmax) if nmax > 1 else 4.0
    if min(x, M.dim - 1 - x) * M.band <= margin:
        raise TruncationError("truncation effect: center too close to the boundary")
    v = np.zeros(M.dim, dtype=M.matrix.dtype)
    v[x] = 1.0
    diag, ratios, step = {}, {}, 0
    for n in ns:
        while step < 2 * n:
            v = M.apply_mk(v, k)
            step += 1
        val = float(np.real(v[x]))
        diag[n] = val
        ratios[n] = float(val * ((1 + n) * math.log(1 + n)) ** (D / (2 * k)) / M.pi[x])
    return DiagReport(k, x, diag, ratios)
