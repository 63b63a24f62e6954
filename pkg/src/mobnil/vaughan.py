"""Vaughan's identity: Type I / Type II pieces of E_{N<n<=2N} mu(n) conj(f(n)).

With a_d = sum_{bc=d, b<=U, c<=V} mu(b) mu(c) and b_d = sum_{c|d, c>V} mu(c),

    E mu conj(f) = -T_I + T_II,
    T_I  = (1/N) sum_{d<=UV} a_d sum_{N/d<w<=2N/d} conj f(dw),
    T_II = (1/N) sum_{V<d<=2N/U} b_d sum_{max(U,N/d)<w<=2N/d} mu(w) conj f(dw).

Functions f are passed as tables indexed by n (length >= 2N+1) or as
callables on integer arrays; batches of f are rows of a 2-d table.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from mobnil.errors import CapacityError, ParameterError, RangeError
from mobnil.numerics import pmap
from mobnil.sieve import MobiusTable

GRAM_CAP = 10 ** 4


@dataclass(frozen=True)
class VaughanParams:
    N: int
    U: int | None = None
    V: int | None = None

    def __post_init__(self):
        if self.N < 1:
            raise ParameterError("N must be positive")
        root = integer_cbrt(self.N)
        if self.U is None:
            object.__setattr__(self, "U", root)
        if self.V is None:
            object.__setattr__(self, "V", root)
        if self.U < 1 or self.V < 1:
            raise ParameterError("U and V must be positive")
        if self.U * self.V > self.N:
            raise ParameterError("need U*V <= N")


def integer_cbrt(n: int) -> int:
    r = int(round(n ** (1 / 3)))
    while r ** 3 > n:
        r -= 1
    while (r + 1) ** 3 <= n:
        r += 1
    return r


def _divisors(d: int) -> list:
    small = [k for k in range(1, math.isqrt(d) + 1) if d % k == 0]
    return sorted(set(small + [d // k for k in small]))


def _mu(n: int) -> int:
    out, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            out = -out
        p += 1
    return -out if n > 1 else out


def coeff_a(d: int, U: int, V: int) -> int:
    """sum over factorizations d = bc with b <= U, c <= V of mu(b) mu(c)."""
    if d < 1:
        raise RangeError("d must be positive")
    return sum(_mu(b) * _mu(d // b) for b in _divisors(d) if b <= U and d // b <= V)


def coeff_b(d: int, V: int) -> int:
    """sum of mu(c) over divisors c > V of d."""
    if d < 1:
        raise RangeError("d must be positive")
    return sum(_mu(c) for c in _divisors(d) if c > V)


def coeff_a_table(limit: int, U: int, V: int, mu: np.ndarray) -> np.ndarray:
    """a_d for d <= limit by placing mu(b) mu(c) at every product bc."""
    a = np.zeros(limit + 1, dtype=np.int64)
    for b in range(1, min(U, limit) + 1):
        if mu[b] == 0:
            continue
        c = np.arange(1, min(V, limit // b) + 1)
        np.add.at(a, b * c, int(mu[b]) * mu[c].astype(np.int64))
    return a


def coeff_b_table(limit: int, V: int, mu: np.ndarray) -> np.ndarray:
    """b_d = [d = 1] - sum_{c | d, c <= V} mu(c), since all divisors of d sum to [d = 1]."""
    b = np.zeros(limit + 1, dtype=np.int64)
    b[1] = 1
    for c in range(1, min(V, limit) + 1):
        if mu[c]:
            b[c::c] -= int(mu[c])
    b[0] = 0
    return b


def tabulate(f, n_max: int) -> np.ndarray:
    """f as a complex table indexed by 0..n_max (entry 0 unused)."""
    if callable(f):
        n = np.arange(n_max + 1, dtype=np.int64)
        vals = np.asarray(f(n), dtype=np.complex128)
        return np.broadcast_to(vals, n.shape).copy() if vals.ndim == 0 else vals
    arr = np.asarray(f, dtype=np.complex128)
    if arr.shape[-1] < n_max + 1:
        raise RangeError(f"table covers n <= {arr.shape[-1] - 1}, need {n_max}")
    return arr[..., :n_max + 1]


@dataclass
class VaughanDecomposition:
    t_one: complex
    t_two: complex
    lhs: complex
    residual: float

    def to_dict(self) -> dict:
        return {"t_one": [self.t_one.real, self.t_one.imag], "t_two": [self.t_two.real, self.t_two.imag],
                "lhs": [self.lhs.real, self.lhs.imag], "residual": self.residual}


def _check_table(params: VaughanParams, mobius: MobiusTable):
    if mobius.n_max < 2 * params.N:
        raise RangeError(f"Möbius table reaches {mobius.n_max}, need {2 * params.N}")


def _type_one(fc: np.ndarray, N: int, a: np.ndarray, ds) -> np.ndarray:
    out = np.zeros(fc.shape[:-1], dtype=np.complex128)
    for d in ds:
        if a[d]:
            start = (N // d + 1) * d
            out = out + a[d] * fc[..., start:2 * N + 1:d].sum(axis=-1)
    return out


def _type_two(fc: np.ndarray, N: int, U: int, b: np.ndarray, mu: np.ndarray, ds) -> np.ndarray:
    out = np.zeros(fc.shape[:-1], dtype=np.complex128)
    for d in ds:
        if not b[d]:
            continue
        lo = max(U, N // d) + 1  # w > max(U, N/d)
        hi = 2 * N // d
        if hi < lo:
            continue
        w = np.arange(lo, hi + 1)
        out = out + b[d] * (fc[..., d * lo:d * hi + 1:d] @ mu[w].astype(np.float64))
    return out


def _blocks(lo: int, hi: int, count: int) -> list:
    step = max(1, -(-(hi - lo + 1) // count))
    return [range(s, min(s + step, hi + 1)) for s in range(lo, hi + 1, step)]


def decompose(f, params: VaughanParams, mobius: MobiusTable, workers=1) -> VaughanDecomposition:
    """T_I, T_II and the left side for a single f."""
    out = decompose_many(np.atleast_2d(tabulate(f, 2 * params.N)) if not callable(f)
                         else tabulate(f, 2 * params.N)[None, :], params, mobius, workers)
    return out[0]


def decompose_many(F: np.ndarray, params: VaughanParams, mobius: MobiusTable, workers=1) -> list:
    """Decomposition for each row of F (rows indexed by n = 0..2N)."""
    _check_table(params, mobius)
    N, U, V = params.N, params.U, params.V
    F = np.atleast_2d(np.asarray(F, dtype=np.complex128))
    if F.shape[1] < 2 * N + 1:
        raise RangeError("table too short for 2N")
    fc = np.conj(F[:, :2 * N + 1])
    mu = mobius.values
    a = coeff_a_table(U * V, U, V, mu)
    top = 2 * N // U
    b = coeff_b_table(max(top, 1), V, mu)
    # fixed blocks of d, merged in order, so the result is independent of workers
    one_blocks = _blocks(1, U * V, 8)
    two_blocks = _blocks(V + 1, top, 8) if top > V else []
    t1 = sum(pmap(lambda r: _type_one(fc, N, a, r), one_blocks, workers),
             np.zeros(F.shape[0], dtype=np.complex128)) / N
    t2 = sum(pmap(lambda r: _type_two(fc, N, U, b, mu, r), two_blocks, workers),
             np.zeros(F.shape[0], dtype=np.complex128)) / N
    lhs = (fc[:, N + 1:2 * N + 1] @ mu[N + 1:2 * N + 1].astype(np.float64)) / N
    res = np.abs(lhs + t1 - t2)
    return [VaughanDecomposition(complex(x), complex(y), complex(z), float(r))
            for x, y, z, r in zip(t1, t2, lhs, res)]


# --- identity bookkeeping -----------------------------------------------------

def sigma_parts(n: int, U: int, V: int) -> tuple:
    """(S1, S2, S3, S4): sums of mu(b) mu(c) over bc | n split by b <= U and c <= V."""
    parts = [0, 0, 0, 0]
    for m in _divisors(n):
        for b in _divisors(m):
            c = m // b
            term = _mu(b) * _mu(c)
            if term:
                parts[(b > U) + 2 * (c > V)] += term
    # index: 0 -> (i) b<=U,c<=V; 1 -> (ii) b>U,c<=V; 2 -> (iii) b<=U,c>V; 3 -> (iv)
    return tuple(parts)


@dataclass
class SigmaReport:
    checked: int
    failures: list  # n where S2 = S3 = -S1 fails
    small_n_exceptions: list  # n <= max(U, V), where the relation need not hold
    identity_failures: list  # n with mu(n) != -S1 + S4 among n > max(U, V)


def sigma_check(n_max: int, U: int, V: int) -> SigmaReport:
    """Verify S2 = S3 = -S1 and mu(n) = -S1 + S4 for n <= n_max.

    S2 = [n <= V] mu(n) - S1 and S3 = [n <= U] mu(n) - S1, so the relation
    is checked for n > max(U, V) and the small-n deviations are listed.
    """
    failures, small, ident = [], [], []
    for n in range(1, n_max + 1):
        s1, s2, s3, s4 = sigma_parts(n, U, V)
        ok = s2 == -s1 and s3 == -s1
        if n > max(U, V):
            if not ok:
                failures.append(n)
            if _mu(n) != -s1 + s4:
                ident.append(n)
        elif not ok:
            small.append(n)
    return SigmaReport(n_max, failures, small, ident)


# --- inverse theorem scan --------------------------------------------------------

@dataclass
class TypeIReport:
    D: int
    qualifying: list  # (d, |E f(dw)|)
    count: int
    count_threshold: float
    value_threshold: float

    @property
    def large(self) -> bool:
        return self.count >= self.count_threshold and self.count > 0


def dyadic_levels(lo: float, hi: float) -> list:
    """Powers of two D with lo <= D <= hi."""
    out, D = [], 1
    while D <= hi:
        if D >= lo:
            out.append(D)
        D *= 2
    return out


def inner_average(ft: np.ndarray, N: int, d: int) -> complex:
    """E_{N/d < w <= 2N/d} f(dw)."""
    start = (N // d + 1) * d
    vals = ft[start:2 * N + 1:d]
    return complex(vals.mean()) if vals.size else 0j


def type_i_scan(f, params: VaughanParams, delta: float) -> list:
    """Dyadic levels D <= UV with many d in (D, 2D] of large inner average."""
    N = params.N
    ft = tabulate(f, 2 * N)
    logn = math.log(N) if N > 1 else 1.0
    vthr = delta * logn ** -2.5
    out = []
    for D in dyadic_levels(1, params.U * params.V):
        qual = []
        for d in range(D + 1, min(2 * D, 2 * N) + 1):
            v = abs(inner_average(ft, N, d))
            if v >= vthr:
                qual.append((d, v))
        out.append(TypeIReport(D, qual, len(qual), delta ** 2 * D * logn ** -5, vthr))
    return out


def type_ii_box(f, D: int, W: int, exact_cap: int = GRAM_CAP) -> float:
    """E_{d,d'} E_{w,w'} f(dw) conj f(d'w) conj f(dw') f(d'w') over (D,2D] x (W,2W].

    With A[d, w] = f(dw), the sum is sum |G|^2 for the Gram matrix G = A A^H.
    """
    if D < 1 or W < 1:
        raise ParameterError("D and W must be positive")
    if D > exact_cap:
        raise CapacityError(f"D={D} exceeds {exact_cap}")
    d = np.arange(D + 1, 2 * D + 1, dtype=np.int64)
    w = np.arange(W + 1, 2 * W + 1, dtype=np.int64)
    prod = np.outer(d, w)
    A = np.asarray(f(prod), dtype=np.complex128) if callable(f) else tabulate(f, int(prod.max()))[prod]
    G = A @ A.conj().T
    return float((np.abs(G) ** 2).sum()) / (D * D * W * W)


@dataclass
class TypeIIReport:
    D: int
    W: int
    value: float
    threshold: float

    @property
    def large(self) -> bool:
        return self.value >= self.threshold


def type_ii_scan(f, params: VaughanParams, delta: float) -> list:
    N, U, V = params.N, params.U, params.V
    logn = math.log(N) if N > 1 else 1.0
    thr = delta ** 4 * logn ** -14
    out = []
    for D in dyadic_levels(V / 2, 4 * N / U):
        for W in dyadic_levels(N / (4 * D), 4 * N / D):
            out.append(TypeIIReport(D, W, type_ii_box(f, D, W), thr))
    return out


@dataclass
class DichotomyReport:
    correlation: complex
    branch: str  # "TypeI", "TypeII" or "none"
    reason: str
    type_i: list = field(default_factory=list)
    type_ii: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "correlation": [self.correlation.real, self.correlation.imag],
            "abs_correlation": abs(self.correlation),
            "branch": self.branch, "reason": self.reason,
            "type_i": [{"D": r.D, "count": r.count, "count_threshold": r.count_threshold,
                        "value_threshold": r.value_threshold, "large": r.large} for r in self.type_i],
            "type_ii": [{"D": r.D, "W": r.W, "value": r.value, "threshold": r.threshold,
                         "large": r.large} for r in self.type_ii],
        }


def inverse_dichotomy(f, params: VaughanParams, mobius: MobiusTable, delta: float) -> DichotomyReport:
    _check_table(params, mobius)
    N = params.N
    # Type II boxes reach dw <= 4 D W <= 16 N
    ft = tabulate(f, 16 * N)
    corr = complex((np.conj(ft[N + 1:2 * N + 1]) @ mobius.values[N + 1:2 * N + 1].astype(np.float64)) / N)
    if abs(corr) < delta:
        return DichotomyReport(corr, "none", "correlation below delta")
    t1 = type_i_scan(ft, params, delta)
    t2 = type_ii_scan(ft, params, delta)
    if any(r.large for r in t1):
        return DichotomyReport(corr, "TypeI", "a Type I level is large", t1, t2)
    if any(r.large for r in t2):
        return DichotomyReport(corr, "TypeII", "a Type II box is large", t1, t2)
    return DichotomyReport(corr, "none", "no branch at constant 1; implied constants not calibrated", t1, t2)
