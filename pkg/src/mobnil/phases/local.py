"""Phases on finite integer sets and their local polynomial structure.

A phase of local degree d has vanishing (d+1)-fold alternating sum
sum_eps (-1)^|eps| phi(n + eps.h) (mod 1) whenever all 2^(d+1) points lie in
the domain.  Configurations are described by a base point n and steps
h_1..h_{d+1}; changing the sign of a step only flips the sign of the sum, so
exhaustive enumeration restricts to 0 < h_1 <= ... <= h_{d+1}.
"""
from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from mobnil.circle import circle_norm, frac
from mobnil.errors import DomainError, ParameterError, ValidationError
from mobnil.phases.bohr import bohr_norm

EXHAUSTIVE_LIMIT = 64
DENSE_CAP = 1 << 26


@dataclass(frozen=True)
class TabulatedPhase:
    domain: np.ndarray  # sorted, unique int64
    values: np.ndarray  # circle values aligned with domain

    def __post_init__(self):
        if self.domain.shape != self.values.shape:
            raise ValidationError("domain and values differ in length")
        if self.domain.size > 1 and np.any(np.diff(self.domain) <= 0):
            raise ValidationError("domain must be strictly increasing")

    @classmethod
    def from_function(cls, domain, fn) -> "TabulatedPhase":
        dom = np.unique(np.asarray(domain, dtype=np.int64))
        return cls(dom, frac(np.asarray(fn(dom), dtype=np.float64)))

    @classmethod
    def from_dict(cls, table: dict) -> "TabulatedPhase":
        keys = sorted(table)
        return cls(np.array(keys, dtype=np.int64), frac(np.array([table[k] for k in keys], dtype=np.float64)))

    def __len__(self) -> int:
        return int(self.domain.size)

    @cached_property
    def _dense(self):
        """Position table over the domain's span, or None when that is too sparse."""
        if self.domain.size == 0:
            return None
        lo, hi = int(self.domain[0]), int(self.domain[-1])
        span = hi - lo + 1
        if span > DENSE_CAP or span > 64 * self.domain.size + (1 << 20):
            return None
        pos = np.full(span, -1, dtype=np.int64)
        pos[self.domain - lo] = np.arange(self.domain.size)
        return lo, pos

    def _positions(self, pts: np.ndarray) -> np.ndarray:
        """Index of each point in the domain, -1 when absent."""
        if self.domain.size == 0:
            return np.full(pts.shape, -1, dtype=np.int64)
        dense = self._dense
        if dense is not None:
            lo, pos = dense
            off = pts - lo
            ok = (off >= 0) & (off < pos.size)
            return np.where(ok, pos[np.where(ok, off, 0)], -1)
        idx = np.minimum(np.searchsorted(self.domain, pts), self.domain.size - 1)
        return np.where(self.domain[idx] == pts, idx, -1)

    def contains(self, pts) -> np.ndarray:
        return self._positions(np.asarray(pts, dtype=np.int64)) >= 0

    def __call__(self, pts):
        pts = np.asarray(pts, dtype=np.int64)
        idx = self._positions(pts)
        if np.any(idx < 0):
            missing = np.atleast_1d(pts)[np.atleast_1d(idx < 0)]
            raise DomainError(f"points outside the domain: {missing[:8].tolist()}")
        return self.values[idx]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("n,phi\n")
        for n, v in zip(self.domain, self.values):
            buf.write(f"{int(n)},{float(v)!r}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "TabulatedPhase":
        rows = list(csv.DictReader(io.StringIO(text)))
        return cls.from_dict({int(r["n"]): float(r["phi"]) for r in rows})


def _signs(k: int) -> np.ndarray:
    eps = np.array(list(itertools.product((0, 1), repeat=k)), dtype=np.int64)
    return eps, np.where(eps.sum(axis=1) % 2 == 0, 1.0, -1.0)


def config_points(n: np.ndarray, H: np.ndarray) -> np.ndarray:
    """All 2^k points n + eps.h for each configuration (rows)."""
    eps, _ = _signs(H.shape[1])
    return n[:, None] + H @ eps.T


def alternating_sums(phi: TabulatedPhase, n: np.ndarray, H: np.ndarray) -> np.ndarray:
    """Unreduced alternating sums over the given configurations."""
    _, sign = _signs(H.shape[1])
    vals = phi(config_points(n, H))
    return vals @ sign


def enumerate_configurations(phi: TabulatedPhase, k: int, chunk: int = 1 << 16):
    """All (n, h_1 <= ... <= h_k), h_i > 0, with every point in the domain."""
    S = phi.domain
    n = S.copy()
    H = np.zeros((S.size, 0), dtype=np.int64)
    for _ in range(k):
        new_n, new_H = [], []
        step = max(1, chunk // max(1, S.size))
        for start in range(0, n.size, step):
            cn, cH = n[start:start + step], H[start:start + step]
            pts = config_points(cn, cH) if cH.shape[1] else cn[:, None]
            steps = S[None, :] - cn[:, None]  # candidate h for each config
            ok = steps > 0
            if cH.shape[1]:
                ok &= steps >= cH[:, -1:]
            rows, cols = np.nonzero(ok)
            h = steps[rows, cols]
            shifted = pts[rows] + h[:, None]
            good = np.all(phi.contains(shifted), axis=1)
            rows, h = rows[good], h[good]
            new_n.append(cn[rows])
            new_H.append(np.column_stack([cH[rows], h]) if cH.shape[1] else h[:, None])
        n = np.concatenate(new_n) if new_n else np.zeros(0, np.int64)
        H = np.concatenate(new_H) if new_H else np.zeros((0, 1), np.int64)
    return n, H


def sample_configurations(phi: TabulatedPhase, k: int, budget: int, seed: int = 0,
                          candidates: int = 16, max_rounds: int = 1000):
    """Seeded sample of configurations with all points in the domain.

    Steps are added one at a time: each step is drawn as s - n for random
    s in the domain, retrying up to ``candidates`` times, so sparse domains
    such as Bohr sets still yield configurations.  Zero steps are skipped.
    """
    rng = np.random.default_rng(seed)
    S = phi.domain
    got_n, got_H, kept = [], [], 0
    batch = max(256, min(1 << 14, budget))
    for _ in range(max_rounds):
        if kept >= budget:
            break
        n = S[rng.integers(0, S.size, batch)]
        H = np.zeros((batch, 0), dtype=np.int64)
        for _ in range(k):
            pts = config_points(n, H) if H.shape[1] else n[:, None]
            h = S[rng.integers(0, S.size, (n.size, candidates))] - n[:, None]
            ok = (h != 0) & np.all(phi.contains(pts[:, None, :] + h[:, :, None]), axis=2)
            has = ok.any(axis=1)
            first = ok.argmax(axis=1)
            pick = h[np.arange(n.size), first]
            n, H = n[has], np.column_stack([H[has], pick[has]])
        got_n.append(n)
        got_H.append(H)
        kept += n.size
    if not got_n:
        return np.zeros(0, np.int64), np.zeros((0, k), np.int64)
    return np.concatenate(got_n)[:budget], np.concatenate(got_H)[:budget]


@dataclass
class LocalPolyReport:
    holds: bool
    worst_residual: float
    worst_witness: tuple | None  # (n, (h_1, ..., h_{d+1}))
    checked_count: int
    mode: str


def _worst(n, H, resid):
    if resid.size == 0:
        return 0.0, None
    top = resid.max()
    cand = np.flatnonzero(resid == top)
    keys = [H[cand, j] for j in range(H.shape[1] - 1, -1, -1)] + [n[cand]]
    i = cand[np.lexsort(keys)[0]]
    return float(top), (int(n[i]), tuple(int(v) for v in H[i]))


def is_locally_polynomial(phi: TabulatedPhase, d: int, tol: float = 1e-9,
                          sample_budget: int = 100_000, seed: int = 0,
                          mode: str = "auto") -> LocalPolyReport:
    if not 0 <= d <= 3:
        raise ParameterError("degree must lie in 0..3")
    if mode == "auto":
        mode = "exhaustive" if len(phi) <= EXHAUSTIVE_LIMIT else "sampled"
    if mode == "exhaustive":
        n, H = enumerate_configurations(phi, d + 1)
    elif mode == "sampled":
        n, H = sample_configurations(phi, d + 1, sample_budget, seed)
    else:
        raise ParameterError(f"unknown mode {mode!r}")
    resid = circle_norm(alternating_sums(phi, n, H)) if n.size else np.zeros(0)
    worst, witness = _worst(n, H, resid)
    return LocalPolyReport(bool(worst <= tol), worst, witness, int(n.size), mode)


def second_derivative(phi: TabulatedPhase, n0: int, h1: int, h2: int) -> float:
    pts = np.array([n0 + h1 + h2, n0 + h1, n0 + h2, n0], dtype=np.int64)
    v = phi(pts)
    return float(frac(v[0] - v[1] - v[2] + v[3]))


@dataclass
class QuadGrowthReport:
    second: float  # phi''(h, h)
    alpha: float
    beta: float
    max_residual: float

    def holds(self, tol: float = 1e-9) -> bool:
        return self.max_residual <= tol


def quad_growth_check(phi: TabulatedPhase, n: int, h: int, L: int, base: int | None = None) -> QuadGrowthReport:
    """Fit phi(n + h l) - l(l-1)/2 phi''(h,h) by alpha l + beta for l = 1..L."""
    if L < 1:
        raise ParameterError("L must be positive")
    b = n if base is None else base
    second = second_derivative(phi, b, h, h)
    l = np.arange(1, L + 1, dtype=np.int64)
    r = frac(phi(n + h * l) - (l * (l - 1) // 2) * second)
    alpha = float(frac(r[1] - r[0])) if L >= 2 else 0.0
    beta = float(frac(r[0] - alpha))
    resid = circle_norm(r - alpha * l - beta)
    return QuadGrowthReport(second, alpha, beta, float(resid.max()))


@dataclass
class QuarticReport:
    rhs_second: float  # phi''(st, st)
    residuals: np.ndarray

    @property
    def max_residual(self) -> float:
        return float(self.residuals.max()) if self.residuals.size else 0.0

    def holds(self, tol: float = 1e-8) -> bool:
        return self.max_residual <= tol


def quartic_growth_check(phi: TabulatedPhase, d: int, w: int, s: int, t: int, L: int, M: int,
                         tuples, base: int | None = None, rho0: float | None = None,
                         g=None, N: int | None = None) -> QuarticReport:
    """Check the sixteen-term sum over P(l, m) = (d + s l)(w + t m) against 2 l1 l2 m1 m2 phi''(st, st)."""
    if rho0 is not None:
        if g is None or N is None:
            raise ParameterError("rho0 needs the frequencies g and scale N")
        if L * M * bohr_norm(s * t, g, N) > rho0:
            raise ParameterError("L M ||st||_g exceeds rho0")
    b = d * w if base is None else base
    second = second_derivative(phi, b, s * t, s * t)
    resid = []
    for tup in tuples:
        l0, l1, l2, m0, m1, m2 = (int(v) for v in tup)
        if max(abs(l0), abs(l1), abs(l2)) > L or max(abs(m0), abs(m1), abs(m2)) > M:
            raise ParameterError(f"tuple {tup} exceeds the L, M limits")
        total = 0.0
        missing = []
        for i1, i2, j1, j2 in itertools.product((0, 1), repeat=4):
            l = l0 + i1 * l1 + i2 * l2
            m = m0 + j1 * m1 + j2 * m2
            p = (d + s * l) * (w + t * m)
            if not phi.contains(np.array([p]))[0]:
                missing.append(((i1, i2, j1, j2), p))
                continue
            sign = -1.0 if (i1 + i2 + j1 + j2) % 2 else 1.0
            total += sign * float(phi(np.array([p]))[0])
        if missing:
            raise DomainError(f"tuple {tup}: points outside the domain {missing}")
        resid.append(float(circle_norm(total - 2 * l1 * l2 * m1 * m2 * second)))
    return QuarticReport(second, np.array(resid))
