"""Correlations of the Möbius function with test sequences.

Every row value is (1/N) sum_{n<=N} mu(n) conj(f(n)), summed in fixed chunks
along a fixed pairwise tree so the result does not depend on the worker count.
"""
from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from mobnil.characters import CharacterTable
from mobnil.circle import frac, frac_mul, poly_phase, two_product
from mobnil.errors import CapacityError, DomainError, ParameterError, RangeError
from mobnil.nilflow import heis_orbit
from mobnil.numerics import chunked_tree_sum, fmt17, pmap
from mobnil.phases.decompose import BUMPS
from mobnil.phases.local import TabulatedPhase
from mobnil.sieve import MobiusTable

KINDS = ("linear", "quadratic", "bracket", "periodic", "character", "nilseq", "tabulated")
THREE_TERM_CAP = 2 * 10 ** 4
PARALLELOGRAM_EXACT_CAP = 512


@dataclass(frozen=True)
class PhaseSpec:
    kind: str
    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0
    q: int = 1
    table: tuple | None = None  # periodic values f(0..q-1)
    index: int | None = None  # character index; None means every character
    g: tuple | None = None  # Heisenberg generator, second-kind coordinates
    x: tuple = (0.0, 0.0, 0.0)
    F: str = "bump3"
    weight: object = None  # tabulated: dict or callable psi
    phase: TabulatedPhase | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown phase kind {self.kind!r}")
        if self.kind in ("periodic", "character") and self.q < 1:
            raise ParameterError("q must be positive")
        if self.kind == "periodic":
            if self.table is None or len(self.table) != self.q:
                raise ParameterError("periodic phase needs a table of length q")
            if max(abs(complex(v)) for v in self.table) > 1 + 1e-12:
                raise ParameterError("periodic values must be bounded by 1")
        if self.kind == "character" and self.index is not None:
            CharacterTable(self.q).exponents(self.index)
        if self.kind == "nilseq":
            if self.g is None or len(self.g) != 3:
                raise ParameterError("nilseq needs g = (a1, a2, a3)")
            if self.F not in BUMPS:
                raise ParameterError(f"unknown F descriptor {self.F!r}")
        if self.kind == "tabulated" and self.phase is None:
            raise ParameterError("tabulated kind needs a phase table")

    def describe(self) -> dict:
        out = {"kind": self.kind}
        if self.kind in ("linear", "quadratic", "bracket"):
            out["alpha"] = self.alpha
        if self.kind in ("quadratic", "bracket"):
            out["beta"] = self.beta
        if self.kind == "quadratic":
            out["gamma"] = self.gamma
        if self.kind in ("periodic", "character"):
            out["q"] = self.q
        if self.kind == "character" and self.index is not None:
            out["index"] = self.index
        if self.kind == "nilseq":
            out.update(g=list(self.g), x=list(self.x), F=self.F)
        return out


def phase_values(spec: PhaseSpec, n: np.ndarray, character: int | None = None) -> np.ndarray:
    """f(n) for an integer array n."""
    n = np.asarray(n, dtype=np.int64)
    k = spec.kind
    if k == "linear":
        return np.exp(2j * np.pi * frac_mul(spec.alpha, n))
    if k == "quadratic":
        return np.exp(2j * np.pi * poly_phase((spec.gamma, spec.beta, spec.alpha), n))
    if k == "bracket":
        # f(n) = e([n alpha] n beta) with [x] = x - {x}
        K = integer_part(spec.alpha, n)
        return np.exp(2j * np.pi * frac_mul(spec.beta, K * n))
    if k == "periodic":
        return np.asarray(spec.table, dtype=np.complex128)[n % spec.q]
    if k == "character":
        idx = spec.index if character is None else character
        return CharacterTable(spec.q).values(idx)[n % spec.q]
    if k == "nilseq":
        u1, u2, u3 = heis_orbit(spec.g, n, spec.x)
        return np.asarray(BUMPS[spec.F](u1, u2, u3), dtype=np.complex128)
    if k == "tabulated":
        psi = _weights(spec.weight, n)
        out = np.zeros(n.shape, dtype=np.complex128)
        live = psi != 0
        out[live] = psi[live] * np.exp(2j * np.pi * spec.phase(n[live]))
        return out
    raise ParameterError(k)


def integer_part(alpha: float, n: np.ndarray) -> np.ndarray:
    """[n alpha] = n alpha - {n alpha}, from an error-free product."""
    p, err = two_product(float(alpha), n.astype(np.float64))
    base = np.rint(p)
    y = (p - base) + err
    return (base + (y - frac(y))).astype(np.int64)


def _weights(weight, n: np.ndarray) -> np.ndarray:
    if weight is None:
        return np.ones(n.shape)
    if callable(weight):
        return np.asarray(weight(n), dtype=np.complex128)
    return np.array([weight.get(int(v), 0.0) for v in n], dtype=np.complex128)


def mobius_sum(mobius: MobiusTable, f, lo: int, hi: int, workers=1) -> complex:
    """sum_{lo <= n < hi} mu(n) conj(f(n)) with a deterministic reduction."""
    mu = mobius.values

    def block(a, b):
        n = np.arange(a, b, dtype=np.int64)
        return mu[a:b] * np.conj(f(n))
    return complex(chunked_tree_sum(block, lo, hi, workers))


@dataclass
class CorrelationRow:
    N: int
    value: complex
    seconds: float | None = None
    character: int | None = None

    @property
    def magnitude(self) -> float:
        return abs(self.value)


@dataclass
class CorrelationReport:
    phase: PhaseSpec
    rows: list = field(default_factory=list)
    fit: tuple | None = None  # (A_hat, c_hat) with log|S| ≈ -A_hat log log N + c_hat

    def to_csv(self, timing: bool = False) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["N", "re", "im", "abs", "seconds"])
        for r in self.rows:
            secs = fmt17(r.seconds) if timing and r.seconds is not None else ""
            w.writerow([r.N, fmt17(r.value.real), fmt17(r.value.imag), fmt17(r.magnitude), secs])
        return buf.getvalue()

    def to_dict(self, timing: bool = False) -> dict:
        rows = []
        for r in self.rows:
            row = {"n": r.N, "re": r.value.real, "im": r.value.imag, "abs": r.magnitude,
                   "wall_s": r.seconds if timing else None}
            if r.character is not None:
                row["character"] = r.character
            rows.append(row)
        return {"phase": self.phase.describe(), "rows": rows,
                "fit_a": self.fit[0] if self.fit else None,
                "fit_c": self.fit[1] if self.fit else None}

    def to_json(self, timing: bool = False) -> str:
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=True)


def decay_fit(rows) -> tuple | None:
    """Least squares of log|value| against log log N; None with fewer than 4 usable rows."""
    pts = [(math.log(math.log(r.N)), math.log(r.magnitude)) for r in rows
           if r.magnitude > 0 and r.N > 2]
    if len(pts) < 4:
        return None
    x = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    slope, intercept = np.polyfit(x, y, 1)
    return float(-slope), float(intercept)


def correlate(mobius: MobiusTable, phase: PhaseSpec, n_list, workers=1) -> CorrelationReport:
    n_list = sorted(int(N) for N in n_list)
    if not n_list or n_list[0] < 1:
        raise RangeError("every N must be positive")
    if n_list[-1] > mobius.n_max:
        raise RangeError(f"N={n_list[-1]} exceeds the Möbius table ({mobius.n_max})")
    chars = [None]
    if phase.kind == "character" and phase.index is None:
        chars = list(range(CharacterTable(phase.q).size))
    rows = []
    for N in n_list:
        for c in chars:
            t0 = time.perf_counter()
            val = mobius_sum(mobius, lambda n: phase_values(phase, n, c), 1, N + 1, workers) / N
            rows.append(CorrelationRow(N, val, time.perf_counter() - t0, c))
    return CorrelationReport(phase, rows, decay_fit([r for r in rows if r.character in (None, 0)]))


def correlate_character(mobius: MobiusTable, q: int, n: int) -> np.ndarray:
    """E_{m<=n} mu(m) conj(chi(m)) for every character mod q, in index order."""
    if n < 1 or n > mobius.n_max:
        raise RangeError(f"n={n} outside 1..{mobius.n_max}")
    table = CharacterTable(q)
    residue_sums = np.bincount(np.arange(1, n + 1) % q, weights=mobius.values[1:n + 1].astype(np.float64),
                               minlength=q)
    return table.dual_transform(residue_sums) / n


def correlate_periodic(mobius: MobiusTable, f, n: int, workers=1) -> complex:
    """E_{m<=n} mu(m) conj(f(m mod q)) by direct summation."""
    vals = np.asarray(f, dtype=np.complex128)
    if n < 1 or n > mobius.n_max:
        raise RangeError(f"n={n} outside 1..{mobius.n_max}")
    q = vals.size
    return mobius_sum(mobius, lambda m: vals[m % q], 1, n + 1, workers) / n


def correlate_periodic_by_characters(mobius: MobiusTable, f, n: int) -> complex:
    """The same average through the character expansion.

    A squarefree m splits as m = g m' with g = gcd(m, q) and m' a unit mod q,
    and mu(m) = mu(g) mu(m').  For fixed g, m' -> f(g m') is a function on
    the units mod q, expanded over characters mod q.
    """
    vals = np.asarray(f, dtype=np.complex128)
    q = vals.size
    table = CharacterTable(q)
    units = np.flatnonzero(table.units)
    total = 0j
    for g in (d for d in range(1, q + 1) if q % d == 0):
        mg = _mu_small(g)
        m_top = n // g
        if mg == 0 or m_top < 1:
            continue
        h = np.zeros(q, dtype=np.complex128)
        h[units] = vals[(g * units) % q]
        coeffs = table.dual_transform(h) / table.size  # f(g r) = sum_chi c_chi chi(r)
        corr = correlate_character(mobius, q, m_top) * m_top  # sum mu(m') conj chi(m')
        total += mg * np.dot(np.conj(coeffs), corr)
    return total / n


def _mu_small(n: int) -> int:
    out, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            out = -out
        p += 1
    return -out if n > 1 else out


# --- self-correlations --------------------------------------------------------

def _need(mobius: MobiusTable, top: int):
    if mobius.n_max < top:
        raise RangeError(f"needs the Möbius table up to {top}")


def _shifted_mu(mobius: MobiusTable, n: int, top: int, truncate: bool) -> np.ndarray:
    # truncate=True drops every term with an argument beyond n
    _need(mobius, top)
    mu = mobius.values[:top + 1].astype(np.int64)
    if truncate:
        mu[n + 1:] = 0
    return mu


def self_correlation_3term(mobius: MobiusTable, n: int, cap: int = THREE_TERM_CAP,
                           truncate: bool = False) -> float:
    """E_{x,d in [n]} mu(x) mu(x+d) mu(x+2d), exact integer accumulation."""
    if n < 1:
        raise RangeError("n must be positive")
    if n > cap:
        raise CapacityError(f"n={n} exceeds {cap}")
    mu = _shifted_mu(mobius, n, 3 * n, truncate)
    x = mu[1:n + 1]
    total = 0
    for d in range(1, n + 1):
        total += int((x * mu[1 + d:n + 1 + d] * mu[1 + 2 * d:n + 1 + 2 * d]).sum())
    return float(Fraction(total, n * n))


def _parallelogram_exact_sum(mu: np.ndarray, n: int) -> int:
    total = 0
    h = np.arange(1, n + 1)
    hank = h[:, None] + h[None, :]
    for x in range(1, n + 1):
        if mu[x] == 0:
            continue
        v = mu[x + 1:x + n + 1]
        total += int(mu[x]) * int(v @ mu[x + hank] @ v)
    return total


def _parallelogram_factored_sum(mu: np.ndarray, n: int) -> int:
    # sum_{h1} sum_x a(x) sum_{h2} a(x + h2) with a(y) = mu(y) mu(y + h1)
    total = 0
    for h1 in range(1, n + 1):
        a = mu[1:2 * n + 1] * mu[1 + h1:2 * n + 1 + h1]  # a(y) for y = 1..2n
        pre = np.concatenate(([0], np.cumsum(a)))
        window = pre[np.arange(1, n + 1) + n] - pre[np.arange(1, n + 1)]  # sum_{h2=1..n} a(x+h2)
        total += int(a[:n] @ window)
    return total


def self_correlation_parallelogram(mobius: MobiusTable, n: int, mode: str = "auto",
                                   truncate: bool = False) -> float:
    """E_{x,h1,h2 in [n]} mu(x) mu(x+h1) mu(x+h2) mu(x+h1+h2)."""
    if n < 1:
        raise RangeError("n must be positive")
    mu = _shifted_mu(mobius, n, 3 * n, truncate)
    if mode == "auto":
        mode = "exact" if n <= PARALLELOGRAM_EXACT_CAP else "factored"
    if mode == "exact":
        if n > PARALLELOGRAM_EXACT_CAP:
            raise CapacityError(f"exact mode is capped at n={PARALLELOGRAM_EXACT_CAP}")
        total = _parallelogram_exact_sum(mu, n)
    elif mode == "factored":
        total = _parallelogram_factored_sum(mu, n)
    else:
        raise ParameterError(f"unknown mode {mode!r}")
    return float(Fraction(total, n ** 3))


# --- localized correlations ---------------------------------------------------

def correlate_weighted_local(mobius: MobiusTable, N: int, psi, phi: TabulatedPhase) -> complex:
    """E_{N<n<=2N} mu(n) psi(n) e(-phi(n)); psi is a length-N array for n = N+1..2N or a callable."""
    if mobius.n_max < 2 * N:
        raise RangeError(f"needs the Möbius table up to {2 * N}")
    n = np.arange(N + 1, 2 * N + 1, dtype=np.int64)
    w = np.asarray(psi(n) if callable(psi) else psi, dtype=np.complex128)
    if w.shape != n.shape:
        raise ParameterError("weight table must cover N < n <= 2N")
    live = w != 0
    if live.any():
        inside = phi.contains(n[live])
        if not inside.all():
            raise DomainError(f"weight nonzero off the phase domain at n={n[live][~inside][:8].tolist()}")
    vals = np.zeros(N, dtype=np.complex128)
    vals[live] = w[live] * np.exp(-2j * np.pi * phi(n[live]))
    mu = mobius.values[N + 1:2 * N + 1].astype(np.float64)
    return complex(chunked_tree_sum(lambda a, b: mu[a:b] * vals[a:b], 0, N)) / N


def tent_window(t) -> np.ndarray:
    """Piecewise-linear bump on [7/6, 11/6] with peak 2 at 3/2; at least 1 on [4/3, 5/3]."""
    t = np.asarray(t, dtype=np.float64)
    up = 6 * (t - 7 / 6)
    down = 6 * (11 / 6 - t)
    return np.maximum(0.0, np.minimum(up, down))


def _tent_exact(n: np.ndarray, N: int) -> np.ndarray:
    # 6 (n/N - 7/6) = (6n - 7N)/N, computed from integers
    n = np.asarray(n, dtype=np.int64)
    return np.maximum(0, np.minimum(6 * n - 7 * N, 11 * N - 6 * n)) / N


def windowed_correlation(mobius: MobiusTable, f, alpha: float, N: int) -> complex:
    """E_{N<n<=2N} tent(n/N) f(n) e(alpha n) mu(n)."""
    if N < 1 or 2 * N > mobius.n_max:
        raise RangeError(f"needs 1 <= N and 2N <= {mobius.n_max}")
    n = np.arange(N + 1, 2 * N + 1, dtype=np.int64)
    w = _tent_exact(n, N) * _fvals(f, n) * np.exp(2j * np.pi * frac_mul(alpha, n)) \
        * mobius.values[N + 1:2 * N + 1]
    return complex(chunked_tree_sum(lambda a, b: w[a:b], 0, N)) / N


def _fvals(f, n):
    if callable(f):
        return np.asarray(f(n), dtype=np.complex128)
    return np.asarray(f, dtype=np.complex128)[n]


def windowed_spectrum(mobius: MobiusTable, f, M: int) -> np.ndarray:
    """windowed_correlation at every alpha = k/M, k = 0..M-1, by one DFT."""
    n = np.arange(M + 1, 2 * M + 1, dtype=np.int64)
    w = _tent_exact(n, M) * _fvals(f, n) * mobius.values[M + 1:2 * M + 1]
    # sum_n w(n) e(k n / M) with n = M + 1 + j gives e(k (j + 1) / M)
    spec = np.fft.ifft(w) * M
    k = np.arange(M)
    return spec * np.exp(2j * np.pi * k / M) / M


@dataclass
class TelescopeReport:
    direct: complex
    reconstructed: complex
    residual: float
    windows: list  # (M, a, b): interval a < n <= b inside (4M/3, 5M/3]
    extra_points: int


def telescope_windows(N: int, base: int = 12) -> tuple:
    """Cover (base, N] by intervals (a, b] inside (4M/3, 5M/3] for suitable M."""
    windows, b = [], N
    while b > base:
        M = -(-3 * b // 5)  # ceil(3b/5), so 5M/3 >= b
        a = max(4 * M // 3, base)  # n >= floor(4M/3) + 1 > 4M/3
        windows.append((M, a, b))
        b = a
    return windows, min(b, N)


def telescope_reconstruct(mobius: MobiusTable, f, N: int, base: int = 12) -> TelescopeReport:
    """E_{n<=N} mu(n) f(n) rebuilt from windowed correlations.

    On (a, b] inside (4M/3, 5M/3] the tent is at least 1, so the indicator of
    (a, b] divided by the tent is a function g on (M, 2M]; its length-M DFT
    writes sum_{a<n<=b} mu f as a combination of windowed correlations at
    frequencies k/M.  The first few points are added directly.
    """
    if N < 1 or mobius.n_max < 2 * N:
        raise RangeError(f"needs the Möbius table up to {2 * N}")
    windows, extra = telescope_windows(N, base)
    n_all = np.arange(1, N + 1, dtype=np.int64)
    mu = mobius.values
    direct = complex(np.sum(mu[1:N + 1] * _fvals(f, n_all))) / N
    total = complex(np.sum(mu[1:extra + 1] * _fvals(f, np.arange(1, extra + 1)))) if extra else 0j
    for M, a, b in windows:
        n = np.arange(M + 1, 2 * M + 1, dtype=np.int64)
        g = np.zeros(M)
        inside = (n > a) & (n <= b)
        g[inside] = 1.0 / _tent_exact(n[inside], M)
        # g(n) = sum_k ghat_k e(-k n / M) on n = M+1..2M
        ghat = _expansion(g, M)
        spec = windowed_spectrum(mobius, f, M)  # index k: alpha = k/M
        # sum_n tent mu f g = sum_k ghat_k sum_n tent mu f e(-k n/M) = M sum_k ghat_k W(-k/M)
        W_neg = spec[(-np.arange(M)) % M]
        total += M * complex(np.dot(ghat, W_neg))
    recon = total / N
    return TelescopeReport(direct, recon, abs(recon - direct), windows, extra)


def _expansion(g: np.ndarray, M: int) -> np.ndarray:
    """ghat with g(n) = sum_k ghat_k e(-k n / M) for n = M+1..2M."""
    # with j = n - M - 1: g_j = sum_k ghat_k e(-k/M) e(-k j/M)
    k = np.arange(M)
    return np.fft.ifft(g) * np.exp(2j * np.pi * k / M)
