"""Arithmetic on R/Z, exponential sums, and quantitative harmonic-analysis checks.

Representatives of R/Z live in (-1/2, 1/2]: ``frac(x) = x - nearest_int(x)``
with ties rounded down, so ``frac(0.5) == frac(-0.5) == 0.5``.

Products ``alpha * m`` with large integer ``m`` are reduced without losing the
low-order bits: :func:`two_product` splits the float product into an exact
head and tail, and only the head is reduced mod 1.  This keeps quadratic and
bracket phases accurate to about 1e-15 for ``m`` up to 2**53.

The detector functions return reports instead of booleans; ``conclusion``
fields are ``None`` when the hypothesis fails or the check is out of reach.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from mobnil.errors import CapacityError, IntervalTooShortError, ParameterError, ValidationError
from mobnil.numerics import chunked_tree_sum, tree_sum

TWO_PI = 2.0 * math.pi
EXHAUSTIVE_Q_CAP = 1 << 24
ENUMERATION_CAP = 1 << 26
_HALF = Fraction(1, 2)


# --- reduction ---------------------------------------------------------------

def frac(x):
    """Representative of x mod 1 in (-1/2, 1/2]."""
    if isinstance(x, (int, Fraction)):
        return x - math.ceil(x - _HALF)
    a = np.asarray(x, dtype=np.float64)
    r = a - np.rint(a)
    r = np.where(r == -0.5, 0.5, r)
    return float(r) if r.ndim == 0 else r


def nearest_int(x):
    """Integer [x] with x = [x] + frac(x)."""
    if isinstance(x, (int, Fraction)):
        return math.ceil(x - _HALF)
    a = np.asarray(x, dtype=np.float64)
    r = a - frac(a)
    return float(r) if r.ndim == 0 else r


def circle_norm(x):
    """Distance from x to the nearest integer."""
    if isinstance(x, (int, Fraction)):
        return abs(frac(x))
    if np.any(np.isnan(x)):
        raise ValidationError("NaN has no circle norm")
    return np.abs(frac(x))


def e(x):
    """exp(2 pi i x), reducing x mod 1 first."""
    return np.exp(1j * TWO_PI * frac(x))


# --- error-free products -----------------------------------------------------

_SPLITTER = 134217729.0  # 2**27 + 1


def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def two_product(a, b):
    """Return (p, err) with p = fl(a*b) and a*b = p + err exactly."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


def _as_float_ints(m) -> np.ndarray:
    m = np.asarray(m)
    if m.size and np.max(np.abs(m)) >= 2 ** 53:
        raise CapacityError("integer multiplier too large for exact float product")
    return m.astype(np.float64)


def frac_mul(a, m):
    """frac(a*m) for a float (or (hi, lo) pair) a and integer array m, to ~1e-15."""
    if isinstance(a, tuple):
        return frac(frac_mul(a[0], m) + frac_mul(a[1], m))
    if isinstance(a, Fraction):
        m = np.asarray(m, dtype=object)
        out = np.array([frac(a * int(v)) for v in m.ravel()], dtype=np.float64)
        return out.reshape(m.shape) if m.ndim else float(out[0])
    p, err = two_product(float(a), _as_float_ints(m))
    return frac(frac(p) + err)


def exact_pair(a: float, b: float) -> tuple:
    """The real number a*b as an unevaluated (head, tail) pair."""
    p, err = two_product(a, b)
    return float(p), float(err)


def poly_phase(coeffs: Sequence[float], n) -> np.ndarray:
    """frac(c0 + c1 n + c2 n^2 + ...) evaluated with error-free products."""
    n = np.asarray(n, dtype=np.int64)
    total = np.zeros(n.shape, dtype=np.float64)
    power = np.ones(n.shape, dtype=np.int64)
    for k, c in enumerate(coeffs):
        if k:
            power = power * n
        if c:
            total = total + frac_mul(c, power)
    return frac(total)


# --- Diophantine approximation -----------------------------------------------

@dataclass
class DioApprox:
    q: int
    norm_value: float
    Q: int


def circle_norm_q(x, Q: int, cap: int = EXHAUSTIVE_Q_CAP) -> DioApprox:
    """min over 1 <= q <= Q of ||q x||, with the smallest minimizing q."""
    Q = int(Q)
    if Q < 1:
        raise ParameterError("Q must be positive")
    if isinstance(x, (int, Fraction)):
        x = Fraction(x)
        den = x.denominator
        if den <= Q:
            return DioApprox(den, 0.0, Q)
        if Q > cap:
            raise CapacityError(f"exhaustive search to Q={Q} exceeds cap {cap}")
        num = x.numerator % den
        qs = np.arange(1, Q + 1, dtype=object if den >= 2 ** 31 else np.int64)
        r = (qs * num) % den
        dist = np.minimum(r, den - r)
        i = int(np.argmin(dist))
        return DioApprox(i + 1, float(Fraction(int(dist[i]), den)), Q)
    if Q > cap:
        raise CapacityError(f"exhaustive search to Q={Q} exceeds cap {cap}")
    best_q, best = 1, math.inf
    for lo in range(1, Q + 1, 1 << 20):
        qs = np.arange(lo, min(lo + (1 << 20), Q + 1), dtype=np.int64)
        vals = np.abs(frac_mul(float(x), qs))
        i = int(np.argmin(vals))
        if vals[i] < best:
            best, best_q = float(vals[i]), int(qs[i])
    return DioApprox(best_q, best, Q)


def find_witness(x, Q: int, bound: float, cap: int = EXHAUSTIVE_Q_CAP):
    """Decide whether some q <= Q has ||q x|| <= bound.

    Returns (verdict, DioApprox or None).  The verdict is None when Q exceeds
    the exhaustive cap and no witness was found below the cap.
    """
    Q = int(Q)
    if bound >= 0.5:
        return True, DioApprox(1, float(circle_norm(x)), Q)
    if isinstance(x, (int, Fraction)) and Fraction(x).denominator <= Q:
        return True, circle_norm_q(x, Q, cap)
    reach = min(Q, cap)
    approx = circle_norm_q(x, reach, cap)
    if approx.norm_value <= bound:
        return True, DioApprox(approx.q, approx.norm_value, Q)
    if reach < Q:
        return None, approx
    return False, approx


# --- intervals and exponential sums --------------------------------------------

@dataclass(frozen=True)
class Interval:
    """Discrete interval lo..hi inclusive (Python ints, so lengths may be huge)."""
    lo: int
    hi: int

    @property
    def size(self) -> int:
        return max(0, self.hi - self.lo + 1)

    def array(self) -> np.ndarray:
        if self.size > ENUMERATION_CAP:
            raise CapacityError(f"interval of length {self.size} too long to enumerate")
        return np.arange(self.lo, self.hi + 1, dtype=np.int64)


def as_interval(I) -> Interval:
    if isinstance(I, Interval):
        return I
    lo, hi = I
    return Interval(int(lo), int(hi))


def exp_sum(phase: Callable[[np.ndarray], np.ndarray], I, workers=1) -> complex:
    """sum_{n in I} e(phase(n)) with the deterministic chunked tree."""
    I = as_interval(I)
    if I.size < 1:
        raise ValidationError("empty interval")

    def block(a, b):
        n = np.arange(I.lo + a, I.lo + b, dtype=np.int64)
        return e(phase(n))

    return complex(chunked_tree_sum(block, 0, I.size, workers))


def linear_sum_bound(alpha: float, length: int) -> float:
    """4 min(|I|, 1/||alpha||), the geometric-series bound."""
    nrm = float(circle_norm(alpha))
    return 4.0 * (length if nrm == 0 else min(length, 1.0 / nrm))


# --- discrepancy -------------------------------------------------------------

@dataclass
class DiscrepancyReport:
    count_in_window: int
    expected: float
    delta: float
    et_bound: float
    Q: int

    @property
    def holds(self) -> bool:
        return abs(self.delta) <= self.et_bound


def erdos_turan(u, alpha: float, beta: float, Q: int, constant: float = 3.0) -> DiscrepancyReport:
    """Count of u in [alpha, beta] against L/Q + 3 sum_{q<=Q} |sum_l e(q u_l)| / q."""
    if not (-0.5 <= alpha < beta < 0.5):
        raise ValidationError("window must satisfy -1/2 <= alpha < beta < 1/2")
    u = frac(np.atleast_1d(np.asarray(u, dtype=np.float64)))
    L = u.size
    if L < 1:
        raise ValidationError("need at least one point")
    count = int(np.count_nonzero((u >= alpha) & (u <= beta)))
    expected = (beta - alpha) * L
    total = 0.0
    for q in range(1, Q + 1):
        total += abs(complex(tree_sum(e(frac(q * u))))) / q
    return DiscrepancyReport(count, expected, count - expected, L / Q + constant * total, Q)


# --- counting near-integer values of polynomial phases -------------------------

def _all_rational(coeffs) -> bool:
    return all(isinstance(c, (int, Fraction)) for c in coeffs)


def count_close(coeffs: Sequence, I: Interval, delta1: float, period_cap: int = ENUMERATION_CAP) -> int:
    """#{l in I : ||c0 + c1 l + c2 l^2|| <= delta1}.

    Rational coefficients are counted exactly through periodicity in l, which
    allows intervals far too long to enumerate.  Float coefficients are
    enumerated directly.
    """
    if _all_rational(coeffs):
        fr = [Fraction(c) for c in coeffs]
        M = 1
        for c in fr:
            M = M * c.denominator // math.gcd(M, c.denominator)
        # the phase depends on l mod M only
        if M > period_cap:
            raise CapacityError(f"period {M} too long")
        nums = [int(c * M) % M for c in fr]
        lim = Fraction(delta1) * M
        l = np.arange(M, dtype=object if M >= 2 ** 20 else np.int64)
        val = np.zeros(M, dtype=l.dtype)
        power = np.ones(M, dtype=l.dtype)
        for k, c in enumerate(nums):
            if k:
                power = (power * l) % M
            val = (val + c * power) % M
        dist = np.minimum(val, M - val)
        good = np.array([d <= lim for d in dist], dtype=bool) if dist.dtype == object else dist <= lim
        cum = np.concatenate([[0], np.cumsum(good)])

        def upto(x):  # #{0 <= l < x}, x may be negative
            full, rem = divmod(x, M)
            return full * int(cum[-1]) + int(cum[rem])

        return upto(I.hi + 1) - upto(I.lo)
    l = I.array()
    return int(np.count_nonzero(np.abs(poly_phase([float(c) for c in coeffs], l)) <= delta1))


# --- major-arc detectors -----------------------------------------------------

@dataclass
class ArcConclusion:
    applicable: bool
    Qbound: int
    rhs: float
    holds: bool | None = None
    witness: DioApprox | None = None


def _conclude(alpha, applicable: bool, Qbound: int, rhs: float) -> ArcConclusion:
    out = ArcConclusion(applicable, Qbound, rhs)
    if applicable:
        out.holds, out.witness = find_witness(alpha, Qbound, rhs)
    return out


def _floor_bound(x: float) -> int:
    # q ranges over integers <= x; tolerate float noise in integral bounds
    return max(1, math.floor(x + 1e-9))


@dataclass
class LinearRecurrenceReport:
    count: int
    size: int
    hypothesis_holds: bool
    part_i: ArcConclusion
    part_ii: ArcConclusion

    @property
    def conclusions_hold(self):
        parts = [p for p in (self.part_i, self.part_ii) if p.applicable]
        if not self.hypothesis_holds or not parts:
            return None
        verdicts = [p.holds for p in parts]
        if any(v is False for v in verdicts):
            return False
        return None if any(v is None for v in verdicts) else True


def detect_linear_recurrence(alpha, I, delta1: float, delta2: float) -> LinearRecurrenceReport:
    """If ||alpha l|| <= delta1 for at least delta2 |I| values l, alpha is near a rational."""
    if not (0 < delta1 < 1 and 0 < delta2 < 1):
        raise ParameterError("delta1, delta2 must lie in (0, 1)")
    if delta1 > delta2 / 4:
        raise ParameterError("need delta1 <= delta2/4")
    I = as_interval(I)
    count = count_close([0, alpha], I, delta1)
    size = I.size
    hyp = count >= delta2 * size - 1e-9
    part_i = _conclude(alpha, hyp and size > 1 / delta2,
                       _floor_bound(8 / delta2), 2 ** 8 / (delta2 ** 2 * size))
    part_ii = _conclude(alpha, hyp and size > 2 / delta2 ** 2,
                        _floor_bound(16 / delta2 ** 2), 2 ** 15 * delta1 / (delta2 ** 6 * size))
    return LinearRecurrenceReport(count, size, hyp, part_i, part_ii)


@dataclass
class WeylReport:
    sum_mag: float
    hypothesis_holds: bool
    conclusion: ArcConclusion

    @property
    def conclusion_holds(self):
        return self.conclusion.holds if self.hypothesis_holds else None


def weyl_detect(alpha, beta, gamma, I, delta: float, workers=1) -> WeylReport:
    """A large normalized quadratic Weyl sum forces alpha close to a rational."""
    if not 0 < delta < 1:
        raise ParameterError("delta must lie in (0, 1)")
    I = as_interval(I)
    if I.size < 2 ** 16 / delta ** 6:
        raise IntervalTooShortError(f"|I|={I.size} < 2^16/delta^6")
    coeffs = [float(gamma), float(beta), float(alpha)]
    total = exp_sum(lambda n: poly_phase(coeffs, n), I, workers)
    mag = abs(total) / I.size
    hyp = mag >= delta
    concl = _conclude(alpha, hyp, _floor_bound(2 ** 12 / delta ** 4),
                      2.0 ** 43 / (delta ** 14 * float(I.size) ** 2))
    return WeylReport(mag, hyp, concl)


@dataclass
class QuadraticRecurrenceReport:
    count: int
    size: int
    hypothesis_holds: bool
    conclusion: ArcConclusion

    @property
    def conclusion_holds(self):
        return self.conclusion.holds if self.hypothesis_holds else None


def recurrent_quadratic_detect(alpha, beta, gamma, I, delta1: float, delta2: float) -> QuadraticRecurrenceReport:
    """Quadratics that are often near an integer have a major-arc leading coefficient.

    The interval length requirement is astronomically large, so in practice
    the coefficients must be rational (counted through periodicity).
    """
    if not (0 < delta1 < 1 and 0 < delta2 < 1):
        raise ParameterError("delta1, delta2 must lie in (0, 1)")
    if delta1 > delta2 / 4:
        raise ParameterError("need delta1 <= delta2/4")
    I = as_interval(I)
    if I.size < 2.0 ** 58 / delta2 ** 12:
        raise IntervalTooShortError(f"|I|={I.size} < 2^58/delta2^12")
    count = count_close([gamma, beta, alpha], I, delta1)
    hyp = count >= delta2 * I.size - 1e-9 * I.size
    concl = _conclude(alpha, hyp, _floor_bound(2 ** 43 / delta2 ** 9),
                      2.0 ** 141 / (delta2 ** 28 * float(I.size) ** 2))
    return QuadraticRecurrenceReport(count, I.size, hyp, concl)


# --- total variation and summation by parts ----------------------------------

def tv_norm(psi, q: int = 1) -> float:
    """sup|psi| + sum_n |psi(n+q) - psi(n)| for a finitely supported sequence.

    ``psi`` is either a dict n -> value or an array of consecutive values
    (zero outside).
    """
    if q < 1:
        raise ParameterError("q must be positive")
    if isinstance(psi, dict):
        if not psi:
            return 0.0
        lo, hi = min(psi), max(psi)
        arr = np.zeros(hi - lo + 1, dtype=np.complex128)
        for n, v in psi.items():
            arr[n - lo] = v
    else:
        arr = np.asarray(psi, dtype=np.complex128)
    if arr.size == 0:
        return 0.0
    padded = np.concatenate([np.zeros(q), arr, np.zeros(q)])
    return float(np.max(np.abs(arr)) + np.abs(padded[q:] - padded[:-q]).sum())


def max_subinterval_sum(f) -> float:
    """sup over subintervals J of |sum_{n in J} f(n)| (exhaustive, O(L^2))."""
    f = np.asarray(f, dtype=np.complex128)
    S = np.concatenate([[0], np.cumsum(f)])
    best = 0.0
    for a in range(len(f)):
        best = max(best, float(np.max(np.abs(S[a + 1:] - S[a]))))
    return best


@dataclass
class SumPartsReport:
    lhs: float
    tv: float
    sup_partial: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.tv * self.sup_partial * (1 + 1e-12) + 1e-12


def sum_parts_check(f, psi) -> SumPartsReport:
    """|sum f psi| against ||psi||_TV sup_J |sum_J f| on a common interval."""
    f = np.asarray(f, dtype=np.complex128)
    psi = np.asarray(psi, dtype=np.complex128)
    return SumPartsReport(abs(complex(tree_sum(f * psi))), tv_norm(psi), max_subinterval_sum(f))


# --- completion of sums --------------------------------------------------------

@dataclass
class CompletionReport:
    lhs: float
    rhs_sup: float
    log_factor: float
    measured_constant: float
    constant: float
    probe_count: int

    @property
    def holds(self) -> bool:
        return self.lhs <= self.constant * self.log_factor * self.rhs_sup * (1 + 1e-12) + 1e-12


def completion_check(f, subintervals=None, probes=None, refine: int = 2,
                     constant: float = 2.0) -> CompletionReport:
    """Partial sums over subintervals versus the sup of twisted full sums.

    ``f`` holds the values on I = {1..L}.  Subintervals are (a, b) pairs of
    1-based inclusive endpoints; all subintervals are used when omitted.  The
    probe grid is {xi / (refine L)} plus any extra probes.  Restricting a
    subinterval sum by the discrete Fourier expansion of its indicator gives a
    measured constant at most 1/log 2, so the default asserted constant is 2.
    """
    f = np.asarray(f, dtype=np.complex128)
    L = f.size
    if subintervals is None:
        lhs = max_subinterval_sum(f) if L else 0.0
    else:
        S = np.concatenate([[0], np.cumsum(f)])
        lhs = max((abs(S[b] - S[a - 1]) for a, b in subintervals), default=0.0)
    grid = np.arange(refine * L) / (refine * L) if L else np.zeros(0)
    if probes is not None:
        grid = np.concatenate([grid, np.asarray(probes, dtype=np.float64)])
    n = np.arange(1, L + 1, dtype=np.int64)
    sup = 0.0
    for alpha in grid:
        sup = max(sup, abs(complex(tree_sum(f * e(frac_mul(float(alpha), n))))))
    log_factor = math.log(1 + L)
    measured = lhs / (log_factor * sup) if sup > 0 else 0.0
    return CompletionReport(float(lhs), sup, log_factor, measured, constant, int(grid.size))


# --- Cauchy-Schwarz box quantities -------------------------------------------

@dataclass
class BoxNormReport:
    lhs_one: float
    rhs_one: float  # square root already applied
    lhs_two: float
    rhs_two: float  # fourth root already applied
    box_two: float  # the four-fold average itself

    @property
    def holds(self) -> bool:
        tol = 1e-12
        return self.lhs_one <= self.rhs_one + tol and self.lhs_two <= self.rhs_two + tol


def box_two_value(f: np.ndarray) -> float:
    """E_{x,x',y,y'} f(x,y) conj f(x,y') conj f(x',y) f(x',y')."""
    X, Y = f.shape
    G = f.conj().T @ f / X  # G[y', y] = E_x conj f(x,y') f(x,y)
    return float(np.sum(np.abs(G) ** 2).real / Y ** 2)


def box_norm_check(f, b_x, b_y) -> BoxNormReport:
    f = np.asarray(f, dtype=np.complex128)
    b_x = np.asarray(b_x, dtype=np.complex128)
    b_y = np.asarray(b_y, dtype=np.complex128)
    X, Y = f.shape
    if X > 256 or Y > 256:
        raise CapacityError("box_norm_check is exhaustive; sides must be at most 256")
    if np.any(np.abs(b_x) > 1 + 1e-12) or np.any(np.abs(b_y) > 1 + 1e-12):
        raise ValidationError("weights must be bounded by 1")
    lhs_one = abs(np.mean(b_x[:, None] * f))
    rows = f.mean(axis=1)  # E_y f(x, y)
    rhs_one = math.sqrt(float(np.mean(np.abs(rows) ** 2)))
    lhs_two = abs(np.mean(b_x[:, None] * b_y[None, :] * f))
    box = box_two_value(f)
    return BoxNormReport(float(lhs_one), rhs_one, float(lhs_two), max(box, 0.0) ** 0.25, box)


def box_four_value(K: np.ndarray) -> float:
    """Four-variable box average of K on X^4 (16 factors, alternating conjugation)."""
    K = np.asarray(K, dtype=np.complex128)
    if K.ndim != 4 or max(K.shape) > 16:
        raise CapacityError("four-variable box average supports sides up to 16")
    # difference along the last two coordinates, then a two-variable box average
    A, B, C, D = K.shape
    total = 0.0
    for d in range(D):
        for d2 in range(D):
            k4 = K[..., d] * K[..., d2].conj()  # (A, B, C)
            m = k4[:, :, :, None] * k4[:, :, None, :].conj()  # (A, B, C, C)
            m = m.transpose(2, 3, 0, 1).reshape(C * C, A, B)
            G = np.einsum("kay,kaz->kyz", m.conj(), m) / A
            total += float(np.sum(np.abs(G) ** 2)) / B ** 2
    return total / (C * C * D * D)


def box_four_check(K, b1, b2, b3, b4) -> tuple:
    """(|E b1 b2 b3 b4 K|, box^(1/16)) for the four-variable inequality."""
    K = np.asarray(K, dtype=np.complex128)
    w = np.einsum("a,b,c,d->abcd", b1, b2, b3, b4)
    lhs = abs(np.mean(w * K))
    return float(lhs), max(box_four_value(K), 0.0) ** (1 / 16)
