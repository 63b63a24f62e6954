"""Sieving of the Möbius and divisor functions, plus divisor-sum diagnostics.

Two independent Möbius strategies are provided:

* ``"segmented"``: blocks of 2**16 integers; every prime p up to sqrt(n_max)
  flips the sign of its multiples, multiplies a running product, and zeroes
  multiples of p**2.  An entry whose product falls short of n has exactly one
  prime factor above sqrt(n_max).
* ``"spf"``: a smallest-prime-factor table followed by pointer jumping along
  the chain n -> n / spf(n).

Tables are immutable numpy arrays padded with a leading zero, so
``table.values[n]`` is the value at n.
"""
from __future__ import annotations

import math
import struct
import zlib
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from mobnil.errors import CapacityError, ChecksumError, FormatError, PreconditionError, RangeError
from mobnil.numerics import pmap

SEGMENT = 1 << 16
DEFAULT_MEMORY_CAP = 2 << 30
MAGIC = b"MBT1"
VERSION = 1

# rough peak bytes per entry for each routine
_BYTES_PER_ENTRY = {"segmented": 2, "spf": 26, "divisor": 12}


def _check_budget(n_max: int, kind: str, memory_cap: int | None) -> None:
    if n_max < 1:
        raise RangeError("n_max must be at least 1")
    cap = DEFAULT_MEMORY_CAP if memory_cap is None else memory_cap
    need = (n_max + 1) * _BYTES_PER_ENTRY[kind] + (1 << 20)
    if need > cap:
        raise CapacityError(f"n_max={n_max} needs about {need} bytes, cap is {cap}")


def small_primes(limit: int) -> np.ndarray:
    """Primes p <= limit by a plain Eratosthenes sieve."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p::p] = False
    return np.flatnonzero(flags).astype(np.int64)


@dataclass(frozen=True)
class MobiusTable:
    n_max: int
    values: np.ndarray  # int8, length n_max + 1, values[0] = 0

    def __getitem__(self, n):
        return self.values[n]

    def __eq__(self, other):
        return (isinstance(other, MobiusTable) and self.n_max == other.n_max
                and np.array_equal(self.values, other.values))

    __hash__ = None

    @classmethod
    def from_array(cls, mu: np.ndarray) -> "MobiusTable":
        """Wrap mu(1..n) given as a length-n array."""
        vals = np.zeros(len(mu) + 1, dtype=np.int8)
        vals[1:] = mu
        vals.flags.writeable = False
        return cls(len(mu), vals)


@dataclass(frozen=True)
class DivisorTable:
    n_max: int
    values: np.ndarray  # uint32, length n_max + 1, values[0] = 0

    def __getitem__(self, n):
        return self.values[n]


def _mobius_segment(lo: int, hi: int, primes: np.ndarray) -> np.ndarray:
    n = np.arange(lo, hi, dtype=np.int64)
    prod = np.ones(hi - lo, dtype=np.int64)
    sign = np.ones(hi - lo, dtype=np.int8)
    for p in primes:
        p = int(p)
        if p * p >= hi:
            break  # n < hi has at most one prime factor this large
        first = (-lo) % p
        prod[first::p] *= p
        sign[first::p] *= -1
        pp = p * p
        if pp < hi:
            sign[(-lo) % pp::pp] = 0
    sign[prod != n] *= -1
    return sign


def _mobius_segmented(n_max: int, workers) -> np.ndarray:
    primes = small_primes(math.isqrt(n_max))
    starts = list(range(1, n_max + 1, SEGMENT))
    blocks = pmap(lambda s: _mobius_segment(s, min(s + SEGMENT, n_max + 1), primes),
                  starts, workers)
    return np.concatenate(blocks)


def smallest_prime_factor(n_max: int) -> np.ndarray:
    spf = np.zeros(n_max + 1, dtype=np.int32)
    for p in small_primes(math.isqrt(n_max)):
        p = int(p)
        view = spf[p * p::p]
        view[view == 0] = p
    idx = np.flatnonzero(spf == 0)
    spf[idx] = idx
    spf[0] = 0
    if n_max >= 1:
        spf[1] = 1
    return spf


def _mobius_spf(n_max: int) -> np.ndarray:
    spf = smallest_prime_factor(n_max).astype(np.int64)
    n = np.arange(n_max + 1, dtype=np.int64)
    spf[0] = 1
    nxt = n // spf
    local = np.where(nxt % spf == 0, 0, -1).astype(np.int8)
    local[1] = 1
    nxt[0], nxt[1] = 1, 1
    local[0] = 0
    # chain length is at most log2(n_max); each round doubles the covered prefix
    acc, ptr = local, nxt
    while True:
        if not np.any(ptr[2:] > 1):
            break
        acc = acc * acc[ptr]
        ptr = ptr[ptr]
    return acc[1:].astype(np.int8)


def sieve_mobius(n_max: int, strategy: str = "segmented", workers=1,
                 memory_cap: int | None = None) -> MobiusTable:
    """Table of mu(1..n_max).  Output does not depend on ``workers``."""
    if strategy not in ("segmented", "spf"):
        raise ValueError(f"unknown strategy {strategy!r}")
    _check_budget(n_max, strategy, memory_cap)
    mu = _mobius_segmented(n_max, workers) if strategy == "segmented" else _mobius_spf(n_max)
    return MobiusTable.from_array(mu)


def sieve_divisor(n_max: int, memory_cap: int | None = None) -> DivisorTable:
    """tau(n) for n <= n_max, pairing each divisor d <= sqrt(n) with n/d."""
    _check_budget(n_max, "divisor", memory_cap)
    tau = np.zeros(n_max + 1, dtype=np.uint32)
    for d in range(1, math.isqrt(n_max) + 1):
        tau[d * d::d] += 2
        tau[d * d] -= 1
    tau.flags.writeable = False
    return DivisorTable(n_max, tau)


def mertens_average(table: MobiusTable, n: int) -> float:
    if not 1 <= n <= table.n_max:
        raise RangeError(f"n={n} outside 1..{table.n_max}")
    total = int(table.values[1:n + 1].sum(dtype=np.int64))
    return total / n


def mertens(table: MobiusTable, n: int) -> int:
    if not 0 <= n <= table.n_max:
        raise RangeError(f"n={n} outside 0..{table.n_max}")
    return int(table.values[:n + 1].sum(dtype=np.int64))


@dataclass
class MomentReport:
    value: float
    exact_sum: int
    ratio: float | None  # value / (log n)^(2^m - 1), None when log n = 0


def divisor_moment(table: DivisorTable, m: int, n: int) -> MomentReport:
    """E_{k<=n} tau(k)^m with exact integer accumulation."""
    if not 1 <= m <= 6:
        raise RangeError("moment order must be in 1..6")
    if not 1 <= n <= table.n_max:
        raise RangeError(f"n={n} outside 1..{table.n_max}")
    vals, counts = np.unique(table.values[1:n + 1], return_counts=True)
    total = sum(int(c) * int(v) ** m for v, c in zip(vals, counts))
    value = float(Fraction(total, n))
    logn = math.log(n)
    ratio = value / logn ** (2 ** m - 1) if n > 1 else None
    return MomentReport(value, total, ratio)


@dataclass
class WeightedMomentReport:
    value: float
    ratio: float | None  # value / (log n)^4


def divisor_weighted_second_moment(table: DivisorTable, n: int) -> WeightedMomentReport:
    """sum_{k<=n} tau(k)^2 / k."""
    if not 1 <= n <= table.n_max:
        raise RangeError(f"n={n} outside 1..{table.n_max}")
    tau = table.values[1:n + 1].astype(np.float64)
    k = np.arange(1, n + 1, dtype=np.float64)
    value = math.fsum(tau * tau / k)
    return WeightedMomentReport(value, value / math.log(n) ** 4 if n > 1 else None)


@dataclass
class DivisorPackingInstance:
    A: set
    divisors: list
    delta: float
    kappa: float
    N: int | None = None  # ambient bound, defaults to max(A)

    def ambient(self) -> int:
        return self.N if self.N is not None else max(self.A)


@dataclass
class PackingReport:
    union_size: int
    rhs_bound: float
    constant: float
    ratio: float
    holds: bool


def divisor_packing_check(inst: DivisorPackingInstance, constant: float = 1.0) -> PackingReport:
    """Compare |union of A_d| with delta^2 |D|^2 |A| alpha^kappa (log N)^(-2^(2/kappa))."""
    if not inst.A:
        raise PreconditionError("A must be nonempty")
    if not 0 < inst.kappa < 0.5:
        raise PreconditionError("kappa must lie in (0, 1/2)")
    if not 0 < inst.delta <= 1:
        raise PreconditionError("delta must lie in (0, 1]")
    N = inst.ambient()
    if max(inst.A) > N or min(inst.A) < 1:
        raise PreconditionError("A must lie in 1..N")
    a = np.fromiter(sorted(inst.A), dtype=np.int64)
    size_a = len(a)
    union = np.zeros(size_a, dtype=bool)
    for d in inst.divisors:
        hit = a % int(d) == 0
        # tolerance so that decimal deltas like 1/3 behave as written
        if hit.sum() < inst.delta * size_a - 1e-9:
            raise PreconditionError(f"|A_{d}| = {int(hit.sum())} < delta*|A|")
        union |= hit
    union_size = int(union.sum())
    alpha = size_a / N
    logn = math.log(N)
    expo = 2.0 ** (2.0 / inst.kappa)
    if logn <= 0:
        rhs = math.inf
    else:
        log_rhs = (math.log(inst.delta ** 2 * len(inst.divisors) ** 2 * size_a)
                   + inst.kappa * math.log(alpha) - expo * math.log(logn))
        rhs = math.exp(log_rhs) if log_rhs < 700 else math.inf
    ratio = union_size / rhs if rhs > 0 else math.inf
    return PackingReport(union_size, rhs, constant, ratio, union_size >= constant * rhs)


# --- binary cache -----------------------------------------------------------

_HEADER = struct.Struct("<4sIQ")


def encode_table(table: MobiusTable) -> bytes:
    payload = _HEADER.pack(MAGIC, VERSION, table.n_max) + table.values[1:].astype(np.int8).tobytes()
    return payload + struct.pack("<I", zlib.crc32(payload) & 0xFFFFFFFF)


def decode_table(blob: bytes) -> MobiusTable:
    if len(blob) < _HEADER.size + 4:
        raise FormatError("cache truncated")
    magic, version, n_max = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"unknown cache version {version}")
    end = _HEADER.size + n_max
    if len(blob) != end + 4:
        raise FormatError("cache length does not match header")
    (crc,) = struct.unpack_from("<I", blob, end)
    if zlib.crc32(blob[:end]) & 0xFFFFFFFF != crc:
        raise ChecksumError("cache checksum mismatch")
    mu = np.frombuffer(blob, dtype=np.int8, count=n_max, offset=_HEADER.size)
    return MobiusTable.from_array(mu.copy())


def write_cache(table: MobiusTable, path) -> None:
    Path(path).write_bytes(encode_table(table))


def read_cache(path) -> MobiusTable:
    return decode_table(Path(path).read_bytes())
