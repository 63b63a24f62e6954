"""Bohr sets B_g(n0, rho) = {n : ||n - n0||_g < rho}, ||n||_g = max_j ||n g_j|| + |n/N|."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from mobnil.circle import circle_norm, frac_mul
from mobnil.errors import CapacityError, ValidationError

WINDOW_CAP = 10 ** 8


@dataclass(frozen=True)
class BohrSetSpec:
    g: tuple
    N: int
    n0: int = 0
    rho: float = 0.1
    window: tuple | None = None  # inclusive (lo, hi); default covers the whole set

    def __post_init__(self):
        if self.N < 1:
            raise ValidationError("scale N must be positive")
        if not self.rho > 0:
            raise ValidationError("radius must be positive")

    def scan_window(self) -> tuple:
        if self.window is not None:
            return tuple(int(v) for v in self.window)
        # |n - n0| / N < rho bounds every member
        r = math.ceil(self.rho * self.N)
        return self.n0 - r, self.n0 + r


def bohr_norms(n, g, N: int) -> np.ndarray:
    n = np.asarray(n, dtype=np.int64)
    torus = np.zeros(n.shape)
    for gj in g:
        torus = np.maximum(torus, np.abs(frac_mul(float(gj), n)))
    return torus + np.abs(n) / N


def bohr_norm(n: int, g, N: int) -> float:
    if N < 1:
        raise ValidationError("scale N must be positive")
    return float(bohr_norms(np.array([n]), g, N)[0])


def bohr_enumerate(spec: BohrSetSpec) -> np.ndarray:
    lo, hi = spec.scan_window()
    if hi - lo + 1 > WINDOW_CAP:
        raise CapacityError("Bohr window too large")
    n = np.arange(lo, hi + 1, dtype=np.int64)
    return n[bohr_norms(n - spec.n0, spec.g, spec.N) < spec.rho]


@dataclass
class BohrPropertyReport:
    size_rho: int
    size_2rho: int
    divisible_count: int
    ratio_size: float  # |B(rho)| / (rho^(dim+1) N)
    ratio_doubling: float  # |B(2 rho)| / |B(rho)|
    ratio_divisible: float  # divisible_count / (|B(rho)| / d)
    doubling_constant: float
    divisible_constant: float

    @property
    def holds(self) -> bool:
        return (self.ratio_size > 0 and self.ratio_doubling <= self.doubling_constant
                and self.ratio_divisible >= self.divisible_constant)


def bohr_property_report(spec: BohrSetSpec, d: int) -> BohrPropertyReport:
    """Size, doubling and divisibility statistics of B_g(0, rho).

    Constants come from the covering argument: a 2rho-ball is covered by
    8^dim torus cubes of side rho/2 times 16 intervals of length rho N / 4, so
    |B(2rho)| <= 16 * 8^dim |B(rho)|, and the same count gives the divisible
    lower bound with the reciprocal constant.
    """
    if d < 1:
        raise ValidationError("divisor must be positive")
    dim = len(spec.g)
    base = BohrSetSpec(spec.g, spec.N, 0, spec.rho)
    double = BohrSetSpec(spec.g, spec.N, 0, 2 * spec.rho)
    b1 = bohr_enumerate(base)
    b2 = bohr_enumerate(double)
    div = int(np.count_nonzero(b1 % d == 0))
    size1, size2 = len(b1), len(b2)
    c_double = 16.0 * 8.0 ** dim
    return BohrPropertyReport(
        size1, size2, div,
        size1 / (spec.rho ** (dim + 1) * spec.N),
        size2 / size1,
        div / (size1 / d),
        c_double,
        1.0 / c_double,
    )
