"""Dirichlet characters mod q from the cyclic structure of (Z/qZ)^x.

Each odd prime power p^k contributes a cyclic factor generated by a primitive
root; 2^k contributes {±1} x <5> (or less for k <= 2).  A unit r has a log
vector (l_1, ..., l_s) with r ≡ prod gamma_i^{l_i}, and the character with
exponent tuple (j_1, ..., j_s) is chi(r) = e(sum j_i l_i / ord_i).  Characters
are numbered in mixed radix with j_1 most significant; index 0 is principal.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from mobnil.errors import ParameterError

MAX_MODULUS = 10 ** 6


def factorize(q: int) -> list:
    out, p = [], 2
    while p * p <= q:
        if q % p == 0:
            k = 0
            while q % p == 0:
                q //= p
                k += 1
            out.append((p, k))
        p += 1
    if q > 1:
        out.append((q, 1))
    return out


def primitive_root(p: int) -> int:
    if p == 2:
        return 1
    phi = p - 1
    primes = [f for f, _ in factorize(phi)]
    for g in range(2, p):
        if all(pow(g, phi // f, p) != 1 for f in primes):
            return g
    raise ParameterError(f"no primitive root mod {p}")


@dataclass(frozen=True)
class CyclicFactor:
    modulus: int  # the prime power this factor lives in
    generator: int
    order: int
    sign_factor: bool = False  # the {±1} part of 2^k


def _factors_of(p: int, k: int) -> list:
    pk = p ** k
    if p != 2:
        g = primitive_root(p)
        if k > 1 and pow(g, p - 1, p * p) == 1:
            g += p
        return [CyclicFactor(pk, g, pk - pk // p)]
    if k == 1:
        return []
    if k == 2:
        return [CyclicFactor(4, 3, 2, True)]
    return [CyclicFactor(pk, pk - 1, 2, True), CyclicFactor(pk, 5, pk // 4)]


def roots_of_unity(L: int) -> np.ndarray:
    """e(k/L) for k = 0..L-1 with the real and imaginary axes hit exactly."""
    k = np.arange(L)
    out = np.exp(2j * np.pi * k / L)
    for num, val in ((0, 1), (1, 1j), (2, -1), (3, -1j)):
        hit = (4 * k) == num * L
        out[hit] = val
    return out


class CharacterTable:
    def __init__(self, q: int):
        if not 1 <= q <= MAX_MODULUS:
            raise ParameterError(f"modulus must lie in 1..{MAX_MODULUS}")
        self.q = q
        self.prime_powers = factorize(q)
        self.factors = [f for p, k in self.prime_powers for f in _factors_of(p, k)]
        self.orders = tuple(f.order for f in self.factors)
        self.size = math.prod(self.orders) if self.orders else 1

    @cached_property
    def logs(self) -> np.ndarray:
        """(q, s) log vectors of residues; rows of non-units are -1."""
        q = self.q
        r = np.arange(q, dtype=np.int64)
        out = np.zeros((q, len(self.factors)), dtype=np.int64)
        unit = np.array([math.gcd(int(x), q) == 1 for x in r]) if q > 1 else np.ones(1, bool)
        col = 0
        for p, k in self.prime_powers:
            pk = p ** k
            local = r % pk
            facs = _factors_of(p, k)
            if not facs:
                continue
            if p != 2 or len(facs) == 1:
                f = facs[0]
                table = np.full(pk, -1, dtype=np.int64)
                x = 1
                for e in range(f.order):
                    table[x] = e
                    x = x * f.generator % pk
                out[:, col] = table[local]
                col += 1
            else:
                # r ≡ (±1) 5^e mod 2^k
                sign, five = facs
                table_s = np.full(pk, -1, dtype=np.int64)
                table_e = np.full(pk, -1, dtype=np.int64)
                x = 1
                for e in range(five.order):
                    table_s[x], table_e[x] = 0, e
                    table_s[pk - x], table_e[pk - x] = 1, e
                    x = x * 5 % pk
                out[:, col] = table_s[local]
                out[:, col + 1] = table_e[local]
                col += 2
        out[~unit] = -1
        return out

    @cached_property
    def units(self) -> np.ndarray:
        if not self.factors:
            return np.array([math.gcd(int(x), self.q) == 1 for x in range(self.q)])
        return self.logs[:, 0] >= 0

    def exponents(self, index: int) -> tuple:
        if not 0 <= index < self.size:
            raise ParameterError(f"character index {index} out of range 0..{self.size - 1}")
        out = []
        for o in reversed(self.orders):
            out.append(index % o)
            index //= o
        return tuple(reversed(out))

    def values(self, index: int) -> np.ndarray:
        """chi(r) for r = 0..q-1, from integer exponents mod lcm of the orders."""
        j = self.exponents(index)
        vals = np.zeros(self.q, dtype=np.complex128)
        u = self.units
        if not self.factors:
            vals[u] = 1
            return vals
        L = math.lcm(*self.orders)
        k = (self.logs[u] @ np.array([ji * (L // o) for ji, o in zip(j, self.orders)], dtype=np.int64)) % L
        vals[u] = roots_of_unity(L)[k]
        return vals

    def matrix(self) -> np.ndarray:
        return np.stack([self.values(i) for i in range(self.size)])

    def is_real(self, index: int) -> bool:
        return all((2 * j) % o == 0 for j, o in zip(self.exponents(index), self.orders))

    def dual_transform(self, weights: np.ndarray) -> np.ndarray:
        """sum_r weights[r] conj chi(r) for every character, by a DFT over log coordinates.

        ``weights`` is indexed by residues 0..q-1; non-units are ignored.
        Returns a vector in character-index order.
        """
        w = np.asarray(weights, dtype=np.complex128)
        if not self.factors:
            return np.array([w[self.units].sum()])
        grid = np.zeros(self.orders, dtype=np.complex128)
        u = self.units
        np.add.at(grid, tuple(self.logs[u].T), w[u])
        # sum_l grid[l] e(-j.l/ord) is the forward DFT
        return np.fft.fftn(grid).ravel()
