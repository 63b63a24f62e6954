"""Two-step nilpotent groups in Mal'cev coordinates, with the Heisenberg group built in.

Second-kind Heisenberg coordinates ⟨t1, t2, t3⟩ stand for e1^t1 e2^t2 e3^t3,
which is the unipotent matrix with x = t1, z = t2, y = t3 + t1 t2.  The lattice
is the set of integer triples, and the fundamental domain is (-1/2, 1/2]^3.

Scalar routines accept floats, ints or Fractions, so every identity can be
replayed in exact rational arithmetic.  :func:`heis_orbit` is the fast path
for whole orbits and avoids reducing huge products directly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, NamedTuple

import numpy as np

from mobnil.circle import exact_pair, frac, frac_mul, nearest_int, two_product
from mobnil.errors import SpecError


class HeisCoordsII(NamedTuple):
    t1: object
    t2: object
    t3: object


@dataclass(frozen=True)
class FundamentalPoint:
    coords: tuple


def _to_int(k):
    return int(k) if not isinstance(k, np.ndarray) else k.astype(np.int64)


# --- Heisenberg, second kind ---------------------------------------------------

def heis_mul_ii(t, u) -> HeisCoordsII:
    return HeisCoordsII(t[0] + u[0], t[1] + u[1], t[2] + u[2] - t[1] * u[0])


def heis_inv_ii(t) -> HeisCoordsII:
    return HeisCoordsII(-t[0], -t[1], -t[2] - t[0] * t[1])


def heis_pow(g, n: int) -> HeisCoordsII:
    """g^n for any integer n."""
    a1, a2, a3 = g
    tri = n * (n - 1) // 2
    return HeisCoordsII(n * a1, n * a2, n * a3 - tri * (a1 * a2))


def heis_reduce(x):
    """(τ(x), γ) with x * γ = τ(x) in the fundamental domain and γ integral."""
    x1, x2, x3 = x
    k1 = nearest_int(x1)
    k2 = nearest_int(x2)
    y3 = x3 + k1 * x2
    k3 = nearest_int(y3)
    tau = FundamentalPoint((frac(x1), frac(x2), frac(y3)))
    return tau, (-_to_int(k1), -_to_int(k2), -_to_int(k3))


def heis_to_matrix(t) -> tuple:
    x, z = t[0], t[1]
    y = t[2] + t[0] * t[1]
    return ((1, x, y), (0, 1, z), (0, 0, 1))


def matrix_to_heis(m) -> HeisCoordsII:
    x, y, z = m[0][1], m[0][2], m[1][2]
    return HeisCoordsII(x, z, y - x * z)


def matmul3(a, b) -> tuple:
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3)) for i in range(3))


def heis_orbit(g, n, x=(0.0, 0.0, 0.0)):
    """Fundamental-domain coordinates of g^n x for an integer array n.

    Every term is reduced mod 1 through error-free products, so the error
    stays near 1e-15 instead of growing with n.
    """
    a1, a2, a3 = (float(v) for v in g)
    x1, x2, x3 = (float(v) for v in x)
    n = np.asarray(n, dtype=np.int64)
    # first coordinate before reduction is n a1 + x1 = K + u1
    p, err = two_product(a1, n.astype(np.float64))
    base = np.rint(p)
    y1 = (p - base) + err + x1
    u1 = frac(y1)
    K = (base + (y1 - u1)).astype(np.int64)
    u2 = frac(frac_mul(a2, n) + x2)
    tri = n * (n - 1) // 2
    c = exact_pair(a1, a2)
    d = exact_pair(a2, x1)
    # third coordinate n a3 - T a1 a2 + x3 - n a2 x1 + K (n a2 + x2)
    third = (frac_mul(a3, n) - frac_mul(c, tri) + x3 - frac_mul(d, n)
             + frac_mul(a2, K * n) + frac_mul(x2, K))
    return u1, u2, frac(third)


def heis_orbit_pi3(g, n):
    """Third fundamental-domain coordinate of g^n (scalar or array n)."""
    scalar = np.ndim(n) == 0
    out = heis_orbit(g, np.atleast_1d(n))[2]
    return float(out[0]) if scalar else out


def heis_orbit_iter(g, x=(0.0, 0.0, 0.0)) -> Iterator[FundamentalPoint]:
    """Successive points x, g x, g^2 x, ... by left multiplication and reduction."""
    point = heis_reduce(x)[0].coords
    while True:
        yield FundamentalPoint(point)
        point = heis_reduce(heis_mul_ii(g, point))[0].coords


def coords_ii_to_i(t) -> "GroupElementI":
    return GroupElementI(HEISENBERG, (t[0], t[1], t[2] + t[0] * t[1] / 2))


def coords_i_to_ii(g: "GroupElementI") -> HeisCoordsII:
    if g.spec.m != 2 or g.spec.n != 3:
        raise SpecError("conversion is defined for the Heisenberg group")
    xi = g.xi
    return HeisCoordsII(xi[0], xi[1], xi[2] - xi[0] * xi[1] / 2)


# --- general two-step groups, first kind ----------------------------------------

def _rational(v):
    if isinstance(v, (int, Fraction)):
        return Fraction(v)
    if isinstance(v, str):
        try:
            return Fraction(v.strip())
        except ValueError:
            raise SpecError(f"structure constant {v!r} is not a rational 'p/q'") from None
    raise SpecError(f"structure constant {v!r} must be rational (int, Fraction or 'p/q')")


@dataclass(frozen=True)
class TwoStepGroupSpec:
    """Structure constants a[(i, j, k)] with [X_i, X_j] = sum_k a_ijk X_k (1-based)."""
    m: int
    n: int
    constants: tuple = field(default=())  # sorted ((i, j, k), Fraction) with i < j

    def __post_init__(self):
        if not (1 <= self.m <= self.n):
            raise SpecError("need 1 <= m <= n")
        for (i, j, k), a in self.constants:
            if not (1 <= i < j <= self.m and self.m < k <= self.n):
                raise SpecError(f"bracket ({i},{j})->{k} is not two-step")

    @classmethod
    def from_entries(cls, m: int, n: int, entries) -> "TwoStepGroupSpec":
        """Build from (i, j, k, a) entries, completing antisymmetrically."""
        table: dict = {}
        for i, j, k, a in entries:
            i, j, k, a = int(i), int(j), int(k), _rational(a)
            if not (1 <= i <= m and 1 <= j <= m):
                raise SpecError(f"bracket indices ({i},{j}) must lie in 1..{m}")
            if not (m < k <= n):
                raise SpecError(f"target {k} must lie in {m + 1}..{n}; only two-step groups are supported")
            if i == j:
                if a != 0:
                    raise SpecError("a_iik must vanish")
                continue
            key, val = ((i, j, k), a) if i < j else ((j, i, k), -a)
            if key in table and table[key] != val:
                raise SpecError(f"entries for {key} violate antisymmetry")
            table[key] = val
        return cls(m, n, tuple(sorted((k, v) for k, v in table.items() if v != 0)))

    @classmethod
    def parse(cls, text: str) -> "TwoStepGroupSpec":
        lines = [ln.split("#")[0].strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln]
        if not lines:
            raise SpecError("empty group specification")
        try:
            m, n = (int(v) for v in lines[0].split())
        except ValueError as exc:
            raise SpecError("first line must be 'm n'") from exc
        entries = []
        for ln in lines[1:]:
            parts = ln.split()
            if len(parts) != 4:
                raise SpecError(f"bad line {ln!r}; expected 'i j k p/q'")
            entries.append((parts[0], parts[1], parts[2], parts[3]))
        return cls.from_entries(m, n, entries)

    @classmethod
    def heisenberg(cls) -> "TwoStepGroupSpec":
        return cls.from_entries(2, 3, [(1, 2, 3, 1)])

    def a(self, i: int, j: int, k: int) -> Fraction:
        for (ii, jj, kk), v in self.constants:
            if kk == k and (ii, jj) == (i, j):
                return v
            if kk == k and (ii, jj) == (j, i):
                return -v
        return Fraction(0)

    def phi(self, x, y) -> tuple:
        """Bracket term: phi_k(x, y) = 1/2 sum_{i,j} a_ijk x_i y_j for k > m."""
        out = [0] * (self.n - self.m)
        for (i, j, k), v in self.constants:
            c = _coerce(v, x[i - 1])
            out[k - self.m - 1] += c * (x[i - 1] * y[j - 1] - x[j - 1] * y[i - 1]) / 2
        return tuple(out)

    def q(self, r) -> tuple:
        """q_k(r) = 1/2 sum_{i<j} a_ijk r_i r_j."""
        out = [0] * (self.n - self.m)
        for (i, j, k), v in self.constants:
            c = _coerce(v, r[i - 1])
            out[k - self.m - 1] += c * r[i - 1] * r[j - 1] / 2
        return tuple(out)


def _coerce(v: Fraction, like):
    # keep exact arithmetic on exact inputs, floats otherwise
    return v if isinstance(like, (int, Fraction)) else float(v)


HEISENBERG = TwoStepGroupSpec.heisenberg()


@dataclass(frozen=True)
class GroupElementI:
    spec: TwoStepGroupSpec
    xi: tuple

    def __post_init__(self):
        if len(self.xi) != self.spec.n:
            raise SpecError(f"expected {self.spec.n} coordinates, got {len(self.xi)}")


def identity_i(spec: TwoStepGroupSpec) -> GroupElementI:
    return GroupElementI(spec, (0,) * spec.n)


def mul_i(a: GroupElementI, b: GroupElementI) -> GroupElementI:
    if a.spec != b.spec:
        raise SpecError("elements belong to different groups")
    spec = a.spec
    m = spec.m
    low = tuple(x + y for x, y in zip(a.xi[:m], b.xi[:m]))
    ph = spec.phi(a.xi[:m], b.xi[:m])
    high = tuple(x + y + p for x, y, p in zip(a.xi[m:], b.xi[m:], ph))
    return GroupElementI(spec, low + high)


def inv_i(a: GroupElementI) -> GroupElementI:
    return GroupElementI(a.spec, tuple(-x for x in a.xi))


def pow_i(g: GroupElementI, n: int) -> GroupElementI:
    return GroupElementI(g.spec, tuple(n * x for x in g.xi))


def ii_to_i(spec: TwoStepGroupSpec, t) -> GroupElementI:
    """Second-kind coordinates t to first kind: ⟨t_low, t_k + q_k(t_low)⟩."""
    m = spec.m
    qs = spec.q(t[:m])
    return GroupElementI(spec, tuple(t[:m]) + tuple(x + c for x, c in zip(t[m:], qs)))


def i_to_ii(g: GroupElementI) -> tuple:
    m = g.spec.m
    qs = g.spec.q(g.xi[:m])
    return tuple(g.xi[:m]) + tuple(x - c for x, c in zip(g.xi[m:], qs))


def lattice_ii_to_i(spec: TwoStepGroupSpec, r) -> GroupElementI:
    r = tuple(int(v) for v in r)
    if len(r) != spec.n:
        raise SpecError(f"expected {spec.n} lattice coordinates")
    return ii_to_i(spec, tuple(Fraction(v) for v in r))


def lattice_coords(g: GroupElementI, tol: float = 1e-12):
    """Integer second-kind coordinates of g, or None when g is not in the lattice."""
    t = i_to_ii(g)
    r = [round(float(v)) for v in t]
    if all(abs(float(v) - k) <= tol for v, k in zip(t, r)):
        return tuple(r)
    return None


def reduce_i(x: GroupElementI):
    """(τ(x), r) with τ(x) = x * γ in (-1/2, 1/2]^n and γ the lattice point with coordinates r."""
    spec = x.spec
    m = spec.m
    xi = x.xi
    k_low = tuple(nearest_int(v) for v in xi[:m])
    k_low = tuple(int(k) if not isinstance(k, int) else k for k in k_low)
    exact = all(isinstance(v, (int, Fraction)) for v in xi)
    kk = k_low if exact else tuple(float(k) for k in k_low)
    ph = spec.phi(xi[:m], kk)
    qk = spec.q(kk)
    r_high = tuple(-int(nearest_int(v - p + c)) for v, p, c in zip(xi[m:], ph, qk))
    r = tuple(-k for k in k_low) + r_high
    gamma = lattice_ii_to_i(spec, r)
    if not exact:
        gamma = GroupElementI(spec, tuple(float(v) for v in gamma.xi))
    tau = mul_i(x, gamma)
    coords = tuple(frac(v) for v in tau.xi)  # already reduced up to rounding
    return FundamentalPoint(coords), r
