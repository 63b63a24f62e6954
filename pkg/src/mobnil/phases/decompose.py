"""Heisenberg nilsequences as averages of twisted one-step nilsequences.

The torus (R/Z)^2 under the orbit's first two coordinates is covered by a
20 x 20 grid of tensor tents, each of support width 1/10 and stride 1/20, which
sum to 1.  On a tent's support the orbit is lifted to local coordinates
v = u * (k1, k2, 0), so v1, v2 stay inside the tent box and v3 = u3 - u2 k1.
F is extended from box x circle to the whole 3-torus by folding each of v1,
v2 back into the box (a 1-Lipschitz retraction), then Fejér-approximated.
Each Fejér term with third frequency m3 contributes the phase m3 v3, which is
locally quadratic on the tent's support.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from mobnil.circle import circle_norm, frac
from mobnil.errors import AccuracyError, ParameterError
from mobnil.nilflow import heis_orbit, heis_reduce
from mobnil.phases.lipschitz import _fejer_tensor, grid_points
from mobnil.phases.local import TabulatedPhase, alternating_sums, is_locally_polynomial, sample_configurations

TENTS = 20
HALF_WIDTH = 1.0 / TENTS  # support width 1/10, equal to twice the stride


def bump3(u1, u2, u3):
    return (4.0 / 3.0) * np.maximum(0, 0.5 - np.abs(u1)) * np.maximum(0, 0.5 - np.abs(u2)) \
        * np.maximum(0, 0.5 - np.abs(u3))


def bump12(u1, u2, u3):
    return 2.0 * np.maximum(0, 0.5 - np.abs(u1)) * np.maximum(0, 0.5 - np.abs(u2)) + 0 * u3


def bump3z(u1, u2, u3):
    # depends on the central coordinate only; only meaningful when the orbit
    # never crosses the u1 = 1/2 wall, e.g. alpha1 = alpha2 = 0
    return (1 + np.cos(2 * np.pi * u3)) / (4 * np.pi) + 0 * u1


BUMPS = {"bump3": bump3, "bump12": bump12, "bump3z": bump3z}


def tent(s: np.ndarray) -> np.ndarray:
    """Hat of half-width 1/20 at 0 on the circle."""
    return np.maximum(0.0, 1.0 - circle_norm(s) / HALF_WIDTH)


def fold(t: np.ndarray, w: float = HALF_WIDTH) -> np.ndarray:
    """1-Lipschitz retraction of the circle onto [-w, w] (t as displacement)."""
    t = frac(t)
    s = np.abs(t)
    out = np.sign(t) * (w - (s - w) * w / (0.5 - w))
    return np.where(s <= w, t, out)


def lift(u1, u2, u3, c1: float, c2: float):
    """Local coordinates of the fundamental point u near the box centre (c1, c2)."""
    k1 = np.rint(c1 - u1)
    k2 = np.rint(c2 - u2)
    return u1 + k1, u2 + k2, frac(u3 - u2 * k1)


@dataclass
class Piece:
    """One tent with all its Fejér terms of a single third frequency m3."""
    tent: tuple  # (a, b): centre (a/20, b/20)
    m3: int
    weight: float  # sum of |c| over the terms, so the normalised factor is bounded by 1
    coeffs: np.ndarray  # (2K-1, 2K-1) complex coefficients in (m1, m2)
    support: np.ndarray  # n in [1, N] with nonzero tent weight


@dataclass
class NilDecomposition:
    g: tuple
    N: int
    eps: float
    K: int
    pieces: list
    achieved_error: float
    weight_mean: float  # mean |w_i| with w_i = |I| * weight_i
    weight_exponent: float  # C with mean |w_i| = eps^-C
    fejer_error: float
    local_checks: dict = field(default_factory=dict)

    def phase(self, i: int) -> TabulatedPhase:
        """phi_i(n) = -m3 v3(n) on the piece's support, so the term carries e(-phi_i)."""
        p = self.pieces[i]
        v3 = _local_v3(self.g, p.support, p.tent)
        return TabulatedPhase(p.support.copy(), frac(-p.m3 * v3))

    def to_dict(self) -> dict:
        return {
            "g": list(self.g), "N": self.N, "eps": self.eps, "K": self.K,
            "piece_count": len(self.pieces), "achieved_error": self.achieved_error,
            "fejer_error": self.fejer_error, "weight_mean": self.weight_mean,
            "weight_exponent": self.weight_exponent,
            "local_checks": self.local_checks,
            "pieces": [{"tent": list(p.tent), "m3": p.m3, "weight": p.weight,
                        "support_size": int(p.support.size)} for p in self.pieces],
        }


def _centre(ab):
    return ab[0] / TENTS, ab[1] / TENTS


def _local_v3(g, n, ab):
    u1, u2, u3 = heis_orbit(g, n)
    return lift(u1, u2, u3, *_centre(ab))[2]


def _piece_function(F, ab):
    c1, c2 = _centre(ab)

    def G(v):
        x1 = c1 + fold(v[:, 0] - c1)
        x2 = c2 + fold(v[:, 1] - c2)
        tau, _ = heis_reduce((x1, x2, v[:, 2]))
        return F(*tau.coords)
    return G


def _tent_supports(g, N):
    n = np.arange(1, N + 1, dtype=np.int64)
    u1, u2, u3 = heis_orbit(g, n)
    out = {}
    for a in range(TENTS):
        ta = tent(u1 - a / TENTS)
        hit_a = ta > 0
        if not hit_a.any():
            continue
        for b in range(TENTS):
            w = ta * tent(u2 - b / TENTS)
            mask = w > 0
            if mask.any():
                out[(a, b)] = n[mask]
    return n, (u1, u2, u3), out


def _local_check(g, support, ab, m3_values, budget, seed, tol):
    """Worst alternating-sum residual of m3 v3 over configurations in the support."""
    if support.size == 0:
        return 0.0, 0
    v3 = TabulatedPhase(support, _local_v3(g, support, ab))
    if support.size <= 64:
        rep_mode = "exhaustive"
    else:
        rep_mode = "sampled"
    if rep_mode == "exhaustive":
        from mobnil.phases.local import enumerate_configurations
        n, H = enumerate_configurations(v3, 3)
    else:
        n, H = sample_configurations(v3, 3, budget, seed)
    if n.size == 0:
        return 0.0, 0
    raw = alternating_sums(v3, n, H)
    worst = max(float(np.abs(circle_norm(m * raw)).max()) for m in m3_values)
    return worst, int(n.size)


def heis_decompose(F, g, N: int, eps: float, K0: int = 4, K_max: int = 32,
                   coeff_floor: float = 1e-13, check_budget: int = 2000,
                   seed: int = 0, tol: float = 1e-6) -> NilDecomposition:
    """Decompose n -> F(T_g^n 0), n in [1, N], into twisted one-step pieces.

    F takes fundamental-domain coordinates (u1, u2, u3) as arrays.  K doubles
    from K0 until the measured sup reconstruction error is at most eps.
    """
    if callable(F) is False:
        F = BUMPS[F]
    if not 0 < eps < 0.5:
        raise ParameterError("eps must lie in (0, 1/2)")
    if N < 1:
        raise ParameterError("N must be positive")
    g = tuple(float(v) for v in g)
    n, (u1, u2, u3), supports = _tent_supports(g, N)
    target = F(u1, u2, u3)
    K = K0
    while True:
        side = 4 * K
        pts = grid_points(side, 3)
        recon = np.zeros(N, dtype=np.complex128)
        fejer_err = 0.0
        tensors = {}
        m = np.arange(-K + 1, K)
        for ab, sup in supports.items():
            G = _piece_function(F, ab)
            vals = np.asarray(G(pts), dtype=np.complex128).reshape((side,) * 3)
            coef = _fejer_tensor(vals, K)
            coef[np.abs(coef) <= coeff_floor] = 0
            tensors[ab] = coef
            c1, c2 = _centre(ab)
            idx = sup - 1
            v1, v2, v3 = lift(u1[idx], u2[idx], u3[idx], c1, c2)
            E1 = np.exp(2j * np.pi * np.outer(v1, m))
            E2 = np.exp(2j * np.pi * np.outer(v2, m))
            E3 = np.exp(2j * np.pi * np.outer(v3, m))
            val = np.einsum("pa,pb,pc,abc->p", E1, E2, E3, coef, optimize=True)
            w = tent(u1[idx] - c1) * tent(u2[idx] - c2)
            recon[idx] += w * val
            # error of the piece on its own support, for reporting
            fejer_err = max(fejer_err, float(np.abs(val - target[idx]).max()))
        achieved = float(np.abs(recon - target).max())
        if achieved <= eps or 2 * K > K_max:
            break
        K *= 2
    if achieved > eps:
        raise AccuracyError(f"sup error {achieved:.3g} exceeds eps={eps} at K={K}", achieved)

    pieces = []
    for ab, coef in tensors.items():
        for j, m3 in enumerate(range(-K + 1, K)):
            c = coef[:, :, j]
            wsum = float(np.abs(c).sum())
            if wsum > 0:
                pieces.append(Piece(ab, m3, wsum, c, supports[ab]))
    total = sum(p.weight for p in pieces)
    # mean over I of |w_i| with w_i = |I| weight_i is just the total
    exponent = math.log(total) / math.log(1 / eps) if total > 1 else 0.0

    checks = {"worst_residual": 0.0, "configurations": 0, "budget": check_budget}
    for ab in supports:
        m3s = sorted({p.m3 for p in pieces if p.tent == ab})
        worst, count = _local_check(g, supports[ab], ab, m3s, check_budget, seed, tol)
        checks["worst_residual"] = max(checks["worst_residual"], worst)
        checks["configurations"] += count
    checks["holds"] = checks["worst_residual"] <= tol
    return NilDecomposition(g, N, eps, K, pieces, achieved, total, exponent, fejer_err, checks)


def heis_bohr_support(g, N: int, corner=(0.0, 0.0), width: float = 0.1) -> np.ndarray:
    """n in [1, N] whose first two orbit coordinates lie in corner + [0, width]^2 mod 1."""
    n = np.arange(1, N + 1, dtype=np.int64)
    u1, u2, _ = heis_orbit(g, n)
    d1 = frac(u1 - corner[0] - width / 2)
    d2 = frac(u2 - corner[1] - width / 2)
    return n[(np.abs(d1) <= width / 2) & (np.abs(d2) <= width / 2)]


def pi3_local_check(g, N: int, corner=(0.0, 0.0), width: float = 0.1, budget: int = 100_000,
                    seed: int = 0, tol: float = 1e-6):
    """Alternating pi3-sums over eight-point configurations inside the Bohr support."""
    S = heis_bohr_support(g, N, corner, width)
    u1, u2, u3 = heis_orbit(g, S)
    phi = TabulatedPhase(S, u3)
    return is_locally_polynomial(phi, 2, tol=tol, sample_budget=budget, seed=seed)
