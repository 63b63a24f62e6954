"""Regenerate tests/fixtures/regression.json by a slow, independent route.

Nothing here uses the package's sieve, chunked sums or error-free products:
mu comes from a pure-Python linear sieve, phases alpha*n are reduced mod 1
in exact rationals (Fraction of the float alpha), and sums use math.fsum.
The one exception is the measured weighted-local run, which needs the
Heisenberg orbit for its phase and is marked as such.

    python3 tests/fixtures/generate.py
"""
from __future__ import annotations

import cmath
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

OUT = Path(__file__).with_name("regression.json")
ALPHA = math.sqrt(2) - 1


def mobius_linear(n_max: int) -> list:
    mu = [0] * (n_max + 1)
    if n_max >= 1:
        mu[1] = 1
    is_comp = bytearray(n_max + 1)
    primes = []
    for i in range(2, n_max + 1):
        if not is_comp[i]:
            primes.append(i)
            mu[i] = -1
        for p in primes:
            ip = i * p
            if ip > n_max:
                break
            is_comp[ip] = 1
            if i % p == 0:
                mu[ip] = 0
                break
            mu[ip] = -mu[i]
    return mu


def divisor_counts(n_max: int) -> list:
    tau = [0] * (n_max + 1)
    for d in range(1, n_max + 1):
        for m in range(d, n_max + 1, d):
            tau[m] += 1
    return tau


def e_minus(alpha: float, n: int) -> complex:
    """e(-alpha n) with alpha n reduced mod 1 exactly."""
    t = Fraction(alpha) * n
    t -= math.floor(t)
    return cmath.exp(-2j * math.pi * float(t))


def csum(values) -> complex:
    values = list(values)
    return complex(math.fsum(v.real for v in values), math.fsum(v.imag for v in values))


def linear_decay(mu, Ns) -> dict:
    out = {}
    for N in Ns:
        s = csum(mu[n] * e_minus(ALPHA, n) for n in range(1, N + 1) if mu[n]) / N
        out[str(N)] = {"re": s.real, "im": s.imag, "abs": abs(s)}
    return out


def characters_mod3(mu, n: int) -> list:
    # index 0 principal; index 1 sends the generator 2 to -1
    chi = [{0: 0, 1: 1, 2: 1}, {0: 0, 1: 1, 2: -1}]
    return [Fraction(sum(mu[m] * c[m % 3] for m in range(1, n + 1)), n) for c in chi]


def three_term(mu, n: int) -> Fraction:
    total = 0
    for x in range(1, n + 1):
        if mu[x]:
            for d in range(1, n + 1):
                total += mu[x] * mu[x + d] * mu[x + 2 * d]
    return Fraction(total, n * n)


def type_i_counts_linear(N: int, U: int, V: int, delta: float, beta: float) -> list:
    """Per dyadic D <= UV: d in (D, 2D] with |E_{N/d<w<=2N/d} e(beta d w)| >= threshold."""
    logn = math.log(N)
    vthr = delta * logn ** -2.5
    out = []
    D = 1
    while D <= U * V:
        qual = []
        for d in range(D + 1, min(2 * D, 2 * N) + 1):
            ws = range(N // d + 1, 2 * N // d + 1)
            if not ws:
                continue
            vals = [cmath.exp(2j * math.pi * float((Fraction(beta) * d * w) % 1)) for w in ws]
            if abs(csum(vals) / len(ws)) >= vthr:
                qual.append(d)
        out.append({"D": D, "count": len(qual), "qualifying": qual})
        D *= 2
    return out


def mobius_dichotomy(mu, N: int, U: int, V: int, delta: float) -> dict:
    corr = Fraction(sum(mu[n] * mu[n] for n in range(N + 1, 2 * N + 1)), N)
    logn = math.log(N)
    vthr = delta * logn ** -2.5
    levels = []
    D = 1
    while D <= U * V:
        count = 0
        for d in range(D + 1, min(2 * D, 2 * N) + 1):
            ws = range(N // d + 1, 2 * N // d + 1)
            if ws and abs(Fraction(sum(mu[d * w] for w in ws), len(ws))) >= vthr:
                count += 1
        levels.append({"D": D, "count": count, "count_threshold": delta ** 2 * D * logn ** -5})
        D *= 2
    large = [lv["D"] for lv in levels if lv["count"] >= lv["count_threshold"] and lv["count"] > 0]
    return {"correlation": float(corr), "correlation_exact": str(corr), "type_i": levels,
            "type_i_large_levels": large, "branch": "TypeI" if large else "undetermined"}


def weighted_local_runs(mu, Ns) -> dict:
    """Measured run: psi a tent on the pi3 Bohr support, phi = pi3 (uses the package orbit)."""
    import numpy as np
    from mobnil.nilflow import heis_orbit
    g = (math.sqrt(2) - 1, math.sqrt(3) - 1, 1 / 7)
    out = {}
    for N in Ns:
        n = np.arange(N + 1, 2 * N + 1, dtype=np.int64)
        u1, u2, u3 = heis_orbit(g, n)
        psi = np.maximum(0, 1 - np.maximum(np.abs(u1), np.abs(u2)) / 0.1)
        terms = [mu[int(k)] * float(w) * cmath.exp(-2j * math.pi * float(p))
                 for k, w, p in zip(n, psi, u3) if w > 0 and mu[int(k)]]
        s = csum(terms) / N
        out[str(N)] = {"re": s.real, "im": s.imag, "abs": abs(s)}
    return out


def main() -> int:
    top = 2 * 10 ** 6
    print("sieving", file=sys.stderr)
    mu = mobius_linear(top)
    fixtures = {"generator": "tests/fixtures/generate.py"}
    fixtures["mertens"] = {str(N): str(Fraction(sum(mu[1:N + 1]), N)) for N in (10, 100, 1000, 10 ** 4)}
    print("linear decay", file=sys.stderr)
    fixtures["linear_decay"] = {"alpha": ALPHA, "rows": linear_decay(mu, (10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6))}
    fixtures["characters_q3_n1000"] = [str(v) for v in characters_mod3(mu, 1000)]
    fixtures["principal_q4_n1000"] = str(Fraction(sum(mu[m] for m in range(1, 1001, 2)), 1000))
    print("three-term", file=sys.stderr)
    fixtures["three_term_n1000"] = str(three_term(mu, 1000))
    print("divisor moments", file=sys.stderr)
    tau = divisor_counts(10 ** 6)
    fixtures["divisor_moment_m2_n1e6"] = str(Fraction(sum(t * t for t in tau[1:]), 10 ** 6))
    fixtures["divisor_weighted_second_moment_n1e5"] = math.fsum(tau[k] ** 2 / k for k in range(1, 10 ** 5 + 1))
    print("type I scan", file=sys.stderr)
    fixtures["type_i_scan_sqrt2"] = {"N": 10 ** 5, "U": 46, "V": 46, "delta": 0.5,
                                     "levels": type_i_counts_linear(10 ** 5, 46, 46, 0.5, math.sqrt(2))}
    print("dichotomy", file=sys.stderr)
    fixtures["mobius_dichotomy"] = {"N": 10 ** 4, "U": 21, "V": 21, "delta": 0.5,
                                    **mobius_dichotomy(mu, 10 ** 4, 21, 21, 0.5)}
    print("weighted local", file=sys.stderr)
    fixtures["weighted_local_pi3"] = {"width": 0.1, "rows": weighted_local_runs(mu, (10 ** 4, 10 ** 5, 10 ** 6))}
    OUT.write_text(json.dumps(fixtures, indent=1, sort_keys=True) + "\n")
    print(f"wrote {OUT}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
