"""Named property suites.

Each suite runs seeded randomized or exhaustive checks and returns a
:class:`SuiteReport`; ``run_suite("all")`` runs them in a fixed order.  The
checks compare two independent routes to the same quantity or verify an
inequality that must hold unconditionally.
"""
from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from mobnil import characters, circle, correlate, nilflow, sieve, vaughan
from mobnil.errors import ParameterError
from mobnil.phases import bohr, decompose, lipschitz, local

SUITES = ("sieve", "circle", "nilflow", "phases", "vaughan", "correlate")


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)


@dataclass
class SuiteReport:
    suite: str
    results: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_dict(self, timing: bool = False) -> dict:
        return {"suite": self.suite, "passed": self.passed,
                "seconds": self.seconds if timing else None,
                "checks": [{"name": r.name, "passed": r.passed, "detail": r.detail} for r in self.results]}

    def to_json(self, timing: bool = False) -> str:
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=True, default=_jsonable)


def _jsonable(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, Fraction):
        return str(v)
    raise TypeError(type(v).__name__)


def _rng(seed: int, salt: int) -> np.random.Generator:
    return np.random.default_rng([seed, salt])


# --- sieve ----------------------------------------------------------------------

def sieve_strategies_agree(n_max: int = 10 ** 7) -> CheckResult:
    a = sieve.sieve_mobius(n_max, "segmented")
    b = sieve.sieve_mobius(n_max, "spf")
    diff = int(np.count_nonzero(a.values != b.values))
    return CheckResult("sieve_strategies_agree", diff == 0, {"n_max": n_max, "mismatches": diff})


def divisor_sum_of_mu(limit: int = 10 ** 4) -> CheckResult:
    mu = sieve.sieve_mobius(limit).values.astype(np.int64)
    acc = np.zeros(limit + 1, dtype=np.int64)
    for d in range(1, limit + 1):
        if mu[d]:
            acc[d::d] += mu[d]
    want = np.zeros(limit + 1, dtype=np.int64)
    want[1] = 1
    bad = int(np.count_nonzero(acc[1:] != want[1:]))
    return CheckResult("divisor_sum_of_mu", bad == 0, {"limit": limit, "failures": bad})


def mertens_ten() -> CheckResult:
    mob = sieve.sieve_mobius(10)
    total = sieve.mertens(mob, 10)
    return CheckResult("mertens_average_10", Fraction(total, 10) == Fraction(-1, 10),
                       {"sum": total, "average": sieve.mertens_average(mob, 10)})


def cache_round_trip(sizes=(1, 10 ** 3, 10 ** 5)) -> CheckResult:
    ok = True
    for n in sizes:
        t = sieve.sieve_mobius(n)
        ok &= sieve.decode_table(sieve.encode_table(t)) == t
    return CheckResult("cache_round_trip", bool(ok), {"sizes": list(sizes)})


def suite_sieve(seed: int = 0, n_max: int = 10 ** 6) -> list:
    return [sieve_strategies_agree(n_max), divisor_sum_of_mu(), mertens_ten(), cache_round_trip()]


# --- circle ---------------------------------------------------------------------

def subadditivity(seed: int = 0, count: int = 10 ** 5) -> CheckResult:
    rng = _rng(seed, 1)
    x = rng.uniform(-50, 50, count)
    y = rng.uniform(-50, 50, count)
    slack = circle.circle_norm(x) + circle.circle_norm(y) - circle.circle_norm(x + y)
    worst = float(slack.min())
    return CheckResult("circle_norm_subadditive", worst >= -1e-12, {"pairs": count, "min_slack": worst})


def linear_sum_bound_check(seed: int = 0, count: int = 1000, max_len: int = 10 ** 4) -> CheckResult:
    """|sum_{n in I} e(alpha n)| <= 4 min(|I|, 1/||alpha||)."""
    rng = _rng(seed, 2)
    worst, violations = 0.0, 0
    for i in range(count):
        # every fourth alpha is a rational with small denominator, where the bound is tightest
        if i % 4 == 0:
            q = int(rng.integers(1, 50))
            alpha = int(rng.integers(0, q)) / q
        else:
            alpha = float(rng.uniform(-1, 1))
        length = int(rng.integers(1, max_len + 1))
        lo = int(rng.integers(-10 ** 6, 10 ** 6))
        s = abs(circle.exp_sum(lambda n: circle.frac_mul(alpha, n), (lo, lo + length - 1)))
        bound = circle.linear_sum_bound(alpha, length)
        worst = max(worst, s / bound)
        violations += s > bound * (1 + 1e-12)
    return CheckResult("exp_sum_linear_bound", violations == 0,
                       {"instances": count, "violations": violations, "max_ratio": worst})


def erdos_turan_check(seed: int = 0, count: int = 1000) -> CheckResult:
    rng = _rng(seed, 3)
    violations, worst = 0, 0.0
    for _ in range(count):
        L = int(rng.integers(1, 2001))
        theta = float(rng.uniform(0, 1))
        shift = float(rng.uniform(0, 1))
        u = circle.frac_mul(theta, np.arange(1, L + 1)) + shift
        a, b = sorted(rng.uniform(-0.5, 0.5, 2))
        if a == b:
            continue
        rep = circle.erdos_turan(u, float(a), float(b), int(rng.integers(1, 41)))
        worst = max(worst, abs(rep.delta) / rep.et_bound)
        violations += not rep.holds
    return CheckResult("erdos_turan", violations == 0,
                       {"instances": count, "violations": violations, "max_ratio": worst})


def sum_parts_check(seed: int = 0, count: int = 1000, max_len: int = 1000) -> CheckResult:
    rng = _rng(seed, 4)
    violations, worst = 0, 0.0
    for _ in range(count):
        L = int(rng.integers(1, max_len + 1))
        f = np.exp(2j * np.pi * rng.random(L)) * rng.random(L)
        kind = rng.integers(3)
        if kind == 0:  # smooth weight
            psi = np.sin(np.pi * np.arange(L) / L) * rng.random()
        elif kind == 1:  # indicator of a subinterval
            a, b = sorted(rng.integers(0, L + 1, 2))
            psi = np.zeros(L)
            psi[a:b] = 1
        else:
            psi = rng.uniform(-1, 1, L) + 1j * rng.uniform(-1, 1, L)
        rep = circle.sum_parts_check(f, psi)
        if rep.tv * rep.sup_partial > 0:
            worst = max(worst, rep.lhs / (rep.tv * rep.sup_partial))
        violations += not rep.holds
    return CheckResult("summation_by_parts", violations == 0,
                       {"instances": count, "violations": violations, "max_ratio": worst})


def box_inequalities(seed: int = 0, count: int = 1000, side: int = 8) -> CheckResult:
    rng = _rng(seed, 5)
    violations = 0
    for _ in range(count):
        f = rng.normal(size=(side, side)) + 1j * rng.normal(size=(side, side))
        if rng.random() < 0.5:
            f /= np.abs(f).max()
        bx = np.exp(2j * np.pi * rng.random(side)) * rng.random(side)
        by = np.exp(2j * np.pi * rng.random(side)) * rng.random(side)
        violations += not circle.box_norm_check(f, bx, by).holds
    return CheckResult("box_inequalities", violations == 0,
                       {"instances": count, "grid": [side, side], "violations": violations})


def _tally(name: str, outcomes: list) -> CheckResult:
    held = sum(1 for o in outcomes if o is True)
    violated = sum(1 for o in outcomes if o is False)
    return CheckResult(name, violated == 0, {"instances": len(outcomes), "hypothesis_held": held
                                             + violated, "violations": violated,
                                             "undecided_or_vacuous": len(outcomes) - held - violated})


def linear_recurrence_instances(seed: int = 0, count: int = 500) -> CheckResult:
    rng = _rng(seed, 6)
    outcomes = []
    for i in range(count):
        q = int(rng.integers(1, 21))
        a = int(rng.integers(0, q))
        while math.gcd(a, q) != 1:
            a = int(rng.integers(0, q))
        L = int(rng.integers(50, 5001))
        if i % 5 == 4:  # generic alpha: the hypothesis usually fails
            alpha = float(rng.uniform(0, 1))
        elif i % 5 == 3:  # small perturbation of a rational
            alpha = a / q + float(rng.uniform(-1, 1)) * 1e-3 / L
        else:
            alpha = Fraction(a, q)
        delta2 = 0.9 / q
        delta1 = min(float(rng.choice([1e-6, 1e-4, 1e-2])), delta2 / 4)
        rep = circle.detect_linear_recurrence(alpha, (1, L), delta1, delta2)
        outcomes.append(rep.conclusions_hold)
    return _tally("linear_recurrence_detector", outcomes)


def weyl_instances(seed: int = 0, count: int = 200, delta: float = 0.9) -> CheckResult:
    rng = _rng(seed, 7)
    L = math.ceil(2 ** 16 / delta ** 6)
    outcomes = []
    for i in range(count):
        kind = i % 4
        if kind == 0:  # n(n+1)/2 times an integer is an integer
            k = int(rng.integers(1, 5))
            alpha = beta = k / 2
        elif kind == 1:  # tiny leading coefficient
            alpha = float(rng.uniform(0, 1)) * 1e-12
            beta = 0.0
        elif kind == 2:
            alpha, beta = 0.0, 0.0
        else:
            alpha, beta = float(rng.uniform(0, 1)), float(rng.uniform(0, 1))
        gamma = float(rng.uniform(0, 1))
        lo = int(rng.integers(-1000, 1000))
        rep = circle.weyl_detect(alpha, beta, gamma, (lo, lo + L - 1), delta)
        outcomes.append(rep.conclusion_holds)
    return _tally("weyl_detector", outcomes)


def recurrent_quadratic_instances(seed: int = 0, count: int = 300) -> CheckResult:
    rng = _rng(seed, 8)
    outcomes = []
    for i in range(count):
        q = int(rng.integers(1, 13))
        coeffs = [Fraction(int(rng.integers(0, q)), q) for _ in range(3)]
        if i % 3 == 0:
            coeffs[0] = Fraction(0)
        # fraction of l with an integer value, over one period
        M = math.lcm(*(c.denominator for c in coeffs))
        frac_hit = Fraction(circle.count_close(coeffs, circle.Interval(1, M), 0.0), M)
        if frac_hit == 0:
            delta2 = 0.5
        else:
            delta2 = float(frac_hit) * 0.99
        delta1 = min(1e-9, delta2 / 4)
        size = math.ceil(2 ** 58 / delta2 ** 12) + int(rng.integers(0, 1000))
        lo = int(rng.integers(-10 ** 6, 10 ** 6))
        rep = circle.recurrent_quadratic_detect(coeffs[2], coeffs[1], coeffs[0],
                                                circle.Interval(lo, lo + size - 1), delta1, delta2)
        outcomes.append(rep.conclusion_holds)
    return _tally("recurrent_quadratic_detector", outcomes)


def suite_circle(seed: int = 0, instances: int = 1000) -> list:
    return [subadditivity(seed), linear_sum_bound_check(seed, instances), erdos_turan_check(seed, instances),
            sum_parts_check(seed, instances), box_inequalities(seed, instances),
            *detector_checks(seed, instances)]


def detector_checks(seed: int = 0, instances: int = 1000) -> list:
    """Split ``instances`` constructed major-arc instances across the three detectors."""
    n_lin = instances // 2
    n_weyl = instances // 5
    return [linear_recurrence_instances(seed, n_lin), weyl_instances(seed, n_weyl),
            recurrent_quadratic_instances(seed, instances - n_lin - n_weyl)]


# --- nilflow --------------------------------------------------------------------

def power_vs_iteration(seed: int = 0, count: int = 100, n_max: int = 1000) -> CheckResult:
    """Closed-form float powers against repeated multiplication.

    The repeated products are taken in exact rationals on the same float
    generator: a float running product would itself drift by about 1e-7 in
    the third coordinate (which grows like n^2) and measure its own rounding.
    """
    rng = _rng(seed, 9)
    worst = 0.0
    for _ in range(count):
        g = tuple(float(v) for v in rng.uniform(-1, 1, 3))
        gq = tuple(Fraction(v) for v in g)
        t = nilflow.HeisCoordsII(Fraction(0), Fraction(0), Fraction(0))
        for n in range(1, n_max + 1):
            t = nilflow.heis_mul_ii(t, gq)
            p = nilflow.heis_pow(g, n)
            worst = max(worst, max(abs(float(a) - b) for a, b in zip(t, p)))
    return CheckResult("heis_pow_vs_iteration", worst < 1e-9,
                       {"generators": count, "n_max": n_max, "max_error": worst})


def _rand_fraction(rng) -> Fraction:
    return Fraction(int(rng.integers(-1000, 1001)), int(rng.integers(1, 1000)))


def matrix_model(seed: int = 0, count: int = 1000) -> CheckResult:
    rng = _rng(seed, 10)
    bad = 0
    for _ in range(count):
        t = tuple(_rand_fraction(rng) for _ in range(3))
        u = tuple(_rand_fraction(rng) for _ in range(3))
        lhs = nilflow.heis_to_matrix(nilflow.heis_mul_ii(t, u))
        rhs = nilflow.matmul3(nilflow.heis_to_matrix(t), nilflow.heis_to_matrix(u))
        bad += lhs != rhs
    return CheckResult("heis_mul_vs_matrix", bad == 0, {"pairs": count, "mismatches": bad})


def orbit_vs_reduced_power(seed: int = 0, count: int = 20, n_max: int = 2000) -> CheckResult:
    """Fast orbit coordinates against exact rational power-then-reduce."""
    rng = _rng(seed, 11)
    worst = 0.0
    for _ in range(count):
        g = tuple(Fraction(int(rng.integers(-10 ** 6, 10 ** 6)), 10 ** 6 + 3) for _ in range(3))
        n = np.unique(rng.integers(0, n_max, 50))
        fast = nilflow.heis_orbit(tuple(float(v) for v in g), n)
        for j, k in enumerate(n):
            tau, _ = nilflow.heis_reduce(nilflow.heis_pow(tuple(Fraction(float(v)) for v in g), int(k)))
            for c in range(3):
                worst = max(worst, float(circle.circle_norm(float(tau.coords[c]) - fast[c][j])))
    return CheckResult("heis_orbit_vs_exact", worst < 1e-9, {"generators": count, "max_error": worst})


def suite_nilflow(seed: int = 0) -> list:
    return [power_vs_iteration(seed), matrix_model(seed), orbit_vs_reduced_power(seed)]


# --- phases ---------------------------------------------------------------------

PI3_G = (math.sqrt(2) - 1, math.sqrt(3) - 1, 1 / 7)


def pi3_identity(seed: int = 0, N: int = 10 ** 4, budget: int = 10 ** 5) -> CheckResult:
    rep = decompose.pi3_local_check(PI3_G, N, budget=budget, seed=seed, tol=1e-6)
    return CheckResult("pi3_alternating_sums", rep.holds and rep.checked_count >= min(budget, 1),
                       {"configurations": rep.checked_count, "worst_residual": rep.worst_residual,
                        "mode": rep.mode})


def quadratic_phases_pass(seed: int = 0, count: int = 20) -> CheckResult:
    rng = _rng(seed, 12)
    worst = 0.0
    for _ in range(count):
        a, b, c = rng.uniform(-1, 1, 3)
        lo = int(rng.integers(-10 ** 4, 10 ** 4))
        n = np.arange(lo, lo + int(rng.integers(20, 60)))
        phi = local.TabulatedPhase.from_function(
            n, lambda m: circle.poly_phase((float(c), float(b), float(a)), m))
        rep = local.is_locally_polynomial(phi, 2, tol=1e-12, seed=seed)
        worst = max(worst, rep.worst_residual)
    return CheckResult("quadratic_phases_locally_quadratic", worst < 1e-12,
                       {"phases": count, "worst_residual": worst})


BRACKET = (math.sqrt(2), math.sqrt(3), math.sqrt(5))


def bracket_phase(n, alpha=BRACKET[0], beta=BRACKET[1], gamma=BRACKET[2]):
    return circle.frac(circle.frac_mul(alpha, n) * circle.frac_mul(beta, n) * gamma)


def bracket_on_bohr_set(seed: int = 0, N: int = 10 ** 7, rho: float = 0.05, length: int = 2 * 10 ** 5,
                        budget: int = 10 ** 5) -> CheckResult:
    """{alpha n}{beta n}gamma on the part of B_(alpha, beta)(0, rho) inside [1, length]."""
    spec = bohr.BohrSetSpec(BRACKET[:2], N, 0, rho, window=(1, length))
    S = bohr.bohr_enumerate(spec)
    phi = local.TabulatedPhase.from_function(S, bracket_phase)
    rep = local.is_locally_polynomial(phi, 2, tol=1e-9, sample_budget=budget, seed=seed)
    return CheckResult("bracket_on_bohr_set", rep.holds,
                       {"set_size": int(S.size), "configurations": rep.checked_count,
                        "worst_residual": rep.worst_residual, "mode": rep.mode})


def bracket_on_interval(seed: int = 0, length: int = 64) -> CheckResult:
    n = np.arange(1, length + 1)
    phi = local.TabulatedPhase.from_function(n, bracket_phase)
    rep = local.is_locally_polynomial(phi, 2, tol=1e-9, seed=seed)
    witness = None if rep.worst_witness is None else [rep.worst_witness[0], *rep.worst_witness[1]]
    return CheckResult("bracket_fails_on_interval", (not rep.holds) and witness is not None,
                       {"length": length, "worst_residual": rep.worst_residual, "witness": witness})


def decomposition_check(seed: int = 0, N: int = 10 ** 4, eps: float = 0.1) -> CheckResult:
    t0 = time.perf_counter()
    dec = decompose.heis_decompose("bump3", PI3_G, N, eps, seed=seed)
    secs = time.perf_counter() - t0
    ok = (dec.achieved_error <= eps and dec.local_checks["holds"] and dec.weight_mean <= eps ** -4)
    return CheckResult("nilsequence_decomposition", bool(ok),
                       {"K": dec.K, "pieces": len(dec.pieces), "achieved_error": dec.achieved_error,
                        "weight_mean": dec.weight_mean, "weight_exponent": dec.weight_exponent,
                        "local_residual": dec.local_checks["worst_residual"], "seconds": secs})


def fejer_rate(Ns=tuple(2 ** k for k in range(4, 11))) -> CheckResult:
    consts = lipschitz.fejer_rate_constants(lambda x: circle.circle_norm(x), Ns)
    vals = list(consts.values())
    ratio = max(vals) / min(vals)
    return CheckResult("fejer_rate_band", ratio <= 2.0,
                       {"constants": {str(k): v for k, v in consts.items()}, "band_ratio": ratio})


def suite_phases(seed: int = 0) -> list:
    return [pi3_identity(seed), quadratic_phases_pass(seed), bracket_on_bohr_set(seed),
            bracket_on_interval(seed), fejer_rate(), decomposition_check(seed)]


# --- vaughan --------------------------------------------------------------------

def random_bounded_tables(rng, rows: int, length: int) -> np.ndarray:
    return np.sqrt(rng.random((rows, length))) * np.exp(2j * np.pi * rng.random((rows, length)))


def vaughan_identity(seed: int = 0, N: int = 10 ** 4, U: int = 21, V: int = 21, count: int = 100,
                     mobius=None) -> CheckResult:
    rng = _rng(seed, 13)
    mob = mobius if mobius is not None else sieve.sieve_mobius(2 * N)
    F = random_bounded_tables(rng, count, 2 * N + 1)
    t0 = time.perf_counter()
    out = vaughan.decompose_many(F, vaughan.VaughanParams(N, U, V), mob)
    secs = time.perf_counter() - t0
    worst = max(d.residual for d in out)
    return CheckResult("vaughan_identity", worst <= 1e-9,
                       {"N": N, "U": U, "V": V, "functions": count, "max_residual": worst, "seconds": secs})


def _type_ii_brute(A: np.ndarray) -> float:
    # quadruple sum over d, d', w, w' written out with explicit loops over the d pair
    D, W = A.shape
    total = 0.0
    for i in range(D):
        for j in range(D):
            row = A[i] * np.conj(A[j])  # f(dw) conj f(d'w) over w
            total += float(np.sum(np.outer(row, np.conj(row))).real)
    return total / (D * D * W * W)


def type_ii_oracle(seed: int = 0, sizes=(8, 16, 32), count: int = 20) -> CheckResult:
    rng = _rng(seed, 14)
    worst = 0.0
    top = 4 * max(sizes) ** 2
    for _ in range(count):
        table = random_bounded_tables(rng, 1, top + 1)[0]
        for D in sizes:
            for W in sizes:
                d = np.arange(D + 1, 2 * D + 1)
                w = np.arange(W + 1, 2 * W + 1)
                brute = _type_ii_brute(table[np.outer(d, w)])
                fast = vaughan.type_ii_box(table, D, W)
                worst = max(worst, abs(fast - brute) / max(abs(brute), 1e-300))
    return CheckResult("type_ii_box_vs_quadruple_sum", worst <= 1e-12,
                       {"functions": count, "sizes": list(sizes), "max_relative_error": worst})


def sigma_relations(n_max: int = 10 ** 4, U: int = 21, V: int = 21) -> CheckResult:
    rep = vaughan.sigma_check(n_max, U, V)
    return CheckResult("sigma_relations", not rep.failures and not rep.identity_failures,
                       {"checked": rep.checked, "failures": rep.failures[:20],
                        "identity_failures": rep.identity_failures[:20],
                        "small_n_exceptions": len(rep.small_n_exceptions)})


def suite_vaughan(seed: int = 0) -> list:
    return [vaughan_identity(seed), type_ii_oracle(seed), sigma_relations()]


# --- correlate ------------------------------------------------------------------

def character_orthogonality(q_max: int = 100) -> CheckResult:
    worst, zero_bad = 0.0, 0
    for q in range(1, q_max + 1):
        t = characters.CharacterTable(q)
        X = t.matrix()
        gram = X @ X.conj().T
        phi = int(t.units.sum())
        worst = max(worst, float(np.abs(gram - phi * np.eye(t.size)).max()))
        zero_bad += int(np.count_nonzero((np.abs(X) > 0) != t.units[None, :]))
    return CheckResult("character_orthogonality", worst < 1e-9 and zero_bad == 0,
                       {"q_max": q_max, "max_gram_error": worst, "support_mismatches": zero_bad})


def linear_symmetries(seed: int = 0, count: int = 1000, N: int = 1000, mobius=None) -> CheckResult:
    rng = _rng(seed, 15)
    mob = mobius if mobius is not None else sieve.sieve_mobius(N)
    worst_shift = worst_conj = 0.0
    for alpha in rng.uniform(-2, 2, count):
        def corr(a):
            return correlate.correlate(mob, correlate.PhaseSpec("linear", alpha=float(a)), [N]).rows[0].value
        v = corr(alpha)
        worst_shift = max(worst_shift, abs(corr(alpha + 1) - v))
        worst_conj = max(worst_conj, abs(corr(-alpha) - np.conj(v)))
    ok = worst_shift < 1e-12 and worst_conj < 1e-12
    return CheckResult("linear_shift_and_conjugation", ok,
                       {"alphas": count, "N": N, "max_shift_error": worst_shift, "max_conj_error": worst_conj})


def periodic_dual_path(seed: int = 0, q_max: int = 30, n: int = 10 ** 4, mobius=None) -> CheckResult:
    rng = _rng(seed, 16)
    mob = mobius if mobius is not None else sieve.sieve_mobius(n)
    worst = 0.0
    for q in range(1, q_max + 1):
        f = np.sqrt(rng.random(q)) * np.exp(2j * np.pi * rng.random(q))
        worst = max(worst, abs(correlate.correlate_periodic(mob, f, n)
                               - correlate.correlate_periodic_by_characters(mob, f, n)))
    return CheckResult("periodic_vs_characters", worst <= 1e-10, {"q_max": q_max, "n": n, "max_error": worst})


def parallelogram_dual_path(sizes=(1, 2, 3, 17, 64, 200, 512), mobius=None) -> CheckResult:
    mob = mobius if mobius is not None else sieve.sieve_mobius(3 * max(sizes))
    worst = 0.0
    for n in sizes:
        a = correlate.self_correlation_parallelogram(mob, n, "exact")
        b = correlate.self_correlation_parallelogram(mob, n, "factored")
        worst = max(worst, abs(a - b))
    return CheckResult("parallelogram_exact_vs_factored", worst <= 1e-12,
                       {"sizes": list(sizes), "max_difference": worst})


def telescoping(N: int = 10 ** 4, mobius=None) -> CheckResult:
    mob = mobius if mobius is not None else sieve.sieve_mobius(2 * N)
    worst = 0.0
    tests = {"one": lambda n: np.ones(n.shape),
             "linear": lambda n: np.exp(2j * np.pi * circle.frac_mul(math.sqrt(2) - 1, n)),
             "quadratic": lambda n: np.exp(2j * np.pi * circle.poly_phase((0.0, 0.1, math.sqrt(3)), n))}
    for f in tests.values():
        worst = max(worst, correlate.telescope_reconstruct(mob, f, N).residual)
    return CheckResult("telescoping_reconstruction", worst < 1e-9,
                       {"N": N, "functions": list(tests), "max_residual": worst})


def suite_correlate(seed: int = 0) -> list:
    mob = sieve.sieve_mobius(3 * 10 ** 4)
    return [character_orthogonality(), linear_symmetries(seed, mobius=mob),
            periodic_dual_path(seed, mobius=mob), parallelogram_dual_path(mobius=mob),
            telescoping(mobius=mob)]


# --- driver ---------------------------------------------------------------------

_RUNNERS = {"sieve": suite_sieve, "circle": suite_circle, "nilflow": suite_nilflow,
            "phases": suite_phases, "vaughan": suite_vaughan, "correlate": suite_correlate}


def run_suite(name: str, seed: int = 0) -> list:
    """Reports for one suite, or for every suite when name is 'all'."""
    if name == "all":
        names = list(SUITES)
    elif name in _RUNNERS:
        names = [name]
    else:
        raise ParameterError(f"unknown suite {name!r}; choose from {', '.join(SUITES + ('all',))}")
    out = []
    for s in names:
        t0 = time.perf_counter()
        results = _RUNNERS[s](seed)
        out.append(SuiteReport(s, results, time.perf_counter() - t0))
    return out
