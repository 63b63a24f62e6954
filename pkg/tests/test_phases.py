import math
from fractions import Fraction

import numpy as np
import pytest

from mobnil import circle
from mobnil.errors import AccuracyError, DomainError, ParameterError, ValidationError
from mobnil.nilflow import heis_orbit
from mobnil.phases import bohr, decompose, lipschitz, local


def _norm_oracle(n, g, N):
    # exact rational reduction of n*g_j
    worst = Fraction(0)
    for gj in g:
        t = Fraction(gj) * n
        worst = max(worst, abs(t - round(t)))
    return float(worst) + abs(n) / N


# --- Bohr sets ---------------------------------------------------------------------

def test_bohr_norm_examples():
    assert bohr.bohr_norm(0, (0.3, 0.7), 50) == 0
    assert bohr.bohr_norm(37, (0.0, 0.0), 100) == pytest.approx(0.37)
    assert bohr.bohr_norm(2, (0.25,), 100) == pytest.approx(0.52, abs=1e-15)
    with pytest.raises(ValidationError):
        bohr.bohr_norm(1, (0.1,), 0)


def test_bohr_norm_against_rational_oracle():
    rng = np.random.default_rng(0)
    g = tuple(rng.uniform(-1, 1, 2))
    n = rng.integers(-10 ** 6, 10 ** 6, 300)
    got = bohr.bohr_norms(n, g, 10 ** 6)
    want = np.array([_norm_oracle(int(k), g, 10 ** 6) for k in n])
    assert np.max(np.abs(got - want)) < 1e-9


def test_bohr_enumerate_examples():
    whole = bohr.bohr_enumerate(bohr.BohrSetSpec((0.37, 0.81), 20, 0, 2.1, window=(-20, 20)))
    assert whole.tolist() == list(range(-20, 21))
    tiny = bohr.bohr_enumerate(bohr.BohrSetSpec((0.37,), 20, 5, 1e-12, window=(-20, 20)))
    assert tiny.tolist() == [5]
    half = bohr.bohr_enumerate(bohr.BohrSetSpec((0.5,), 10, 0, 0.3, window=(-10, 10)))
    assert half.tolist() == [-2, 0, 2]


def test_bohr_enumerate_matches_scan():
    spec = bohr.BohrSetSpec((math.sqrt(2), math.sqrt(5)), 2000, 17, 0.2)
    got = bohr.bohr_enumerate(spec).tolist()
    want = [n for n in range(17 - 400, 17 + 401) if _norm_oracle(n - 17, spec.g, 2000) < 0.2]
    assert got == want


def test_bohr_rejects_bad_parameters():
    with pytest.raises(ValidationError):
        bohr.BohrSetSpec((0.1,), 10, 0, 0.0)
    with pytest.raises(ValidationError):
        bohr.bohr_property_report(bohr.BohrSetSpec((0.1,), 10), 0)


def test_property_report_zero_frequency_is_interval():
    rep = bohr.bohr_property_report(bohr.BohrSetSpec((0.0,), 1000, 0, 0.1), 1)
    assert rep.size_rho == 199 and rep.size_2rho == 399
    assert rep.divisible_count == rep.size_rho
    assert rep.holds


def test_property_report_sqrt2_by_enumeration():
    N, rho, d = 10 ** 4, 0.1, 3
    g = (math.sqrt(2),)
    scan = [n for n in range(-2 * N, 2 * N + 1) if _norm_oracle(n, g, N) < rho]
    scan2 = [n for n in range(-2 * N, 2 * N + 1) if _norm_oracle(n, g, N) < 2 * rho]
    rep = bohr.bohr_property_report(bohr.BohrSetSpec(g, N, 0, rho), d)
    assert rep.size_rho == len(scan)
    assert rep.size_2rho == len(scan2)
    assert rep.divisible_count == sum(1 for n in scan if n % d == 0)
    assert (rep.size_rho, rep.size_2rho, rep.divisible_count) == (199, 797, 65)
    assert rep.holds


# --- local polynomiality ------------------------------------------------------------

def test_tabulated_phase_lookup_and_csv():
    phi = local.TabulatedPhase.from_dict({5: 0.25, 1: 0.75, 9: -0.1})
    assert phi.domain.tolist() == [1, 5, 9]
    assert phi(np.array([1]))[0] == -0.25
    with pytest.raises(DomainError):
        phi(np.array([2]))
    again = local.TabulatedPhase.from_csv(phi.to_csv())
    assert np.array_equal(again.domain, phi.domain) and np.array_equal(again.values, phi.values)


def test_tabulated_phase_rejects_unsorted():
    with pytest.raises(ValidationError):
        local.TabulatedPhase(np.array([3, 1]), np.array([0.0, 0.0]))


def test_enumeration_matches_brute_force():
    S = np.array([1, 2, 4, 5, 7, 8, 9, 12, 13, 15])
    phi = local.TabulatedPhase(S, np.zeros(S.size))
    n, H = local.enumerate_configurations(phi, 2)
    got = sorted(zip(n.tolist(), map(tuple, H.tolist())))
    members = set(S.tolist())
    want = sorted((a, (h1, h2)) for a in members for h1 in range(1, 20) for h2 in range(h1, 20)
                  if {a + h1, a + h2, a + h1 + h2} <= members)
    assert got == want


def test_quadratic_phase_is_locally_quadratic():
    n = np.arange(-60, 60)
    phi = local.TabulatedPhase.from_function(n, lambda m: circle.poly_phase((0.3, math.sqrt(3), math.sqrt(2)), m))
    rep = local.is_locally_polynomial(phi, 2, tol=1e-9)
    assert rep.holds and rep.mode == "sampled"
    small = local.TabulatedPhase.from_function(n[:40], lambda m: 0.17 * m * m)
    rep = local.is_locally_polynomial(small, 2, tol=1e-9)
    assert rep.holds and rep.mode == "exhaustive" and rep.checked_count > 0


def test_bracket_phase_on_bohr_set_is_locally_quadratic():
    a, b, c = math.sqrt(2), math.sqrt(3), math.sqrt(5)
    n = np.arange(1, 2 * 10 ** 5)
    keep = (np.abs(circle.frac_mul(a, n)) <= 0.1) & (np.abs(circle.frac_mul(b, n)) <= 0.1)
    S = n[keep]
    phi = local.TabulatedPhase.from_function(S, lambda m: circle.frac_mul(a, m) * circle.frac_mul(b, m) * c)
    rep = local.is_locally_polynomial(phi, 2, tol=1e-9, sample_budget=20_000)
    assert rep.checked_count == 20_000
    assert rep.holds, rep.worst_residual


def test_random_phase_fails_with_witness():
    rng = np.random.default_rng(3)
    S = np.sort(rng.choice(200, 40, replace=False))
    phi = local.TabulatedPhase(S, circle.frac(rng.random(40)))
    rep = local.is_locally_polynomial(phi, 2, tol=1e-9)
    assert not rep.holds
    n0, hs = rep.worst_witness
    pts = local.config_points(np.array([n0]), np.array([hs]))
    assert circle.circle_norm(local.alternating_sums(phi, np.array([n0]), np.array([hs]))[0]) == \
        pytest.approx(rep.worst_residual)
    assert phi.contains(pts).all()


def test_degree_out_of_range():
    phi = local.TabulatedPhase.from_function(np.arange(5), lambda m: 0 * m)
    with pytest.raises(ParameterError):
        local.is_locally_polynomial(phi, 4)


def test_second_derivative_examples():
    alpha = 0.137
    n = np.arange(0, 100)
    phi = local.TabulatedPhase.from_function(n, lambda m: alpha * m * m)
    assert local.second_derivative(phi, 10, 3, 7) == pytest.approx(circle.frac(2 * alpha * 21), abs=1e-12)
    assert local.second_derivative(phi, 10, 0, 7) == pytest.approx(0, abs=1e-12)
    lin = local.TabulatedPhase.from_function(n, lambda m: 0.3 * m + 0.1)
    assert abs(local.second_derivative(lin, 5, 11, 13)) < 1e-12
    with pytest.raises(DomainError):
        local.second_derivative(phi, 90, 6, 7)


def _pi3_phase(N=10 ** 4, width=0.1):
    g = (math.sqrt(2) - 1, math.sqrt(3) - 1, 1 / 7)
    S = decompose.heis_bohr_support(g, N, width=width)
    return local.TabulatedPhase(S, heis_orbit(g, S)[2])


def test_second_derivative_base_point_independent_and_bilinear():
    phi = _pi3_phase()
    S = set(phi.domain.tolist())
    h_all = sorted(S)
    worst_base = worst_bilin = 0.0
    pairs = triples = 0
    for h1 in h_all[:15]:
        for h2 in h_all[:15]:
            bases = [n for n in h_all[:200] if {n + h1, n + h2, n + h1 + h2} <= S]
            if len(bases) < 2:
                continue
            vals = [local.second_derivative(phi, n, h1, h2) for n in bases]
            worst_base = max(worst_base, max(circle.circle_norm(v - vals[0]) for v in vals))
            pairs += 1
    # eight-point configurations (n; h1, h1', h2) all inside S
    ns, H = local.sample_configurations(phi, 3, 500, seed=1)
    for n, (h1, h1b, h2) in zip(ns.tolist(), H.tolist()):
        d = (local.second_derivative(phi, n, h1 + h1b, h2) - local.second_derivative(phi, n, h1, h2)
             - local.second_derivative(phi, n + h1, h1b, h2))
        worst_bilin = max(worst_bilin, circle.circle_norm(d))
        triples += 1
    assert pairs > 0 and triples > 0
    assert worst_base < 1e-6 and worst_bilin < 1e-6


def test_quad_growth_examples():
    n = np.arange(0, 400)
    phi = local.TabulatedPhase.from_function(n, lambda m: 0.213 * m * m + 0.77 * m + 0.05)
    assert local.quad_growth_check(phi, 3, 5, 40).max_residual < 1e-9
    assert local.quad_growth_check(phi, 3, 5, 2).max_residual < 1e-12
    with pytest.raises(DomainError):
        local.quad_growth_check(phi, 3, 50, 40)
    with pytest.raises(ParameterError):
        local.quad_growth_check(phi, 3, 5, 0)


def test_quad_growth_on_pi3_bohr_phase():
    phi = _pi3_phase(10 ** 6, 0.2)
    S = phi.domain
    # a short progression n + h l staying inside the support
    for n0 in S[:50]:
        for h in S[:50]:
            L = 6
            if phi.contains(n0 + h * np.arange(0, L + 1)).all():
                rep = local.quad_growth_check(phi, int(n0), int(h), L)
                assert rep.max_residual < 1e-9
                return
    pytest.fail("no progression found")


def test_quartic_examples():
    alpha = 0.0123
    n = np.arange(0, 3000)
    phi = local.TabulatedPhase.from_function(n, lambda m: alpha * m * m)
    rep = local.quartic_growth_check(phi, 5, 7, 2, 3, 3, 3, [(0, 1, 2, 0, 1, 1), (1, 0, 3, 0, 2, 1)])
    st = 6
    want = circle.frac(2 * alpha * st * st)
    assert rep.rhs_second == pytest.approx(want, abs=1e-12)
    assert rep.holds(1e-9)
    zero = local.quartic_growth_check(phi, 5, 7, 2, 3, 3, 3, [(0, 0, 2, 0, 1, 1)])
    assert zero.max_residual < 1e-9


def test_quartic_missing_point_and_limits():
    n = np.arange(0, 50)
    phi = local.TabulatedPhase.from_function(n, lambda m: 0.1 * m * m)
    with pytest.raises(DomainError, match="outside"):
        local.quartic_growth_check(phi, 5, 7, 2, 3, 3, 3, [(0, 1, 2, 0, 1, 1)])
    with pytest.raises(ParameterError):
        local.quartic_growth_check(phi, 1, 1, 1, 1, 1, 1, [(0, 2, 0, 0, 0, 0)])


# --- Fejér, extension, thresholding -------------------------------------------------

def test_fejer_constant_and_single_frequency():
    p = lipschitz.fejer_approx(lambda x: np.full(x.shape[0], 0.7), 8, 1)
    assert p.error < 1e-12
    big = np.abs(p.coeffs) > 1e-12
    assert p.freqs[big].tolist() == [[0]] and p.coeffs[big][0] == pytest.approx(0.7)
    N = 16
    q = lipschitz.fejer_approx(lambda x: np.exp(2j * np.pi * x), N, 1)
    i = int(np.flatnonzero(q.freqs[:, 0] == 1)[0])
    assert q.coeffs[i] == pytest.approx(1 - 1 / N, abs=1e-12)
    assert q.error == pytest.approx(1 / N, abs=1e-12)


def test_fejer_rate_band():
    consts = lipschitz.fejer_rate_constants(lambda x: circle.circle_norm(x), [2 ** k for k in range(4, 11)])
    vals = list(consts.values())
    assert max(vals) / min(vals) <= 2.0


def test_fejer_two_dimensions_and_dimension_error():
    p = lipschitz.fejer_approx(lambda x: np.cos(2 * np.pi * x[:, 0]) * np.cos(2 * np.pi * x[:, 1]), 8, 2)
    x = np.random.default_rng(0).random((50, 2))
    want = np.cos(2 * np.pi * x[:, 0]) * np.cos(2 * np.pi * x[:, 1]) * (1 - 1 / 8) ** 2
    assert np.max(np.abs(p(x) - want)) < 1e-12
    with pytest.raises(DomainError):
        lipschitz.fejer_approx(lambda x: x[:, 0], 4, 4)


def test_lipschitz_extend_examples():
    Y = np.array([[0.0], [1.0]])
    f = np.array([0.2, 0.9])
    assert np.allclose(lipschitz.lipschitz_extend(Y, f, Y, 1.0), f)
    X = np.linspace(-1, 2, 13)[:, None]
    want = np.minimum(np.minimum(0.2 + np.abs(X[:, 0]), 0.9 + np.abs(X[:, 0] - 1)), 0.9)
    assert np.allclose(lipschitz.lipschitz_extend(Y, f, X, 1.0), want)
    one = lipschitz.lipschitz_extend(np.array([[0.5]]), np.array([3.0]), X, 2.0)
    assert np.all(one <= 3.0) and np.all(one == 3.0)
    with pytest.raises(ValidationError):
        lipschitz.lipschitz_extend(np.zeros((0, 1)), np.zeros(0), X, 1.0)


def test_lipschitz_extend_keeps_constant():
    rng = np.random.default_rng(5)
    Y = rng.random((30, 2))
    f = np.sin(3 * Y[:, 0]) + Y[:, 1]
    M = lipschitz.lipschitz_constant(Y, f)
    X = rng.random((200, 2))
    ext = lipschitz.lipschitz_extend(Y, f, X, M)
    both = np.vstack([Y, X])
    assert lipschitz.lipschitz_constant(both, np.concatenate([f, ext])) <= M + 1e-12


def test_soft_threshold_examples():
    x = np.linspace(0, 1, 11)
    assert np.allclose(lipschitz.soft_threshold(x, 1.0, 0.1), np.maximum(x - 0.1, 0))
    assert np.allclose(lipschitz.soft_threshold(np.full(4, 0.5), 0.0, 0.3), 0.5)
    z = np.array([1 + 1j, -2.0, 0.0])
    out = lipschitz.soft_threshold(z, 1.0, 0.5)
    assert out[0] == pytest.approx((math.sqrt(2) - 0.5) * (1 + 1j) / math.sqrt(2))
    assert out[1] == pytest.approx(-1.5) and out[2] == 0
    with pytest.raises(ParameterError):
        lipschitz.soft_threshold(x, 1.0, 0.0)


# --- decomposition ------------------------------------------------------------------

def test_tents_partition_unity():
    u = np.random.default_rng(1).uniform(-0.5, 0.5, 1000)
    total = sum(decompose.tent(u - a / decompose.TENTS) for a in range(decompose.TENTS))
    assert np.allclose(total, 1.0)


def test_pi3_local_identity_small():
    rep = decompose.pi3_local_check((math.sqrt(2) - 1, math.sqrt(3) - 1, 1 / 7), 10 ** 4, budget=10 ** 4)
    assert rep.holds and rep.checked_count == 10 ** 4


def test_decompose_planar_function():
    dec = decompose.heis_decompose("bump12", (math.sqrt(2) - 1, math.sqrt(3) - 1, 0.0), 2000, 0.1,
                                   check_budget=200)
    assert dec.achieved_error <= 0.1
    assert {p.m3 for p in dec.pieces} == {0}


def test_decompose_abelian_degeneration():
    a3 = math.sqrt(5) - 2
    dec = decompose.heis_decompose("bump3z", (0.0, 0.0, a3), 2000, 0.1, check_budget=200)
    assert dec.achieved_error <= 0.1 and dec.local_checks["holds"]
    n = np.arange(1, 2001)
    for i, p in enumerate(dec.pieces):
        want = circle.frac(-p.m3 * circle.frac_mul(a3, p.support))
        d = circle.circle_norm(dec.phase(i).values - want)
        assert d.max() < 1e-9
    assert n.size == 2000


def test_decompose_bump3_reconstruction():
    g = (math.sqrt(2) - 1, math.sqrt(3) - 1, 0.0)
    dec = decompose.heis_decompose("bump3", g, 10 ** 4, 0.1, check_budget=300)
    assert dec.achieved_error <= 0.1
    assert dec.local_checks["holds"]
    assert dec.weight_mean <= 0.1 ** -4
    # recombine the pieces independently of the internal reconstruction
    n = np.arange(1, 10 ** 4 + 1)
    u1, u2, u3 = heis_orbit(g, n)
    recon = np.zeros(n.size, complex)
    m = np.arange(-dec.K + 1, dec.K)
    for i, p in enumerate(dec.pieces):
        idx = p.support - 1
        c1, c2 = p.tent[0] / decompose.TENTS, p.tent[1] / decompose.TENTS
        v1, v2, _ = decompose.lift(u1[idx], u2[idx], u3[idx], c1, c2)
        inner = np.einsum("pa,pb,ab->p", np.exp(2j * np.pi * np.outer(v1, m)),
                          np.exp(2j * np.pi * np.outer(v2, m)), p.coeffs)
        w = decompose.tent(u1[idx] - c1) * decompose.tent(u2[idx] - c2)
        recon[idx] += w * inner * np.exp(-2j * np.pi * dec.phase(i).values)
    target = decompose.bump3(u1, u2, u3)
    assert np.max(np.abs(recon - target)) == pytest.approx(dec.achieved_error, abs=1e-9)


def test_decompose_reports_unreachable_accuracy():
    with pytest.raises(AccuracyError):
        decompose.heis_decompose("bump3", (0.3, 0.1, 0.2), 500, 0.01, K_max=4, check_budget=10)
    with pytest.raises(ParameterError):
        decompose.heis_decompose("bump3", (0.3, 0.1, 0.2), 500, 0.7)
