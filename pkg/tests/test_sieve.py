import math
import struct
import zlib
from fractions import Fraction

import numpy as np
import pytest

from mobnil import sieve
from mobnil.errors import CapacityError, ChecksumError, FormatError, PreconditionError, RangeError
from mobnil.vaughan import coeff_a_table, coeff_b_table


def factor_mu(n):
    out, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            out = -out
        p += 1
    return -out if n > 1 else out


def test_first_ten_values():
    t = sieve.sieve_mobius(10)
    assert t.values[1:].tolist() == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1]


def test_single_entry_table():
    assert sieve.sieve_mobius(1).values[1:].tolist() == [1]


def test_definition_cases():
    t = sieve.sieve_mobius(100)
    assert t[4] == 0 and t[30] == -1


@pytest.mark.parametrize("strategy", ["segmented", "spf"])
def test_against_trial_division(strategy):
    t = sieve.sieve_mobius(3000, strategy)
    assert all(int(t[n]) == factor_mu(n) for n in range(1, 3001))


@pytest.mark.parametrize("n_max", [10 ** 3, 10 ** 5])
def test_strategies_agree(n_max):
    assert sieve.sieve_mobius(n_max, "segmented") == sieve.sieve_mobius(n_max, "spf")


def test_workers_do_not_change_table():
    base = sieve.sieve_mobius(300_000, workers=1)
    assert sieve.sieve_mobius(300_000, workers=4) == base


def test_multiplicativity_spot_check():
    t = sieve.sieve_mobius(10 ** 5)
    rng = np.random.default_rng(3)
    checked = 0
    while checked < 2000:
        a, b = (int(v) for v in rng.integers(1, 316, 2))
        if math.gcd(a, b) == 1:
            assert t[a * b] == t[a] * t[b]
            checked += 1


def test_mertens_averages():
    t = sieve.sieve_mobius(10)
    assert sieve.mertens_average(t, 1) == 1.0
    assert sieve.mertens_average(t, 2) == 0.0
    assert sieve.mertens_average(t, 10) == -0.1


def test_mertens_out_of_range():
    with pytest.raises(RangeError):
        sieve.mertens_average(sieve.sieve_mobius(10), 11)


def test_mertens_fixtures(regression, mob_small):
    for N, val in regression["mertens"].items():
        assert Fraction(sieve.mertens(mob_small, int(N)), int(N)) == Fraction(val)


def test_capacity_error():
    with pytest.raises(CapacityError):
        sieve.sieve_mobius(10 ** 6, memory_cap=10 ** 5)


def test_divisor_values():
    d = sieve.sieve_divisor(100)
    assert d[1] == 1 and d[12] == 6 and d[7] == 2
    assert all(d[p] == 2 for p in (2, 3, 5, 97))


def test_divisor_sum_dirichlet_window():
    d = sieve.sieve_divisor(10 ** 5)
    for N in (100, 1000, 10 ** 4, 10 ** 5):
        s = int(d.values[1:N + 1].sum(dtype=np.int64))
        assert N * math.log(N) - 2 * N <= s <= N * math.log(N) + 2 * N


def test_divisor_moments_small():
    d = sieve.sieve_divisor(10)
    assert sieve.divisor_moment(d, 1, 1).value == 1.0
    assert sieve.divisor_moment(d, 2, 10).value == pytest.approx(8.3, abs=0)
    assert sieve.divisor_moment(d, 2, 10).exact_sum == 83


def test_divisor_moment_fixture(regression):
    d = sieve.sieve_divisor(10 ** 6)
    rep = sieve.divisor_moment(d, 2, 10 ** 6)
    assert Fraction(rep.exact_sum, 10 ** 6) == Fraction(regression["divisor_moment_m2_n1e6"])


def test_divisor_moment_ratio_bounded():
    d = sieve.sieve_divisor(10 ** 6)
    ratios = [sieve.divisor_moment(d, 2, n).ratio for n in (10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6)]
    # log^3 growth: the ratio stays within a fixed band rather than drifting upward
    assert max(ratios) / min(ratios) < 3
    assert all(r < 1 for r in ratios)


def test_weighted_second_moment():
    d = sieve.sieve_divisor(10 ** 5)
    assert sieve.divisor_weighted_second_moment(d, 1).value == 1.0
    assert sieve.divisor_weighted_second_moment(d, 2).value == 3.0


def test_weighted_second_moment_fixture(regression):
    d = sieve.sieve_divisor(10 ** 5)
    got = sieve.divisor_weighted_second_moment(d, 10 ** 5).value
    assert got == pytest.approx(regression["divisor_weighted_second_moment_n1e5"], rel=1e-13)


def test_packing_examples():
    rep = sieve.divisor_packing_check(sieve.DivisorPackingInstance(set(range(1, 13)), [2, 3], 1 / 3, 0.25))
    assert rep.union_size == 8
    rep = sieve.divisor_packing_check(sieve.DivisorPackingInstance(set(range(1, 50)), [1], 0.5, 0.25))
    assert rep.union_size == 49
    rep = sieve.divisor_packing_check(sieve.DivisorPackingInstance({2, 4, 6, 8}, [2], 1.0, 0.25))
    assert rep.union_size == 4


def test_packing_precondition():
    with pytest.raises(PreconditionError):
        sieve.divisor_packing_check(sieve.DivisorPackingInstance(set(range(1, 13)), [5], 0.5, 0.25))


def test_vaughan_coefficients_bounded_by_tau():
    t = sieve.sieve_mobius(10 ** 4)
    d = sieve.sieve_divisor(10 ** 4)
    tau = d.values[1:].astype(np.int64)
    for U, V in ((5, 7), (21, 21), (100, 100)):
        a = coeff_a_table(10 ** 4, U, V, t.values)[1:]
        b = coeff_b_table(10 ** 4, V, t.values)[1:]
        assert np.all(np.abs(a) <= tau) and np.all(np.abs(b) <= tau)


# --- cache -------------------------------------------------------------------

def test_cache_layout():
    blob = sieve.encode_table(sieve.sieve_mobius(10))
    assert blob[:4] == b"MBT1"
    assert struct.unpack_from("<I", blob, 4)[0] == 1
    assert struct.unpack_from("<Q", blob, 8)[0] == 10
    assert list(struct.unpack_from("<10b", blob, 16)) == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1]
    assert struct.unpack_from("<I", blob, 26)[0] == zlib.crc32(blob[:26])
    assert len(blob) == 30


@pytest.mark.parametrize("n_max", [1, 10 ** 3, 10 ** 5])
def test_cache_round_trip(tmp_path, n_max):
    t = sieve.sieve_mobius(n_max)
    p = tmp_path / "mu.mbt"
    sieve.write_cache(t, p)
    assert sieve.read_cache(p) == t


def test_cache_rewrite_is_identical(tmp_path):
    t = sieve.sieve_mobius(1000)
    p = tmp_path / "mu.mbt"
    sieve.write_cache(t, p)
    first = p.read_bytes()
    sieve.write_cache(sieve.sieve_mobius(1000), p)
    assert p.read_bytes() == first


def test_cache_rejects_corruption():
    blob = bytearray(sieve.encode_table(sieve.sieve_mobius(100)))
    bad = bytes(blob[:-1]) + bytes([blob[-1] ^ 1])
    with pytest.raises(ChecksumError):
        sieve.decode_table(bad)
    flipped = bytearray(blob)
    flipped[20] ^= 1
    with pytest.raises(ChecksumError):
        sieve.decode_table(bytes(flipped))


def test_cache_rejects_magic_and_version():
    blob = sieve.encode_table(sieve.sieve_mobius(10))
    with pytest.raises(FormatError):
        sieve.decode_table(b"XXXX" + blob[4:])
    payload = blob[:4] + struct.pack("<I", 2) + blob[8:-4]
    with pytest.raises(FormatError) as exc:
        sieve.decode_table(payload + struct.pack("<I", zlib.crc32(payload)))
    assert not isinstance(exc.value, ChecksumError)
