import math

import numpy as np
import pytest

from mobnil.characters import CharacterTable, factorize, primitive_root
from mobnil.errors import ParameterError


def _totient(q):
    return sum(1 for r in range(1, q + 1) if math.gcd(r, q) == 1)


def test_factorize_and_primitive_root():
    assert factorize(360) == [(2, 3), (3, 2), (5, 1)]
    assert factorize(1) == []
    assert primitive_root(7) == 3
    assert primitive_root(2) == 1
    for p in (3, 5, 11, 101, 9973):
        g = primitive_root(p)
        assert len({pow(g, e, p) for e in range(p - 1)}) == p - 1


def test_mod3_table():
    t = CharacterTable(3)
    assert t.size == 2
    assert t.values(0)[[0, 1, 2]].tolist() == [0, 1, 1]
    assert np.allclose(t.values(1)[[0, 1, 2]], [0, 1, -1])


def test_mod4_and_mod8_structure():
    assert CharacterTable(4).size == 2
    t8 = CharacterTable(8)
    assert t8.orders == (2, 2)
    # every character mod 8 is real
    assert all(t8.is_real(i) for i in range(4))
    assert np.allclose(t8.matrix().imag, 0)


@pytest.mark.parametrize("q", list(range(1, 101)))
def test_characters_are_homomorphisms_and_orthogonal(q):
    t = CharacterTable(q)
    assert t.size == _totient(q)
    M = t.matrix()
    units = [r for r in range(q) if math.gcd(r, q) == 1]
    assert np.allclose(M[0, units], 1)
    for r in range(q):
        if r not in units:
            assert np.all(M[:, r] == 0)
    # multiplicativity on a few pairs
    for a in units[:6]:
        for b in units[:6]:
            assert np.allclose(M[:, a * b % q], M[:, a] * M[:, b])
    G = M @ M.conj().T
    assert np.allclose(G, t.size * np.eye(t.size), atol=1e-9)
    assert np.allclose(M.conj().T @ M, np.diag([t.size if r in units else 0 for r in range(q)]), atol=1e-9)


def test_dual_transform_matches_direct():
    rng = np.random.default_rng(0)
    for q in (1, 7, 12, 16, 45, 98):
        t = CharacterTable(q)
        w = rng.random(q) + 1j * rng.random(q)
        want = t.matrix().conj() @ np.where(t.units, w, 0)
        assert np.allclose(t.dual_transform(w), want, atol=1e-12)


def test_index_validation():
    t = CharacterTable(5)
    with pytest.raises(ParameterError):
        t.values(4)
    with pytest.raises(ParameterError):
        CharacterTable(0)
