from __future__ import annotations

import itertools
import random

import pytest

from dignet.gf2 import (
    BitMatrix,
    BitVector,
    matvec,
    nullspace_basis,
    rank,
    rows_independent,
)


def _random_matrix(rng: random.Random, nrows: int, ncols: int) -> BitMatrix:
    return BitMatrix([rng.getrandbits(ncols) for _ in range(nrows)], ncols)


def _subset_xor_independent(rows: list[BitVector]) -> bool:
    """Brute force: no nonempty subset XORs to the zero vector."""
    for k in range(1, len(rows) + 1):
        for subset in itertools.combinations(rows, k):
            acc = 0
            for v in subset:
                acc ^= v.bits
            if acc == 0:
                return False
    return True


def test_matvec_example():
    m = BitMatrix.from_rows([[1, 1], [0, 1]])
    v = BitVector.from_bits([1, 0])
    assert matvec(m, v).to_bits() == [1, 0]


def test_matvec_identity():
    rng = random.Random(7)
    for n in (1, 3, 8, 33):
        eye = BitMatrix.identity(n)
        v = BitVector(rng.getrandbits(n), n)
        assert matvec(eye, v) == v


def test_matvec_dimension_mismatch():
    m = BitMatrix.identity(3)
    with pytest.raises(ValueError):
        matvec(m, BitVector.from_bits([1, 0]))


def test_matvec_is_linear():
    rng = random.Random(11)
    for _ in range(50):
        r = rng.randint(1, 20)
        c = rng.randint(1, 20)
        m = _random_matrix(rng, r, c)
        u = BitVector(rng.getrandbits(c), c)
        v = BitVector(rng.getrandbits(c), c)
        assert matvec(m, u ^ v) == matvec(m, u) ^ matvec(m, v)


def test_rank_examples():
    assert rank(BitMatrix.from_rows([[1, 1], [1, 1]])) == 1
    assert rank(BitMatrix.identity(4)) == 4
    assert rank(BitMatrix.zeros(3, 5)) == 0


def test_rank_transpose_and_bounds():
    rng = random.Random(13)
    for _ in range(100):
        r = rng.randint(1, 16)
        c = rng.randint(1, 16)
        m = _random_matrix(rng, r, c)
        k = rank(m)
        assert k == rank(m.transpose())
        assert 0 <= k <= min(r, c)


def test_rows_independent_examples():
    assert rows_independent([BitVector.from_bits([1, 0]), BitVector.from_bits([0, 1])])
    assert not rows_independent([BitVector.from_bits([1, 1]), BitVector.from_bits([1, 1])])
    assert rows_independent([])


def test_rows_independent_rejects_zero_vector():
    assert not rows_independent([BitVector.from_bits([0, 0, 0])])


def test_rows_independent_matches_subset_xor_bruteforce():
    rng = random.Random(17)
    for _ in range(40):
        n = rng.randint(1, 10)
        k = rng.randint(1, min(12, n + 2))
        rows = [BitVector(rng.getrandbits(n), n) for _ in range(k)]
        assert rows_independent(rows) == _subset_xor_independent(rows)


def test_string_round_trip():
    m = BitMatrix.from_strings(["110", "011", "101"])
    assert m.to_strings() == ["110", "011", "101"]
    assert m.entry(0, 0) == 1 and m.entry(0, 2) == 0
    assert BitMatrix.from_strings(m.to_strings()) == m


def test_transpose_involution():
    rng = random.Random(19)
    for _ in range(20):
        m = _random_matrix(rng, rng.randint(1, 12), rng.randint(1, 12))
        assert m.transpose().transpose() == m


def test_submatrix():
    m = BitMatrix.from_strings(["1101", "0110", "1011"])
    s = m.submatrix(2, 3)
    assert s.to_strings() == ["110", "011"]
    with pytest.raises(ValueError):
        m.submatrix(4, 2)


def test_column_mask():
    m = BitMatrix.from_strings(["10", "11", "01"])
    assert m.column_mask(0) == 0b011
    assert m.column_mask(1) == 0b110


def test_nullspace_basis_annihilates_and_has_right_dimension():
    rng = random.Random(23)
    for _ in range(60):
        r = rng.randint(1, 10)
        c = rng.randint(1, 10)
        m = _random_matrix(rng, r, c)
        basis = nullspace_basis(m)
        assert len(basis) == c - rank(m)
        zero = BitVector(0, r)
        for v in basis:
            assert matvec(m, v) == zero
        assert rows_independent(basis)


def test_nullspace_exhaustive_small():
    rng = random.Random(29)
    for _ in range(20):
        r = rng.randint(1, 6)
        c = rng.randint(1, 6)
        m = _random_matrix(rng, r, c)
        basis = nullspace_basis(m)
        spanned = {0}
        for v in basis:
            spanned |= {x ^ v.bits for x in spanned}
        brute = {
            x
            for x in range(1 << c)
            if matvec(m, BitVector(x, c)).bits == 0
        }
        assert spanned == brute


def test_bitvector_validation():
    with pytest.raises(ValueError):
        BitVector(0b100, 2)
    with pytest.raises(ValueError):
        BitVector.from_bits([0, 2])
    v = BitVector.from_bits([1, 0, 1])
    assert v.weight() == 2
    assert v[0] == 1 and v[1] == 0
    with pytest.raises(IndexError):
        v[3]
