from __future__ import annotations

import cmath
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latticetoff.ring import (
    INT_BOUND,
    ONE,
    ZERO,
    RingArray,
    RingOverflowError,
    RingScalar,
    UnitaryMatrix,
    mat_dagger,
    mat_kron,
    mat_mul,
    normalize,
)

W = cmath.exp(1j * cmath.pi / 4)
TOL = 1e-12

small = st.integers(-50, 50)
scalars = st.builds(RingScalar, small, small, small, small, st.integers(0, 6))


def close(x: RingScalar, z: complex) -> bool:
    return abs(x.to_complex() - z) <= TOL * max(1.0, abs(z))


def test_omega_times_omega_cubed_is_minus_one():
    assert RingScalar.omega(1) * RingScalar.omega(3) == RingScalar.from_int(-1)


def test_half_is_canonical_with_k_two():
    half = RingScalar.inv_sqrt2() * RingScalar.inv_sqrt2()
    assert normalize(half).coeffs == (1, 0, 0, 0)
    assert normalize(half).k == 2
    # (2,0,0,0)/sqrt2^2 is divisible by sqrt2 twice and reduces to 1
    assert normalize(RingScalar(2, 0, 0, 0, 2)) == ONE


def test_omega_has_order_eight():
    assert RingScalar.omega(8) == ONE
    assert all(RingScalar.omega(p) != ONE for p in range(1, 8))


def test_zero_has_exponent_zero():
    assert normalize(RingScalar(0, 0, 0, 0, 5)).k == 0
    assert RingScalar(0, 0, 0, 0, 5) == ZERO
    assert RingScalar(2, 0, 0, 0, 2) == 1
    assert hash(RingScalar(2, 0, 0, 0, 2)) == hash(ONE)


def test_str_format():
    assert str(RingScalar(1, 2, 0, -1, 3)) == "(1 + 2·w + 0·w^2 + -1·w^3)/sqrt2^3"


@given(scalars)
def test_normalize_idempotent_with_float_shadow(x):
    y = normalize(x)
    assert normalize(y) == y
    assert close(y, x.to_complex())
    # canonical: either zero at k=0 or not divisible by sqrt2 at k>0
    a, b, c, d = y.coeffs
    assert y.k == 0 or (a + c) % 2 or (b + d) % 2


@given(scalars, scalars, scalars)
def test_ring_axioms(x, y, z):
    assert x + y == y + x
    assert x * y == y * x
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x - x == ZERO
    assert x * ONE == x


@given(scalars, scalars)
def test_arithmetic_matches_complex_shadow(x, y):
    zx, zy = x.to_complex(), y.to_complex()
    assert close(x + y, zx + zy)
    assert close(x * y, zx * zy)
    assert close(x.conj(), zx.conjugate())
    assert close(x.abs2(), abs(zx) ** 2)


@given(scalars, scalars)
def test_conjugation_is_multiplicative(x, y):
    assert (x * y).conj() == x.conj() * y.conj()
    assert x.abs2().conj() == x.abs2()


@given(scalars)
def test_abs2_is_real(x):
    z = x.abs2().to_complex()
    assert abs(z.imag) <= TOL * max(1.0, abs(z))
    assert z.real >= -TOL


def test_abs2_need_not_be_rational():
    # |1 + w|^2 = 2 + sqrt2
    x = RingScalar(1, 1, 0, 0, 0)
    with pytest.raises(ValueError):
        x.abs2().to_fraction()
    assert RingScalar.inv_sqrt2().abs2().to_fraction() == Fraction(1, 2)


def test_to_fraction_rejects_irrational():
    with pytest.raises(ValueError):
        RingScalar.inv_sqrt2().to_fraction()


def test_overflow_is_detected():
    big = RingScalar(INT_BOUND - 1, 0, 0, 0, 0)
    with pytest.raises(RingOverflowError):
        big * big


def test_int_coercion():
    assert RingScalar.omega(2) + 1 == RingScalar(1, 0, 1, 0, 0)
    assert 1 - RingScalar.omega(0) == ZERO
    assert RingScalar.omega(1) * 2 == RingScalar(0, 2, 0, 0, 0)


@given(st.lists(scalars, min_size=4, max_size=4))
def test_array_roundtrip_and_equality(values):
    arr = RingArray.from_scalars(values)
    assert [arr[i] for i in range(4)] == values
    np.testing.assert_allclose(arr.to_complex(), [v.to_complex() for v in values], atol=1e-9)
    assert arr == RingArray.from_scalars(values)
    assert (arr - arr).is_zero()


@given(st.lists(scalars, min_size=2, max_size=2), scalars)
def test_array_scale_and_omega(values, s):
    arr = RingArray.from_scalars(values)
    assert [arr.scale(s)[i] for i in range(2)] == [v * s for v in values]
    assert [arr.times_omega(3)[i] for i in range(2)] == [v * RingScalar.omega(3) for v in values]
    assert [arr.conj()[i] for i in range(2)] == [v.conj() for v in values]


def h_matrix() -> UnitaryMatrix:
    r = RingScalar.inv_sqrt2()
    return UnitaryMatrix.from_entries([[r, r], [r, -r]])


def t_matrix() -> UnitaryMatrix:
    return UnitaryMatrix.from_entries([[ONE, ZERO], [ZERO, RingScalar.omega(1)]])


def test_matrix_products_match_numpy():
    h, t = h_matrix(), t_matrix()
    prod = mat_mul(mat_mul(h, t), h)
    ref = h.to_complex() @ t.to_complex() @ h.to_complex()
    assert np.abs(prod.to_complex() - ref).max() <= TOL
    kron = mat_kron(h, t)
    assert np.abs(kron.to_complex() - np.kron(h.to_complex(), t.to_complex())).max() <= TOL
    assert kron.n == 2 and kron.is_unitary()


def test_h_squared_is_identity_exactly():
    h = h_matrix()
    assert mat_mul(h, h) == UnitaryMatrix.identity(1)
    assert mat_dagger(t_matrix()) != t_matrix()
    assert mat_mul(t_matrix(), mat_dagger(t_matrix())) == UnitaryMatrix.identity(1)


def test_unitary_matrix_rejects_bad_shape():
    with pytest.raises(ValueError):
        UnitaryMatrix(np.zeros((4, 3, 3), dtype=np.int64))


@settings(max_examples=30)
@given(st.integers(0, 7), st.integers(0, 7))
def test_powers_of_omega(p, q):
    assert RingScalar.omega(p) * RingScalar.omega(q) == RingScalar.omega(p + q)
    assert close(RingScalar.omega(p), W**p)
