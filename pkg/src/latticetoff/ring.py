"""Exact arithmetic over Z[w] / sqrt2^k with w = exp(i*pi/4).

Every amplitude produced by a Clifford+T circuit is of the form
``(a + b*w + c*w^2 + d*w^3) / sqrt2^k``.  :class:`RingScalar` holds one such
value; :class:`RingArray` holds a dense array of them sharing a single
denominator exponent, backed by int64 numpy arrays with checked overflow.

Canonical form: ``k`` is minimal.  A value is divisible by sqrt2 iff
``a + c`` and ``b + d`` are both even, because ``1/sqrt2 = (w - w^3)/2``.
Zero always has ``k = 0``.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

INT_BOUND = 2**62

OMEGA = cmath.exp(1j * cmath.pi / 4)
_OMEGA_POWERS = np.array([OMEGA**j for j in range(4)])


class RingOverflowError(OverflowError):
    """A coefficient left the checked 64-bit range."""


def _check(*values: int) -> None:
    for v in values:
        if not -INT_BOUND < v < INT_BOUND:
            raise RingOverflowError(f"coefficient {v} exceeds the 64-bit working range")


def _times_sqrt2(a: int, b: int, c: int, d: int) -> tuple[int, int, int, int]:
    # z * (w - w^3)
    return b - d, a + c, b + d, c - a


def _div_sqrt2(a: int, b: int, c: int, d: int) -> tuple[int, int, int, int]:
    return (b - d) // 2, (a + c) // 2, (b + d) // 2, (c - a) // 2


@dataclass(frozen=True, eq=False)
class RingScalar:
    """``(a + b w + c w^2 + d w^3) / sqrt2^k``; equality compares values, not representations."""

    a: int = 0
    b: int = 0
    c: int = 0
    d: int = 0
    k: int = 0

    def __post_init__(self) -> None:
        if self.k < 0:
            raise ValueError("denominator exponent must be non-negative")
        _check(self.a, self.b, self.c, self.d)

    @classmethod
    def from_int(cls, n: int) -> RingScalar:
        return cls(n)

    @classmethod
    def omega(cls, power: int = 1) -> RingScalar:
        """Return w**power, reduced with w^4 = -1."""
        power %= 8
        sign = -1 if power >= 4 else 1
        coeffs = [0, 0, 0, 0]
        coeffs[power % 4] = sign
        return cls(*coeffs)

    @classmethod
    def inv_sqrt2(cls) -> RingScalar:
        return cls(1, 0, 0, 0, 1)

    @property
    def coeffs(self) -> tuple[int, int, int, int]:
        return self.a, self.b, self.c, self.d

    def normalize(self) -> RingScalar:
        return normalize(self)

    def is_zero(self) -> bool:
        return self.coeffs == (0, 0, 0, 0)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = RingScalar(other)
        if not isinstance(other, RingScalar):
            return NotImplemented
        x, y = normalize(self), normalize(other)
        return x.coeffs == y.coeffs and x.k == y.k

    def __hash__(self) -> int:
        x = normalize(self)
        return hash((x.coeffs, x.k))

    def __add__(self, other: RingScalar | int) -> RingScalar:
        if isinstance(other, int):
            other = RingScalar(other)
        if not isinstance(other, RingScalar):
            return NotImplemented
        x, y = self.coeffs, other.coeffs
        k = max(self.k, other.k)
        for _ in range(k - self.k):
            x = _times_sqrt2(*x)
        for _ in range(k - other.k):
            y = _times_sqrt2(*y)
        s = tuple(p + q for p, q in zip(x, y))
        _check(*s)
        return normalize(RingScalar(*s, k))

    __radd__ = __add__

    def __neg__(self) -> RingScalar:
        return RingScalar(-self.a, -self.b, -self.c, -self.d, self.k)

    def __sub__(self, other: RingScalar | int) -> RingScalar:
        if isinstance(other, int):
            other = RingScalar(other)
        return self + (-other)

    def __rsub__(self, other: int) -> RingScalar:
        return RingScalar(other) - self

    def __mul__(self, other: RingScalar | int) -> RingScalar:
        if isinstance(other, int):
            other = RingScalar(other)
        if not isinstance(other, RingScalar):
            return NotImplemented
        return scalar_mul(self, other)

    __rmul__ = __mul__

    def conj(self) -> RingScalar:
        # conj(w) = -w^3, conj(w^2) = -w^2, conj(w^3) = -w
        return RingScalar(self.a, -self.d, -self.c, -self.b, self.k)

    def abs2(self) -> RingScalar:
        return self * self.conj()

    def to_complex(self) -> complex:
        return complex(np.dot(self.coeffs, _OMEGA_POWERS)) / (2 ** (self.k / 2))

    def to_fraction(self) -> Fraction:
        """Exact rational value; raises ValueError for irrational or complex values."""
        z = normalize(self)
        if (z.b, z.c, z.d) != (0, 0, 0) or (z.k % 2 and z.a):
            raise ValueError(f"{z} is not rational")
        return Fraction(z.a, 2 ** (z.k // 2))

    def __str__(self) -> str:
        return f"({self.a} + {self.b}·w + {self.c}·w^2 + {self.d}·w^3)/sqrt2^{self.k}"


def normalize(x: RingScalar) -> RingScalar:
    """Reduce ``x`` to its canonical (minimal-k) representation."""
    a, b, c, d = x.coeffs
    k = x.k
    if (a, b, c, d) == (0, 0, 0, 0):
        return RingScalar()
    while k > 0 and (a + c) % 2 == 0 and (b + d) % 2 == 0:
        a, b, c, d = _div_sqrt2(a, b, c, d)
        k -= 1
    if (a, b, c, d, k) == x.coeffs + (x.k,):
        return x
    return RingScalar(a, b, c, d, k)


def scalar_mul(x: RingScalar, y: RingScalar) -> RingScalar:
    p, q = x.coeffs, y.coeffs
    out = [0, 0, 0, 0]
    for i in range(4):
        for j in range(4):
            if i + j < 4:
                out[i + j] += p[i] * q[j]
            else:
                out[i + j - 4] -= p[i] * q[j]
    _check(*out)
    return normalize(RingScalar(*out, x.k + y.k))


ZERO = RingScalar()
ONE = RingScalar(1)


def _omega_poly_matmul(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    out = np.zeros((4, x.shape[1], y.shape[2]), dtype=np.int64)
    for i in range(4):
        for j in range(4):
            prod = x[i] @ y[j]
            if i + j < 4:
                out[i + j] += prod
            else:
                out[i + j - 4] -= prod
    return out


def _maxabs(x: np.ndarray) -> int:
    return int(np.abs(x).max()) if x.size else 0


class RingArray:
    """Dense array of ring values sharing one denominator exponent.

    ``coeffs`` has shape ``(4, *shape)``; entry ``[j, ...]`` is the
    coefficient of w**j.  Instances are treated as immutable.
    """

    __slots__ = ("coeffs", "k")

    def __init__(self, coeffs: np.ndarray, k: int = 0, *, canonical: bool = False):
        coeffs = np.array(coeffs, dtype=np.int64)
        if coeffs.ndim == 0 or coeffs.shape[0] != 4:
            raise ValueError("leading axis must hold the four w-coefficients")
        if _maxabs(coeffs) >= INT_BOUND:
            raise RingOverflowError("coefficient exceeds the 64-bit working range")
        if not canonical:
            coeffs, k = _normalize_array(coeffs, k)
        coeffs.setflags(write=False)
        self.coeffs = coeffs
        self.k = k

    @property
    def shape(self) -> tuple[int, ...]:
        return self.coeffs.shape[1:]

    @classmethod
    def from_scalars(cls, values) -> RingArray:
        arr = np.asarray(values, dtype=object)
        k = max((v.k for v in arr.flat), default=0)
        coeffs = np.zeros((4, *arr.shape), dtype=np.int64)
        for idx, v in np.ndenumerate(arr):
            x = v.coeffs
            for _ in range(k - v.k):
                x = _times_sqrt2(*x)
            coeffs[(slice(None), *idx)] = x
        return cls(coeffs, k)

    @classmethod
    def zeros(cls, shape: tuple[int, ...]) -> RingArray:
        return cls(np.zeros((4, *shape), dtype=np.int64), 0, canonical=True)

    def __getitem__(self, idx) -> RingScalar:
        if not isinstance(idx, tuple):
            idx = (idx,)
        c = self.coeffs[(slice(None), *idx)]
        if c.ndim != 1:
            raise IndexError("indexing must select a single entry")
        return normalize(RingScalar(*(int(v) for v in c), self.k))

    def _with_k(self, k: int) -> np.ndarray:
        c = self.coeffs
        for _ in range(k - self.k):
            c = _array_times_sqrt2(c)
        return c

    def __add__(self, other: RingArray) -> RingArray:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        k = max(self.k, other.k)
        x, y = self._with_k(k), other._with_k(k)
        if _maxabs(x) + _maxabs(y) >= INT_BOUND:
            raise RingOverflowError("addition would overflow")
        return type(self)._wrap(self, x + y, k)

    def __neg__(self) -> RingArray:
        return type(self)._wrap(self, -self.coeffs, self.k, canonical=True)

    def __sub__(self, other: RingArray) -> RingArray:
        return self + (-other)

    def scale(self, s: RingScalar) -> RingArray:
        out = np.zeros_like(self.coeffs)
        for i, si in enumerate(s.coeffs):
            if si == 0:
                continue
            if _maxabs(self.coeffs) * abs(si) * 4 >= INT_BOUND:
                raise RingOverflowError("scaling would overflow")
            term = omega_shift(self.coeffs, i) * si
            out = out + term
        return type(self)._wrap(self, out, self.k + s.k)

    def times_omega(self, power: int) -> RingArray:
        return type(self)._wrap(self, omega_shift(self.coeffs, power), self.k, canonical=True)

    def conj(self) -> RingArray:
        a, b, c, d = self.coeffs
        return type(self)._wrap(self, np.stack([a, -d, -c, -b]), self.k, canonical=True)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RingArray):
            return NotImplemented
        return (
            self.shape == other.shape
            and self.k == other.k
            and np.array_equal(self.coeffs, other.coeffs)
        )

    __hash__ = None  # type: ignore[assignment]

    def is_zero(self) -> bool:
        return not self.coeffs.any()

    def to_complex(self) -> np.ndarray:
        return np.tensordot(_OMEGA_POWERS, self.coeffs, axes=(0, 0)) / (2 ** (self.k / 2))

    @staticmethod
    def _wrap(like: RingArray, coeffs: np.ndarray, k: int, canonical: bool = False) -> RingArray:
        return type(like)(coeffs, k, canonical=canonical)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(shape={self.shape}, k={self.k})"


def omega_shift(coeffs: np.ndarray, power: int) -> np.ndarray:
    """Multiply coefficient arrays by w**power."""
    power %= 8
    out = coeffs
    for _ in range(power % 4):
        out = np.concatenate([-out[3:4], out[0:3]], axis=0)
    if power >= 4:
        out = -out
    return out


def _array_times_sqrt2(c: np.ndarray) -> np.ndarray:
    a, b, cc, d = c
    if 2 * _maxabs(c) >= INT_BOUND:
        raise RingOverflowError("sqrt2 rescaling would overflow")
    return np.stack([b - d, a + cc, b + d, cc - a])


def _normalize_array(c: np.ndarray, k: int) -> tuple[np.ndarray, int]:
    if not c.any():
        return c.copy(), 0
    while k > 0:
        a, b, cc, d = c
        if ((a + cc) & 1).any() or ((b + d) & 1).any():
            break
        c = np.stack([(b - d) // 2, (a + cc) // 2, (b + d) // 2, (cc - a) // 2])
        k -= 1
    return c, k


class UnitaryMatrix(RingArray):
    """Square ``2^n x 2^n`` matrix over the ring."""

    __slots__ = ()

    def __init__(self, coeffs: np.ndarray, k: int = 0, *, canonical: bool = False):
        super().__init__(coeffs, k, canonical=canonical)
        rows, cols = self.shape
        if rows != cols or rows & (rows - 1):
            raise ValueError(f"not a 2^n square matrix: {self.shape}")

    @property
    def n(self) -> int:
        return self.shape[0].bit_length() - 1

    @property
    def dim(self) -> int:
        return self.shape[0]

    @classmethod
    def identity(cls, n: int) -> UnitaryMatrix:
        dim = 2**n
        coeffs = np.zeros((4, dim, dim), dtype=np.int64)
        coeffs[0] = np.eye(dim, dtype=np.int64)
        return cls(coeffs, 0, canonical=True)

    @classmethod
    def from_entries(cls, rows) -> UnitaryMatrix:
        arr = RingArray.from_scalars(rows)
        return cls(arr.coeffs, arr.k)

    def is_unitary(self) -> bool:
        return mat_mul(self, mat_dagger(self)) == UnitaryMatrix.identity(self.n)


def mat_mul(a: UnitaryMatrix, b: UnitaryMatrix) -> UnitaryMatrix:
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"dimension mismatch {a.shape} @ {b.shape}")
    if _maxabs(a.coeffs) * _maxabs(b.coeffs) * a.shape[1] * 4 >= INT_BOUND:
        raise RingOverflowError("matrix product would overflow")
    return UnitaryMatrix(_omega_poly_matmul(a.coeffs, b.coeffs), a.k + b.k)


def mat_kron(a: UnitaryMatrix, b: UnitaryMatrix) -> UnitaryMatrix:
    if _maxabs(a.coeffs) * _maxabs(b.coeffs) * 4 >= INT_BOUND:
        raise RingOverflowError("Kronecker product would overflow")
    out = None
    for i in range(4):
        for j in range(4):
            prod = np.kron(a.coeffs[i], b.coeffs[j])
            term = np.zeros((4, *prod.shape), dtype=np.int64)
            if i + j < 4:
                term[i + j] = prod
            else:
                term[i + j - 4] = -prod
            out = term if out is None else out + term
    return UnitaryMatrix(out, a.k + b.k)


def mat_dagger(a: UnitaryMatrix) -> UnitaryMatrix:
    conj = a.conj()
    return UnitaryMatrix(np.ascontiguousarray(conj.coeffs.transpose(0, 2, 1)), a.k, canonical=True)
