"""Arithmetic in the geometric algebra of 3D Euclidean space.

Multivectors are stored on the blade basis

    1, e1, e2, e3, e12, e13, e23, e123

The pseudoscalar ``e123`` commutes with everything and squares to -1, so it
plays the role of the ordinary complex unit ``i``.  The bivectors are the
quaternions::

    qi = e32 = -e23,   qj = e13,   qk = e21 = -e12

A unit quaternion ``q`` and ``i`` span the commutative subalgebra
{1, i, q, iq}; its elements are carried around as :class:`Bicomplex`
values ``z1 + q*z2``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from numbers import Number

import numpy as np

from .errors import NonInvertibleError, NotInSubalgebraError

BLADES = ("1", "e1", "e2", "e3", "e12", "e13", "e23", "e123")
GRADES = (0, 1, 1, 1, 2, 2, 2, 3)

# bitmask of each stored blade, e.g. e13 -> 0b101
_BITS = (0b000, 0b001, 0b010, 0b100, 0b011, 0b101, 0b110, 0b111)
_SLOT = {bits: k for k, bits in enumerate(_BITS)}

# Cayley table, row = left factor, column = right factor.
_TABLE_TEXT = """
1     e1    e2    e3    e12   e13   e23   e123
e1    1     e12   e13   e2    e3    e123  e23
e2    -e12  1     e23   -e1   -e123 e3    -e13
e3    -e13  -e23  1     e123  -e1   -e2   e12
e12   -e2   e1    e123  -1    -e23  e13   -e3
e13   -e3   -e123 e1    e23   -1    -e12  e2
e23   e123  -e3   e2    -e13  e12   -1    -e1
e123  e23   -e13  e12   -e3   e2    -e1   -1
"""


def _parse_table(text):
    signs = np.zeros((8, 8), dtype=np.int8)
    index = np.zeros((8, 8), dtype=np.intp)
    rows = [line.split() for line in text.strip().splitlines()]
    if len(rows) != 8 or any(len(r) != 8 for r in rows):
        raise ValueError("Cayley table must be 8x8")
    for i, row in enumerate(rows):
        for j, cell in enumerate(row):
            sign = -1 if cell.startswith("-") else 1
            index[i, j] = BLADES.index(cell.lstrip("-"))
            signs[i, j] = sign
    return signs, index


def _reorder_sign(a, b):
    # parity of the transpositions needed to sort the concatenated blades
    a >>= 1
    swaps = 0
    while a:
        swaps += bin(a & b).count("1")
        a >>= 1
    return -1 if swaps & 1 else 1


def generate_cayley_table():
    """Build the product table from e_i e_j = -e_j e_i and e_i^2 = 1.

    Returns ``(signs, index)`` arrays of shape (8, 8) such that
    ``blade[i] * blade[j] = signs[i, j] * blade[index[i, j]]``.
    """
    signs = np.zeros((8, 8), dtype=np.int8)
    index = np.zeros((8, 8), dtype=np.intp)
    for i, a in enumerate(_BITS):
        for j, b in enumerate(_BITS):
            signs[i, j] = _reorder_sign(a, b)
            index[i, j] = _SLOT[a ^ b]
    return signs, index


CAYLEY_SIGNS, CAYLEY_INDEX = _parse_table(_TABLE_TEXT)
_SIGNS_F = CAYLEY_SIGNS.astype(np.float64)
_INDEX_FLAT = CAYLEY_INDEX.ravel()
_REVERSE_SIGNS = np.array([1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0])


class Multivector:
    """Immutable element of G(R^3) with 8 binary64 coefficients."""

    __slots__ = ("_c",)

    def __init__(self, coeffs=None):
        c = np.zeros(8) if coeffs is None else np.array(coeffs, dtype=np.float64)
        if c.shape != (8,):
            raise ValueError(f"expected 8 coefficients, got shape {c.shape}")
        c.flags.writeable = False
        self._c = c

    @classmethod
    def blade(cls, name, value=1.0):
        c = np.zeros(8)
        c[BLADES.index(name)] = value
        return cls(c)

    @classmethod
    def scalar(cls, value):
        """Embed a real or complex number as ``re + im*e123``."""
        value = complex(value)
        c = np.zeros(8)
        c[0], c[7] = value.real, value.imag
        return cls(c)

    @property
    def coeffs(self):
        return self._c

    def __getitem__(self, name):
        return float(self._c[BLADES.index(name)])

    def _coerce(self, other):
        if isinstance(other, Multivector):
            return other
        if isinstance(other, Number):
            return Multivector.scalar(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Multivector(self._c + other._c)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Multivector(self._c - other._c)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __neg__(self):
        return Multivector(-self._c)

    def __mul__(self, other):
        if isinstance(other, Multivector):
            return geometric_product(self, other)
        if isinstance(other, Number):
            if isinstance(other, complex) and other.imag != 0.0:
                return geometric_product(self, Multivector.scalar(other))
            return Multivector(self._c * float(other.real))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, Number):
            # scalars (incl. i = e123) are central, so order does not matter
            return self.__mul__(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, Number) and not isinstance(other, complex):
            return Multivector(self._c / float(other))
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, Multivector):
            return NotImplemented
        return bool(np.array_equal(self._c, other._c))

    __hash__ = None

    def __repr__(self):
        terms = [f"{v!r}*{b}" for v, b in zip(self._c, BLADES) if v != 0.0]
        return "Multivector(" + (" + ".join(terms) or "0") + ")"


def geometric_product(x, y):
    """Geometric product ``x y`` using the Cayley table."""
    terms = (np.outer(x.coeffs, y.coeffs) * _SIGNS_F).ravel()
    return Multivector(np.bincount(_INDEX_FLAT, weights=terms, minlength=8))


def grade(x, r):
    """Project onto the grade-``r`` part (0 scalar ... 3 pseudoscalar)."""
    if r not in (0, 1, 2, 3):
        raise ValueError(f"grade must be in 0..3, got {r!r}")
    mask = np.array([g == r for g in GRADES])
    return Multivector(np.where(mask, x.coeffs, 0.0))


def complex_part(x):
    """Scalar plus pseudoscalar part, read as ``re + im*1j``."""
    if isinstance(x, Bicomplex):
        return x.z1
    return complex(x.coeffs[0], x.coeffs[7])


def reverse(x):
    """Reversion: flips the sign of the bivector and pseudoscalar parts."""
    if isinstance(x, Bicomplex):
        return x.reverse()
    return Multivector(x.coeffs * _REVERSE_SIGNS)


@dataclass(frozen=True)
class UnitQuaternion:
    """Step direction ``q = ci*qi + cj*qj + ck*qk`` with ``q*q = -1``.

    Coefficients are renormalized on construction.
    """

    ci: float
    cj: float
    ck: float

    def __post_init__(self):
        ci, cj, ck = float(self.ci), float(self.cj), float(self.ck)
        norm = math.sqrt(ci * ci + cj * cj + ck * ck)
        if norm == 0.0 or not math.isfinite(norm):
            raise ValueError("quaternion direction must be a finite nonzero vector")
        if norm != 1.0:
            ci, cj, ck = ci / norm, cj / norm, ck / norm
        object.__setattr__(self, "ci", ci)
        object.__setattr__(self, "cj", cj)
        object.__setattr__(self, "ck", ck)

    @classmethod
    def from_angles(cls, theta, phi):
        return from_angles(theta, phi)

    def as_tuple(self):
        return (self.ci, self.cj, self.ck)

    def multivector(self):
        """The bivector ``q`` (qi = -e23, qj = e13, qk = -e12)."""
        c = np.zeros(8)
        c[4], c[5], c[6] = -self.ck, self.cj, -self.ci
        return Multivector(c)

    def dual_vector(self):
        """The vector ``i*q = ci*e1 + cj*e2 + ck*e3``."""
        c = np.zeros(8)
        c[1], c[2], c[3] = self.ci, self.cj, self.ck
        return Multivector(c)


QI = UnitQuaternion(1.0, 0.0, 0.0)
QJ = UnitQuaternion(0.0, 1.0, 0.0)
QK = UnitQuaternion(0.0, 0.0, 1.0)


_QUARTER = math.pi / 2
_QUARTER_COS_SIN = ((1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0))


def _cos_sin(angle):
    # exact at float multiples of pi/2, so (pi/2, pi/2) is exactly j
    k = round(angle / _QUARTER)
    if angle == k * _QUARTER:
        return _QUARTER_COS_SIN[k % 4]
    return math.cos(angle), math.sin(angle)


def from_angles(theta, phi):
    """Direction on the unit sphere: polar angle theta, azimuth phi."""
    theta, phi = float(theta), float(phi)
    if not 0.0 <= theta <= math.pi:
        raise ValueError(f"theta must lie in [0, pi], got {theta!r}")
    if not 0.0 <= phi < 2.0 * math.pi:
        raise ValueError(f"phi must lie in [0, 2pi), got {phi!r}")
    ct, st = _cos_sin(theta)
    cp, sp = _cos_sin(phi)
    return UnitQuaternion(st * cp, st * sp, ct)


@dataclass(frozen=True)
class Bicomplex:
    """Element ``z1 + q*z2`` of the commutative subalgebra {1, i, q, iq}.

    In real coordinates ``w = a + b*i + c*q + d*iq`` with ``z1 = a + bi``
    and ``z2 = c + di``.  Binary operations require matching directions,
    except that a value with ``z2 == 0`` adopts the other operand's.
    """

    z1: complex
    z2: complex = 0j
    direction: UnitQuaternion = QJ

    def __post_init__(self):
        object.__setattr__(self, "z1", complex(self.z1))
        object.__setattr__(self, "z2", complex(self.z2))

    @property
    def a(self):
        return self.z1.real

    @property
    def b(self):
        return self.z1.imag

    @property
    def c(self):
        return self.z2.real

    @property
    def d(self):
        return self.z2.imag

    @classmethod
    def from_coords(cls, a, b, c, d, direction=QJ):
        return cls(complex(a, b), complex(c, d), direction)

    def coords(self):
        return (self.a, self.b, self.c, self.d)

    def _direction_with(self, other):
        if self.direction == other.direction or other.z2 == 0:
            return self.direction
        if self.z2 == 0:
            return other.direction
        raise NotInSubalgebraError(
            "cannot combine bicomplex values with different quaternion directions"
        )

    def _coerce(self, other):
        if isinstance(other, Bicomplex):
            return other
        if isinstance(other, Number):
            return Bicomplex(complex(other), 0j, self.direction)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        q = self._direction_with(other)
        return Bicomplex(self.z1 + other.z1, self.z2 + other.z2, q)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        q = self._direction_with(other)
        return Bicomplex(self.z1 - other.z1, self.z2 - other.z2, q)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __neg__(self):
        return Bicomplex(-self.z1, -self.z2, self.direction)

    def __mul__(self, other):
        if isinstance(other, Number):
            other = complex(other)
            return Bicomplex(self.z1 * other, self.z2 * other, self.direction)
        if not isinstance(other, Bicomplex):
            return NotImplemented
        q = self._direction_with(other)
        # (z1 + q z2)(w1 + q w2) with q^2 = -1 and q commuting with i
        return Bicomplex(
            self.z1 * other.z1 - self.z2 * other.z2,
            self.z1 * other.z2 + self.z2 * other.z1,
            q,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Number):
            other = complex(other)
            return Bicomplex(self.z1 / other, self.z2 / other, self.direction)
        if isinstance(other, Bicomplex):
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, Number):
            return self.inverse() * other
        return NotImplemented

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = Bicomplex(1.0, 0j, self.direction)
        for _ in range(n):
            result = result * self
        return result

    def reverse(self):
        """``a - bi - cq + d iq``: reversion restricted to the subalgebra."""
        return Bicomplex(self.z1.conjugate(), -self.z2.conjugate(), self.direction)

    def inverse(self):
        # (z1 + q z2)(z1 - q z2) = z1^2 + z2^2
        den = self.z1 * self.z1 + self.z2 * self.z2
        if den == 0:
            raise NonInvertibleError(f"{self!r} is a zero divisor")
        return Bicomplex(self.z1 / den, -self.z2 / den, self.direction)

    def idempotent_parts(self):
        """Components on ``(1 + iq)/2`` and ``(1 - iq)/2``.

        The subalgebra is isomorphic to C x C through these projections;
        they mix orders of magnitude and are meant for checking only.
        """
        return self.z1 - 1j * self.z2, self.z1 + 1j * self.z2

    def is_finite(self):
        return cmath.isfinite(self.z1) and cmath.isfinite(self.z2)

    def __repr__(self):
        q = self.direction
        return (
            f"Bicomplex({self.z1!r}, {self.z2!r}, "
            f"q=({q.ci!r}, {q.cj!r}, {q.ck!r}))"
        )


def embed(b):
    """Multivector of ``b.z1 + q*b.z2``."""
    q = b.direction
    a, bb, c, d = b.coords()
    coeffs = np.zeros(8)
    coeffs[0] = a
    coeffs[7] = bb
    # c*q
    coeffs[4] = -c * q.ck
    coeffs[5] = c * q.cj
    coeffs[6] = -c * q.ci
    # d*iq
    coeffs[1] = d * q.ci
    coeffs[2] = d * q.cj
    coeffs[3] = d * q.ck
    return Multivector(coeffs)


def _read_step(x, direction):
    """``z2`` from the quaternion axis with the largest ``|c|``.

    One division per coefficient undoes the single multiplication done by
    :func:`embed`; projecting through ``x * q^-1`` would instead sum three
    rounded products.
    """
    q, co = direction, x.coeffs
    # (|c|, q-blade slot, q-blade sign, iq-blade slot)
    axes = ((abs(q.ci), 6, -q.ci, 1, q.ci), (abs(q.cj), 5, q.cj, 2, q.cj), (abs(q.ck), 4, -q.ck, 3, q.ck))
    _, qs, qc, vs, vc = max(axes)
    return complex(co[qs] / qc, co[vs] / vc)


def to_bicomplex(x, direction, tol=None):
    """Read a multivector in span{1, i, q, iq} as ``z1 + q*z2``.

    ``tol`` bounds the coefficient residual left after removing the
    projection; it defaults to ``1e-12 * max|coefficient|``.
    """
    b = Bicomplex(complex_part(x), _read_step(x, direction), direction)
    if tol is None:
        tol = 1e-12 * float(np.max(np.abs(x.coeffs)))
    residual = float(np.max(np.abs(x.coeffs - embed(b).coeffs)))
    if residual > tol:
        raise NotInSubalgebraError(
            f"residual {residual:.3e} outside span{{1, i, q, iq}} exceeds {tol:.3e}"
        )
    return b
