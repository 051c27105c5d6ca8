"""Matrix representations of the quaternionic step.

Two representations are supported:

* ``PAULI2`` -- 2x2 complex, ``qi, qj, qk -> -i*sigma_1, -i*sigma_2, -i*sigma_3``
* ``REAL4``  -- 4x4 with real generators, all strictly off-diagonal

A bicomplex value ``z1 + q*z2`` becomes ``z1*1_n + z2*Q_n``.  The derivative
of a holomorphic ``f`` is read off as ``tr[f(z 1_n + h Q_n) Q_n^-1] / (n h)``.

Only ``exp``, ``sin``, ``cos``, ``inverse`` and polynomials are evaluated
as genuine matrix functions here.  Logarithms and square roots must go
through :mod:`qsd.elementary` (see :func:`via_closed_form`); Schur-based
``logm``/``sqrtm`` lose the small step entirely.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from numbers import Number

import numpy as np

from .clifford import Bicomplex, from_angles
from .errors import NonInvertibleError, NotInSubalgebraError


class Rep(enum.Enum):
    PAULI2 = 2
    REAL4 = 4

    @property
    def n(self):
        return self.value


I2 = np.array([[0, -1j], [-1j, 0]])
J2 = np.array([[0, -1], [1, 0]], dtype=complex)
K2 = np.array([[-1j, 0], [0, 1j]])

I4 = np.array([[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]], dtype=complex)
J4 = np.array([[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]], dtype=complex)
K4 = np.array([[0, 0, 0, 1], [0, 0, 1, 0], [0, -1, 0, 0], [-1, 0, 0, 0]], dtype=complex)

GENERATORS = {Rep.PAULI2: (I2, J2, K2), Rep.REAL4: (I4, J4, K4)}


def quaternion_matrix(q, rep):
    """``Q_n = ci*I_n + cj*J_n + ck*K_n``."""
    gi, gj, gk = GENERATORS[rep]
    return q.ci * gi + q.cj * gj + q.ck * gk


@dataclass(frozen=True, eq=False)
class MatrixElement:
    """An n x n complex matrix standing for an element of the algebra.

    ``*`` is the matrix product.
    """

    entries: np.ndarray
    rep: Rep

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        n = self.rep.n
        if m.shape != (n, n):
            raise ValueError(f"{self.rep.name} expects a {n}x{n} matrix, got {m.shape}")
        m.flags.writeable = False
        object.__setattr__(self, "entries", m)

    @property
    def n(self):
        return self.rep.n

    def _coerce(self, other):
        if isinstance(other, MatrixElement):
            if other.rep is not self.rep:
                raise ValueError("cannot mix matrix representations")
            return other.entries
        if isinstance(other, Number):
            return complex(other) * np.eye(self.n)
        return None

    def __add__(self, other):
        m = self._coerce(other)
        if m is None:
            return NotImplemented
        return MatrixElement(self.entries + m, self.rep)

    __radd__ = __add__

    def __sub__(self, other):
        m = self._coerce(other)
        if m is None:
            return NotImplemented
        return MatrixElement(self.entries - m, self.rep)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __neg__(self):
        return MatrixElement(-self.entries, self.rep)

    def __mul__(self, other):
        if isinstance(other, Number):
            return MatrixElement(self.entries * complex(other), self.rep)
        if isinstance(other, MatrixElement):
            return MatrixElement(self.entries @ self._coerce(other), self.rep)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, Number):
            return MatrixElement(complex(other) * self.entries, self.rep)
        return NotImplemented

    __matmul__ = __mul__

    def trace(self):
        return complex(np.trace(self.entries))

    def is_finite(self):
        return bool(np.all(np.isfinite(self.entries)))


def identity(rep):
    return MatrixElement(np.eye(rep.n), rep)


def embed_matrix(z, h, q, rep):
    """``z*1_n + h*Q_n``."""
    if h < 0:
        raise ValueError("step h must be non-negative")
    return MatrixElement(complex(z) * np.eye(rep.n) + h * quaternion_matrix(q, rep), rep)


def bicomplex_to_matrix(b, rep):
    return MatrixElement(
        b.z1 * np.eye(rep.n) + b.z2 * quaternion_matrix(b.direction, rep), rep
    )


def extract_complex(w):
    """``tr(W)/n``: the complex part of the represented element."""
    return w.trace() / w.n


def to_bicomplex(w, direction, tol=None):
    """Read ``W = z1*1_n + z2*Q_n`` back as a bicomplex value."""
    qm = quaternion_matrix(direction, w.rep)
    z1 = extract_complex(w)
    z2 = complex(np.trace(w.entries @ -qm)) / w.n
    b = Bicomplex(z1, z2, direction)
    scale = float(np.max(np.abs(w.entries)))
    if tol is None:
        tol = 1e-12 * scale
    residual = float(np.max(np.abs(w.entries - bicomplex_to_matrix(b, w.rep).entries)))
    if residual > tol:
        raise NotInSubalgebraError(
            f"matrix residual {residual:.3e} outside span{{1, Q}} exceeds {tol:.3e}"
        )
    return b


def expm(m, terms=30, target_norm=1.0):
    """Matrix exponential by Taylor series with scaling and squaring.

    The argument is scaled by a power of two until its 1-norm is at most
    ``target_norm``; a power of two keeps tiny off-diagonal entries exact.
    """
    m = np.asarray(m, dtype=complex)
    norm = float(np.linalg.norm(m, 1))
    if not math.isfinite(norm):
        return np.full_like(m, complex(math.nan, math.nan))
    squarings = max(0, math.ceil(math.log2(norm / target_norm))) if norm > 0 else 0
    x = m / 2.0**squarings
    n = m.shape[0]
    result = np.eye(n, dtype=complex)
    term = np.eye(n, dtype=complex)
    for k in range(1, terms + 1):
        term = term @ x / k
        result = result + term
    for _ in range(squarings):
        result = result @ result
    return result


def parse_poly(tag):
    """Coefficients (ascending powers) from ``"poly"`` or ``"poly:c0,c1,..."``.

    Bare ``"poly"`` means ``z**2``.
    """
    if tag == "poly":
        return (0.0, 0.0, 1.0)
    head, sep, body = tag.partition(":")
    if head != "poly" or not sep or not body:
        raise ValueError(f"not a polynomial tag: {tag!r}")
    try:
        coeffs = tuple(complex(c.strip().replace(" ", "")) for c in body.split(","))
    except ValueError:
        raise ValueError(f"bad polynomial coefficients in {tag!r}") from None
    return tuple(c.real if c.imag == 0 else c for c in coeffs)


def horner(coeffs, x):
    """Evaluate ``sum coeffs[k] * x**k`` for any ring-like ``x``."""
    result = x * 0 + coeffs[-1]
    for c in reversed(coeffs[:-1]):
        result = result * x + c
    return result


MATRIX_FUNCTIONS = ("exp", "sin", "cos", "inverse", "poly")


def matrix_function(f_tag, a):
    """Evaluate a named function at a matrix argument."""
    rep = a.rep
    if f_tag == "exp":
        return MatrixElement(expm(a.entries), rep)
    if f_tag in ("sin", "cos"):
        ep = expm(1j * a.entries)
        em = expm(-1j * a.entries)
        if f_tag == "sin":
            return MatrixElement((ep - em) / 2j, rep)
        return MatrixElement((ep + em) / 2, rep)
    if f_tag in ("inverse", "inv"):
        try:
            return MatrixElement(np.linalg.solve(a.entries, np.eye(a.n)), rep)
        except np.linalg.LinAlgError:
            raise NonInvertibleError("singular matrix") from None
    if isinstance(f_tag, str) and f_tag.startswith("poly"):
        return horner(parse_poly(f_tag), a)
    raise ValueError(f"unsupported matrix function {f_tag!r}")


def via_closed_form(fn, a, direction):
    """Apply a bicomplex function to a matrix by converting in and out."""
    return bicomplex_to_matrix(fn(to_bicomplex(a, direction)), a.rep)


def matrix_qsd_derivative(f, z, h, q, rep):
    """``tr[f(z 1_n + h Q_n) Q_n^-1] / (n h)``.

    ``f`` is a name accepted by :func:`matrix_function` or a callable
    taking and returning a :class:`MatrixElement`.
    """
    if not h > 0:
        raise ValueError("step h must be positive")
    a = embed_matrix(z, h, q, rep)
    fa = matrix_function(f, a) if isinstance(f, str) else f(a)
    qinv = -quaternion_matrix(q, rep)
    return complex(np.trace(fa.entries @ qinv)) / (rep.n * h)


_COMPLEX_FUNCTIONS = {
    "exp": cmath.exp,
    "sin": cmath.sin,
    "cos": cmath.cos,
    "inverse": lambda z: 1 / z,
    "inv": lambda z: 1 / z,
}


def _complex_function(f_tag):
    if f_tag in _COMPLEX_FUNCTIONS:
        return _COMPLEX_FUNCTIONS[f_tag]
    if isinstance(f_tag, str) and f_tag.startswith("poly"):
        coeffs = parse_poly(f_tag)
        return lambda z: horner(coeffs, complex(z))
    raise ValueError(f"unsupported function {f_tag!r}")


def lemma_equivalence_check(f_tag, z, h, theta, phi):
    """Trace formula in the 2x2 representation vs. an imaginary-step difference.

    Returns ``(lhs, rhs)`` with ``lhs = tr[f(z + hQ) Q^-1] / (2h)`` and
    ``rhs = (f(z + ih) - f(z - ih)) / (2ih)``.  The two agree in exact
    arithmetic for every direction.
    """
    if not 1e-6 <= h <= 1e-1:
        raise ValueError(f"h must lie in [1e-6, 1e-1], got {h!r}")
    fc = _complex_function(f_tag)
    q = from_angles(theta, phi)
    z = complex(z)
    lhs = matrix_qsd_derivative(f_tag, z, h, q, Rep.PAULI2)
    rhs = (fc(z + 1j * h) - fc(z - 1j * h)) / (2j * h)
    return lhs, rhs


__all__ = [
    "Rep",
    "MatrixElement",
    "quaternion_matrix",
    "embed_matrix",
    "bicomplex_to_matrix",
    "extract_complex",
    "to_bicomplex",
    "expm",
    "matrix_function",
    "matrix_qsd_derivative",
    "lemma_equivalence_check",
    "via_closed_form",
    "parse_poly",
    "horner",
]
