"""Quaternionic-step derivatives, the complex-step baseline and central
differences, over a shared registry of test functions.

Each registry function is written once against a small "ops" namespace
(``exp``, ``sin``, ``ln``, ``inv`` ...) and evaluated over plain complex
numbers, bicomplex values, full multivectors or matrices depending on the
backend.
"""

from __future__ import annotations

import cmath
import enum
from dataclasses import dataclass
from math import comb

import numpy as np

from . import elementary
from . import matrix as mat
from .clifford import QJ, Bicomplex, complex_part, embed, to_bicomplex
from .errors import EvaluationError, UndefinedReferenceError

DEFAULT_H = 1e-20
DEFAULT_DIRECTION = QJ


class Backend(enum.Enum):
    BICOMPLEX = "bicomplex"
    MULTIVECTOR = "multivector"
    PAULI2 = "pauli2"
    REAL4 = "real4"
    CENTRAL = "central"
    CSD = "csd"

    @classmethod
    def parse(cls, tag):
        try:
            return cls(tag.lower())
        except ValueError:
            names = ", ".join(b.value for b in cls)
            raise ValueError(f"unknown backend {tag!r} (expected one of {names})") from None


# --- ops namespaces -------------------------------------------------------


class ComplexOps:
    """Standard complex arithmetic on the same branches as the closed forms.

    ``cmath.asin`` and ``cmath.atan`` are the principal functions the log
    formulas define, and unlike those formulas they keep a tiny imaginary
    step, which the complex step relies on.  ``arccos`` keeps its log form
    because its inner square root sits on a different branch from
    ``cmath.acos``.
    """

    exp = staticmethod(cmath.exp)
    sin = staticmethod(cmath.sin)
    cos = staticmethod(cmath.cos)
    tan = staticmethod(cmath.tan)
    ln = staticmethod(cmath.log)
    sqrt = staticmethod(cmath.sqrt)

    @staticmethod
    def inv(z):
        return 1 / z

    arcsin = staticmethod(cmath.asin)
    arctan = staticmethod(cmath.atan)

    @staticmethod
    def arccos(z):
        return -1j * cmath.log(z + cmath.sqrt(z * z - 1))


class BicomplexOps:
    exp = staticmethod(elementary.exp)
    sin = staticmethod(elementary.sin)
    cos = staticmethod(elementary.cos)
    tan = staticmethod(elementary.tan)
    ln = staticmethod(elementary.principal_log)
    sqrt = staticmethod(elementary.sqrt)
    arcsin = staticmethod(elementary.arcsin)
    arccos = staticmethod(elementary.arccos)
    arctan = staticmethod(elementary.arctan)
    inv = staticmethod(elementary.inverse)


class MultivectorOps:
    """Sums and products in the full 8-blade algebra; transcendental
    functions go through the bicomplex closed forms."""

    def __init__(self, direction):
        self.direction = direction

    def _lift(self, fn):
        return lambda x: embed(fn(to_bicomplex(x, self.direction)))

    def __getattr__(self, name):
        return self._lift(getattr(BicomplexOps, name))


class MatrixOps:
    """Genuine matrix functions where available; the rest through the
    closed forms."""

    _NATIVE = {"exp": "exp", "sin": "sin", "cos": "cos", "inv": "inverse"}

    def __init__(self, rep, direction):
        self.rep = rep
        self.direction = direction

    def __getattr__(self, name):
        if name in self._NATIVE:
            tag = self._NATIVE[name]
            return lambda a: mat.matrix_function(tag, a)
        if name == "tan":
            return lambda a: self.sin(a) * self.inv(self.cos(a))
        fn = getattr(BicomplexOps, name)
        return lambda a: mat.via_closed_form(fn, a, self.direction)


# --- registry ---------------------------------------------------------------


@dataclass(frozen=True)
class FunctionEntry:
    tag: str
    formula: object  # (ops, w) -> value
    reference: object  # complex -> complex, the exact derivative

    def evaluate(self, ops, w):
        return self.formula(ops, w)

    def bicomplex(self, w):
        return self.formula(BicomplexOps, w)

    def complex(self, z):
        return self.formula(ComplexOps, complex(z))

    def reference_derivative(self, z):
        return self.reference(complex(z))


def _lyness(ops, w):
    c = ops.cos(w)
    s = ops.sin(w)
    return ops.exp(w) * ops.inv(c * c * c + s * s * s)


def _lyness_derivative(z):
    c, s = cmath.cos(z), cmath.sin(z)
    den = c * c * c + s * s * s
    g = cmath.exp(z) / den
    return g * (1 - 3 * (s * s * c - c * c * s) / den)


_ENTRIES = {
    "lyness": FunctionEntry("lyness", _lyness, _lyness_derivative),
    "exp": FunctionEntry("exp", lambda o, w: o.exp(w), cmath.exp),
    "sin": FunctionEntry("sin", lambda o, w: o.sin(w), cmath.cos),
    "cos": FunctionEntry("cos", lambda o, w: o.cos(w), lambda z: -cmath.sin(z)),
    "tan": FunctionEntry("tan", lambda o, w: o.tan(w), lambda z: 1 / cmath.cos(z) ** 2),
    "ln": FunctionEntry("ln", lambda o, w: o.ln(w), lambda z: 1 / z),
    "sqrt": FunctionEntry("sqrt", lambda o, w: o.sqrt(w), lambda z: 0.5 / cmath.sqrt(z)),
    "arcsin": FunctionEntry(
        "arcsin", lambda o, w: o.arcsin(w), lambda z: 1 / cmath.sqrt(1 - z * z)
    ),
    # derivative of -i ln(z + sqrt(z^2 - 1)) on the same sqrt branch
    "arccos": FunctionEntry(
        "arccos", lambda o, w: o.arccos(w), lambda z: -1j / cmath.sqrt(z * z - 1)
    ),
    "arctan": FunctionEntry("arctan", lambda o, w: o.arctan(w), lambda z: 1 / (1 + z * z)),
    "inv": FunctionEntry("inv", lambda o, w: o.inv(w), lambda z: -1 / (z * z)),
}


def _poly_entry(tag):
    coeffs = mat.parse_poly(tag)
    dcoeffs = tuple(k * c for k, c in enumerate(coeffs))[1:] or (0.0,)
    return FunctionEntry(
        tag,
        lambda o, w: mat.horner(coeffs, w),
        lambda z: mat.horner(dcoeffs, z),
    )


def function_registry():
    """All named entries; ``poly`` stands for ``poly:c0,c1,...`` (default z**2)."""
    return list(_ENTRIES.values()) + [_poly_entry("poly")]


def lookup(tag):
    if tag in _ENTRIES:
        return _ENTRIES[tag]
    if tag.startswith("poly"):
        return _poly_entry(tag)
    raise ValueError(f"unknown function {tag!r}")


def _entry(f):
    return f if isinstance(f, FunctionEntry) else lookup(f)


# --- derivatives ------------------------------------------------------------


def _check_finite(value, what):
    if not cmath.isfinite(value):
        raise EvaluationError(f"{what} is not finite: {value!r}")
    return value


def qsd_derivative(f, z, h=DEFAULT_H, q=DEFAULT_DIRECTION, backend=Backend.BICOMPLEX):
    """``<f(z + h q) q^-1>_C / h``."""
    entry = _entry(f)
    backend = Backend(backend)
    if not h > 0:
        raise ValueError("step h must be positive")
    z = complex(z)
    if backend is Backend.BICOMPLEX:
        fw = entry.evaluate(BicomplexOps, Bicomplex(z, h, q))
        est = complex_part(fw * Bicomplex(0j, -1.0, q)) / h
    elif backend is Backend.MULTIVECTOR:
        fw = entry.evaluate(MultivectorOps(q), embed(Bicomplex(z, h, q)))
        est = to_bicomplex(fw, q).z2 / h
    elif backend in (Backend.PAULI2, Backend.REAL4):
        rep = mat.Rep.PAULI2 if backend is Backend.PAULI2 else mat.Rep.REAL4
        ops = MatrixOps(rep, q)
        est = mat.matrix_qsd_derivative(lambda a: entry.evaluate(ops, a), z, h, q, rep)
    else:
        raise ValueError(f"{backend.value} is not a quaternionic-step backend")
    return _check_finite(est, "derivative estimate")


def csd_derivative(f, x, h=DEFAULT_H):
    """Complex-step derivative ``Im f(x + ih) / h`` of a real-analytic function."""
    entry = _entry(f)
    if isinstance(x, complex):
        if x.imag != 0:
            raise ValueError("the complex step needs a real evaluation point")
        x = x.real
    if not h > 0:
        raise ValueError("step h must be positive")
    value = _check_finite(entry.complex(complex(x, h)), "f(x + ih)")
    return value.imag / h


def central_difference(f, z, h, order=1, step_direction=1.0):
    """``n``-th derivative estimate ``delta_h^n f(z) / h^n``.

    ``delta_h^n f(z) = sum_i (-1)^i C(n, i) f(z + (n/2 - i) h u)`` with the
    unit step direction ``u`` (``1`` for the real axis, ``1j`` for the
    imaginary axis).  The result is divided by ``(h u)^n``.
    """
    entry = _entry(f)
    if order < 1:
        raise ValueError("order must be >= 1")
    if not h > 0:
        raise ValueError("step h must be positive")
    u = complex(step_direction)
    if abs(abs(u) - 1.0) > 1e-15:
        raise ValueError("step_direction must be a unit complex number")
    z = complex(z)
    total = 0j
    for i in range(order + 1):
        total += (-1) ** i * comb(order, i) * entry.complex(z + (order / 2 - i) * h * u)
    return _check_finite(total / (h * u) ** order, "central difference")


def relative_error(est, ref):
    """``|est - ref| / |ref|``."""
    if ref == 0 or not cmath.isfinite(ref):
        raise UndefinedReferenceError(f"reference derivative {ref!r} is zero or not finite")
    return abs(complex(est) - complex(ref)) / abs(ref)


@dataclass(frozen=True)
class DiffRequest:
    fn: str
    z: complex
    h: float = DEFAULT_H
    direction: object = DEFAULT_DIRECTION
    backend: Backend = Backend.BICOMPLEX
    order: int = 1

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("step h must be positive")
        if self.backend is Backend.CENTRAL and self.order < 1:
            raise ValueError("central difference order must be >= 1")
        if self.backend is Backend.CSD and complex(self.z).imag != 0:
            raise ValueError("the complex step needs a real evaluation point")


@dataclass(frozen=True)
class DiffResult:
    estimate: complex
    reference: complex | None = None
    rel_err: float | None = None


def estimate(request):
    """Raw derivative estimate for a request (no reference)."""
    r = request
    if r.backend is Backend.CENTRAL:
        return central_difference(r.fn, r.z, r.h, r.order)
    if r.backend is Backend.CSD:
        return complex(csd_derivative(r.fn, complex(r.z).real, r.h))
    return qsd_derivative(r.fn, r.z, r.h, r.direction, r.backend)


def differentiate(request):
    """Estimate plus reference and relative error where a reference exists.

    References are first derivatives, so higher-order central differences
    come back without one.
    """
    est = estimate(request)
    if request.backend is Backend.CENTRAL and request.order != 1:
        return DiffResult(est)
    try:
        ref = lookup(request.fn).reference_derivative(request.z)
    except (ZeroDivisionError, ValueError, OverflowError) as exc:
        raise UndefinedReferenceError(f"reference derivative undefined: {exc}") from None
    return DiffResult(est, ref, relative_error(est, ref))


def log_slope(hs, errors):
    """Least-squares slope of log10(error) against log10(h)."""
    x = np.log10(np.asarray(hs, dtype=float))
    y = np.log10(np.asarray(errors, dtype=float))
    return float(np.polyfit(x, y, 1)[0])
