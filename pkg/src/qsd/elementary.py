"""Closed-form elementary functions on bicomplex values.

Every function works directly on the (a, b, c, d) coordinates of
``w = a + b*i + c*q + d*iq``.  Nothing is routed through a representation
that stores ``z1`` and ``z2`` in the same slot, so a step ``h*q`` that is
many orders of magnitude below ``z1`` survives evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .clifford import Bicomplex
from .errors import NonInvertibleError

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


def _atan2(y, x):
    """atan2 mapped onto (-pi, pi]."""
    r = math.atan2(y, x)
    return math.pi if r == -math.pi else r


def _like(w, z1, z2=0j):
    return Bicomplex(z1, z2, w.direction)


@dataclass(frozen=True)
class PolarParts:
    """``X = unitary * scale`` with ``U U~ = 1`` and ``S~ = S``."""

    unitary: Bicomplex
    scale: Bicomplex


def grade_norm(m):
    """``[[M]] = sqrt(<M>_0^2 - <M>_1^2)`` for a self-reverse element.

    The grade-1 part of the subalgebra is the ``iq`` component.  Evaluated
    in factored form to avoid cancellation when ``|<M>_1|`` is close to
    ``<M>_0``.
    """
    s0, s1 = m.a, m.d
    return math.sqrt((s0 - s1) * (s0 + s1))


def exp(w):
    """``e^a [cos b + i sin b][cos c + q sin c][cosh d + iq sinh d]``."""
    a, b, c, d = w.coords()
    ea = math.exp(a)
    unit = complex(ea * math.cos(b), ea * math.sin(b))
    cc, sc = math.cos(c), math.sin(c)
    ch, sh = math.cosh(d), math.sinh(d)
    # (cos c + q sin c)(cosh d + iq sinh d), using q*iq = -i
    p1 = complex(cc * ch, -sc * sh)
    p2 = complex(sc * ch, cc * sh)
    return _like(w, unit * p1, unit * p2)


def polar(x):
    """Polar decomposition ``X = U S`` of an invertible element."""
    z1, z2 = x.z1, x.z2
    # X X~ = s0 + s1*iq
    s0 = z1.real * z1.real + z1.imag * z1.imag + z2.real * z2.real + z2.imag * z2.imag
    s1 = 2.0 * (z2 * z1.conjugate()).imag
    # [[X X~]] = |x+| |x-|, the product of the idempotent magnitudes
    n = abs(z1 - 1j * z2) * abs(z1 + 1j * z2)
    if n == 0.0 or s0 + n == 0.0:
        raise NonInvertibleError(f"{x!r} has no polar decomposition")
    s_scalar = math.sqrt(0.5 * (s0 + n))
    s_vector = s1 / (2.0 * s_scalar)
    scale = _like(x, s_scalar, complex(0.0, s_vector))
    # S^-1 = (S0 - S1 iq) / (S0^2 - S1^2) and S0^2 - S1^2 = n
    s_inv = _like(x, s_scalar / n, complex(0.0, -s_vector / n))
    return PolarParts(x * s_inv, scale)


def _sqrt_scale(s):
    # (S + [[S]]) / (sqrt2 sqrt(S0 + [[S]]))
    s0, s1 = s.a, s.d
    m = grade_norm(s)
    assert s0 + m > 0.0, "S0 + [[S]] must be positive"
    den = math.sqrt(2.0 * (s0 + m))
    return _like(s, (s0 + m) / den, complex(0.0, s1 / den))


def _unit_angles(u):
    """``(b, c)`` with ``U = exp(b i) exp(c q)``, ``b`` in (-pi, pi], ``c`` in (-pi/2, pi/2]."""
    u0, u3 = u.z1.real, u.z1.imag
    u2, u1 = u.z2.real, u.z2.imag
    sin2c = 2.0 * (u0 * u2 + u1 * u3)
    cos2c = 2.0 * (u0 * u0 + u3 * u3) - 1.0
    c = 0.5 * _atan2(sin2c, cos2c)
    cos_c = math.cos(c)
    if abs(cos_c) > _INV_SQRT2:
        b = _atan2(u3 / cos_c, u0 / cos_c)
    else:
        sin_c = math.sin(c)
        b = _atan2(u1 / sin_c, u2 / sin_c)
    return b, c


def sqrt(x):
    """Principal square root.

    ``sqrt(U)`` is the unitary factor of ``1 + U``.  That factor takes the
    principal complex root of each idempotent part ``exp(i(b -/+ c))``, so
    it agrees with ``exp(Ln(X)/2)`` only while ``|b| + |c| <= pi``, and
    forming ``1 + U`` cancels as either part approaches ``-1``.  The
    shortcut is therefore used only for ``|b| + |c| <= pi/2`` (where
    ``|1 + x+/-| >= sqrt(2)``); everywhere else, including the zero
    divisors ``U = +/-iq``, ``exp(Ln(X)/2)`` is used.
    """
    if x.z1 == 0 and x.z2 == 0:
        return _like(x, 0j)
    parts = polar(x)
    u = parts.unitary
    b, c = _unit_angles(u)
    if abs(b) + abs(c) > 0.5 * math.pi:
        return exp(principal_log(x) * 0.5)
    try:
        root_u = polar(1.0 + u).unitary
    except NonInvertibleError:
        return exp(principal_log(x) * 0.5)
    return root_u * _sqrt_scale(parts.scale)


def principal_log(x):
    """Principal logarithm with ``b`` in (-pi, pi] and ``c`` in (-pi/2, pi/2].

    ``Ln(-1) = i*pi`` and ``Ln(iq) = (pi/2)(i + q)``.
    """
    parts = polar(x)
    s = parts.scale
    b, c = _unit_angles(parts.unitary)
    assert -math.pi < b <= math.pi and -math.pi / 2 < c <= math.pi / 2

    s0, s1 = s.a, s.d
    a = 0.5 * (math.log(s0 - s1) + math.log(s0 + s1))
    d = math.atanh(s1 / s0)
    return Bicomplex.from_coords(a, b, c, d, x.direction)


log = principal_log


def inverse(w):
    """Two-sided inverse; zero divisors raise :class:`NonInvertibleError`."""
    return w.inverse()


def sin(w):
    iw = w * 1j
    return (exp(iw) - exp(-iw)) * (-0.5j)


def cos(w):
    iw = w * 1j
    return (exp(iw) + exp(-iw)) * 0.5


def tan(w):
    iw = w * 1j
    ep, em = exp(iw), exp(-iw)
    s = (ep - em) * (-0.5j)
    c = (ep + em) * 0.5
    return s * inverse(c)


def arcsin(w):
    return principal_log(w * 1j + sqrt(1.0 - w * w)) * (-1j)


def arccos(w):
    return principal_log(w + sqrt(w * w - 1.0)) * (-1j)


def arctan(w):
    iw = w * 1j
    return (principal_log(1.0 - iw) - principal_log(1.0 + iw)) * 0.5j
