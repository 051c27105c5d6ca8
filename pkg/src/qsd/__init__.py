"""Quaternionic-step derivatives of holomorphic functions.

The step ``z + h*q`` lives in the commutative subalgebra ``span{1, i, q, iq}``
of the 3D geometric algebra, with ``i = e123`` and ``q`` a unit bivector.
"""

from .clifford import (
    QI,
    QJ,
    QK,
    Bicomplex,
    Multivector,
    UnitQuaternion,
    embed,
    from_angles,
    geometric_product,
    to_bicomplex,
)
from .elementary import exp, polar, principal_log, sqrt
from .engine import (
    Backend,
    DiffRequest,
    csd_derivative,
    central_difference,
    differentiate,
    function_registry,
    lookup,
    qsd_derivative,
    relative_error,
)
from .errors import (
    EvaluationError,
    NonInvertibleError,
    NotInSubalgebraError,
    UndefinedReferenceError,
)

__version__ = "0.1.0"
