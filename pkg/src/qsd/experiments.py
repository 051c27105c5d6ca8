"""Sweeps over step size, step direction and evaluation point.

Each run returns a list of :class:`SweepRecord` in a fixed order; per-point
failures are recorded in the ``status`` column rather than raised.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .clifford import from_angles
from .engine import Backend, DiffRequest, differentiate, estimate
from .errors import (
    EvaluationError,
    NonInvertibleError,
    NotInSubalgebraError,
    UndefinedReferenceError,
)

FIELDS = (
    "experiment",
    "fn",
    "backend",
    "z_re",
    "z_im",
    "h",
    "theta",
    "phi",
    "est_re",
    "est_im",
    "ref_re",
    "ref_im",
    "rel_err",
    "status",
)

DEFAULT_Z = complex(math.pi / 4, math.pi / 3)
HALF_PI = math.pi / 2

# named axes -> (theta, phi)
AXES = {"i": (HALF_PI, 0.0), "j": (HALF_PI, HALF_PI), "k": (0.0, 0.0)}

NAN = math.nan


@dataclass(frozen=True)
class Variant:
    """A backend together with the step direction (or difference order)."""

    backend: Backend
    theta: float = HALF_PI
    phi: float = HALF_PI
    order: int = 1

    @property
    def label(self):
        if self.backend is Backend.CENTRAL:
            return f"central{self.order}"
        return self.backend.value

    @classmethod
    def parse(cls, token, theta=HALF_PI, phi=HALF_PI, order=1):
        """``"pauli2"``, ``"pauli2:k"``, ``"central"`` ..."""
        name, _, axis = token.strip().partition(":")
        backend = Backend.parse(name)
        if axis:
            if axis not in AXES:
                raise ValueError(f"unknown axis {axis!r} in {token!r} (use i, j or k)")
            theta, phi = AXES[axis]
        return cls(backend, theta, phi, order)


SWEEP_H_VARIANTS = (
    Variant(Backend.BICOMPLEX),
    Variant(Backend.MULTIVECTOR),
    Variant(Backend.PAULI2),
    Variant(Backend.PAULI2, *AXES["k"]),
    Variant(Backend.REAL4),
    Variant(Backend.CENTRAL),
)
SWEEP_ANGLE_VARIANTS = (Variant(Backend.REAL4), Variant(Backend.PAULI2))
GRID_LOG_VARIANTS = (Variant(Backend.BICOMPLEX),)


@dataclass(frozen=True)
class SweepRecord:
    experiment: str
    fn: str
    backend: str
    z_re: float
    z_im: float
    h: float
    theta: float
    phi: float
    est_re: float = NAN
    est_im: float = NAN
    ref_re: float = NAN
    ref_im: float = NAN
    rel_err: float = NAN
    status: str = "ok"

    @property
    def ok(self):
        return self.status == "ok"


@dataclass
class ExperimentConfig:
    experiment: str
    fn: str = "lyness"
    variants: tuple = ()
    z: complex = DEFAULT_Z
    h: float = 1e-20
    h_start: float = 1e-1
    h_stop: float = 1e-20
    h_points: int = 20
    theta: float = HALF_PI
    phi: float = HALF_PI
    theta_points: int = 20
    phi_points: int = 20
    window: float = 1e-15
    grid_points: int = 41
    out: str | None = None
    fmt: str = "csv"

    def validate(self):
        if not (self.h > 0 and self.h_start > 0 and self.h_stop > 0):
            raise ValueError("step sizes must be positive")
        if self.h_points < 1 or self.theta_points < 1 or self.phi_points < 1:
            raise ValueError("grid counts must be >= 1")
        if self.grid_points < 1:
            raise ValueError("grid counts must be >= 1")
        if self.h_points > 1 and not self.h_start > self.h_stop:
            raise ValueError("h-range must be strictly decreasing (h_start > h_stop)")
        if not self.window > 0:
            raise ValueError("window must be positive")
        if self.fmt not in ("csv", "jsonl"):
            raise ValueError(f"unknown output format {self.fmt!r}")
        if not self.variants:
            raise ValueError("at least one backend is required")
        return self


def h_values(start, stop, points):
    """Geometric sequence from ``start`` down to ``stop`` (exact decades)."""
    if points == 1:
        return [float(start)]
    exps = np.linspace(math.log10(start), math.log10(stop), points)
    return [float(10.0**e) for e in exps]


def angle_grid(theta_points, phi_points, theta=HALF_PI, phi=HALF_PI):
    """``theta_k = k pi / n`` and ``phi_l = 2 pi l / m``.

    Both grids include their start and exclude their end; an even theta
    count therefore contains the ``theta = pi/2`` row.  A count of one
    uses the given ``theta``/``phi`` instead.
    """
    thetas = [theta] if theta_points == 1 else [k * math.pi / theta_points for k in range(theta_points)]
    phis = [phi] if phi_points == 1 else [2 * math.pi * k / phi_points for k in range(phi_points)]
    return thetas, phis


def symmetric_grid(window, points):
    """``points`` values spanning ``[-window, window]``; odd counts hit 0 exactly."""
    if points == 1:
        return [0.0]
    half = (points - 1) / 2
    return [window * (k - half) / half for k in range(points)]


def evaluate_point(experiment, fn, variant, z, h):
    """One record; failures land in ``status`` with NaN numbers."""
    z = complex(z)
    base = dict(
        experiment=experiment,
        fn=fn,
        backend=variant.label,
        z_re=z.real,
        z_im=z.imag,
        h=h,
        theta=variant.theta,
        phi=variant.phi,
    )
    request = DiffRequest(
        fn,
        z,
        h,
        from_angles(variant.theta, variant.phi),
        variant.backend,
        variant.order,
    )
    try:
        result = differentiate(request)
    except NonInvertibleError:
        return SweepRecord(**base, status="non-invertible")
    except NotInSubalgebraError:
        return SweepRecord(**base, status="not-in-subalgebra")
    except (EvaluationError, OverflowError):
        return SweepRecord(**base, status="nan-inf")
    except UndefinedReferenceError:
        # keep the estimate; only the comparison is missing
        try:
            est = estimate(request)
        except (ArithmeticError, ValueError):
            return SweepRecord(**base, status="nan-inf")
        return SweepRecord(
            **base, est_re=est.real, est_im=est.imag, status="undefined-reference"
        )
    est, ref = result.estimate, result.reference
    if ref is None:
        return SweepRecord(**base, est_re=est.real, est_im=est.imag)
    return SweepRecord(
        **base,
        est_re=est.real,
        est_im=est.imag,
        ref_re=ref.real,
        ref_im=ref.imag,
        rel_err=result.rel_err,
    )


def run_sweep_h(config):
    """Rows ordered by backend, then by descending h."""
    config.validate()
    hs = h_values(config.h_start, config.h_stop, config.h_points)
    return [
        evaluate_point(config.experiment, config.fn, v, config.z, h)
        for v in config.variants
        for h in hs
    ]


def run_sweep_angle(config):
    """Rows ordered by backend, then theta, then phi."""
    config.validate()
    thetas, phis = angle_grid(config.theta_points, config.phi_points, config.theta, config.phi)
    records = []
    for v in config.variants:
        for theta in thetas:
            for phi in phis:
                variant = Variant(v.backend, theta, phi, v.order)
                records.append(
                    evaluate_point(config.experiment, config.fn, variant, config.z, config.h)
                )
    return records


def run_grid_log(config):
    """``ln`` over a square window around the origin; rows by Im z, then Re z."""
    config.validate()
    axis = symmetric_grid(config.window, config.grid_points)
    return [
        evaluate_point(config.experiment, config.fn, v, complex(x, y), config.h)
        for v in config.variants
        for y in axis
        for x in axis
    ]


def _json_value(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def write_records(records, stream, fmt="csv"):
    """Serialize records; floats use the shortest round-trip repr."""
    if fmt == "csv":
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(FIELDS)
        for r in records:
            row = asdict(r)
            writer.writerow([repr(row[k]) if isinstance(row[k], float) else row[k] for k in FIELDS])
    elif fmt == "jsonl":
        for r in records:
            row = asdict(r)
            stream.write(json.dumps({k: _json_value(row[k]) for k in FIELDS}) + "\n")
    else:
        raise ValueError(f"unknown output format {fmt!r}")


def read_csv(stream):
    """Parse CSV written by :func:`write_records` back into records."""
    reader = csv.DictReader(stream)
    text = {"experiment", "fn", "backend", "status"}
    return [
        SweepRecord(**{k: (v if k in text else float(v)) for k, v in row.items()})
        for row in reader
    ]
