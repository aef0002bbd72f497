"""The Rössler vector field in the shifted coordinates with P_In at the origin.

    x' = -y - z
    y' = x + a y
    z' = b x + z (x - c)

The classic form X' = -Y - Z, Y' = X + A Y, Z' = B + Z (X - C) maps onto this
one by translating its inner fixed point (X0, -X0/A, X0/A) to the origin, with
X0 = (C - sqrt(C^2 - 4AB)) / 2; then a = A, b = X0 / A and c = C - X0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from .errors import DegenerateParams
from .geometry import Direction, EventSpec


@dataclass(frozen=True)
class Params:
    a: float
    b: float
    c: float

    def __post_init__(self):
        for name in ("a", "b", "c"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise DegenerateParams(f"parameter {name} must be finite, got {v}")
            object.__setattr__(self, name, v)

    @property
    def in_range(self) -> bool:
        """Parameter box a, b in (0, 1), c > 1."""
        return 0 < self.a < 1 and 0 < self.b < 1 and self.c > 1

    def as_tuple(self):
        return (self.a, self.b, self.c)


# (0.2, 0.2, 5.7) in the classic coordinates, converted as in the module docstring
CLASSIC_CHAOTIC = Params(0.2, 0.03513102417050051, 5.6929737951659)


class FixedPoint(str, Enum):
    IN = "In"
    OUT = "Out"


@dataclass(frozen=True)
class FixedPointInfo:
    location: np.ndarray
    kind: FixedPoint


@dataclass(frozen=True)
class SpectralInfo:
    """Eigen-structure of the Jacobian at a fixed point.

    For a saddle-focus ``gamma`` is the real eigenvalue and ``rho +- i psi``
    the complex pair. With three real eigenvalues ``rho`` and ``psi`` are NaN
    and ``eigenvalues`` holds all three.
    """

    gamma: float
    rho: float
    psi: float
    nu: float
    shilnikov: bool
    kind: str
    eigenvalues: tuple
    char_poly: tuple  # (trace, sum of principal 2x2 minors, det)

    @property
    def saddle_focus(self) -> bool:
        return self.kind == "saddle-focus"


@dataclass(frozen=True)
class AssumptionReport:
    a1_range: bool
    a2_opposing_saddle_foci: bool
    a3_shilnikov: bool

    @property
    def all_ok(self) -> bool:
        return self.a1_range and self.a2_opposing_saddle_foci and self.a3_shilnikov


def eval_field(p: Params, s):
    s = np.asarray(s, dtype=float)
    x, y, z = s[..., 0], s[..., 1], s[..., 2]
    return np.stack([-y - z, x + p.a * y, p.b * x + z * (x - p.c)], axis=-1)


def jacobian(p: Params, s) -> np.ndarray:
    x, _, z = np.asarray(s, dtype=float)
    return np.array([
        [0.0, -1.0, -1.0],
        [1.0, p.a, 0.0],
        [p.b + z, 0.0, x - p.c],
    ])


def fixed_points(p: Params) -> tuple[FixedPointInfo, FixedPointInfo]:
    if p.a == 0:
        raise DegenerateParams("a = 0: the outer fixed point is not defined")
    w = p.c - p.a * p.b
    p_in = FixedPointInfo(np.zeros(3), FixedPoint.IN)
    p_out = FixedPointInfo(np.array([w, -w / p.a, w / p.a]), FixedPoint.OUT)
    return p_in, p_out


def char_poly_coeffs(J) -> tuple[float, float, float]:
    """(trace, m2, det) with det(lambda I - J) = l^3 - tr l^2 + m2 l - det."""
    J = np.asarray(J, dtype=float)
    tr = J[0, 0] + J[1, 1] + J[2, 2]
    m2 = (J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
          + J[0, 0] * J[2, 2] - J[0, 2] * J[2, 0]
          + J[1, 1] * J[2, 2] - J[1, 2] * J[2, 1])
    det = float(np.linalg.det(J))
    return float(tr), float(m2), det


def char_poly(coeffs, lam):
    tr, m2, det = coeffs
    return ((lam - tr) * lam + m2) * lam - det


def char_poly_residual(coeffs, lam) -> float:
    """|chi(lam)| scaled by the magnitude of its terms."""
    tr, m2, det = coeffs
    r = abs(lam)
    scale = r ** 3 + abs(tr) * r ** 2 + abs(m2) * r + abs(det)
    return abs(char_poly(coeffs, lam)) / max(scale, np.finfo(float).tiny)


def cubic_roots(coeffs):
    """Roots of l^3 - tr l^2 + m2 l - det.

    One real root is bracketed with the Cauchy bound and found by Brent's
    method, polished by Newton, and deflated; the quadratic factor gives the
    remaining pair. Returns ``(real_root, pair)`` where ``pair`` is a tuple of
    two complex numbers (conjugates) or two floats.
    """
    tr, m2, det = coeffs
    bound = 1.0 + max(abs(tr), abs(m2), abs(det))

    def f(l):
        return ((l - tr) * l + m2) * l - det

    r = brentq(f, -bound, bound, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    for _ in range(3):
        d = (3 * r - 2 * tr) * r + m2
        if d == 0:
            break
        step = f(r) / d
        r_new = r - step
        if abs(f(r_new)) >= abs(f(r)):
            break
        r = r_new
    # l^3 - tr l^2 + m2 l - det = (l - r)(l^2 + p1 l + p0)
    p1 = r - tr
    p0 = m2 + r * p1
    disc = p1 * p1 - 4 * p0
    if disc < 0:
        re = -p1 / 2
        im = math.sqrt(-disc) / 2
        pair = (complex(re, im), complex(re, -im))
    else:
        sq = math.sqrt(disc)
        # avoid cancellation
        q = -0.5 * (p1 + math.copysign(sq, p1)) if p1 != 0 else -0.5 * sq
        if q == 0:
            pair = (0.0, -p1)
        else:
            pair = tuple(sorted((q, p0 / q)))
    return r, pair


def spectrum_at(J, which: FixedPoint | None = None) -> SpectralInfo:
    coeffs = char_poly_coeffs(J)
    r, pair = cubic_roots(coeffs)
    if isinstance(pair[0], complex):
        rho, psi = pair[0].real, abs(pair[0].imag)
        nu = abs(rho / r) if r != 0 else math.inf
        if which is FixedPoint.IN:
            ok = r < 0 < rho
        elif which is FixedPoint.OUT:
            ok = rho < 0 < r
        else:
            ok = r * rho < 0
        kind = "saddle-focus" if ok else "focus-wrong-signs"
        eig = (r, complex(rho, psi), complex(rho, -psi))
        return SpectralInfo(r, rho, psi, nu, ok and nu < 1, kind, eig, coeffs)
    eig = tuple(sorted((r,) + tuple(pair)))
    return SpectralInfo(r, math.nan, math.nan, math.nan, False, "three-real", eig, coeffs)


def classify_fixed_point(p: Params, which: FixedPoint | str) -> SpectralInfo:
    which = FixedPoint(which)
    p_in, p_out = fixed_points(p)
    loc = p_in.location if which is FixedPoint.IN else p_out.location
    return spectrum_at(jacobian(p, loc), which)


def check_assumptions(p: Params) -> AssumptionReport:
    try:
        s_in = classify_fixed_point(p, FixedPoint.IN)
        s_out = classify_fixed_point(p, FixedPoint.OUT)
    except DegenerateParams:
        return AssumptionReport(p.in_range, False, False)
    a2 = s_in.saddle_focus and s_out.saddle_focus
    nus = [s.nu for s in (s_in, s_out) if math.isfinite(s.nu)]
    a3 = bool(nus) and min(nus) < 1
    return AssumptionReport(p.in_range, a2, a3)


class VectorField:
    """Autonomous field on R^3, evaluated on arrays of shape (..., 3).

    Subclasses used by the manifold tools also provide ``fixed_points()``
    returning (P_In, P_Out), ``section`` (the U half-plane event) and
    ``trap_level`` (height of the inflow plane z = trap_level).
    """

    section: EventSpec | None = None
    trap_level: float | None = None

    def __call__(self, s):
        raise NotImplementedError

    def jacobian(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        J = np.empty((3, 3))
        for j in range(3):
            h = 1e-6 * max(1.0, abs(s[j]))
            e = np.zeros(3)
            e[j] = h
            J[:, j] = (self(s + e) - self(s - e)) / (2 * h)
        return J

    def fixed_points(self):
        raise NotImplementedError


class RosslerField(VectorField):
    def __init__(self, p: Params):
        self.p = p
        a = p.a
        # Y = {x + a y = 0}; U_v = {z > x/a}; section coordinates (x, z)
        self.section = EventSpec(
            normal=np.array([1.0, a, 0.0]),
            offset=0.0,
            direction=Direction.DOWN,
            constraint=(np.array([-1.0 / a, 0.0, 1.0]), 0.0),
            axes=np.array([[1.0, -1.0 / a, 0.0], [0.0, 0.0, 1.0]]),
            base=np.zeros(3),
        )
        self.trap_level = -p.b

    def __call__(self, s):
        a, b, c = self.p.a, self.p.b, self.p.c
        if np.ndim(s) == 1:
            x, y, z = s
            return np.array([-y - z, x + a * y, b * x + z * (x - c)])
        x, y, z = s[..., 0], s[..., 1], s[..., 2]
        return np.stack([-y - z, x + a * y, b * x + z * (x - c)], axis=-1)

    def rhs3(self, x, y, z):
        p = self.p
        return (-y - z, x + p.a * y, p.b * x + z * (x - p.c))

    def jacobian(self, s):
        return jacobian(self.p, s)

    def fixed_points(self):
        p_in, p_out = fixed_points(self.p)
        return p_in.location, p_out.location


def as_field(p) -> VectorField:
    if isinstance(p, VectorField):
        return p
    if isinstance(p, Params):
        return RosslerField(p)
    raise TypeError(f"expected Params or VectorField, got {type(p).__name__}")
