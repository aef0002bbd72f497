"""Dormand-Prince 5(4) integration with dense output and surface events.

The stepper works on states of any shape ``(..., 3)``, so a whole ring of
points can be advanced with one shared step sequence. Error control takes the
worst per-point RMS norm, which keeps every point of a ring at tolerance.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from .errors import StepSizeUnderflow, TangencyWarning
from .geometry import Direction, EventSpec
from .model import as_field

C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
A = [
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
]
B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
E = np.array([-71 / 57600, 0.0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40])
# Shampine's free quartic interpolant: y(t0 + th) = y0 + h * sum_j (K^T P)_j th^(j+1)
P = np.array([
    [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0
UNDERFLOW_REL = 1e-14
EVENT_TOL = 1e-12
TANGENCY_TOL = 1e-8


@dataclass(frozen=True)
class Tolerance:
    atol: float = 1e-10
    rtol: float = 1e-10

    def __post_init__(self):
        if not (self.atol > 0 and self.rtol > 0):
            raise ValueError("tolerances must be positive")


class Termination(str, Enum):
    TIME_BUDGET = "TimeBudget"
    EVENT = "Event"
    ESCAPED = "Escaped"
    FIXED_POINT = "FixedPointConverged"


@dataclass
class DenseStep:
    """One accepted step with its interpolant."""

    t0: float
    h: float
    y0: np.ndarray
    y1: np.ndarray
    K: np.ndarray  # (7, *shape)

    @property
    def t1(self):
        return self.t0 + self.h

    def __call__(self, t):
        th = (t - self.t0) / self.h
        Q = np.tensordot(P.T, self.K, axes=1)  # (4, *shape)
        powers = np.array([th, th ** 2, th ** 3, th ** 4])
        return self.y0 + self.h * np.tensordot(powers, Q, axes=1)


@dataclass
class Trajectory:
    t: np.ndarray
    states: np.ndarray
    tol: Tolerance
    termination: Termination
    steps: list = field(default_factory=list, repr=False)

    @property
    def final(self):
        return self.states[-1]

    def dense(self, t):
        """Evaluate the continuous extension at time t."""
        forward = self.t[-1] >= self.t[0]
        for st in self.steps:
            lo, hi = sorted((st.t0, st.t1))
            if lo <= t <= hi:
                return st(t)
        if self.t[0] == self.t[-1] or (forward and t == self.t[0]):
            return self.states[0].copy()
        raise ValueError(f"t={t} outside the integrated span")


@dataclass(frozen=True)
class Crossing:
    point: np.ndarray
    time: float
    side: str  # "U" when the event constraint holds, else "L"
    transversality: float  # |F.n| at the point
    flux: float = 0.0  # signed F.n
    tangent: bool = False


@dataclass(frozen=True)
class NoEvent:
    time: float
    state: np.ndarray
    termination: Termination


@dataclass(frozen=True)
class BoundednessVerdict:
    kind: str  # "BoundedFor" or "Escaped"
    time: float  # T for BoundedFor, t_escape for Escaped
    radius_used: float

    @property
    def bounded(self):
        return self.kind == "BoundedFor"


def rk_step(f, y, h, k1):
    """Single DOPRI5 step. Returns (y_new, K, err)."""
    K = np.empty((7,) + y.shape)
    K[0] = k1
    for s, a in enumerate(A, start=1):
        K[s] = f(y + h * np.tensordot(a, K[:s], axes=1))
    y_new = y + h * np.tensordot(B, K[:6], axes=1)
    K[6] = f(y_new)
    err = h * np.tensordot(E, K, axes=1)
    return y_new, K, err


def _rk_step3(F, y, h, k1):
    """Unrolled DOPRI5 step for a single 3-vector; ``F(x, y, z)`` returns a tuple."""
    x0, y0, z0 = y
    a0, a1, a2 = k1
    c = h / 5
    b0, b1, b2 = F(x0 + c * a0, y0 + c * a1, z0 + c * a2)
    c1, c2 = h * 3 / 40, h * 9 / 40
    d0, d1, d2 = F(x0 + c1 * a0 + c2 * b0, y0 + c1 * a1 + c2 * b1, z0 + c1 * a2 + c2 * b2)
    c1, c2, c3 = h * 44 / 45, h * -56 / 15, h * 32 / 9
    e0, e1, e2 = F(x0 + c1 * a0 + c2 * b0 + c3 * d0,
                   y0 + c1 * a1 + c2 * b1 + c3 * d1,
                   z0 + c1 * a2 + c2 * b2 + c3 * d2)
    c1, c2, c3, c4 = h * 19372 / 6561, h * -25360 / 2187, h * 64448 / 6561, h * -212 / 729
    f0, f1, f2 = F(x0 + c1 * a0 + c2 * b0 + c3 * d0 + c4 * e0,
                   y0 + c1 * a1 + c2 * b1 + c3 * d1 + c4 * e1,
                   z0 + c1 * a2 + c2 * b2 + c3 * d2 + c4 * e2)
    c1, c2, c3 = h * 9017 / 3168, h * -355 / 33, h * 46732 / 5247
    c4, c5 = h * 49 / 176, h * -5103 / 18656
    g0, g1, g2 = F(x0 + c1 * a0 + c2 * b0 + c3 * d0 + c4 * e0 + c5 * f0,
                   y0 + c1 * a1 + c2 * b1 + c3 * d1 + c4 * e1 + c5 * f1,
                   z0 + c1 * a2 + c2 * b2 + c3 * d2 + c4 * e2 + c5 * f2)
    c1, c3, c4, c5, c6 = h * 35 / 384, h * 500 / 1113, h * 125 / 192, h * -2187 / 6784, h * 11 / 84
    yn = (x0 + c1 * a0 + c3 * d0 + c4 * e0 + c5 * f0 + c6 * g0,
          y0 + c1 * a1 + c3 * d1 + c4 * e1 + c5 * f1 + c6 * g1,
          z0 + c1 * a2 + c3 * d2 + c4 * e2 + c5 * f2 + c6 * g2)
    k7 = F(*yn)
    q1, q3, q4 = h * -71 / 57600, h * 71 / 16695, h * -71 / 1920
    q5, q6, q7 = h * 17253 / 339200, h * -22 / 525, h / 40
    err = (q1 * a0 + q3 * d0 + q4 * e0 + q5 * f0 + q6 * g0 + q7 * k7[0],
           q1 * a1 + q3 * d1 + q4 * e1 + q5 * f1 + q6 * g1 + q7 * k7[1],
           q1 * a2 + q3 * d2 + q4 * e2 + q5 * f2 + q6 * g2 + q7 * k7[2])
    K = (k1, (b0, b1, b2), (d0, d1, d2), (e0, e1, e2), (f0, f1, f2), (g0, g1, g2), k7)
    return yn, K, err


def _err_norm3(err, y, yn, atol, rtol):
    s = 0.0
    for e, u, v in zip(err, y, yn):
        r = e / (atol + rtol * max(abs(u), abs(v)))
        s += r * r
    return math.sqrt(s / 3)


def _err_norm(err, y, y_new, tol):
    scale = tol.atol + tol.rtol * np.maximum(np.abs(y), np.abs(y_new))
    r = (err / scale) ** 2
    if r.ndim <= 1:
        return math.sqrt(float(np.mean(r)))
    return math.sqrt(float(np.max(np.mean(r, axis=-1))))


def _initial_step(f, y0, f0, direction, tol, span):
    scale = tol.atol + tol.rtol * np.abs(y0)
    d0 = np.sqrt(np.mean((y0 / scale) ** 2))
    d1 = np.sqrt(np.mean((f0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, span)
    y1 = y0 + direction * h0 * f0
    d2 = np.sqrt(np.mean(((f(y1) - f0) / scale) ** 2)) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1, span)


def dopri_steps(f, y0, t0, t1, tol=Tolerance(), max_step=np.inf, h0=None):
    """Yield accepted :class:`DenseStep` objects from t0 towards t1."""
    if t0 == t1:
        raise ValueError("t0 and t1 must differ")
    y = np.array(y0, dtype=float)
    t = float(t0)
    direction = 1.0 if t1 > t0 else -1.0
    span = abs(t1 - t0)
    k1 = f(y)
    h_abs = h0 if h0 is not None else _initial_step(f, y, k1, direction, tol, span)
    h_abs = min(h_abs, max_step)
    h_min = UNDERFLOW_REL * span
    F3 = getattr(f, "rhs3", None)
    if F3 is not None and y.shape == (3,):
        yield from _dopri_steps3(F3, y, t, t1, direction, h_abs, h_min, tol, max_step)
        return
    while direction * (t1 - t) > 0:
        h_abs = min(h_abs, abs(t1 - t))
        if h_abs < h_min:
            raise StepSizeUnderflow(t, h_abs)
        while True:
            h = direction * h_abs
            last = abs(t1 - t) <= h_abs
            y_new, K, err = rk_step(f, y, h, k1)
            en = _err_norm(err, y, y_new, tol)
            if en <= 1.0:
                fac = MAX_FACTOR if en == 0 else min(MAX_FACTOR, SAFETY * en ** -0.2)
                break
            h_abs *= max(MIN_FACTOR, SAFETY * en ** -0.2)
            if h_abs < h_min:
                raise StepSizeUnderflow(t, h_abs)
        t_new = t1 if last else t + h
        step = DenseStep(t, t_new - t, y, y_new, K)
        yield step
        t, y, k1 = t_new, y_new, K[6]
        h_abs = min(h_abs * fac, max_step)


def _dopri_steps3(F, y, t, t1, direction, h_abs, h_min, tol, max_step):
    atol, rtol = tol.atol, tol.rtol
    y = tuple(float(v) for v in y)
    k1 = F(*y)
    while direction * (t1 - t) > 0:
        h_abs = min(h_abs, abs(t1 - t))
        if h_abs < h_min:
            raise StepSizeUnderflow(t, h_abs)
        while True:
            h = direction * h_abs
            last = abs(t1 - t) <= h_abs
            yn, K, err = _rk_step3(F, y, h, k1)
            en = _err_norm3(err, y, yn, atol, rtol)
            if en <= 1.0:
                fac = MAX_FACTOR if en == 0 else min(MAX_FACTOR, SAFETY * en ** -0.2)
                break
            h_abs *= max(MIN_FACTOR, SAFETY * en ** -0.2)
            if h_abs < h_min:
                raise StepSizeUnderflow(t, h_abs)
        t_new = t1 if last else t + h
        yield DenseStep(t, t_new - t, np.array(y), np.array(yn), np.array(K))
        t, y, k1 = t_new, yn, K[6]
        h_abs = min(h_abs * fac, max_step)


def default_escape_radius(field_or_params) -> float:
    fld = as_field(field_or_params)
    try:
        _, p_out = fld.fixed_points()
        return 1e3 * max(1.0, float(np.linalg.norm(p_out)))
    except NotImplementedError:
        return 1e3


def integrate(p, x0, t_span, tol=Tolerance(), *, r_esc=None, targets=(), max_step=np.inf):
    """Integrate from ``x0`` over ``t_span``; backward when t1 < t0.

    Stops early if the state leaves the ball of radius ``r_esc`` or comes
    within 1e-6 of one of ``targets``.
    """
    f = as_field(p)
    t0, t1 = map(float, t_span)
    if isinstance(tol, (int, float)):
        tol = Tolerance(tol, tol)
    x0 = np.array(x0, dtype=float)
    ts, ys, steps = [t0], [x0], []
    term = Termination.TIME_BUDGET
    targets = [np.asarray(q, dtype=float) for q in targets]
    for st in dopri_steps(f, x0, t0, t1, tol, max_step):
        ts.append(st.t1)
        ys.append(st.y1)
        steps.append(st)
        if r_esc is not None and np.linalg.norm(st.y1) > r_esc:
            term = Termination.ESCAPED
            break
        if any(np.linalg.norm(st.y1 - q) < 1e-6 for q in targets):
            term = Termination.FIXED_POINT
            break
    return Trajectory(np.array(ts), np.array(ys), tol, term, steps)


def _direction_ok(ev: EventSpec, flux: float) -> bool:
    if ev.direction == Direction.BOTH:
        return True
    return flux * ev.direction > 0


def _polish(f, ev: EventSpec, st: DenseStep, t_root: float):
    """Newton on tau using fresh RK steps from the start of the step."""
    t, y = t_root, st(t_root)
    k1 = st.K[0]
    n = ev.normal
    for _ in range(8):
        g = ev.g(y)
        if abs(g) < EVENT_TOL:
            break
        dg = float(f(y) @ n)
        if dg == 0:
            break
        t_try = t - g / dg
        lo, hi = sorted((st.t0, st.t1))
        pad = 0.5 * abs(st.h)
        t_try = min(max(t_try, lo - pad), hi + pad)
        h = t_try - st.t0
        y_try = st.y0 if h == 0 else rk_step(f, st.y0, h, k1)[0]
        if abs(ev.g(y_try)) >= abs(g):
            break
        t, y = t_try, y_try
    return t, y


def locate_in_step(f, ev: EventSpec, st: DenseStep, g0: float, g1: float):
    """Refine a sign change of g inside one dense step."""
    if g1 == 0.0:
        t_root = st.t1
    elif g0 == 0.0:
        t_root = st.t0
    else:
        t_root = brentq(lambda t: ev.g(st(t)), st.t0, st.t1, xtol=1e-15, rtol=1e-15, maxiter=200)
    return _polish(f, ev, st, t_root)


def make_crossing(f, ev: EventSpec, t, y, warn=True) -> Crossing:
    flux = float(f(y) @ ev.normal)
    tangent = abs(flux) < TANGENCY_TOL
    if tangent and warn:
        warnings.warn(f"near-tangential crossing, |F.n|={abs(flux):.2e}", TangencyWarning, stacklevel=3)
    side = "U" if ev.admits(y) else "L"
    return Crossing(np.asarray(y, dtype=float), float(t), side, abs(flux), flux, tangent)


def advance_to_event(p, x0, ev: EventSpec, t_max, tol=Tolerance(), *, r_esc=None,
                     t0=0.0, targets=(), require_side="U"):
    """First admissible crossing of ``ev`` after leaving ``x0``.

    ``t_max`` is signed: a negative value integrates backward. Crossings on
    the wrong side of the event's half-space constraint are passed over.
    Returns a :class:`Crossing` or :class:`NoEvent`.
    """
    f = as_field(p)
    if isinstance(tol, (int, float)):
        tol = Tolerance(tol, tol)
    x0 = np.array(x0, dtype=float)
    if r_esc is None:
        r_esc = default_escape_radius(f)
    t_end = t0 + t_max
    if t_max == 0:
        return NoEvent(t0, x0, Termination.TIME_BUDGET)
    targets = [np.asarray(q, dtype=float) for q in targets]
    g_prev = ev.g(x0)
    on_surface = abs(g_prev) < 1e-9
    first = True
    y = x0
    for st in dopri_steps(f, x0, t0, t_end, tol):
        g_new = ev.g(st.y1)
        crossed = (g_prev < 0 <= g_new) or (g_prev > 0 >= g_new) or (g_prev == 0 != g_new and not first)
        if crossed and not (first and on_surface):
            t_c, y_c = locate_in_step(f, ev, st, g_prev, g_new)
            flux = float(f(y_c) @ ev.normal)
            if _direction_ok(ev, flux) or abs(flux) < TANGENCY_TOL:
                c = make_crossing(f, ev, t_c, y_c)
                if require_side is None or c.side == require_side or ev.constraint is None:
                    return c
        first = False
        g_prev = g_new
        y = st.y1
        if np.linalg.norm(y) > r_esc:
            return NoEvent(st.t1, y, Termination.ESCAPED)
        if any(np.linalg.norm(y - q) < 1e-6 for q in targets):
            return NoEvent(st.t1, y, Termination.FIXED_POINT)
    return NoEvent(t_end, y, Termination.TIME_BUDGET)


def classify_boundedness(p, x0, T, r_esc=None, tol=Tolerance(1e-8, 1e-8)) -> BoundednessVerdict:
    """Escaped(t) at the first step leaving the R_esc ball, else BoundedFor(T).

    A negative ``T`` checks the backward orbit.
    """
    f = as_field(p)
    if r_esc is None:
        r_esc = default_escape_radius(f)
    if not (r_esc > 0 and T != 0):
        raise ValueError("need T != 0 and R_esc > 0")
    x0 = np.asarray(x0, dtype=float)
    if np.linalg.norm(x0) > r_esc:
        return BoundednessVerdict("Escaped", 0.0, r_esc)
    try:
        for st in dopri_steps(f, x0, 0.0, float(T), tol):
            if not np.all(np.isfinite(st.y1)) or np.linalg.norm(st.y1) > r_esc:
                return BoundednessVerdict("Escaped", st.t1, r_esc)
    except StepSizeUnderflow as exc:
        # finite-time blow-up shows up as step collapse
        return BoundednessVerdict("Escaped", exc.t, r_esc)
    return BoundednessVerdict("BoundedFor", float(T), r_esc)
