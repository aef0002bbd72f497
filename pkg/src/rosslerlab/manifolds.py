"""Invariant manifolds of the two saddle-foci and the certificates built on them.

One-dimensional separatrices are traced from the real eigendirection. The
two-dimensional stable surface of P_Out is grown as a ring of points that is
advected backward with shared steps and refined in the seed-angle parameter;
points freeze once they reach the plane z = trap_level (S_b for Rössler).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import brentq
from scipy.spatial.distance import directed_hausdorff

from .errors import DegenerateTriangle, EmptyTrace, FrontBlowup, NotSaddleFocus
from .integrator import (
    P as DENSE_P, Crossing, NoEvent, Termination, Tolerance, advance_to_event,
    default_escape_radius, dopri_steps,
)
from .model import FixedPoint, Params, as_field, eval_field, spectrum_at

ACTIVE, HIT, ESCAPED = 0, 1, 2


class Branch(str, Enum):
    DELTA_OUT = "DeltaOut"
    GAMMA_OUT = "GammaOut"
    DELTA_IN = "DeltaIn"
    GAMMA_IN = "GammaIn"

    @property
    def fixed_point(self):
        return FixedPoint.OUT if self.value.endswith("Out") else FixedPoint.IN

    @property
    def is_delta(self):
        return self.value.startswith("Delta")


# ---------------------------------------------------------------- eigen-geometry

def null_vector(M) -> np.ndarray:
    """Null vector of a rank-2 3x3 matrix (real or complex) from row cross products."""
    rows = [np.cross(M[i], M[j]) for i, j in ((0, 1), (0, 2), (1, 2))]
    v = max(rows, key=lambda r: np.linalg.norm(r))
    return v / np.linalg.norm(v)


def _fixed_point(fld, which: FixedPoint):
    p_in, p_out = fld.fixed_points()
    return p_in if which is FixedPoint.IN else p_out


def _length_scale(fld) -> float:
    p_in, p_out = fld.fixed_points()
    if p_in is None:
        return max(1.0, float(np.linalg.norm(p_out)))
    return float(np.linalg.norm(p_out - p_in))


def saddle_focus_frame(fld, which: FixedPoint):
    """(location, spectrum, real eigenvector, orthonormal basis of the focus plane)."""
    loc = _fixed_point(fld, which)
    J = fld.jacobian(loc)
    sp = spectrum_at(J, which)
    if not sp.saddle_focus:
        raise NotSaddleFocus(f"{which.value} is {sp.kind}")
    v = null_vector(J - sp.gamma * np.eye(3)).real
    w = null_vector(J.astype(complex) - complex(sp.rho, sp.psi) * np.eye(3))
    e1 = w.real / np.linalg.norm(w.real) if np.linalg.norm(w.real) > 1e-12 else w.imag / np.linalg.norm(w.imag)
    e2 = w.imag - (w.imag @ e1) * e1
    if np.linalg.norm(e2) < 1e-12:
        e2 = w.real - (w.real @ e1) * e1
    e2 /= np.linalg.norm(e2)
    return loc, sp, v, np.array([e1, e2])


# ---------------------------------------------------------------- separatrices

@dataclass
class SeparatrixTrace:
    branch: Branch
    seed: np.ndarray
    sign: int
    crossings: list
    termination: Termination
    t_end: float
    end_state: np.ndarray
    origin: np.ndarray  # x0 of the symbolic bookkeeping (the fixed point)

    @property
    def escaped(self):
        return self.termination == Termination.ESCAPED


def _run_branch(fld, which, loc, v, sign, eps, t_max, tol, max_crossings):
    direction = 1.0 if which is FixedPoint.OUT else -1.0
    other = _fixed_point(fld, FixedPoint.IN if which is FixedPoint.OUT else FixedPoint.OUT)
    targets = [] if other is None else [other]
    seed = loc + sign * eps * v
    r_esc = default_escape_radius(fld)
    state, t = seed, 0.0
    crossings = []
    term, end = Termination.TIME_BUDGET, seed
    while len(crossings) < max_crossings:
        remaining = direction * (t_max - abs(t))
        if remaining * direction <= 0:
            break
        r = advance_to_event(fld, state, fld.section, remaining, tol, r_esc=r_esc, t0=t, targets=targets)
        if isinstance(r, NoEvent):
            term, end, t = r.termination, r.state, r.time
            break
        crossings.append(r)
        state, t, end = r.point, r.time, r.point
    return crossings, term, t, end, seed


def trace_separatrix(p, branch, eps=1e-6, t_max=300.0, tol=Tolerance(1e-10, 1e-10),
                     max_crossings=200) -> SeparatrixTrace:
    """Trace one branch of the 1D manifold of P_Out (unstable) or P_In (stable, backward).

    Both signs of the eigenvector are integrated and labelled afterwards: an
    escaping branch is Gamma; if both stay bounded Delta points toward the
    other fixed point; if both escape Delta is the one that lasts longer.
    """
    fld = as_field(p)
    branch = Branch(branch)
    if not eps > 0:
        raise ValueError("eps must be positive")
    which = branch.fixed_point
    loc, _, v, _ = saddle_focus_frame(fld, which)
    runs = {s: _run_branch(fld, which, loc, v, s, eps, t_max, tol, max_crossings) for s in (1, -1)}
    esc = {s: runs[s][1] == Termination.ESCAPED for s in runs}
    if esc[1] != esc[-1]:
        delta = -1 if esc[1] else 1
    elif not esc[1]:
        other = _fixed_point(fld, FixedPoint.IN if which is FixedPoint.OUT else FixedPoint.OUT)
        ref = other - loc if other is not None else -loc
        delta = 1 if v @ ref > 0 else -1
    else:
        delta = 1 if abs(runs[1][2]) >= abs(runs[-1][2]) else -1
    s = delta if branch.is_delta else -delta
    crossings, term, t_end, end, seed = runs[s]
    return SeparatrixTrace(branch, seed, s, crossings, term, t_end, np.asarray(end), loc)


def kneading_from_crossings(xs, part, N, converged_to_in=False):
    """Flow kneading word from the x-coordinates of x1, x2, ... (padding with 1s after P_In)."""
    from .symbols import SymbolSequence

    if N <= 0:
        return SymbolSequence.finite(())
    if len(xs) == 0 and not converged_to_in:
        raise EmptyTrace("no section crossing before the trace ended")
    word = [part.symbol(x) for x in list(xs)[:N]]
    truncated = None
    if len(word) < N:
        if converged_to_in:
            word += [1] * (N - len(word))
        else:
            truncated = "trace ended"
    return SymbolSequence.finite(word, truncated=truncated)


def flow_kneading(p, part, N, eps=1e-6, t_max=300.0, tol=Tolerance(1e-10, 1e-10)):
    fld = as_field(p)
    if N <= 0:
        return kneading_from_crossings([], part, 0)
    tr = trace_separatrix(fld, Branch.DELTA_OUT, eps, t_max, tol, max_crossings=N)
    xs = [fld.section.coords(c.point)[0] for c in tr.crossings]
    return kneading_from_crossings(xs, part, N, tr.termination == Termination.FIXED_POINT)


# ---------------------------------------------------------------- ring fronts

@dataclass(frozen=True)
class SbHit:
    point: np.ndarray
    time: float
    theta: float


@dataclass
class ManifoldFront:
    ring: np.ndarray
    theta: np.ndarray
    generation: int
    time: float
    status: np.ndarray
    hit_Sb: list

    def max_active_spacing(self):
        act = self.status == ACTIVE
        n = len(self.ring)
        gaps = [np.linalg.norm(self.ring[(i + 1) % n] - self.ring[i])
                for i in range(n) if act[i] and act[(i + 1) % n]]
        return max(gaps) if gaps else 0.0


@dataclass
class SurfaceGrowth:
    fronts: list
    center: np.ndarray
    r0: float
    h_max: float
    R_max: float
    radius_max: float
    stop_reason: str

    @property
    def final(self) -> ManifoldFront:
        return self.fronts[-1]

    @property
    def hits(self):
        f = self.final
        return [h for h in f.hit_Sb if h is not None]


def _row_interp(st, rows):
    """Per-row dense interpolant coefficients for the given rows of a DenseStep."""
    Q = np.tensordot(DENSE_P.T, st.K[:, rows], axes=1)
    y0, h = st.y0[rows], st.h

    def ev(t):
        th = (t - st.t0) / h
        pw = np.array([th, th * th, th ** 3, th ** 4])
        return y0 + h * np.tensordot(pw, Q, axes=1)
    return ev


def _cubic_mid(th, pts, tm):
    """Lagrange cubic through four (theta, point) pairs, evaluated at tm."""
    out = np.zeros(3)
    for i in range(4):
        w = 1.0
        for j in range(4):
            if j != i:
                w *= (tm - th[j]) / (th[i] - th[j])
        out += w * pts[i]
    return out


def _refine(ring, theta, status, hits, h_max, max_points):
    changed = True
    while changed:
        changed = False
        n = len(ring)
        new_r, new_t, new_s, new_h = [], [], [], []
        for i in range(n):
            j = (i + 1) % n
            new_r.append(ring[i]); new_t.append(theta[i]); new_s.append(status[i]); new_h.append(hits[i])
            if status[i] != ACTIVE or status[j] != ACTIVE:
                continue
            if np.linalg.norm(ring[j] - ring[i]) <= h_max:
                continue
            tj = theta[j] + (2 * np.pi if j == 0 else 0.0)
            tm = 0.5 * (theta[i] + tj)
            idx = [(i - 1) % n, i, j, (i + 2) % n]
            if n >= 4 and all(status[k] == ACTIVE for k in idx):
                ths = np.array([theta[k] for k in idx], dtype=float)
                # unwrap around theta[i]
                ths = theta[i] + np.mod(ths - theta[i] + np.pi, 2 * np.pi) - np.pi
                ths[2] = theta[i] + np.mod(theta[j] - theta[i], 2 * np.pi)
                ths[3] = ths[2] + np.mod(theta[idx[3]] - theta[j], 2 * np.pi)
                ths[0] = theta[i] - np.mod(theta[i] - theta[idx[0]], 2 * np.pi)
                mid = _cubic_mid(ths, ring[idx], tm)
            else:
                mid = 0.5 * (ring[i] + ring[j])
            new_r.append(mid); new_t.append(np.mod(tm, 2 * np.pi)); new_s.append(ACTIVE); new_h.append(None)
            changed = True
        if len(new_r) > max_points:
            raise FrontBlowup(f"front refinement needs more than {max_points} points")
        ring = np.array(new_r)
        theta = np.array(new_t)
        status = np.array(new_s)
        hits = new_h
    return ring, theta, status, hits


def grow_front(fld, center, basis, r0, h_max, t_total, direction, *, level=None, R_max=np.inf,
               dt_gen=0.25, max_points=20000, n0=32, tol=Tolerance(1e-9, 1e-9),
               stop_radius=None, keep_history=True) -> SurfaceGrowth:
    """Advect a ring seeded on the circle of radius r0 in ``basis`` about ``center``."""
    f = as_field(fld)
    theta = np.linspace(0, 2 * np.pi, n0, endpoint=False)
    ring = center + r0 * (np.cos(theta)[:, None] * basis[0] + np.sin(theta)[:, None] * basis[1])
    status = np.zeros(n0, dtype=int)
    hits = [None] * n0
    t = 0.0
    gen = 0
    rmax = float(np.max(np.linalg.norm(ring, axis=1)))
    snap = lambda: ManifoldFront(ring.copy(), theta.copy(), gen, t, status.copy(), list(hits))  # noqa: E731
    fronts = [snap()]
    reason = "time budget"
    while abs(t) < t_total - 1e-12:
        act = np.nonzero(status == ACTIVE)[0]
        if len(act) == 0:
            reason = "all points stopped"
            break
        t_gen_end = direction * min(abs(t) + dt_gen, t_total)
        Y = ring[act].copy()
        while act.size and t != t_gen_end:
            stopped = False
            for st in dopri_steps(f, Y, t, t_gen_end, tol):
                newly = []
                if level is not None:
                    g0 = st.y0[:, 2] - level
                    g1 = st.y1[:, 2] - level
                    cross = np.nonzero((g0 != 0) & (np.sign(g0) != np.sign(g1)))[0]
                    if cross.size:
                        ev = _row_interp(st, cross)
                        for m, r in enumerate(cross):
                            tau = brentq(lambda s: ev(s)[m, 2] - level, st.t0, st.t1, xtol=1e-14, rtol=1e-15)
                            pt = ev(tau)[m].copy()
                            k = act[r]
                            hits[k] = SbHit(pt, tau, float(theta[k]))
                            status[k] = HIT
                            ring[k] = pt
                            newly.append(r)
                norms = np.linalg.norm(st.y1, axis=1)
                rmax = max(rmax, float(norms.max()))
                out = [r for r in np.nonzero(norms > R_max)[0] if r not in newly]
                for r in out:
                    status[act[r]] = ESCAPED
                    ring[act[r]] = st.y1[r]
                newly += out
                t = st.t1
                if newly:
                    keep = np.ones(len(act), dtype=bool)
                    keep[newly] = False
                    act, Y = act[keep], st.y1[keep].copy()
                    stopped = True
                    break
                Y = st.y1
            if not stopped:
                t = t_gen_end
        ring[act] = Y
        gen += 1
        ring, theta, status, hits = _refine(ring, theta, status, hits, h_max, max_points)
        if keep_history:
            fronts.append(snap())
        else:
            fronts[-1:] = [snap()]
        if stop_radius is not None:
            a = status == ACTIVE
            if a.any() and np.mean(np.linalg.norm(ring[a] - center, axis=1)) >= stop_radius:
                reason = "stop radius"
                break
    else:
        reason = "time budget"
    if np.all(status != ACTIVE):
        reason = "all points stopped"
    return SurfaceGrowth(fronts, center, r0, h_max, R_max, rmax, reason)


@dataclass(frozen=True)
class CriterionConfig:
    r0: float | None = None
    h_max: float | None = None
    gap_tol: float | None = None
    t_back_max: float = 200.0
    R_max: float | None = None
    dt_gen: float | None = None
    max_points: int = 20000
    tol: float = 1e-9


def _resolved(fld, cfg: CriterionConfig):
    L = _length_scale(fld)
    r0 = cfg.r0 if cfg.r0 is not None else 1e-3 * L
    h_max = cfg.h_max if cfg.h_max is not None else 0.05 * L
    gap_tol = cfg.gap_tol if cfg.gap_tol is not None else 2 * h_max
    R_max = cfg.R_max if cfg.R_max is not None else 100 * L
    return L, r0, h_max, gap_tol, R_max


def _default_dt(sp):
    return float(np.clip(0.25 * 2 * np.pi / sp.psi, 0.05, 1.0))


def grow_stable_surface(p, r0=None, h_max=None, t_back_max=200.0, R_max=None, *, dt_gen=None,
                        max_points=20000, tol=1e-9, keep_history=True) -> SurfaceGrowth:
    """Backward growth of W^s(P_Out) from a ring in its stable focus plane, stopping at S_b."""
    fld = as_field(p)
    cfg = CriterionConfig(r0, h_max, None, t_back_max, R_max, dt_gen, max_points, tol)
    _, r0, h_max, _, R_max = _resolved(fld, cfg)
    loc, sp, _, basis = saddle_focus_frame(fld, FixedPoint.OUT)
    dt = dt_gen if dt_gen is not None else _default_dt(sp)
    return grow_front(fld, loc, basis, r0, h_max, t_back_max, -1.0, level=fld.trap_level,
                      R_max=R_max, dt_gen=dt, max_points=max_points, tol=Tolerance(tol, tol),
                      keep_history=keep_history)


@dataclass
class CriterionVerdict:
    status: str  # SatisfiedBounded | EscapedFront | Inconclusive
    delta_polyline: np.ndarray
    gap_max: float
    radius_max: float
    gap_tol: float = 0.0
    R_max: float = 0.0
    n_points: int = 0
    growth: SurfaceGrowth | None = field(default=None, repr=False)


def attractor_criterion(p, cfg: CriterionConfig = CriterionConfig()) -> CriterionVerdict:
    fld = as_field(p)
    _, r0, h_max, gap_tol, R_max = _resolved(fld, cfg)
    try:
        g = grow_stable_surface(fld, r0, h_max, cfg.t_back_max, R_max, dt_gen=cfg.dt_gen,
                                max_points=cfg.max_points, tol=cfg.tol)
    except FrontBlowup:
        # point budget exhausted before the front settled
        return CriterionVerdict("Inconclusive", np.zeros((0, 3)), math.inf, math.nan,
                                gap_tol, R_max, cfg.max_points)
    fr = g.final
    hits = [h for h in fr.hit_Sb if h is not None]
    hits.sort(key=lambda h: h.theta)
    poly = np.array([h.point for h in hits]).reshape(-1, 3)
    if len(poly) >= 2:
        gaps = np.linalg.norm(np.roll(poly, -1, axis=0) - poly, axis=1)
        gap_max = float(gaps.max())
    else:
        gap_max = math.inf
    if np.any(fr.status == ESCAPED):
        status = "EscapedFront"
    elif np.all(fr.status == HIT) and gap_max < gap_tol and g.radius_max < R_max:
        status = "SatisfiedBounded"
    else:
        status = "Inconclusive"
    return CriterionVerdict(status, poly, gap_max, g.radius_max, gap_tol, R_max, len(fr.ring), g)


# ---------------------------------------------------------------- repeller

@dataclass(frozen=True)
class RepellerReport:
    in_region: bool
    face_fluxes: tuple
    face_points: tuple


R_NORMALS = (np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 1.0]), np.array([0.0, -1.0, 0.0]))


def r1_flux(p: Params, x, z):
    """F.(1, a, 0) at (x, -x/a, z)."""
    return x / p.a - z


def r2_flux(p: Params, x, z):
    """F.(0, 1, 1) at (x, -z, z)."""
    return (p.b + 1) * x - z * (p.a + p.c - x)


def r2_threshold(p: Params, x):
    """F.(0,1,1) > 0 on R2 iff z is below this value (for x < a + c)."""
    return (p.b + 1) * x / (p.a + p.c - x)


def r3_flux(p: Params, x, z=None):
    """F.(0, -1, 0) at (x, b + 1, z)."""
    return -(x + p.a * (p.b + 1))


def face_normals(p: Params):
    return np.array([[1.0, p.a, 0.0], [0.0, 1.0, 1.0], [0.0, -1.0, 0.0]])


def _project(s, n, d):
    """Orthogonal projection of s onto the plane n.s + d = 0."""
    return s - (s @ n + d) / (n @ n) * n


def repeller_membership(p: Params, s) -> RepellerReport:
    s = np.asarray(s, dtype=float)
    F = eval_field(p, s)
    in_region = bool(F[1] < 0 and F[0] > 0 and s[1] > p.b + 1)
    n1, n2, n3 = face_normals(p)
    q1 = _project(s, n1, 0.0)
    q2 = _project(s, n2, 0.0)
    q3 = _project(s, np.array([0.0, 1.0, 0.0]), -(p.b + 1))
    fluxes = (r1_flux(p, q1[0], q1[2]), r2_flux(p, q2[0], q2[2]), r3_flux(p, q3[0]))
    return RepellerReport(in_region, tuple(float(v) for v in fluxes), (q1, q2, q3))


def sb_flux(p: Params, x=None, y=None):
    """Upward flux through S_b = {z = -b}; independent of (x, y)."""
    return p.b * p.c


# ---------------------------------------------------------------- trapping

@dataclass(frozen=True)
class TrappingReport:
    certified: bool
    min_flux: float
    max_flux: float
    fraction_inward: float
    n_points: int
    margin: float


def triangle_normals(tris):
    tris = np.asarray(tris, dtype=float).reshape(-1, 3, 3)
    n = np.cross(tris[:, 1] - tris[:, 0], tris[:, 2] - tris[:, 0])
    norms = np.linalg.norm(n, axis=1)
    scale = np.max(np.linalg.norm(tris - tris.mean(axis=1, keepdims=True), axis=2), axis=1)
    bad = np.nonzero(norms <= 1e-12 * np.maximum(scale, 1e-300) ** 2)[0]
    if bad.size:
        raise DegenerateTriangle(f"triangle {int(bad[0])} has zero area")
    return n / norms[:, None]


def barycentric_samples(n):
    """n fixed barycentric points: the centroid, then an additive-recurrence fill folded into the triangle."""
    pts = [(1 / 3, 1 / 3)]
    g = 1.32471795724474602596  # plastic number, for a 2D low-discrepancy sequence
    a1, a2 = 1 / g, 1 / g ** 2
    i = 1
    while len(pts) < n:
        u, v = (0.5 + a1 * i) % 1.0, (0.5 + a2 * i) % 1.0
        if u + v > 1:
            u, v = 1 - u, 1 - v
        pts.append((u, v))
        i += 1
    w = np.array(pts[:n])
    return np.column_stack([1 - w[:, 0] - w[:, 1], w[:, 0], w[:, 1]])


def certify_trapping(p, triangles, n_samples=7, margin=0.0) -> TrappingReport:
    """Sample F.n over an oriented triangle soup (normals from vertex order, outward)."""
    fld = as_field(p)
    tris = np.asarray(triangles, dtype=float).reshape(-1, 3, 3)
    normals = triangle_normals(tris)
    W = barycentric_samples(max(1, int(n_samples)))
    pts = np.einsum("sk,tkd->tsd", W, tris)
    F = fld(pts.reshape(-1, 3)).reshape(pts.shape)
    flux = np.einsum("tsd,td->ts", F, normals).ravel()
    return TrappingReport(
        bool(np.all(flux < -margin)), float(flux.min()), float(flux.max()),
        float(np.mean(flux < 0)), int(flux.size), float(margin),
    )


def icosphere(center=(0, 0, 0), radius=1.0, subdivisions=2) -> np.ndarray:
    """Outward-oriented triangulated sphere, shape (M, 3, 3)."""
    t = (1 + 5 ** 0.5) / 2
    V = [(-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0), (0, -1, t), (0, 1, t),
         (0, -1, -t), (0, 1, -t), (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1)]
    V = [np.array(v, float) / np.linalg.norm(v) for v in V]
    Fc = [(0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11), (1, 5, 9), (5, 11, 4),
          (11, 10, 2), (10, 7, 6), (7, 1, 8), (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8),
          (3, 8, 9), (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1)]
    tris = [np.array([V[i], V[j], V[k]]) for i, j, k in Fc]
    for _ in range(subdivisions):
        nxt = []
        for a, b, c in tris:
            ab, bc, ca = [(u + w) / np.linalg.norm(u + w) for u, w in ((a, b), (b, c), (c, a))]
            nxt += [np.array(x) for x in ((a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca))]
        tris = nxt
    return np.asarray(center, float) + radius * np.array(tris)


def plane_patch(z0, half=1.0, center=(0.0, 0.0), normal_down=True, n=2) -> np.ndarray:
    """Square patch of the plane z = z0 split into 2 n^2 triangles."""
    cx, cy = center
    g = np.linspace(-half, half, n + 1)
    tris = []
    for i in range(n):
        for j in range(n):
            p00 = (cx + g[i], cy + g[j], z0)
            p10 = (cx + g[i + 1], cy + g[j], z0)
            p01 = (cx + g[i], cy + g[j + 1], z0)
            p11 = (cx + g[i + 1], cy + g[j + 1], z0)
            if normal_down:
                tris += [(p00, p01, p10), (p10, p01, p11)]
            else:
                tris += [(p00, p10, p01), (p10, p11, p01)]
    return np.array(tris, dtype=float)


# ---------------------------------------------------------------- trefoil defect

@dataclass(frozen=True)
class TrefoilConfig:
    eps: float = 1e-6
    t_max: float = 300.0
    tol: float = 1e-10
    front_radius: float | None = None
    front_points: int = 64
    front_t_max: float = 400.0
    compute_coincide: bool = True


@dataclass(frozen=True)
class TrefoilDefect:
    d_hetero: float
    d_coincide: float
    transverse_P0: bool
    nearest: tuple = ()


def min_crossing_distance(A, B):
    """(distance, i, j) of the closest pair between two crossing lists."""
    P = np.array([c.point for c in A])
    Q = np.array([c.point for c in B])
    D = np.linalg.norm(P[:, None, :] - Q[None, :, :], axis=-1)
    i, j = np.unravel_index(np.argmin(D), D.shape)
    return float(D[i, j]), int(i), int(j)


def hausdorff(P, Q) -> float:
    P = np.asarray(P, dtype=float).reshape(-1, 3)
    Q = np.asarray(Q, dtype=float).reshape(-1, 3)
    if len(P) == 0 or len(Q) == 0:
        return math.inf
    return max(directed_hausdorff(P, Q)[0], directed_hausdorff(Q, P)[0])


def _front_section_trace(fld, which, direction, cfg: TrefoilConfig, L):
    loc, sp, _, basis = saddle_focus_frame(fld, which)
    radius = cfg.front_radius if cfg.front_radius is not None else 0.25 * L
    g = grow_front(fld, loc, basis, 1e-3 * L, 0.05 * L, cfg.front_t_max, direction,
                   R_max=default_escape_radius(fld), dt_gen=_default_dt(sp), n0=cfg.front_points,
                   tol=Tolerance(cfg.tol, cfg.tol), stop_radius=radius, keep_history=False)
    out = []
    r_esc = default_escape_radius(fld)
    for s in g.final.ring[g.final.status == ACTIVE]:
        r = advance_to_event(fld, s, fld.section, direction * cfg.t_max, Tolerance(cfg.tol, cfg.tol), r_esc=r_esc)
        if isinstance(r, Crossing):
            out.append(r.point)
    return np.array(out).reshape(-1, 3)


def trefoil_defect(p, cfg: TrefoilConfig = TrefoilConfig()) -> TrefoilDefect:
    fld = as_field(p)
    tol = Tolerance(cfg.tol, cfg.tol)
    d_out = trace_separatrix(fld, Branch.DELTA_OUT, cfg.eps, cfg.t_max, tol)
    d_in = trace_separatrix(fld, Branch.DELTA_IN, cfg.eps, cfg.t_max, tol)
    if not d_out.crossings or not d_in.crossings:
        raise EmptyTrace("a Delta separatrix has no section crossing")
    d, i, j = min_crossing_distance(d_out.crossings, d_in.crossings)
    transverse = not (d_out.crossings[i].tangent or d_in.crossings[j].tangent)
    d_co = math.inf
    if cfg.compute_coincide:
        L = _length_scale(fld)
        wu_in = _front_section_trace(fld, FixedPoint.IN, 1.0, cfg, L)
        ws_out = _front_section_trace(fld, FixedPoint.OUT, -1.0, cfg, L)
        d_co = hausdorff(wu_in, ws_out)
    return TrefoilDefect(d, d_co, transverse, (i, j))
