"""Cross-section geometry, first-return map, fold partition and periodic orbits.

The section for the Rössler field is the plane Y = {x + a y = 0}. On Y the
normal flux is F.N = x/a - z, so the tangency line l_v = {(x, -x/a, x/a)}
splits Y into U_v (z > x/a, crossed downward) and L_v. Points of U_v are
addressed by their (x, z) coordinates.

Everything downstream of :class:`ReturnMap` only needs ``first(u)``,
``section`` and ``witness``; tests plug explicit planar maps in through the
same interface.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AmbiguousSymbol, Escaped, NoConvergence, NoFoldFound, NoReturn, NotMinimalPeriod,
)
from .geometry import EventSpec
from .integrator import (
    Crossing, NoEvent, Termination, Tolerance, advance_to_event, default_escape_radius,
)
from .model import Params, RosslerField, as_field
from .symbols import SymbolSequence

AMBIGUITY_TOL = 1e-9
PERIODIC_RESIDUAL = 1e-8


@dataclass(frozen=True)
class SectionGeometry:
    """Y, l_v and the half-planes U_v / L_v for parameters p."""

    p: Params

    @property
    def normal(self):
        return np.array([1.0, self.p.a, 0.0])

    def on_section(self, s, tol=1e-10) -> bool:
        return abs(s[0] + self.p.a * s[1]) < tol

    def flux(self, s) -> float:
        """F.N evaluated in closed form on Y."""
        return s[0] / self.p.a - s[2]

    def lv_point(self, x):
        a = self.p.a
        return np.array([x, -x / a, x / a])

    def in_U(self, s) -> bool:
        return s[2] > s[0] / self.p.a

    def in_L(self, s) -> bool:
        return s[2] < s[0] / self.p.a

    def point(self, x, z):
        return np.array([x, -x / self.p.a, z])


@dataclass(frozen=True)
class Partition:
    """Vertical line x = fold_x on the section; D1 lies on side ``d1_side`` of it."""

    fold_x: float
    d1_side: int = 1
    tol: float = AMBIGUITY_TOL

    def symbol(self, x) -> int:
        dx = float(x) - self.fold_x
        if abs(dx) < self.tol:
            raise AmbiguousSymbol(f"x={x} within {self.tol:g} of the fold at {self.fold_x}")
        return 1 if (dx > 0) == (self.d1_side > 0) else 2

    @classmethod
    def with_reference(cls, fold_x, reference_x=0.0):
        """Partition putting ``reference_x`` (P_In by default) in D1."""
        side = 1 if reference_x >= fold_x else -1
        return cls(float(fold_x), side)


@dataclass(frozen=True)
class PeriodicOrbit:
    points: np.ndarray  # (k, 3)
    k: int
    return_times: np.ndarray
    residual: float
    multipliers: tuple | None = None


@dataclass
class ReturnSamples:
    crossings: list = field(default_factory=list)
    partial: bool = False
    reason: str | None = None

    def __len__(self):
        return len(self.crossings)

    def __iter__(self):
        return iter(self.crossings)

    def __getitem__(self, i):
        return self.crossings[i]


class ReturnMap:
    """First-return map of a flow to its section half-plane."""

    def __init__(self, fld, section: EventSpec | None = None, t_max=200.0,
                 tol=Tolerance(1e-10, 1e-10), r_esc=None, witness="auto"):
        self.field = as_field(fld)
        self.section = section if section is not None else self.field.section
        if self.section is None:
            raise ValueError("field has no default section; pass one explicitly")
        self.t_max = float(t_max)
        self.tol = tol if isinstance(tol, Tolerance) else Tolerance(tol, tol)
        self.r_esc = r_esc if r_esc is not None else default_escape_radius(self.field)
        if witness == "auto":
            try:
                witness = self.field.fixed_points()[0]
            except NotImplementedError:
                witness = None
        self.witness = None if witness is None else np.asarray(witness, dtype=float)

    @property
    def default_seed(self):
        return np.array([1.0, 1.0, 0.0])

    def coords(self, s):
        return self.section.coords(s)

    def point(self, q):
        return self.section.point(q)

    def first(self, u, t0=0.0) -> Crossing:
        """Next crossing of the section half-plane; raises Escaped or NoReturn."""
        u = np.asarray(u, dtype=float)
        fu = self.field(u)
        if np.linalg.norm(fu) < 1e-13 * max(1.0, np.linalg.norm(u)):
            # a fixed point of the flow on the section returns to itself
            return Crossing(u.copy(), float(t0), "U", 0.0, 0.0, True)
        r = advance_to_event(self.field, u, self.section, self.t_max, self.tol,
                             r_esc=self.r_esc, t0=t0)
        if isinstance(r, NoEvent):
            if r.termination == Termination.ESCAPED:
                raise Escaped(r.time, r.state)
            raise NoReturn(f"no return within t_max={self.t_max}")
        return r

    def iterate(self, q, k):
        """k-fold return map on section coordinates; returns (q_k, total time, points)."""
        s = self.point(q)
        t = 0.0
        pts, times = [], []
        for _ in range(k):
            c = self.first(s, t0=0.0)
            s = c.point
            pts.append(s)
            times.append(c.time)
            t += c.time
        return self.coords(s), t, np.array(pts), np.array(times)


def as_return_map(m) -> ReturnMap:
    if isinstance(m, ReturnMap) or hasattr(m, "first"):
        return m
    if isinstance(m, Params):
        return ReturnMap(RosslerField(m))
    return ReturnMap(m)


def first_return(m, u, t_max=None) -> Crossing:
    rm = as_return_map(m)
    if t_max is not None and t_max != rm.t_max:
        rm = ReturnMap(rm.field, rm.section, t_max, rm.tol, rm.r_esc, rm.witness)
    return rm.first(u)


def return_samples(m, seed, n, burn=0) -> ReturnSamples:
    """n crossings after discarding ``burn``; partial on escape or no return."""
    rm = as_return_map(m)
    out = ReturnSamples()
    if n <= 0:
        return out
    s = np.asarray(seed, dtype=float)
    t = 0.0
    for i in range(n + burn):
        try:
            c = rm.first(s, t0=t)
        except (Escaped, NoReturn) as exc:
            out.partial = True
            out.reason = type(exc).__name__
            break
        s, t = c.point, c.time
        if i >= burn:
            out.crossings.append(c)
    return out


def _xs(samples):
    xs = []
    for c in samples:
        xs.append(float(c.point[0]) if isinstance(c, Crossing) else float(c))
    return np.array(xs)


def estimate_fold(samples, reference_x=0.0, d1_side=None) -> Partition:
    """Fold of the empirical successor relation x_{n+1} = g(x_n).

    The interior extremum of g (the one not at either end of the sampled
    range) is refined by a local quadratic fit centred on the extremal sample.
    """
    xs = _xs(samples)
    if len(xs) < 3:
        raise NoFoldFound("need at least three samples")
    u, v = xs[:-1], xs[1:]
    span = u.max() - u.min()
    if span < 1e-9 * max(1.0, abs(u).max()) or v.max() - v.min() < 1e-9:
        raise NoFoldFound("successor relation is degenerate")
    order = np.argsort(u)
    lo, hi = u[order[0]], u[order[-1]]
    edge = 0.02 * span
    best = None
    for j in (int(np.argmin(v)), int(np.argmax(v))):
        x0 = u[j]
        if x0 - lo > edge and hi - x0 > edge:
            best = j if best is None or _prominence(u, v, j) > _prominence(u, v, best) else best
    if best is None:
        raise NoFoldFound("successor relation has no interior extremum")
    x0 = u[best]
    w = 0.08 * span
    mask = np.abs(u - x0) < w
    while mask.sum() < 7 and w < span:
        w *= 1.5
        mask = np.abs(u - x0) < w
    fold = x0
    if mask.sum() >= 3:
        du = u[mask] - x0
        c2, c1, _ = np.polyfit(du, v[mask], 2)
        if c2 != 0:
            vertex = -c1 / (2 * c2)
            if abs(vertex) < w:
                fold = x0 + vertex
    if d1_side is not None:
        return Partition(float(fold), int(d1_side))
    return Partition.with_reference(fold, reference_x)


def _prominence(u, v, j):
    return abs(v[j] - np.median(v))


def itinerary(m, u, n, part: Partition) -> SymbolSequence:
    """Symbols of u, f(u), ..., f^{n-1}(u); truncated with a flag on escape or near-fold hits."""
    rm = as_return_map(m)
    word = []
    s = np.asarray(u, dtype=float)
    reason = None
    for i in range(n):
        if i > 0:
            try:
                s = rm.first(s).point
            except (Escaped, NoReturn) as exc:
                reason = type(exc).__name__
                break
        try:
            word.append(part.symbol(rm.coords(s)[0]))
        except AmbiguousSymbol:
            if i == 0:
                raise
            reason = "AmbiguousSymbol"
            break
    return SymbolSequence.finite(word, truncated=reason)


def _residual_fn(rm, k):
    def G(q):
        qk, *_ = rm.iterate(q, k)
        return qk - q
    return G


def _fd_jacobian(G, q, g0=None):
    J = np.empty((2, 2))
    for j in range(2):
        h = 1e-6 * max(1.0, abs(q[j]))
        e = np.zeros(2)
        e[j] = h
        J[:, j] = (G(q + e) - G(q - e)) / (2 * h)
    return J


def _divisors(k):
    return [m for m in range(1, k) if k % m == 0]


def find_periodic_orbit(m, guess, k, max_iter=50, tol=PERIODIC_RESIDUAL) -> PeriodicOrbit:
    """Damped Newton on the section coordinates of f^k."""
    rm = as_return_map(m)
    if k < 1:
        raise ValueError("k must be >= 1")
    guess = np.asarray(guess, dtype=float)
    if rm.witness is not None and np.linalg.norm(guess - rm.witness) < 1e-12:
        c = rm.first(guess)
        if c.transversality == 0.0:
            return PeriodicOrbit(np.array([guess]), 1, np.array([0.0]), 0.0, None)
    G = _residual_fn(rm, k)
    q = rm.coords(guess)
    try:
        g = G(q)
    except (Escaped, NoReturn) as exc:
        raise NoConvergence(f"guess does not return {k} times: {exc}") from exc
    res = float(np.linalg.norm(g))
    it = 0
    while res >= tol:
        if it >= max_iter:
            raise NoConvergence(f"residual {res:.3e} after {max_iter} Newton steps")
        it += 1
        try:
            J = _fd_jacobian(G, q)
            step = np.linalg.solve(J, -g)
        except (np.linalg.LinAlgError, Escaped, NoReturn) as exc:
            raise NoConvergence(f"Newton step failed: {exc}") from exc
        lam = 1.0
        while True:
            try:
                q_new = q + lam * step
                g_new = G(q_new)
                r_new = float(np.linalg.norm(g_new))
            except (Escaped, NoReturn):
                r_new = math.inf
            if r_new < res or lam < 1e-4:
                break
            lam *= 0.5
        if not math.isfinite(r_new):
            raise NoConvergence("Newton iterate left the domain of the return map")
        q, g, res = q_new, g_new, r_new
    _, _, pts, times = rm.iterate(q, k)
    pts = np.vstack([rm.point(q)[None, :], pts[:-1]]) if k > 1 else np.array([rm.point(q)])
    for d in _divisors(k):
        if np.linalg.norm(rm.coords(pts[d]) - q) < 1e-6:
            small = PeriodicOrbit(pts[:d], d, times[:d], res, None)
            raise NotMinimalPeriod(d, small)
    try:
        J = _fd_jacobian(G, q) + np.eye(2)
        mult = tuple(complex(z) if abs(z.imag) > 0 else float(z.real) for z in np.linalg.eigvals(J))
    except (Escaped, NoReturn):
        mult = None
    return PeriodicOrbit(pts, k, times, res, mult)


@dataclass(frozen=True)
class PerEntry:
    symbol: SymbolSequence | None
    orbit: PeriodicOrbit


def _same_orbit(a: PeriodicOrbit, b: PeriodicOrbit, tol=1e-6) -> bool:
    if a.k != b.k:
        return False
    d = np.linalg.norm(a.points[:, None, :] - b.points[None, :, :], axis=-1)
    return bool(np.all(d.min(axis=1) < tol))


def orbit_symbol(rm, orbit: PeriodicOrbit, part: Partition) -> SymbolSequence | None:
    try:
        block = [part.symbol(rm.coords(s)[0]) for s in orbit.points]
    except AmbiguousSymbol:
        return None
    return SymbolSequence.periodic(block)


def estimate_per_v(m, budget, k_max=8, close=1e-3, seed=None, part: Partition | None = None,
                   burn=None, seeds_per_k=3) -> list:
    """Best-effort set of (symbol, periodic orbit) pairs from a recurrence scan.

    ``budget`` is the number of return-map samples. The fixed-point witness
    (P_In for the Rössler field) is always included with the word (1).
    """
    rm = as_return_map(m)
    entries: list[PerEntry] = []
    if rm.witness is not None:
        w = PeriodicOrbit(np.array([rm.witness]), 1, np.array([0.0]), 0.0, None)
        entries.append(PerEntry(SymbolSequence.periodic((1,)), w))
    if budget <= 0:
        return entries
    seed = rm.default_seed if seed is None else seed
    burn = min(100, budget // 5) if burn is None else burn
    samples = return_samples(rm, seed, budget, burn)
    if len(samples) < 3:
        return entries
    if part is None:
        try:
            ref = rm.coords(rm.witness)[0] if rm.witness is not None else 0.0
            part = estimate_fold(samples, reference_x=ref)
        except NoFoldFound:
            part = None
    Q = np.array([rm.coords(c.point) for c in samples])
    found: list[PeriodicOrbit] = []
    for k in range(1, k_max + 1):
        if len(Q) <= k:
            break
        dist = np.linalg.norm(Q[k:] - Q[:-k], axis=1)
        cand = list(np.argsort(dist)[:seeds_per_k])
        close_idx = np.nonzero(dist < close)[0]
        cand += [i for i in close_idx[:seeds_per_k] if i not in cand]
        for i in cand:
            guess = samples[int(i)].point
            try:
                orb = find_periodic_orbit(rm, guess, k)
            except NotMinimalPeriod as exc:
                orb = exc.orbit
            except (NoConvergence, Escaped, NoReturn):
                continue
            if orb is None or any(_same_orbit(orb, f) for f in found):
                continue
            if rm.witness is not None and orb.k == 1 and np.linalg.norm(orb.points[0] - rm.witness) < 1e-6:
                continue
            found.append(orb)
    for orb in found:
        sym = orbit_symbol(rm, orb, part) if part is not None else None
        entries.append(PerEntry(sym, orb))
    return entries
