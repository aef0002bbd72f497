"""Kneading theory for the quadratic family p_c(x) = x^2 + c, -2 <= c <= 1/4.

Symbols: 1 on the positive half (0, x1], 2 on the negative half [x2, 0).
Symbol 2 reverses orientation, which fixes the unimodal order used for
admissibility: a word is realised at c when every shift of it is at least
the kneading invariant K(c).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np

from .errors import BranchDomainError, EmptyPerSet, LeftInvariantInterval, OutOfRange
from .symbols import SymbolSequence

C_MIN, C_MAX = -2.0, 0.25
ZERO_TOL = 1e-14
DRIFT_TOL = 1e-12
MULT_TOL = 1e-9

# adaptive depth for comparing a word against the critical orbit
DEPTH0 = 64
DEPTH_MAX = 1 << 17


@dataclass(frozen=True)
class InvariantInterval:
    x2: float
    x1: float

    def contains(self, x, slack=0.0):
        return self.x2 - slack <= x <= self.x1 + slack


@dataclass(frozen=True)
class KneadingReport:
    word: SymbolSequence
    hits_zero_at: tuple = ()


class Stability(str, Enum):
    ATTRACTING = "Attracting"
    SUPER_ATTRACTING = "SuperAttracting"
    PARABOLIC = "Parabolic"
    REPELLING = "Repelling"


@dataclass(frozen=True)
class StabilityClass:
    kind: Stability
    multiplier: float


@dataclass(frozen=True)
class PiResult:
    d: float
    binding_symbol: SymbolSequence
    per_witnesses: tuple
    tol: float = 1e-8


@dataclass
class MatchReport:
    matched: list = field(default_factory=list)  # (symbol, flow orbit, polynomial orbit)
    unmatched: list = field(default_factory=list)  # symbols inadmissible at d


def _check_c(c):
    c = float(c)
    if not (C_MIN <= c <= C_MAX):
        raise OutOfRange(f"c={c} outside [-2, 1/4]")
    return c


def invariant_interval(c) -> InvariantInterval:
    c = _check_c(c)
    x1 = (1 + math.sqrt(1 - 4 * c)) / 2
    return InvariantInterval(-x1, x1)


def p(c, x):
    return x * x + c


def code_point(c, x, n) -> SymbolSequence:
    """First n symbols of the itinerary of x under p_c.

    Exact zeros get symbol 2 and are listed in ``ambiguous_at``. Iterates that
    overshoot V_c by at most 1e-12 are clamped back onto it.
    """
    c = _check_c(c)
    V = invariant_interval(c)
    x = float(x)
    word, amb = [], []
    for i in range(n):
        if not V.contains(x, DRIFT_TOL):
            raise LeftInvariantInterval(f"iterate {i} at x={x!r} left [{V.x2}, {V.x1}]")
        x = min(max(x, V.x2), V.x1)
        if abs(x) < ZERO_TOL:
            amb.append(i)
            word.append(2)
        else:
            word.append(1 if x > 0 else 2)
        x = x * x + c
    return SymbolSequence.finite(word, ambiguous_at=tuple(amb))


class CriticalOrbit:
    """Lazily extended symbol stream of the critical value with i+ limits.

    The displacement ``d`` tracks which side the orbit of a point y slightly
    below 0 sits on relative to the exact orbit; it decides the symbol at an
    exact zero hit. Once the orbit has numerically closed up (two iterates a
    period apart within 1e-12) the tail is treated as exactly periodic.
    """

    def __init__(self, c):
        self.c = _check_c(c)
        self.syms = []
        self.hits = []
        self.tail = None  # (start, period) over symbol indices
        self._x = self.c
        self._d = 1
        self._xs = []

    def extend(self, n):
        c = self.c
        x, d = self._x, self._d
        syms, xs = self.syms, self._xs
        while len(syms) < n and self.tail is None:
            if abs(x) < ZERO_TOL:
                syms.append(1 if d > 0 else 2)
                self.hits.append(len(syms))
                x, d = 0.0, 1
            else:
                syms.append(1 if x > 0 else 2)
                d = d if x > 0 else -d
            xs.append((x, d))
            x = x * x + c
            if len(syms) in (16, 64) or (len(syms) >= 256 and (len(syms) & (len(syms) - 1)) == 0):
                self._detect_tail()
        self._x, self._d = x, d

    def _detect_tail(self):
        xs, n = self._xs, len(self._xs)
        xn, dn = xs[-1]
        for per in range(1, min(n // 2, 256) + 1):
            xp, dp = xs[-1 - per]
            if abs(xn - xp) < DRIFT_TOL and dn == dp:
                block_ok = all(
                    abs(xs[-1 - j][0] - xs[-1 - j - per][0]) < DRIFT_TOL
                    and self.syms[-1 - j] == self.syms[-1 - j - per]
                    for j in range(per)
                )
                if block_ok:
                    self.tail = (n - per, per)
                    return

    def symbol(self, i):
        if i >= len(self.syms):
            self.extend(i + 1)
        if i < len(self.syms):
            return self.syms[i]
        start, per = self.tail
        return self.syms[start + (i - start) % per]

    def as_sequence(self) -> SymbolSequence | None:
        if self.tail is None:
            return None
        start, per = self.tail
        return SymbolSequence(tuple(self.syms[: start + per]), (start, per))


@lru_cache(maxsize=8192)
def critical_orbit(c) -> CriticalOrbit:
    """Shared, lazily extended critical orbit; bisections revisit the same midpoints."""
    return CriticalOrbit(c)


def kneading(c, n) -> KneadingReport:
    orb = CriticalOrbit(c)
    orb.extend(n)
    word = [orb.symbol(i) for i in range(n)]
    hits = tuple(h for h in orb.hits if h <= n)
    return KneadingReport(SymbolSequence.finite(word), hits)


def cmp_with_orbit(s: SymbolSequence, orb: CriticalOrbit) -> int:
    """Unimodal comparison of an infinite word with K(c); 0 when undecided at max depth."""
    if not s.is_infinite:
        raise ValueError("admissibility needs an infinite word")
    parity = 0
    i = 0
    depth = DEPTH0
    while True:
        orb.extend(depth)
        if orb.tail is not None:
            start, per = orb.tail
            limit = max(start, s.periodic_tail[0]) + math.lcm(per, s.period)
        else:
            limit = depth
        while i < limit:
            a, b = s[i], orb.symbol(i)
            if a != b:
                r = 1 if a == 1 else -1
                return r if parity == 0 else -r
            parity ^= a == 2
            i += 1
        if orb.tail is not None or depth >= DEPTH_MAX:
            return 0
        depth *= 2


def admissible(s: SymbolSequence, c, orbit: CriticalOrbit | None = None) -> bool:
    orb = orbit if orbit is not None else critical_orbit(float(c))
    n_shifts = s.periodic_tail[0] + s.period
    return all(cmp_with_orbit(s.shift(k), orb) >= 0 for k in range(n_shifts))


def c_sup(s: SymbolSequence, tol=1e-8) -> float:
    """Largest c at which s is admissible, by bisection (monotone in c)."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    if admissible(s, C_MAX):
        return C_MAX
    lo, hi = C_MIN, C_MAX
    if not admissible(s, lo):
        return C_MIN
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if admissible(s, mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def pi_of_per(per, tol=1e-8) -> PiResult:
    per = tuple(per)
    if not per:
        raise EmptyPerSet("Per(v) is empty")
    best, bind = math.inf, None
    for s in per:
        v = c_sup(s, tol)
        if v < best:
            best, bind = v, s
    d = min(max(best, C_MIN), C_MAX)
    return PiResult(d, bind, per, tol)


def _orbit_matches(c, orbit, block):
    k = len(block)
    for j in range(k):
        if abs(orbit[j] ** 2 + c - orbit[(j + 1) % k]) > 1e-10:
            return False
        x = orbit[j]
        if abs(x) < 1e-9:
            continue
        if (1 if x > 0 else 2) != block[j]:
            return False
    return True


def _pullback(c, block, x1, max_iter=20000):
    k = len(block)
    eps = [1.0 if s == 1 else -1.0 for s in block]
    x0 = x1
    orbit = [0.0] * k
    for _ in range(max_iter):
        y = x0
        for j in range(k - 1, -1, -1):
            arg = y - c
            if arg < 0:
                if arg < -DRIFT_TOL:
                    raise BranchDomainError(f"sqrt of {arg:.3e} on branch {block[j]}")
                arg = 0.0
            y = eps[j] * math.sqrt(arg)
            orbit[j] = y
        if abs(y - x0) < 1e-12:
            return orbit
        x0 = y
    return None


def _shooting_candidates(c, k, V):
    n = max(4001, 64 * 2 ** k + 1)
    xs = np.linspace(V.x2, V.x1, n)
    y = xs.copy()
    for _ in range(k):
        y = y * y + c
    g = y - xs
    idx = np.nonzero(np.sign(g[:-1]) != np.sign(g[1:]))[0]
    a = np.abs(g)
    loc = np.nonzero((a[1:-1] <= a[:-2]) & (a[1:-1] <= a[2:]))[0] + 1
    return np.unique(np.concatenate([xs[idx], xs[loc]]))


def _newton_periodic(c, k, x):
    for _ in range(60):
        y, dy = x, 1.0
        for _ in range(k):
            dy *= 2 * y
            y = y * y + c
        g, dg = y - x, dy - 1
        if dg == 0:
            return x
        step = g / dg
        x -= step
        if abs(step) < 1e-15:
            break
    return x


def find_orbit_with_itinerary(c, s: SymbolSequence) -> list:
    """Periodic orbit of p_c realising the periodic word s, starting at its s_0 point."""
    c = _check_c(c)
    if not s.is_periodic:
        raise ValueError("find_orbit_with_itinerary needs a purely periodic word")
    block = s.block
    k = len(block)
    V = invariant_interval(c)
    pull_err = None
    try:
        orbit = _pullback(c, block, V.x1)
    except BranchDomainError as exc:
        orbit, pull_err = None, exc
    if orbit is not None and _orbit_matches(c, orbit, block):
        return orbit
    # attracting or parabolic orbits do not pull back; shoot on p^k(x) = x instead
    for x in _shooting_candidates(c, k, V):
        x = _newton_periodic(c, k, float(x))
        cand = [x]
        for _ in range(k - 1):
            cand.append(cand[-1] ** 2 + c)
        if _orbit_matches(c, cand, block):
            return cand
    raise pull_err or BranchDomainError(f"no orbit with itinerary {s} at c={c}")


def classify_orbit(c, orbit, k=None) -> StabilityClass:
    m = 1.0
    for x in orbit[: (k or len(orbit))]:
        m *= 2 * x
    a = abs(m)
    if a < MULT_TOL:
        kind = Stability.SUPER_ATTRACTING
    elif abs(a - 1) <= MULT_TOL:
        kind = Stability.PARABOLIC
    elif a < 1:
        kind = Stability.ATTRACTING
    else:
        kind = Stability.REPELLING
    return StabilityClass(kind, m)


def match_orbits(d, flow_orbits) -> MatchReport:
    """Pair flow orbits with p_d orbits carrying the same periodic symbol."""
    d = _check_c(d)
    rep = MatchReport()
    orb = critical_orbit(d)
    for s, flow_orbit in flow_orbits:
        if s is None or not s.is_periodic or not admissible(s, d, orb):
            rep.unmatched.append(s)
            continue
        try:
            poly = find_orbit_with_itinerary(d, s)
        except BranchDomainError:
            rep.unmatched.append(s)
            continue
        k_flow = getattr(flow_orbit, "k", s.period)
        if k_flow != len(poly):
            rep.unmatched.append(s)
            continue
        rep.matched.append((s, flow_orbit, poly))
    return rep
