"""Words over {1, 2}: finite, periodic and eventually periodic, plus the unimodal order."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from itertools import product

from .errors import IncomparableDepth


@dataclass(frozen=True)
class SymbolSequence:
    """A word over {1, 2}.

    ``word`` holds the prefix followed by one period when ``periodic_tail`` is
    ``(start, period)``; the sequence then repeats ``word[start:start+period]``
    forever. Without a tail the sequence is finite. Instances are kept in a
    normal form (shortest prefix, minimal period) so equality is structural.
    """

    word: tuple
    periodic_tail: tuple | None = None
    truncated: str | None = field(default=None, compare=False)
    ambiguous_at: tuple = field(default=(), compare=False)

    def __post_init__(self):
        w = tuple(int(s) for s in self.word)
        if any(s not in (1, 2) for s in w):
            raise ValueError(f"alphabet is {{1, 2}}, got {w}")
        tail = self.periodic_tail
        if tail is not None:
            start, per = int(tail[0]), int(tail[1])
            if per < 1 or start < 0 or start + per != len(w):
                raise ValueError(f"bad periodic tail {tail} for word of length {len(w)}")
            w, tail = _normalize(w[:start], w[start:])
        object.__setattr__(self, "word", w)
        object.__setattr__(self, "periodic_tail", tail)

    @classmethod
    def finite(cls, word, **kw):
        return cls(tuple(word), None, **kw)

    @classmethod
    def periodic(cls, block):
        block = tuple(block)
        return cls(block, (0, len(block)))

    @classmethod
    def eventually_periodic(cls, prefix, block):
        prefix, block = tuple(prefix), tuple(block)
        return cls(prefix + block, (len(prefix), len(block)))

    @classmethod
    def parse(cls, text: str) -> "SymbolSequence":
        """Parse ``"(12)"``, ``"2(1)"``, ``"1,2,1"`` or ``"121"``."""
        t = re.sub(r"[\s,]", "", text)
        m = re.fullmatch(r"([12]*)\(([12]+)\)", t)
        if m:
            return cls.eventually_periodic(_digits(m.group(1)), _digits(m.group(2)))
        if re.fullmatch(r"[12]*", t):
            return cls.finite(_digits(t))
        raise ValueError(f"cannot parse symbol sequence {text!r}")

    @property
    def is_infinite(self) -> bool:
        return self.periodic_tail is not None

    @property
    def is_periodic(self) -> bool:
        return self.periodic_tail is not None and self.periodic_tail[0] == 0

    @property
    def period(self) -> int | None:
        return self.periodic_tail[1] if self.periodic_tail else None

    @property
    def block(self) -> tuple:
        """One period of the tail (empty for finite words)."""
        if not self.periodic_tail:
            return ()
        return self.word[self.periodic_tail[0]:]

    def __len__(self):
        if self.is_infinite:
            raise TypeError("infinite sequence has no length")
        return len(self.word)

    def __getitem__(self, i: int) -> int:
        if i < 0:
            raise IndexError("negative index")
        if i < len(self.word):
            return self.word[i]
        if not self.periodic_tail:
            raise IndexError(i)
        start, per = self.periodic_tail
        return self.word[start + (i - start) % per]

    def prefix(self, n: int) -> tuple:
        if not self.is_infinite:
            return self.word[:n]
        return tuple(self[i] for i in range(n))

    def shift(self, k: int = 1) -> "SymbolSequence":
        if not self.is_infinite:
            return SymbolSequence.finite(self.word[k:])
        start, per = self.periodic_tail
        if k <= start:
            return SymbolSequence(self.word[k:], (start - k, per))
        r = (k - start) % per
        block = self.block
        return SymbolSequence.periodic(block[r:] + block[:r])

    def __str__(self):
        if not self.is_infinite:
            return ",".join(map(str, self.word))
        start, _ = self.periodic_tail
        pre = "".join(map(str, self.word[:start]))
        return f"{pre}({''.join(map(str, self.block))})"


def _digits(s):
    return tuple(int(ch) for ch in s)


def _minimal_block(block):
    n = len(block)
    for p in range(1, n + 1):
        if n % p == 0 and block[:p] * (n // p) == block:
            return block[:p]
    return block


def _normalize(prefix, block):
    block = _minimal_block(block)
    # absorb the prefix into the tail while its last symbol matches the tail's last
    while prefix and prefix[-1] == block[-1]:
        prefix = prefix[:-1]
        block = block[-1:] + block[:-1]
    return prefix + block, (len(prefix), len(block))


def unimodal_cmp(s: SymbolSequence, t: SymbolSequence, depth: int | None = None) -> int:
    """Signed-lexicographic comparison, returning -1, 0 or 1.

    At the first disagreement 1 > 2 when the common prefix has an even number
    of 2s, and the comparison flips when it is odd. Two infinite sequences are
    compared exactly; if either is finite the scan stops at the shorter length
    and a tie there raises :class:`IncomparableDepth` unless the words are
    identical.
    """
    if s.is_infinite and t.is_infinite:
        n = max(s.periodic_tail[0], t.periodic_tail[0]) + math.lcm(s.period, t.period)
        if depth is not None:
            n = min(n, depth)
    else:
        n = min(_avail(s), _avail(t))
    parity = 0
    for i in range(n):
        a, b = s[i], t[i]
        if a != b:
            r = 1 if a == 1 else -1
            return r if parity == 0 else -r
        parity ^= a == 2
    if s == t:
        return 0
    if s.is_infinite and t.is_infinite and depth is None:
        return 0
    raise IncomparableDepth(f"{s} and {t} agree on all {n} available symbols")


def _avail(s):
    return math.inf if s.is_infinite else len(s.word)


def unimodal_leq(s: SymbolSequence, t: SymbolSequence) -> bool:
    return unimodal_cmp(s, t) <= 0


def periodic_words(max_len: int, primitive: bool = True):
    """All periodic words with period <= max_len (one entry per sequence)."""
    seen = set()
    out = []
    for n in range(1, max_len + 1):
        for block in product((1, 2), repeat=n):
            s = SymbolSequence.periodic(block)
            if primitive and s.period != n:
                continue
            if s not in seen:
                seen.add(s)
                out.append(s)
    return out
