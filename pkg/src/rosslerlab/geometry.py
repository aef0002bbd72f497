"""Affine event surfaces used for section crossings."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np


class Direction(IntEnum):
    """Which crossings of g(s) = n.s + d count, by the sign of F.n.

    The sign is taken in forward time, so a surface crossed downward by the
    flow is still a DOWN crossing when it is reached by integrating backward.
    """

    DOWN = -1
    BOTH = 0
    UP = 1


@dataclass(frozen=True)
class EventSpec:
    """Affine surface ``normal . s + offset = 0`` with an optional half-space.

    ``constraint`` is ``(m, e)``; a crossing only counts when ``m . s + e > 0``
    at the crossing point. Crossings satisfying the constraint are labelled
    side ``"U"``, the others ``"L"``.
    """

    normal: np.ndarray
    offset: float = 0.0
    direction: Direction = Direction.BOTH
    constraint: tuple[np.ndarray, float] | None = None
    # two in-plane axes and a base point, for 2D section coordinates
    axes: np.ndarray | None = field(default=None, compare=False)
    base: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=float)
        if n.shape != (3,) or not np.linalg.norm(n) > 0:
            raise ValueError("event normal must be a non-zero 3-vector")
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "direction", Direction(self.direction))
        if self.constraint is not None:
            m, e = self.constraint
            object.__setattr__(self, "constraint", (np.asarray(m, dtype=float), float(e)))
        if self.axes is None:
            object.__setattr__(self, "axes", _plane_axes(n))
        else:
            object.__setattr__(self, "axes", np.asarray(self.axes, dtype=float))
        if self.base is None:
            object.__setattr__(self, "base", -self.offset * n / (n @ n))
        else:
            object.__setattr__(self, "base", np.asarray(self.base, dtype=float))

    def g(self, s):
        return np.asarray(s) @ self.normal + self.offset

    def admits(self, s) -> bool:
        if self.constraint is None:
            return True
        m, e = self.constraint
        return bool(np.asarray(s) @ m + e > 0)

    def coords(self, s) -> np.ndarray:
        """2D coordinates of a point lying on the surface."""
        d = np.asarray(s, dtype=float) - self.base
        return np.linalg.lstsq(self.axes.T, d, rcond=None)[0]

    def point(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        return self.base + q[0] * self.axes[0] + q[1] * self.axes[1]


def _plane_axes(n):
    n = n / np.linalg.norm(n)
    helper = np.eye(3)[np.argmin(np.abs(n))]
    u = np.cross(n, helper)
    u /= np.linalg.norm(u)
    return np.array([u, np.cross(n, u)])
