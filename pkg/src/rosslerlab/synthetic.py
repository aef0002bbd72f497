"""Fields and maps with known invariant geometry, used as oracles."""

from __future__ import annotations

import numpy as np

from .geometry import Direction, EventSpec
from .integrator import Crossing
from .model import VectorField
from .section import ReturnMap


class ParaboloidSaddle(VectorField):
    """Saddle-focus at (0, 0, h) whose stable manifold is the paraboloid z = h - k r^2.

        x' = -mu x - omega y
        y' =  omega x - mu y
        z' = lam (z - h + k r^2) + 2 k mu r^2

    phi = z - h + k r^2 obeys phi' = lam phi, so {phi = 0} is invariant and
    it meets the plane z = -b in the circle r = sqrt((h + b) / k). With k = 0
    the stable manifold is the plane z = h, which never reaches z = -b.
    """

    def __init__(self, mu=0.5, omega=2.0, lam=1.0, k=0.25, h=1.0, b=1.0):
        self.mu, self.omega, self.lam, self.k, self.h, self.b = mu, omega, lam, k, h, b
        self.trap_level = -b
        self.section = None

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        x, y, z = s[..., 0], s[..., 1], s[..., 2]
        r2 = x * x + y * y
        return np.stack([
            -self.mu * x - self.omega * y,
            self.omega * x - self.mu * y,
            self.lam * (z - self.h + self.k * r2) + 2 * self.k * self.mu * r2,
        ], axis=-1)

    def rhs3(self, x, y, z):
        r2 = x * x + y * y
        return (-self.mu * x - self.omega * y, self.omega * x - self.mu * y,
                self.lam * (z - self.h + self.k * r2) + 2 * self.k * self.mu * r2)

    def jacobian(self, s):
        x, y, _ = np.asarray(s, dtype=float)
        g = 2 * self.k * (self.lam + 2 * self.mu)
        return np.array([
            [-self.mu, -self.omega, 0.0],
            [self.omega, -self.mu, 0.0],
            [g * x, g * y, self.lam],
        ])

    def fixed_points(self):
        return None, np.array([0.0, 0.0, self.h])

    def delta_radius(self):
        return np.sqrt((self.h + self.b) / self.k) if self.k > 0 else np.inf


def radial_outflow(mu=0.5, omega=2.0, lam=1.0, h=1.0, b=1.0) -> ParaboloidSaddle:
    """Flat stable manifold z = h: a backward front runs off radially."""
    return ParaboloidSaddle(mu=mu, omega=omega, lam=lam, k=0.0, h=h, b=b)


class PlantedHeteroclinic(VectorField):
    """Two opposite saddle-foci joined along the x-axis.

        x' = -kappa x (1 - x)
        y' = s(x) y - omega z
        z' = omega y + s(x) z,     s(x) = sigma0 (1 - 2x)

    P_In = 0 has a stable real direction and an unstable focus; P_Out =
    (1, 0, 0) the mirror pattern. The segment 0 < x < 1 of the x-axis is a
    heteroclinic orbit from P_Out to P_In, crossing the section x = 1/2 at
    the origin of the section plane.
    """

    def __init__(self, kappa=1.0, sigma0=0.5, omega=1.0):
        self.kappa, self.sigma0, self.omega = kappa, sigma0, omega
        self.section = EventSpec(
            normal=np.array([1.0, 0.0, 0.0]), offset=-0.5, direction=Direction.DOWN,
            axes=np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]), base=np.array([0.5, 0.0, 0.0]),
        )
        self.trap_level = None

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        x, y, z = s[..., 0], s[..., 1], s[..., 2]
        sg = self.sigma0 * (1 - 2 * x)
        return np.stack([-self.kappa * x * (1 - x), sg * y - self.omega * z,
                         self.omega * y + sg * z], axis=-1)

    def rhs3(self, x, y, z):
        sg = self.sigma0 * (1 - 2 * x)
        return (-self.kappa * x * (1 - x), sg * y - self.omega * z, self.omega * y + sg * z)

    def jacobian(self, s):
        x, y, z = np.asarray(s, dtype=float)
        sg = self.sigma0 * (1 - 2 * x)
        return np.array([
            [-self.kappa * (1 - 2 * x), 0.0, 0.0],
            [-2 * self.sigma0 * y, sg, -self.omega],
            [-2 * self.sigma0 * z, self.omega, sg],
        ])

    def fixed_points(self):
        return np.zeros(3), np.array([1.0, 0.0, 0.0])


class InwardRadial(VectorField):
    """F = -s: every sphere about the origin is crossed inward."""

    def __call__(self, s):
        return -np.asarray(s, dtype=float)

    def rhs3(self, x, y, z):
        return (-x, -y, -z)

    def jacobian(self, s):
        return -np.eye(3)

    def fixed_points(self):
        return np.zeros(3), np.zeros(3)


class ExplicitSectionMap(ReturnMap):
    """A map given in closed form on the plane y = 0, posing as a return map.

    ``g`` acts on section coordinates (x, z). Each application counts as one
    unit of return time.
    """

    def __init__(self, g, witness=None, seed=(0.3, 0.0, 0.1)):
        self.g = g
        self.field = None
        self.section = EventSpec(
            normal=np.array([0.0, 1.0, 0.0]), direction=Direction.BOTH,
            axes=np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]), base=np.zeros(3),
        )
        self.t_max = np.inf
        self.r_esc = np.inf
        self.witness = None if witness is None else np.asarray(witness, dtype=float)
        self._seed = np.asarray(seed, dtype=float)

    @property
    def default_seed(self):
        return self._seed

    def first(self, u, t0=0.0) -> Crossing:
        q = self.g(self.coords(np.asarray(u, dtype=float)))
        return Crossing(self.point(q), float(t0) + 1.0, "U", 1.0, -1.0, False)


def chebyshev_map() -> ExplicitSectionMap:
    """(x, z) -> (x^2 - 2, 0.3 z); the fixed point x = 2 plays the role of P_In."""
    return ExplicitSectionMap(lambda q: np.array([q[0] ** 2 - 2.0, 0.3 * q[1]]),
                              witness=(2.0, 0.0, 0.0))
