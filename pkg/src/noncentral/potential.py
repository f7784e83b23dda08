"""Coulomb plus ring-shaped potential and its coordinate chain.

    V(r, theta) = -a/r + b/(r^2 sin^2 theta) + c cos(theta)/(r^2 sin^2 theta)

with a = Z e^2, b = B hbar^2/(2m), c = C hbar^2/(2m). Atomic units
(hbar = m = e = 1) are the default.

The chain is spherical (r, theta, phi) -> cylindrical (rho, z) -> parabolic
(xi, eta, phi) -> (u, v) with xi = u^2/4, eta = v^2/4. In (u, v) the
Hamiltonian is 4/(u^2 + v^2) times a sum of two 2D problems, which is what the
propagator module exploits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import AxisSingularityError, DomainError, RingSingularityError

AXIS_EPS = 1e-12


@dataclass(frozen=True)
class PotentialParams:
    """One member of the potential family.

    Parameters
    ----------
    Z : float
        Effective nuclear charge, > 0.
    B, C : float
        Dimensionless ring-shaped and cos(theta)-coupling strengths.
    m, hbar, e2 : float
        Mass, reduced Planck constant and squared charge. Defaults are atomic units.
    """

    Z: float
    B: float = 0.0
    C: float = 0.0
    m: float = 1.0
    hbar: float = 1.0
    e2: float = 1.0

    def __post_init__(self):
        if not self.Z > 0:
            raise DomainError(f"Z must be > 0 for bound states, got {self.Z}")
        for name in ("m", "hbar", "e2"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be > 0")
        for name in ("B", "C"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")

    @property
    def a(self) -> float:
        return self.Z * self.e2

    @property
    def b(self) -> float:
        return self.B * self.hbar**2 / (2 * self.m)

    @property
    def c(self) -> float:
        return self.C * self.hbar**2 / (2 * self.m)

    @property
    def hartree(self) -> float:
        """Energy unit m e^4 / hbar^2 for the given constants."""
        return self.m * self.e2**2 / self.hbar**2

    @property
    def bohr(self) -> float:
        """Length unit hbar^2 / (m e^2)."""
        return self.hbar**2 / (self.m * self.e2)


@dataclass(frozen=True)
class SphericalPoint:
    r: float
    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if not self.r > 0:
            raise DomainError(f"r must be > 0, got {self.r}")
        if not 0.0 <= self.theta <= math.pi:
            raise DomainError(f"theta must lie in [0, pi], got {self.theta}")


@dataclass(frozen=True)
class ParabolicPoint:
    xi: float
    eta: float
    phi: float = 0.0

    def __post_init__(self):
        if self.xi < 0 or self.eta < 0:
            raise DomainError("xi and eta must be >= 0")
        if not self.xi + self.eta > 0:
            raise DomainError("xi + eta must be > 0")


@dataclass(frozen=True)
class UVPoint:
    """Point in the (u, v) chart; phi1, phi2 are the angles of the two 2D planes."""

    u: float
    v: float
    phi1: float = 0.0
    phi2: float = 0.0

    def __post_init__(self):
        if self.u < 0 or self.v < 0:
            raise DomainError("u and v must be >= 0")

    def cartesian(self) -> tuple[float, float, float, float]:
        """The 4D vector (u1, u2, v1, v2) with u_vec = u(cos phi1, sin phi1), same for v."""
        return (
            self.u * math.cos(self.phi1),
            self.u * math.sin(self.phi1),
            self.v * math.cos(self.phi2),
            self.v * math.sin(self.phi2),
        )


def eval_potential_spherical(params: PotentialParams, p: SphericalPoint, axis_eps: float = AXIS_EPS) -> float:
    s = math.sin(p.theta)
    if abs(s) < axis_eps:
        raise AxisSingularityError(f"sin(theta)={s:.3g} is inside the axis band {axis_eps:g}")
    r2s2 = p.r**2 * s**2
    return -params.a / p.r + params.b / r2s2 + params.c * math.cos(p.theta) / r2s2


def spherical_to_cylindrical(p: SphericalPoint) -> tuple[float, float, float]:
    """Return (rho, z, phi)."""
    return p.r * math.sin(p.theta), p.r * math.cos(p.theta), p.phi


def spherical_to_parabolic(p: SphericalPoint) -> ParabolicPoint:
    rho, z, phi = spherical_to_cylindrical(p)
    r = math.hypot(rho, z)
    # r - z and r + z computed in the well-conditioned way near the axes
    if z >= 0:
        eta = 0.5 * (r + z)
        xi = 0.25 * rho * rho / eta
    else:
        xi = 0.5 * (r - z)
        eta = 0.25 * rho * rho / xi
    return ParabolicPoint(xi, eta, phi)


def parabolic_to_spherical(p: ParabolicPoint) -> SphericalPoint:
    r = p.xi + p.eta
    cos_t = (p.eta - p.xi) / r
    sin_t = 2.0 * math.sqrt(p.xi * p.eta) / r
    return SphericalPoint(r, math.atan2(sin_t, cos_t), p.phi)


def parabolic_to_uv(p: ParabolicPoint) -> UVPoint:
    return UVPoint(2.0 * math.sqrt(p.xi), 2.0 * math.sqrt(p.eta), p.phi, p.phi)


def uv_to_parabolic(p: UVPoint) -> ParabolicPoint:
    """Inverse of :func:`parabolic_to_uv`; takes phi from the first plane."""
    return ParabolicPoint(p.u**2 / 4.0, p.v**2 / 4.0, p.phi1)


def eval_potential_parabolic(params: PotentialParams, p: ParabolicPoint) -> float:
    xi, eta = p.xi, p.eta
    if xi == 0.0 or eta == 0.0:
        raise RingSingularityError("parabolic potential is singular at xi = 0 or eta = 0")
    s = xi + eta
    return -params.a / s + params.b / (4 * xi * eta) + params.c * (eta - xi) / (4 * eta * xi * s)


def liouville_prefactor(u: float, v: float) -> float:
    """4/(u^2 + v^2), i.e. 1/(xi + eta) = 1/r."""
    return 4.0 / (u * u + v * v)


def eval_potential_uv(params: PotentialParams, p: UVPoint) -> float:
    """Potential in the (u, v) chart, written as the Liouville prefactor times
    the separated bracket -a + (b + c)/u^2 + (b - c)/v^2 (the latter two terms
    arise from the shifted angular momenta p_phi^2 + 2m(b +- c))."""
    if p.u == 0.0 or p.v == 0.0:
        raise RingSingularityError("uv potential is singular at u = 0 or v = 0")
    bracket = -params.a + (params.b + params.c) / p.u**2 + (params.b - params.c) / p.v**2
    return liouville_prefactor(p.u, p.v) * bracket
