"""Closed-form bound-state spectrum.

After the (u, v) reduction the problem is two 2D oscillators of common
frequency omega, omega^2 = -E/(2m), with a constraint on physical states:

    2 (n2 + n2t + 1) hbar omega + omega lambda - a = 0,
    lambda = hbar [sqrt(nu^2 + B + C) + sqrt(nu^2 + B - C)].

Solving for omega and substituting gives

    E = -m a^2 / (2 hbar^2 n_eff^2),   n_eff = n2 + n2t + 1 + lambda/(2 hbar).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ChannelInvalidError, DomainError
from .potential import PotentialParams

COULOMBIAN_TOL = 1e-12


@dataclass(frozen=True, order=True)
class QuantumNumbers:
    n2: int
    n2_tilde: int
    nu: int

    def __post_init__(self):
        for name in ("n2", "n2_tilde", "nu"):
            val = getattr(self, name)
            if int(val) != val or val < 0:
                raise DomainError(f"{name} must be a non-negative integer, got {val!r}")

    @property
    def n_sum(self) -> int:
        return self.n2 + self.n2_tilde


@dataclass(frozen=True)
class Level:
    """A bound level.

    ``degeneracy`` counts the (n2, n2_tilde) splittings of ``qn.n_sum``. When a
    level stands for a whole (n_sum, nu) shell (see :func:`enumerate_levels`),
    ``qn`` is the representative (n_sum, 0, nu).
    """

    energy: float
    qn: QuantumNumbers
    lam: float
    n_eff: float
    omega: float
    degeneracy: int

    @property
    def nu(self) -> int:
        return self.qn.nu

    @property
    def n_sum(self) -> int:
        return self.qn.n_sum


@dataclass(frozen=True)
class ABLevel(Level):
    m_abs: float = 0.0
    is_coulombian: bool = False


@dataclass(frozen=True)
class HartmannParams:
    """Hartmann ring-shaped potential gamma sigma^2 (2a0/r - gamma a0^2/(r^2 sin^2 theta)) E0."""

    gamma: float
    sigma: float
    m: float = 1.0
    hbar: float = 1.0
    e2: float = 1.0

    def __post_init__(self):
        if not (self.gamma > 0 and self.sigma > 0):
            raise DomainError("gamma and sigma must be > 0")

    def to_params(self) -> PotentialParams:
        gs = self.gamma * self.sigma
        return PotentialParams(
            Z=self.gamma * self.sigma**2, B=gs * gs, C=0.0, m=self.m, hbar=self.hbar, e2=self.e2
        )


@dataclass(frozen=True)
class ABParams:
    """Coulomb plus Aharonov-Bohm flux line along z.

    ``alpha`` is the flux ratio Z e F / (2 pi hbar c). For azimuthal index nu
    the flux term acts as a ring coupling B_nu = alpha^2 - 2 alpha nu, so that
    nu^2 + B_nu = (nu - alpha)^2 = M^2.
    """

    Z: float
    alpha: float
    m: float = 1.0
    hbar: float = 1.0
    e2: float = 1.0

    def __post_init__(self):
        if not self.Z > 0:
            raise DomainError(f"Z must be > 0, got {self.Z}")

    def m_abs(self, nu: int) -> float:
        return abs(nu - self.alpha)

    def channel_params(self, nu: int) -> PotentialParams:
        return PotentialParams(
            Z=self.Z, B=self.alpha**2 - 2 * self.alpha * nu, C=0.0,
            m=self.m, hbar=self.hbar, e2=self.e2,
        )


def angular_indices(params: PotentialParams, nu: int) -> tuple[float, float]:
    """(sqrt(nu^2 + B + C), sqrt(nu^2 + B - C)), the |p_phi1|, |p_phi2| in units of hbar."""
    if int(nu) != nu or nu < 0:
        raise DomainError(f"nu must be a non-negative integer, got {nu!r}")
    plus = nu * nu + params.B + params.C
    minus = nu * nu + params.B - params.C
    if plus < 0 or minus < 0:
        raise ChannelInvalidError(nu, params.B, params.C)
    return math.sqrt(plus), math.sqrt(minus)


def channel_valid(params: PotentialParams, nu: int) -> bool:
    try:
        angular_indices(params, nu)
    except ChannelInvalidError:
        return False
    return True


def lambda_value(params: PotentialParams, nu: int) -> float:
    mu1, mu2 = angular_indices(params, nu)
    return params.hbar * (mu1 + mu2)


def quantization_function(params: PotentialParams, qn: QuantumNumbers, omega: float, lam: float | None = None) -> float:
    """f(omega) = 2 (n_sum + 1) hbar omega + omega lambda - a; its root is the level frequency."""
    if lam is None:
        lam = lambda_value(params, qn.nu)
    return 2 * (qn.n_sum + 1) * params.hbar * omega + omega * lam - params.a


def quantization_omega(params: PotentialParams, qn: QuantumNumbers) -> float:
    lam = lambda_value(params, qn.nu)
    return params.a / (2 * (qn.n_sum + 1) * params.hbar + lam)


def _level(params: PotentialParams, qn: QuantumNumbers, lam: float, degeneracy: int | None = None) -> Level:
    hbar = params.hbar
    n_eff = qn.n_sum + 1 + lam / (2 * hbar)
    energy = -params.m * params.a**2 / (2 * hbar**2 * n_eff**2)
    omega = params.a / (2 * (qn.n_sum + 1) * hbar + lam)
    return Level(
        energy=energy, qn=qn, lam=lam, n_eff=n_eff, omega=omega,
        degeneracy=qn.n_sum + 1 if degeneracy is None else degeneracy,
    )


def energy_level(params: PotentialParams, qn: QuantumNumbers) -> Level:
    return _level(params, qn, lambda_value(params, qn.nu))


def enumerate_levels(params: PotentialParams, n_sum_max: int, nu_max: int) -> list[Level]:
    """All valid (n_sum, nu) shells, sorted by energy then nu then n_sum.

    Returns an empty list when every channel up to ``nu_max`` is invalid.
    """
    if n_sum_max < 0 or nu_max < 0:
        raise DomainError("n_sum_max and nu_max must be >= 0")
    levels = []
    for nu in range(nu_max + 1):
        if not channel_valid(params, nu):
            continue
        lam = lambda_value(params, nu)
        for n_sum in range(n_sum_max + 1):
            levels.append(_level(params, QuantumNumbers(n_sum, 0, nu), lam))
    levels.sort(key=lambda lv: (lv.energy, lv.nu, lv.n_sum))
    return levels


def hartmann_energy(h: HartmannParams, qn: QuantumNumbers) -> Level:
    """E = -m (gamma sigma^2)^2 e^4 / (2 hbar^2 [n_sum + 1 + sqrt(nu^2 + gamma^2 sigma^2)]^2).

    The numerator carries Z^2 = gamma^2 sigma^4, as the substitution
    Z = gamma sigma^2, B = gamma^2 sigma^2, C = 0 requires.
    """
    params = h.to_params()
    lam = 2 * h.hbar * math.hypot(qn.nu, h.gamma * h.sigma)
    return _level(params, qn, lam)


def ab_energy(ab: ABParams, qn: QuantumNumbers) -> ABLevel:
    m_abs = ab.m_abs(qn.nu)
    params = ab.channel_params(qn.nu)
    base = _level(params, qn, 2 * ab.hbar * m_abs)
    coulombian = abs(m_abs - round(m_abs)) <= COULOMBIAN_TOL
    return ABLevel(**base.__dict__, m_abs=m_abs, is_coulombian=coulombian)


def enumerate_ab_levels(ab: ABParams, n_sum_max: int, nu_values) -> list[ABLevel]:
    levels = [
        ab_energy(ab, QuantumNumbers(n_sum, 0, nu))
        for nu in nu_values
        for n_sum in range(n_sum_max + 1)
    ]
    levels.sort(key=lambda lv: (lv.energy, lv.nu, lv.n_sum))
    return levels


def hartmann_levels(h: HartmannParams, n_sum_max: int, nu_max: int) -> list[Level]:
    levels = [
        hartmann_energy(h, QuantumNumbers(n_sum, 0, nu))
        for nu in range(nu_max + 1)
        for n_sum in range(n_sum_max + 1)
    ]
    levels.sort(key=lambda lv: (lv.energy, lv.nu, lv.n_sum))
    return levels


def distinct_energies(levels, rel_tol: float = 1e-12) -> list[float]:
    """Sorted energies with near-duplicates (relative ``rel_tol``) merged."""
    out: list[float] = []
    for e in sorted(lv.energy if isinstance(lv, Level) else lv for lv in levels):
        if out and abs(e - out[-1]) <= rel_tol * max(abs(e), abs(out[-1])):
            continue
        out.append(e)
    return out
