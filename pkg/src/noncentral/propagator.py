"""Euclidean oscillator kernels and the beta-integrated resolvent.

In the (u, v) chart the constrained Hamiltonian is two 2D oscillators of
frequency omega = sqrt(-E/2m) shifted by the constant -a, so the Euclidean
propagator over "time" beta is

    K4(b, a; beta) = exp(a beta / hbar) * prod_{k=1..4} K1(q_bk, q_ak; beta).

Integrating K4 over beta in (0, inf) gives the Green's function; it converges
only when the oscillator zero-point decay beats exp(a beta / hbar), i.e. below
the lowest level of the sector probed.

All kernels are evaluated in log space. The quadratic form in the exponent is
written as (q_a - q_b)^2 coth(x) + 2 q_a q_b tanh(x/2), x = omega beta, which is
free of cancellation and overflow for all x > 0.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize, special

from .errors import DomainError, NoRootInBracketError, ResolventDivergenceError
from .potential import PotentialParams
from .spectrum import QuantumNumbers, angular_indices, lambda_value, quantization_function

EXP_CUTOFF = 700.0
SMALL_Z = 1e-4
SMALL_X = 1e-4


def _log_sinh(x):
    # exact for x > 0, no overflow
    return x - math.log(2.0) + np.log(-np.expm1(-2.0 * x))


def _x_terms(x):
    """(log(x/sinh x), x coth x, x tanh(x/2)).

    Kernels are written through these so that tiny omega stays finite; below
    SMALL_X the series are exact to double precision (x may underflow to 0).
    """
    if x < SMALL_X:
        x2 = x * x
        return -x2 / 6.0 + x2 * x2 / 180.0, 1.0 + x2 / 3.0 - x2 * x2 / 45.0, 0.5 * x2 - x2 * x2 / 24.0
    return math.log(x) - float(_log_sinh(x)), x / math.tanh(x), x * math.tanh(0.5 * x)


def _guarded_exp(logval):
    logval = np.asarray(logval, dtype=float)
    out = np.where(logval < -EXP_CUTOFF, 0.0, np.exp(np.minimum(logval, EXP_CUTOFF)))
    if np.any(logval > EXP_CUTOFF):
        raise OverflowError("kernel amplitude exceeds double range")
    return out[()] if out.ndim == 0 else out


def log_sho_kernel_1d(qa, qb, omega, beta, m=1.0, hbar=1.0):
    """Natural log of the 1D Euclidean oscillator kernel."""
    if not beta > 0:
        raise DomainError("beta must be > 0")
    if omega < 0:
        raise DomainError("omega must be >= 0")
    qa = np.asarray(qa, dtype=float)
    qb = np.asarray(qb, dtype=float)
    d2 = (qa - qb) ** 2
    if omega == 0.0:
        return 0.5 * math.log(m / (2 * math.pi * hbar * beta)) - m * d2 / (2 * hbar * beta)
    log_ratio, coth_term, tanh_term = _x_terms(omega * beta)
    log_pref = 0.5 * (math.log(m / (2 * math.pi * hbar * beta)) + log_ratio)
    quad = d2 * coth_term + 2.0 * qa * qb * tanh_term
    return log_pref - (m / (2 * hbar * beta)) * quad


def sho_kernel_1d(qa, qb, omega, beta, m=1.0, hbar=1.0):
    """Euclidean 1D oscillator kernel

        sqrt(m w / (2 pi hbar sinh(w beta)))
            * exp(-(m w / (2 hbar sinh(w beta))) [(qa^2 + qb^2) cosh(w beta) - 2 qa qb]).

    ``omega = 0`` gives the free-particle kernel. Amplitudes whose log is
    below -700 are returned as 0.
    """
    return _guarded_exp(log_sho_kernel_1d(qa, qb, omega, beta, m, hbar))


@dataclass(frozen=True)
class KernelQuery:
    """Endpoints are 4D points (u1, u2, v1, v2)."""

    endpoints_a: tuple
    endpoints_b: tuple
    beta: float
    omega: float
    params: PotentialParams

    def __post_init__(self):
        if not self.beta > 0:
            raise DomainError("beta must be > 0")
        if not self.omega > 0:
            raise DomainError("omega must be > 0")
        if len(self.endpoints_a) != 4 or len(self.endpoints_b) != 4:
            raise DomainError("endpoints must be 4D points (u1, u2, v1, v2)")


def log_oscillator_kernel_4d(q: KernelQuery, coulomb_shift: bool = True):
    """Log of the 4D kernel; endpoint components may be numpy arrays (broadcast)."""
    p = q.params
    total = p.a * q.beta / p.hbar if coulomb_shift else 0.0
    for qa, qb in zip(q.endpoints_a, q.endpoints_b):
        total = total + log_sho_kernel_1d(qa, qb, q.omega, q.beta, p.m, p.hbar)
    return total


def oscillator_kernel_4d(q: KernelQuery, coulomb_shift: bool = True):
    """exp(a beta / hbar) times the product of four 1D Euclidean kernels."""
    return _guarded_exp(log_oscillator_kernel_4d(q, coulomb_shift))


def _log_bessel_i(mu, z):
    z = float(z)
    if z <= 0.0:
        return 0.0 if mu == 0 else -math.inf
    if z < SMALL_Z:
        return mu * math.log(0.5 * z) - special.gammaln(mu + 1.0) + math.log1p(z * z / (4.0 * (mu + 1.0)))
    return math.log(special.ive(mu, z)) + z


def log_sector_kernel_2d(ua, ub, mu, omega, beta, m=1.0, hbar=1.0) -> float:
    """Log of the 2D oscillator kernel projected on angular index ``mu``.

    k_mu = (m w / (2 pi hbar sinh x)) exp(-(m w / 2 hbar) coth(x) (ua^2 + ub^2)) I_mu(m w ua ub / (hbar sinh x)),
    x = w beta. For integer mu, sum_l k_|l| e^{i l dphi} is the Cartesian 2D kernel.
    """
    if not (beta > 0 and omega > 0):
        raise DomainError("beta and omega must be > 0")
    if mu < 0:
        raise DomainError("mu must be >= 0")
    log_ratio, coth_term, tanh_term = _x_terms(omega * beta)
    # k = m w / (hbar x); g / sinh(x) = k x / sinh(x) stays finite as w -> 0
    k = m / (hbar * beta)
    # I_mu(z) = ive(mu, z) e^z; the e^z is folded into the stable quadratic form
    z = k * ua * ub * math.exp(log_ratio)
    quad = (ua - ub) ** 2 * coth_term + 2.0 * ua * ub * tanh_term
    if z < SMALL_Z:
        log_i_scaled = _log_bessel_i(mu, z) - z
    else:
        log_i_scaled = math.log(special.ive(mu, z))
    return math.log(k / (2 * math.pi)) + log_ratio - 0.5 * k * quad + log_i_scaled


def sector_kernel_2d(ua, ub, mu, omega, beta, m=1.0, hbar=1.0) -> float:
    return float(_guarded_exp(log_sector_kernel_2d(ua, ub, mu, omega, beta, m, hbar)))


def log_sector_kernel_4d(radii_a, radii_b, mus, omega, beta, params: PotentialParams, coulomb_shift=True) -> float:
    (ua, va), (ub, vb), (mu1, mu2) = radii_a, radii_b, mus
    return (
        (params.a * beta / params.hbar if coulomb_shift else 0.0)
        + log_sector_kernel_2d(ua, ub, mu1, omega, beta, params.m, params.hbar)
        + log_sector_kernel_2d(va, vb, mu2, omega, beta, params.m, params.hbar)
    )


@dataclass(frozen=True)
class QuadratureOptions:
    """``max_beta=None`` picks max(200/omega, 40/decay_rate)."""

    max_beta: float | None = None
    rel_tol: float = 1e-9
    max_evals: int = 500_000


@dataclass(frozen=True)
class ResolventQuery:
    """Trial energy and endpoints for the beta-integrated kernel.

    With ``nu=None`` the full Cartesian 4D kernel is integrated (all angular
    sectors at once, without the ring couplings). With an integer ``nu`` the
    kernel is restricted to that channel: each plane is projected on its shifted
    index sqrt(nu^2 + B +- C), and only the radii |u|, |v| of the endpoints enter.
    ``coulomb_shift=False`` drops the exp(a beta / hbar) factor, leaving the bare
    oscillator resolvent.
    """

    E: float
    endpoints_a: tuple
    endpoints_b: tuple
    params: PotentialParams
    quadrature: QuadratureOptions = field(default_factory=QuadratureOptions)
    nu: int | None = None
    coulomb_shift: bool = True


@dataclass(frozen=True)
class ResolventResult:
    value: float
    abs_error: float
    rel_error: float
    omega: float
    decay_rate: float
    max_beta: float
    tail: float
    n_evals: int
    converged: bool


def frequency_from_energy(E: float, m: float = 1.0) -> float:
    if not E < 0:
        raise DomainError(f"bound-state frequency needs E < 0, got {E}")
    return math.sqrt(-E / (2.0 * m))


def _radii(point):
    u1, u2, v1, v2 = point
    return math.hypot(u1, u2), math.hypot(v1, v2)


def _log_integrand(rq: ResolventQuery, omega: float):
    p = rq.params
    if rq.nu is None:
        if np.allclose(rq.endpoints_a, rq.endpoints_b, rtol=0.0, atol=0.0):
            raise DomainError("coincident endpoints: the 4D resolvent is singular there")

        def log_g(beta):
            q = KernelQuery(rq.endpoints_a, rq.endpoints_b, beta, omega, p)
            return float(log_oscillator_kernel_4d(q, rq.coulomb_shift))

        sep2 = sum((x - y) ** 2 for x, y in zip(rq.endpoints_a, rq.endpoints_b))
    else:
        mus = angular_indices(p, rq.nu)
        ra, rb = _radii(rq.endpoints_a), _radii(rq.endpoints_b)
        if ra == rb:
            raise DomainError("coincident radii in both planes: the sector resolvent is singular there")

        def log_g(beta):
            return log_sector_kernel_4d(ra, rb, mus, omega, beta, p, rq.coulomb_shift)

        sep2 = (ra[0] - rb[0]) ** 2 + (ra[1] - rb[1]) ** 2
    return log_g, sep2


def measured_decay_rate(log_g, omega: float) -> float:
    """-d/dbeta log g, measured far out in Euclidean time (beta in [50, 100]/omega)."""
    b1, b2 = 50.0 / omega, 100.0 / omega
    return -(log_g(b2) - log_g(b1)) / (b2 - b1)


def resolvent_element(rq: ResolventQuery) -> ResolventResult:
    """Integrate the Euclidean kernel over beta in (0, inf).

    The decay rate of the integrand is measured numerically; if it is not
    positive the integral diverges and :class:`ResolventDivergenceError` is
    raised. Otherwise [0, max_beta] is split at geometric breakpoints, each
    piece integrated adaptively, and the exponential tail beyond max_beta
    added in closed form (reported as ``tail``).
    """
    p = rq.params
    opts = rq.quadrature
    omega = frequency_from_energy(rq.E, p.m)
    log_g, sep2 = _log_integrand(rq, omega)

    kappa = measured_decay_rate(log_g, omega)
    if not kappa > 1e-10 * omega:
        raise ResolventDivergenceError(
            f"integrand does not decay at E={rq.E:g} (decay rate {kappa:.3g}); "
            "E is at or above the lowest level of the probed sector",
            decay_rate=kappa,
        )
    max_beta = opts.max_beta if opts.max_beta is not None else max(200.0 / omega, 40.0 / kappa)

    def g(beta):
        return math.exp(log_g(beta)) if beta > 0 else 0.0

    beta_lo = 1e-3 * min(1.0 / omega, p.m * sep2 / p.hbar)
    edges = [0.0]
    b = beta_lo
    while b < max_beta:
        edges.append(b)
        b *= 4.0
    edges.append(max_beta)

    total, err, nevals, ok = 0.0, 0.0, 0, True
    limit = max(50, opts.max_evals // (21 * len(edges)))
    for lo, hi in zip(edges[:-1], edges[1:]):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", integrate.IntegrationWarning)
            val, e, info = integrate.quad(
                g, lo, hi, epsabs=0.0, epsrel=opts.rel_tol / 10, limit=limit, full_output=1
            )[:3]
        ok = ok and not caught
        total += val
        err += e
        nevals += info["neval"]

    tail = math.exp(log_g(max_beta)) / kappa
    value = total + tail
    rel_error = err / abs(value) if value else math.inf
    converged = ok and rel_error <= opts.rel_tol and nevals <= opts.max_evals
    return ResolventResult(
        value=value, abs_error=err, rel_error=rel_error, omega=omega, decay_rate=kappa,
        max_beta=max_beta, tail=tail, n_evals=nevals, converged=converged,
    )


def sector_decay_rate(params: PotentialParams, nu: int, E: float, radii_a=(1.0, 1.0), radii_b=(1.5, 1.5)) -> float:
    """Measured large-beta decay rate of the channel-``nu`` integrand at energy E."""
    omega = frequency_from_energy(E, params.m)
    mus = angular_indices(params, nu)

    def log_g(beta):
        return log_sector_kernel_4d(radii_a, radii_b, mus, omega, beta, params)

    return measured_decay_rate(log_g, omega)


def divergence_onset(params: PotentialParams, nu: int, bracket: tuple[float, float], rtol: float = 1e-12) -> float:
    """Energy at which the channel resolvent stops converging.

    Found by bisection on the sign of the measured decay rate, without using the
    closed-form spectrum; it should coincide with the lowest level of channel nu.
    """
    lo, hi = sorted(bracket)
    r_lo, r_hi = sector_decay_rate(params, nu, lo), sector_decay_rate(params, nu, hi)
    if not (r_lo > 0 > r_hi):
        raise NoRootInBracketError(f"decay rate does not change sign on [{lo:g}, {hi:g}]")
    return optimize.brentq(lambda e: sector_decay_rate(params, nu, e), lo, hi, xtol=1e-300, rtol=rtol)


def default_bracket(params: PotentialParams) -> tuple[float, float]:
    """Contains every bound level: the deepest possible is -m a^2/(2 hbar^2)."""
    scale = params.m * params.a**2 / params.hbar**2
    return -scale, -1e-12 * scale


def spectrum_from_poles(params: PotentialParams, qn: QuantumNumbers, bracket: tuple[float, float] | None = None) -> float:
    """Bound-state energy from the root of the quantization function.

    f(omega) = 2 (n_sum + 1) hbar omega + omega lambda - a is increasing in omega;
    the root omega* is located inside the frequency image of ``bracket`` and
    E = -2 m omega*^2 returned.
    """
    if bracket is None:
        bracket = default_bracket(params)
    e_lo, e_hi = sorted(bracket)
    if not e_hi < 0:
        raise DomainError("energy bracket must lie below 0")
    lam = lambda_value(params, qn.nu)
    w_lo, w_hi = frequency_from_energy(e_hi, params.m), frequency_from_energy(e_lo, params.m)

    def f(w):
        return quantization_function(params, qn, w, lam)

    f_lo, f_hi = f(w_lo), f(w_hi)
    if f_lo == 0.0:
        w = w_lo
    elif f_hi == 0.0:
        w = w_hi
    elif f_lo * f_hi > 0:
        raise NoRootInBracketError(f"no level of {qn} inside [{e_lo:g}, {e_hi:g}]")
    else:
        w = optimize.brentq(f, w_lo, w_hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=200)
    if abs(f(w)) >= 1e-12 * max(1.0, params.a):
        raise NoRootInBracketError(f"root refinement failed: |f| = {abs(f(w)):.3g}")
    return -2.0 * params.m * w * w
