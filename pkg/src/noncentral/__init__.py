"""Bound states and Euclidean Green's functions of the Coulomb plus ring-shaped
potential family, with independent numerical oracles."""
from .errors import (
    AxisSingularityError, BoxTooSmallError, ChannelInvalidError, ConvergenceError, DomainError,
    NoRootInBracketError, NoncentralError, NumericalError, ResolventDivergenceError, RingSingularityError,
)
from .oracle import (
    AngularProblem, RadialGrid, RadialProblem, VerificationReport, angular_eigenvalues, radial_eigenvalues,
    verify_spectrum,
)
from .potential import (
    ParabolicPoint, PotentialParams, SphericalPoint, UVPoint, eval_potential_parabolic, eval_potential_spherical,
    eval_potential_uv, parabolic_to_spherical, parabolic_to_uv, spherical_to_parabolic, uv_to_parabolic,
)
from .propagator import (
    KernelQuery, QuadratureOptions, ResolventQuery, ResolventResult, divergence_onset, oscillator_kernel_4d,
    resolvent_element, sho_kernel_1d, spectrum_from_poles,
)
from .spectrum import (
    ABLevel, ABParams, HartmannParams, Level, QuantumNumbers, ab_energy, energy_level, enumerate_levels,
    hartmann_energy, lambda_value, quantization_omega,
)

__version__ = "0.1.0"
