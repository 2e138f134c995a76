"""toasim: operational time-of-arrival distributions for a two-level atom.

A ground-state atom crosses into a half-plane illuminated by a traveling-
wave laser; the detection time of its first spontaneous photon is the
operational arrival time.  This package computes the arrival-time
distribution three ways -- stationary-state quadrature (1D and 2D models),
direct grid propagation of the conditional dynamics, and the detection-
delay deconvolution that connects it to the free quantum flux -- and ships
a CLI that reproduces the standard parameter regimes.
"""

__version__ = "0.1.0"

from .physparams import (
    HBAR,
    KineticDetuning,
    PhysParams,
    effective_detuning,
    kinetic_detuning,
)
from .packet import GaussianPacket1D, GaussianPacket2D
from .eigen1d import EigenSolution1D, eigenstate_1d_at, solve_1d
from .eigen2d import EigenSolution2D, eigenstate_2d_at, solve_2d
from .toa import QuadratureSpec, ToaSeries, emission_total, l1_distance, pi_1d, pi_2d
from .oracle import (
    ConditionalPropagator,
    GridSpec,
    GridState,
    initial_state,
    pi_from_norm,
    pi_from_population,
)
from .fluxdeconv import AtRestDistribution, FluxSeries, deconvolve, flux_xline, w_at_rest
from .errors import (
    ConfigError,
    DegenerateDenominatorError,
    InstabilityError,
    NumericalGuardError,
)

__all__ = [
    "HBAR",
    "PhysParams",
    "KineticDetuning",
    "kinetic_detuning",
    "effective_detuning",
    "GaussianPacket1D",
    "GaussianPacket2D",
    "EigenSolution1D",
    "solve_1d",
    "eigenstate_1d_at",
    "EigenSolution2D",
    "solve_2d",
    "eigenstate_2d_at",
    "QuadratureSpec",
    "ToaSeries",
    "pi_1d",
    "pi_2d",
    "emission_total",
    "l1_distance",
    "GridSpec",
    "GridState",
    "ConditionalPropagator",
    "initial_state",
    "pi_from_norm",
    "pi_from_population",
    "AtRestDistribution",
    "FluxSeries",
    "w_at_rest",
    "flux_xline",
    "deconvolve",
    "ConfigError",
    "NumericalGuardError",
    "DegenerateDenominatorError",
    "InstabilityError",
]
