"""Exception types shared across the package.

The CLI maps these onto distinct exit codes: configuration problems exit
with 2, numerical guard trips with 3, I/O failures with 4.
"""


class ConfigError(Exception):
    """Invalid or inconsistent run configuration."""


class NumericalGuardError(Exception):
    """A numerical safety check tripped; results would be unreliable."""


class DegenerateDenominatorError(NumericalGuardError):
    """The matching denominator D is too close to zero to divide by."""


class InstabilityError(NumericalGuardError):
    """The grid propagator produced a norm increase beyond tolerance."""
