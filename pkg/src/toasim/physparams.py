"""Atom/laser constants and the kinetic-detuning algebra.

Everything is carried in SI doubles; there is no internal
nondimensionalization.  The magnitudes that occur for optical transitions
(wavenumbers ~1e6-1e8 m^-1, hbar/m ~ 5e-10 m^2/s) sit comfortably inside
double range, and keeping SI units lets configurations quote lab numbers
directly.

The kinetic detuning is the wavenumber-dependent shift a moving atom sees
on top of the laser detuning.  It splits into an ordinary Doppler term,
linear in the velocity component along the laser, and a recoil term from
the momentum kick of absorbing one laser photon:

    Delta_K(k_y) = (hbar/2m) (2 k_y k_L + k_L^2) = omega_D + omega_R
    omega_D = hbar k_y k_L / m
    omega_R = hbar k_L^2 / (2 m)

The detuning that actually enters the dressed-state branches everywhere
downstream is the effective one, Delta = Delta_L - Delta_K.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

HBAR = 1.054571817e-34  # J s (CODATA 2018)


@dataclass(frozen=True)
class PhysParams:
    """Two-level-atom and laser constants, SI units.

    mass              atom mass (kg), > 0
    rabi              Rabi frequency Omega (s^-1), >= 0
    decay             excited-state decay rate gamma (s^-1), >= 0
    laser_detuning    laser minus transition angular frequency (s^-1), signed
    laser_wavenumber  traveling-wave laser wavenumber k_L (m^-1), >= 0
    """

    mass: float
    rabi: float
    decay: float
    laser_detuning: float
    laser_wavenumber: float

    def __post_init__(self):
        for name in ("mass", "rabi", "decay", "laser_detuning", "laser_wavenumber"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.mass <= 0:
            raise ValueError(f"mass must be positive, got {self.mass!r}")
        if self.rabi < 0:
            raise ValueError(f"rabi must be >= 0, got {self.rabi!r}")
        if self.decay < 0:
            raise ValueError(f"decay must be >= 0, got {self.decay!r}")
        if self.laser_wavenumber < 0:
            raise ValueError(
                f"laser_wavenumber must be >= 0, got {self.laser_wavenumber!r}"
            )

    @property
    def recoil_velocity(self) -> float:
        """hbar k_L / m, the single-photon recoil velocity (m/s)."""
        return HBAR * self.laser_wavenumber / self.mass

    @property
    def recoil_shift(self) -> float:
        """hbar k_L^2 / (2 m), the photon-recoil frequency shift (s^-1)."""
        return HBAR * self.laser_wavenumber**2 / (2.0 * self.mass)


@dataclass(frozen=True)
class KineticDetuning:
    """Doppler + recoil decomposition; total == doppler + recoil exactly."""

    total: float
    doppler: float
    recoil: float


def kinetic_detuning(p: PhysParams, k_y) -> KineticDetuning:
    """Kinetic detuning at transverse wavenumber k_y (scalar or ndarray).

    total is formed as doppler + recoil so the decomposition holds exactly
    in floating point.
    """
    doppler = HBAR * k_y * p.laser_wavenumber / p.mass
    recoil = p.recoil_shift
    return KineticDetuning(total=doppler + recoil, doppler=doppler, recoil=recoil)


def effective_detuning(p: PhysParams, k_y):
    """Delta = Delta_L - Delta_K(k_y); the detuning the dressed states see."""
    return p.laser_detuning - kinetic_detuning(p, k_y).total
