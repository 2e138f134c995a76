import numpy as np
import pytest

from toasim import GaussianPacket1D, GaussianPacket2D, HBAR, PhysParams

# Reference optical-transition parameters (Cs-like): strong driving,
# strong decay, recoil tiny compared to both.
CS = dict(mass=2.2069e-25, rabi=1.67e8, decay=3.3e8,
          laser_detuning=0.0, laser_wavenumber=7.37e6)


@pytest.fixture
def cs_params():
    return PhysParams(**CS)


@pytest.fixture
def cs_packet(cs_params):
    # mean velocity 9 cm/s toward the laser, widths 0.24 um
    kx0 = cs_params.mass * 0.09 / HBAR
    return GaussianPacket2D(x0=-1.32e-6, y0=0.0, dx=0.24e-6, dy=0.24e-6,
                            kx0=kx0, ky0=0.0)


# Desk-scale parameters: hbar/m = 1 m^2/s, so wavenumbers, lengths and
# times are all O(1).  Ratios follow the reference set: rabi/decay = 0.506,
# detuning 0, laser_wavenumber * dx = 1.77.
DESK = dict(mass=HBAR, rabi=1.012, decay=2.0,
            laser_detuning=0.0, laser_wavenumber=1.77)


@pytest.fixture
def desk_params():
    return PhysParams(**DESK)


@pytest.fixture
def desk_packet():
    return GaussianPacket2D(x0=-6.5, y0=0.0, dx=1.0, dy=1.0, kx0=2.75, ky0=0.0)


@pytest.fixture
def desk_packet_1d():
    return GaussianPacket1D(x0=-6.5, dx=1.0, kx0=2.75)


def random_params(rng) -> PhysParams:
    """Valid parameters with optical-ish magnitudes, gamma bounded away from 0."""
    return PhysParams(
        mass=10.0 ** rng.uniform(-27.0, -24.0),
        rabi=10.0 ** rng.uniform(5.0, 9.0),
        decay=10.0 ** rng.uniform(5.0, 9.0),
        laser_detuning=rng.uniform(-1e9, 1e9),
        laser_wavenumber=10.0 ** rng.uniform(3.0, 7.3),
    )


def l1_rel(times, a, b):
    return float(np.trapezoid(np.abs(a - b), times) / np.trapezoid(np.abs(b), times))
