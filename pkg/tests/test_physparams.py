import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from toasim import HBAR, PhysParams, effective_detuning, kinetic_detuning

# hbar k_L^2 / 2m for the Cs-like reference values, frozen from a 30-digit
# mpmath evaluation
CS_RECOIL_SHIFT = 12977.722580725747
# hbar k_y k_L / m at k_y = 1e6 m^-1, same provenance
CS_DOPPLER_1E6 = 3521.7700354751008


def cs():
    return PhysParams(mass=2.2069e-25, rabi=1.67e8, decay=3.3e8,
                      laser_detuning=0.0, laser_wavenumber=7.37e6)


class TestValidation:
    def test_rejects_nonpositive_mass(self):
        with pytest.raises(ValueError):
            PhysParams(mass=0.0, rabi=1.0, decay=1.0, laser_detuning=0.0,
                       laser_wavenumber=1.0)

    @pytest.mark.parametrize("field", ["rabi", "decay", "laser_wavenumber"])
    def test_rejects_negative(self, field):
        kwargs = dict(mass=1e-25, rabi=1.0, decay=1.0, laser_detuning=0.0,
                      laser_wavenumber=1.0)
        kwargs[field] = -1.0
        with pytest.raises(ValueError):
            PhysParams(**kwargs)

    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            PhysParams(mass=1e-25, rabi=float("nan"), decay=1.0,
                       laser_detuning=0.0, laser_wavenumber=1.0)

    def test_negative_detuning_allowed(self):
        PhysParams(mass=1e-25, rabi=1.0, decay=1.0, laser_detuning=-5e8,
                   laser_wavenumber=1.0)


class TestRecoil:
    def test_recoil_shift_matches_reference_evaluation(self):
        assert cs().recoil_shift == pytest.approx(CS_RECOIL_SHIFT, rel=1e-12)

    def test_recoil_consistency(self):
        p = cs()
        assert p.recoil_shift == pytest.approx(
            p.laser_wavenumber * p.recoil_velocity / 2.0, rel=1e-15
        )


class TestKineticDetuning:
    def test_perpendicular_incidence_is_pure_recoil(self):
        p = cs()
        d = kinetic_detuning(p, 0.0)
        assert d.doppler == 0.0
        assert d.total == d.recoil == p.recoil_shift

    def test_doppler_reference_value(self):
        d = kinetic_detuning(cs(), 1e6)
        assert d.doppler == pytest.approx(CS_DOPPLER_1E6, rel=1e-12)

    def test_cancellation_at_minus_half_laser_wavenumber(self):
        p = cs()
        d = kinetic_detuning(p, -p.laser_wavenumber / 2.0)
        assert abs(d.total) < 1e-12 * p.recoil_shift

    def test_decomposition_exact(self):
        p = cs()
        for k_y in (-3e8, -1e3, 0.0, 7.7e5, 2e9):
            d = kinetic_detuning(p, k_y)
            assert d.total == d.doppler + d.recoil

    def test_agrees_with_combined_form(self):
        p = cs()
        for k_y in (-3e8, -1e3, 0.0, 7.7e5, 2e9):
            combined = HBAR * (2.0 * k_y * p.laser_wavenumber
                               + p.laser_wavenumber**2) / (2.0 * p.mass)
            assert kinetic_detuning(p, k_y).total == pytest.approx(combined, rel=1e-12)

    def test_affine_in_k_y(self):
        p = cs()
        k = np.array([-2e8, 1e5, 3e8])
        totals = np.array([kinetic_detuning(p, kk).total for kk in k])
        slopes = np.diff(totals) / np.diff(k)
        expected = HBAR * p.laser_wavenumber / p.mass
        assert slopes == pytest.approx([expected, expected], rel=1e-9)

    def test_no_laser_no_kinetic_detuning(self):
        p = PhysParams(mass=1e-25, rabi=1.0, decay=1.0, laser_detuning=0.7,
                       laser_wavenumber=0.0)
        for k_y in (-1e9, 0.0, 1e9):
            assert kinetic_detuning(p, k_y).total == 0.0
            assert effective_detuning(p, k_y) == 0.7

    def test_vectorized_over_k_y(self):
        p = cs()
        k = np.linspace(-1e8, 1e8, 7)
        d = kinetic_detuning(p, k)
        assert d.total.shape == k.shape
        assert d.total[3] == kinetic_detuning(p, k[3]).total


class TestEffectiveDetuning:
    def test_zero_when_detunings_cancel(self):
        p = PhysParams(mass=2.2069e-25, rabi=1.0, decay=1.0, laser_detuning=0.0,
                       laser_wavenumber=7.37e6)
        assert effective_detuning(p, -p.laser_wavenumber / 2.0) == pytest.approx(
            0.0, abs=1e-12 * p.recoil_shift
        )

    def test_compensation_setting(self):
        base = cs()
        k_y = 1e8
        comp = PhysParams(mass=base.mass, rabi=base.rabi, decay=base.decay,
                          laser_detuning=kinetic_detuning(base, k_y).total,
                          laser_wavenumber=base.laser_wavenumber)
        assert effective_detuning(comp, k_y) == 0.0

    def test_linearity_in_laser_detuning(self):
        p = cs()
        shifted = PhysParams(mass=p.mass, rabi=p.rabi, decay=p.decay,
                             laser_detuning=10.0 * p.recoil_shift,
                             laser_wavenumber=p.laser_wavenumber)
        assert effective_detuning(shifted, 0.0) == pytest.approx(
            9.0 * p.recoil_shift, rel=1e-12
        )

    @given(
        k_y=st.floats(-1e10, 1e10),
        detuning=st.floats(-1e9, 1e9),
        k_l=st.floats(0.0, 2e7),
    )
    def test_effective_plus_kinetic_is_laser_detuning(self, k_y, detuning, k_l):
        p = PhysParams(mass=2.2069e-25, rabi=1.0, decay=1.0,
                       laser_detuning=detuning, laser_wavenumber=k_l)
        total = kinetic_detuning(p, k_y).total
        reconstructed = effective_detuning(p, k_y) + total
        assert reconstructed == pytest.approx(
            detuning, abs=4 * np.finfo(float).eps * max(abs(total), abs(detuning), 1.0)
        )
