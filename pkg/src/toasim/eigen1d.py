"""1D scattering eigenstates of the conditional (no-photon) Hamiltonian.

A ground-state plane wave comes in from the left and meets the half-line
x >= 0 where a laser couples ground and excited levels with Rabi frequency
Omega while the excited level decays at rate gamma.  Because the evolution
is conditioned on detecting no photon, the Hamiltonian is non-Hermitian:
the excited level carries the complex shift -hbar (Delta_L + i gamma / 2).

Inside the coupled region the stationary states split into two dressed
branches with complex frequencies

    lambda_+- = -(i gamma + 2 Delta)/4 +- (i/4) sqrt((gamma - 2i Delta)^2 - 4 Omega^2)

and wavenumbers k_+- = sqrt(k^2 - (2m/hbar) lambda_+-); the reflected
excited wave in x < 0 carries q = sqrt(k^2 + (m/hbar)(i gamma + 2 Delta)).
All wavenumber roots are taken with positive imaginary part (decaying),
the discriminant with the principal root, see `branchcut`.

Matching value and slope of both components at x = 0 fixes the ground and
excited reflection amplitudes R1, R2 and the dressed transmission
amplitudes C_+-:

    C_+ = -2k (q + k_-) lambda_- / D
    C_- =  2k (q + k_+) lambda_+ / D
    R2  =   k (k_- - k_+) Omega  / D
    R1  = [lambda_+ (q + k_+)(k - k_-) - lambda_- (q + k_-)(k - k_+)] / D
    D   = lambda_+ (k + k_-)(q + k_+) - lambda_- (k + k_+)(q + k_-)

The excited-channel amplitudes B_+- = (2 lambda_+- / Omega) C_+- are stored
in the equivalent division-free form B_+- = +-k Omega (q + k_-+) / D, which
stays finite in the Omega -> 0 limit where the naive ratio is 0/0.

This module also hosts the shared branch/coefficient routines the 2D
solver reuses with the effective detuning in place of Delta_L, which is
exactly how the two models are related.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .branchcut import decaying_sqrt, principal_sqrt
from .errors import DegenerateDenominatorError
from .physparams import HBAR, PhysParams

# |D| below this fraction of its term magnitudes is treated as degenerate.
D_GUARD = 1e-14


def lambda_branches(omega: float, gamma: float, delta):
    """Dressed complex frequencies lambda_+, lambda_- (delta may be an array).

    With the principal-root convention, lambda_+ -> 0 as omega -> 0 for any
    gamma > 0, i.e. the "+" branch is the one the bare ground state joins.
    """
    disc = principal_sqrt((gamma - 2j * delta) ** 2 - 4.0 * omega**2)
    base = -0.25 * (1j * gamma + 2.0 * delta)
    return base + 0.25j * disc, base - 0.25j * disc


def branch_wavenumbers(p: PhysParams, delta, kx):
    """(lambda+, lambda-, kx+, kx-, qx) for incident wavenumber kx.

    `delta` is the detuning entering the branch algebra; the 1D model uses
    the bare laser detuning, the 2D model the effective (kinetic-shifted)
    one.  kx and delta broadcast together.
    """
    lam_p, lam_m = lambda_branches(p.rabi, p.decay, delta)
    ksq = np.asarray(kx, dtype=np.complex128) ** 2
    kx_p = decaying_sqrt(ksq - (2.0 * p.mass / HBAR) * lam_p)
    kx_m = decaying_sqrt(ksq - (2.0 * p.mass / HBAR) * lam_m)
    q_x = decaying_sqrt(ksq + (p.mass / HBAR) * (1j * p.decay + 2.0 * delta))
    return lam_p, lam_m, kx_p, kx_m, q_x


def matching_coefficients(kx, kx_p, kx_m, q_x, lam_p, lam_m, omega: float):
    """(R1, R2, C+, C-, B+, B-) from the matching conditions at x = 0.

    Raises DegenerateDenominatorError if |D| underflows its own term
    magnitudes anywhere.  The completely force-free case (omega = gamma =
    delta = 0, where D vanishes identically) is transparent by inspection
    and returned as such.
    """
    t1 = lam_p * (kx + kx_m) * (q_x + kx_p)
    t2 = lam_m * (kx + kx_p) * (q_x + kx_m)
    D = t1 - t2
    scale = np.abs(t1) + np.abs(t2)
    free = scale == 0.0
    if np.any(~free & (np.abs(D) < D_GUARD * scale)):
        worst = np.min(np.abs(D)[~free] / scale[~free]) if np.ndim(D) else abs(D) / scale
        raise DegenerateDenominatorError(
            f"matching denominator degenerate: min |D|/scale = {worst:.3e}"
        )
    D_safe = np.where(free, 1.0, D)

    C_p = -2.0 * kx * (q_x + kx_m) * lam_m / D_safe
    C_m = 2.0 * kx * (q_x + kx_p) * lam_p / D_safe
    R2 = kx * (kx_m - kx_p) * omega / D_safe
    R1 = (lam_p * (q_x + kx_p) * (kx - kx_m) - lam_m * (q_x + kx_m) * (kx - kx_p)) / D_safe
    B_p = kx * omega * (q_x + kx_m) / D_safe
    B_m = -kx * omega * (q_x + kx_p) / D_safe

    if np.any(free):
        one = np.ones_like(C_p)
        C_p = np.where(free, one, C_p)
        # all other coefficients already vanish where free (zero numerators)
    return R1, R2, C_p, C_m, B_p, B_m


@dataclass(frozen=True)
class EigenSolution1D:
    """Branch data and matching coefficients for one incident wavenumber."""

    k: float
    lambda_plus: complex
    lambda_minus: complex
    k_plus: complex
    k_minus: complex
    q: complex
    R1: complex
    R2: complex
    C_plus: complex
    C_minus: complex
    B_plus: complex  # (2 lambda_+ / Omega) C_+
    B_minus: complex  # (2 lambda_- / Omega) C_-


def solve_1d(p: PhysParams, k: float) -> EigenSolution1D:
    """Scattering solution for a rightward ground-state wave of wavenumber k."""
    if not np.isfinite(k):
        raise ValueError(f"k must be finite, got {k!r}")
    if k <= 0:
        raise ValueError(f"k must be positive, got {k!r}")
    lam_p, lam_m, k_p, k_m, q = branch_wavenumbers(p, p.laser_detuning, k)
    R1, R2, C_p, C_m, B_p, B_m = matching_coefficients(
        k, k_p, k_m, q, lam_p, lam_m, p.rabi
    )
    return EigenSolution1D(
        k=float(k),
        lambda_plus=complex(lam_p),
        lambda_minus=complex(lam_m),
        k_plus=complex(k_p),
        k_minus=complex(k_m),
        q=complex(q),
        R1=complex(R1),
        R2=complex(R2),
        C_plus=complex(C_p),
        C_minus=complex(C_m),
        B_plus=complex(B_p),
        B_minus=complex(B_m),
    )


def eigenstate_1d_at(sol: EigenSolution1D, x):
    """(ground, excited) amplitudes at x, including the 1/sqrt(2 pi) factor.

    x may be a scalar or an ndarray; the result has shape (2,) + x.shape.
    The two spatial regions are evaluated separately so that growing
    exponentials are never formed on the wrong side.
    """
    x = np.asarray(x, dtype=float)
    g = np.empty(x.shape, dtype=np.complex128)
    e = np.empty(x.shape, dtype=np.complex128)
    left = x < 0
    right = ~left
    xl = x[left]
    xr = x[right]
    g[left] = np.exp(1j * sol.k * xl) + sol.R1 * np.exp(-1j * sol.k * xl)
    e[left] = sol.R2 * np.exp(-1j * sol.q * xl)
    g[right] = sol.C_plus * np.exp(1j * sol.k_plus * xr) + sol.C_minus * np.exp(
        1j * sol.k_minus * xr
    )
    e[right] = sol.B_plus * np.exp(1j * sol.k_plus * xr) + sol.B_minus * np.exp(
        1j * sol.k_minus * xr
    )
    return (1.0 / np.sqrt(2.0 * np.pi)) * np.stack([g, e])


def _relative(residual, scale):
    scale = np.maximum(scale, np.finfo(float).tiny)
    return np.abs(residual) / scale


def matching_residuals(kx, kx_p, kx_m, q_x, R1, R2, C_p, C_m, B_p, B_m):
    """Relative residuals of the four continuity conditions at x = 0.

    Works for scalars or arrays; the derivative condition on the excited
    component uses the signed wavenumber -q of the leftward reflected wave,
    i.e. q R2 + k+ B+ + k- B- = 0.
    """
    ground_value = _relative(1.0 + R1 - C_p - C_m, 1.0 + np.abs(R1) + np.abs(C_p) + np.abs(C_m))
    excited_value = _relative(R2 - B_p - B_m, np.abs(R2) + np.abs(B_p) + np.abs(B_m))
    ground_deriv = _relative(
        kx * (1.0 - R1) - kx_p * C_p - kx_m * C_m,
        np.abs(kx) * (1.0 + np.abs(R1)) + np.abs(kx_p * C_p) + np.abs(kx_m * C_m),
    )
    excited_deriv = _relative(
        q_x * R2 + kx_p * B_p + kx_m * B_m,
        np.abs(q_x * R2) + np.abs(kx_p * B_p) + np.abs(kx_m * B_m),
    )
    return {
        "ground_value": ground_value,
        "excited_value": excited_value,
        "ground_derivative": ground_deriv,
        "excited_derivative": excited_deriv,
    }


def matching_residuals_1d(sol: EigenSolution1D):
    return matching_residuals(
        sol.k, sol.k_plus, sol.k_minus, sol.q,
        sol.R1, sol.R2, sol.C_plus, sol.C_minus, sol.B_plus, sol.B_minus,
    )


def stationarity_residual_1d(p: PhysParams, sol: EigenSolution1D, x: float) -> float:
    """Relative residual of H_c Phi = E Phi at a point x != 0.

    Second derivatives of the plane-wave pieces are taken analytically, so
    this checks the wavenumber/branch algebra rather than any numerics.
    """
    if x == 0:
        raise ValueError("stationarity residual is defined away from the interface")
    E = HBAR**2 * sol.k**2 / (2.0 * p.mass)
    shift = -HBAR * (p.laser_detuning + 0.5j * p.decay)
    if x < 0:
        ground_pieces = [(1.0, sol.k), (sol.R1, -sol.k)]
        excited_pieces = [(sol.R2, -sol.q)]
        coupled = False
    else:
        ground_pieces = [(sol.C_plus, sol.k_plus), (sol.C_minus, sol.k_minus)]
        excited_pieces = [(sol.B_plus, sol.k_plus), (sol.B_minus, sol.k_minus)]
        coupled = True

    g_val = sum(c * np.exp(1j * kk * x) for c, kk in ground_pieces)
    e_val = sum(c * np.exp(1j * kk * x) for c, kk in excited_pieces)
    g_kin = sum(
        HBAR**2 * kk**2 / (2.0 * p.mass) * c * np.exp(1j * kk * x)
        for c, kk in ground_pieces
    )
    e_kin = sum(
        HBAR**2 * kk**2 / (2.0 * p.mass) * c * np.exp(1j * kk * x)
        for c, kk in excited_pieces
    )
    row1 = g_kin + (0.5 * HBAR * p.rabi * e_val if coupled else 0.0)
    row2 = e_kin + shift * e_val + (0.5 * HBAR * p.rabi * g_val if coupled else 0.0)
    res = max(abs(row1 - E * g_val), abs(row2 - E * e_val))
    return res / (abs(E) * max(abs(g_val), abs(e_val), np.finfo(float).tiny))
