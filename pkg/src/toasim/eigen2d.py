"""2D scattering eigenstates for the half-plane traveling-wave laser.

The laser occupies x >= 0 and runs along +y with wavenumber k_L, so the
excited component of every stationary state carries an extra e^{i k_L y}:
absorbing a photon transfers hbar k_L of y momentum.  Matching at x = 0
forces all y wavenumbers on the ground channel to coincide (k_y) and the
excited channel to carry q_y = k_y + k_L -- and with that, the whole 1D
coefficient algebra goes through verbatim once the laser detuning is
replaced by the effective detuning

    Delta = Delta_L - Delta_K(k_y),

which is the single place the transverse motion enters.  `solve_2d`
therefore delegates the branch and coefficient work to `eigen1d` with this
Delta, which also makes the k_L = 0 reduction to the 1D solver exact in
floating point, not merely to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from types import SimpleNamespace

import numpy as np

from . import eigen1d
from .physparams import HBAR, PhysParams, effective_detuning


@dataclass(frozen=True)
class EigenSolution2D:
    """Branch data and matching coefficients for one incident (k_x, k_y)."""

    k_x: float
    k_y: float
    delta_eff: float
    lambda_plus: complex
    lambda_minus: complex
    kx_plus: complex
    kx_minus: complex
    q_x: complex
    q_y: float
    R1: complex
    R2: complex
    C_plus: complex
    C_minus: complex
    B_plus: complex
    B_minus: complex


def solve_2d_arrays(p: PhysParams, k_x, k_y) -> SimpleNamespace:
    """Vectorized solver core; k_x and k_y broadcast together.

    Returns a namespace of ndarrays (lambda_plus, ..., B_minus, delta_eff,
    q_y).  Used by the quadrature engine, which needs whole k-grids at once.
    """
    k_x = np.asarray(k_x, dtype=float)
    k_y = np.asarray(k_y, dtype=float)
    if np.any(~np.isfinite(k_x)) or np.any(~np.isfinite(k_y)):
        raise ValueError("k_x and k_y must be finite")
    if np.any(k_x <= 0):
        raise ValueError("incident k_x must be positive")
    delta = effective_detuning(p, k_y)
    lam_p, lam_m, kx_p, kx_m, q_x = eigen1d.branch_wavenumbers(p, delta, k_x)
    R1, R2, C_p, C_m, B_p, B_m = eigen1d.matching_coefficients(
        k_x, kx_p, kx_m, q_x, lam_p, lam_m, p.rabi
    )
    return SimpleNamespace(
        delta_eff=delta,
        lambda_plus=lam_p,
        lambda_minus=lam_m,
        kx_plus=kx_p,
        kx_minus=kx_m,
        q_x=q_x,
        q_y=k_y + p.laser_wavenumber,
        R1=R1,
        R2=R2,
        C_plus=C_p,
        C_minus=C_m,
        B_plus=B_p,
        B_minus=B_m,
    )


def solve_2d(p: PhysParams, k_x: float, k_y: float) -> EigenSolution2D:
    """Scattering solution for an incident ground plane wave (k_x > 0, k_y)."""
    a = solve_2d_arrays(p, k_x, k_y)
    return EigenSolution2D(
        k_x=float(k_x),
        k_y=float(k_y),
        delta_eff=float(a.delta_eff),
        lambda_plus=complex(a.lambda_plus),
        lambda_minus=complex(a.lambda_minus),
        kx_plus=complex(a.kx_plus),
        kx_minus=complex(a.kx_minus),
        q_x=complex(a.q_x),
        q_y=float(a.q_y),
        R1=complex(a.R1),
        R2=complex(a.R2),
        C_plus=complex(a.C_plus),
        C_minus=complex(a.C_minus),
        B_plus=complex(a.B_plus),
        B_minus=complex(a.B_minus),
    )


def eigenstate_2d_at(sol: EigenSolution2D, x, y):
    """(ground, excited) amplitudes at (x, y), 1/(2 pi) normalization.

    x and y broadcast together; result shape (2,) + broadcast shape.  The
    excited component carries the shifted transverse wavenumber q_y =
    k_y + k_L in both regions.
    """
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    g = np.empty(x.shape, dtype=np.complex128)
    e = np.empty(x.shape, dtype=np.complex128)
    left = x < 0
    right = ~left
    xl, yl = x[left], y[left]
    xr, yr = x[right], y[right]
    g[left] = (np.exp(1j * sol.k_x * xl) + sol.R1 * np.exp(-1j * sol.k_x * xl)) * np.exp(
        1j * sol.k_y * yl
    )
    e[left] = sol.R2 * np.exp(-1j * sol.q_x * xl) * np.exp(1j * sol.q_y * yl)
    g[right] = (
        sol.C_plus * np.exp(1j * sol.kx_plus * xr)
        + sol.C_minus * np.exp(1j * sol.kx_minus * xr)
    ) * np.exp(1j * sol.k_y * yr)
    e[right] = (
        sol.B_plus * np.exp(1j * sol.kx_plus * xr)
        + sol.B_minus * np.exp(1j * sol.kx_minus * xr)
    ) * np.exp(1j * sol.q_y * yr)
    return (1.0 / (2.0 * np.pi)) * np.stack([g, e])


def matching_residuals_2d(sol: EigenSolution2D):
    """Relative residuals of the four x = 0 continuity conditions."""
    return eigen1d.matching_residuals(
        sol.k_x, sol.kx_plus, sol.kx_minus, sol.q_x,
        sol.R1, sol.R2, sol.C_plus, sol.C_minus, sol.B_plus, sol.B_minus,
    )


def q_constraint_residual(p: PhysParams, sol: EigenSolution2D) -> float:
    """Consistency of q with the x < 0 dispersion relation.

    The reflected excited wave must satisfy q_x^2 + q_y^2 = k^2 +
    (m/hbar)(i gamma + 2 Delta_L); here q_x was built from the effective
    detuning and q_y from the momentum-transfer rule, so this closes the
    loop between the two routes.
    """
    lhs = sol.q_x**2 + sol.q_y**2
    rhs = (
        sol.k_x**2
        + sol.k_y**2
        + (p.mass / HBAR) * (1j * p.decay + 2.0 * p.laser_detuning)
    )
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), np.finfo(float).tiny)


def stationarity_residual_2d(p: PhysParams, sol: EigenSolution2D, x: float, y: float) -> float:
    """Relative residual of H_c Phi = E Phi at (x, y), x != 0, analytic derivatives."""
    if x == 0:
        raise ValueError("stationarity residual is defined away from the interface")
    E = HBAR**2 * (sol.k_x**2 + sol.k_y**2) / (2.0 * p.mass)
    shift = -HBAR * (p.laser_detuning + 0.5j * p.decay)
    kL = p.laser_wavenumber
    if x < 0:
        ground_pieces = [(1.0, sol.k_x, sol.k_y), (sol.R1, -sol.k_x, sol.k_y)]
        excited_pieces = [(sol.R2, -sol.q_x, sol.q_y)]
        coupled = False
    else:
        ground_pieces = [
            (sol.C_plus, sol.kx_plus, sol.k_y),
            (sol.C_minus, sol.kx_minus, sol.k_y),
        ]
        excited_pieces = [
            (sol.B_plus, sol.kx_plus, sol.q_y),
            (sol.B_minus, sol.kx_minus, sol.q_y),
        ]
        coupled = True

    def wave(c, kx, ky):
        return c * np.exp(1j * (kx * x + ky * y))

    def kin(c, kx, ky):
        return HBAR**2 * (kx**2 + ky**2) / (2.0 * p.mass) * wave(c, kx, ky)

    g_val = sum(wave(*piece) for piece in ground_pieces)
    e_val = sum(wave(*piece) for piece in excited_pieces)
    row1 = sum(kin(*piece) for piece in ground_pieces)
    row2 = sum(kin(*piece) for piece in excited_pieces) + shift * e_val
    if coupled:
        row1 += 0.5 * HBAR * p.rabi * np.exp(-1j * kL * y) * e_val
        row2 += 0.5 * HBAR * p.rabi * np.exp(1j * kL * y) * g_val
    res = max(abs(row1 - E * g_val), abs(row2 - E * e_val))
    return res / (abs(E) * max(abs(g_val), abs(e_val), np.finfo(float).tiny))
