"""Detection-delay kernel, deconvolution, and the free-flux comparison.

The measured arrival distribution is delayed and filtered by the internal
dynamics of the detector transition: even an atom sitting still inside the
laser takes time to get excited and emit.  That at-rest first-photon
distribution is

    W(t) = gamma |b(t)|^2,

b(t) the excited amplitude of the 0D conditional two-level system started
in the ground state.  Modeling the measured distribution as a convolution
Pi = Pi_id * W, the hypothetical ideal distribution is recovered by
Wiener-regularized Fourier deconvolution.  For strong decay the recovered
Pi_id approaches the x component of the probability flux of the freely
moving packet through the plane x = 0, integrated over y -- computed here
in closed form for Gaussian packets (the y integral of the normalized
transverse factor is 1, so only the x marginal enters).

The 0D evolution is done by eigendecomposition of the 2x2 conditional
matrix -- deliberately a different algebraic route than the grid
propagator's exponential, so the two can be cross-checked against each
other.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .packet import GaussianPacket1D, GaussianPacket2D
from .physparams import HBAR, PhysParams
from .toa import ToaSeries, cumulative_trapezoid


@dataclass
class AtRestDistribution:
    """Sampled W(t) for a two-level atom at rest in the laser."""

    omega: float
    gamma: float
    detuning: float
    times: np.ndarray
    values: np.ndarray


@dataclass
class FluxSeries:
    """y-integrated x flux of the free packet through x = 0."""

    times: np.ndarray
    values: np.ndarray


def at_rest_amplitudes(p: PhysParams, times):
    """(a(t), b(t)) of the 0D conditional system from the (1, 0) start.

    Eigenvalues mu_+- = (d +- sqrt(d^2 + 4 w^2))/2 of [[0, w], [w, d]],
    w = Omega/2, d = -Delta_L - i gamma/2; spectral projectors give
        a(t) = (mu_+ e^{-i mu_- t} - mu_- e^{-i mu_+ t}) / (mu_+ - mu_-)
        b(t) = w (e^{-i mu_+ t} - e^{-i mu_- t}) / (mu_+ - mu_-)
    with the degenerate (critically damped) case handled by its limit.
    """
    t = np.asarray(times, dtype=float)
    w = 0.5 * p.rabi
    d = -(p.laser_detuning + 0.5j * p.decay)
    root = np.sqrt(complex(d * d + 4.0 * w * w))
    mu_p = 0.5 * (d + root)
    mu_m = 0.5 * (d - root)
    gap = mu_p - mu_m
    if abs(gap) <= 1e-12 * max(abs(mu_p), abs(mu_m), 1e-300):
        mu = 0.5 * d
        ep = np.exp(-1j * mu * t)
        return ep * (1.0 + 1j * mu * t), ep * (-1j * w * t)
    ep = np.exp(-1j * mu_p * t)
    em = np.exp(-1j * mu_m * t)
    a = (mu_p * em - mu_m * ep) / gap
    b = w * (ep - em) / gap
    return a, b


def w_at_rest(p: PhysParams, times) -> AtRestDistribution:
    """First-photon distribution of an atom at rest, W(t) = gamma |b(t)|^2."""
    if p.decay <= 0:
        raise ValueError("w_at_rest needs gamma > 0")
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or t.size < 2 or t[0] < 0 or np.any(np.diff(t) <= 0):
        raise ValueError("times must be strictly increasing and >= 0")
    _, b = at_rest_amplitudes(p, t)
    return AtRestDistribution(
        omega=p.rabi, gamma=p.decay, detuning=p.laser_detuning,
        times=t, values=p.decay * np.abs(b) ** 2,
    )


def survival_at_rest(p: PhysParams, times):
    """|a|^2 + |b|^2: no-photon probability of the atom at rest."""
    a, b = at_rest_amplitudes(p, times)
    return np.abs(a) ** 2 + np.abs(b) ** 2


def flux_xline(packet: GaussianPacket2D | GaussianPacket1D, mass: float, times) -> FluxSeries:
    """Free-evolution flux through x = 0, integrated over y, in closed form.

    For the product Gaussian the transverse factor integrates to one and
    the result is the 1D flux of the x marginal:
        J(0, t) = (hbar/m) |psi(0, t)|^2 Re(b0 / 2 a(t)),
    a(t) = dx^2 + i hbar t / 2m, b0 = 2 dx^2 kx0 - i x0.
    """
    g = packet.x_marginal() if isinstance(packet, GaussianPacket2D) else packet
    t = np.asarray(times, dtype=float)
    a = g.dx**2 + 1j * HBAR * t / (2.0 * mass)
    b0 = 2.0 * g.dx**2 * g.kx0 - 1j * g.x0
    pref = (2.0 * g.dx**2 / np.pi) ** 0.25 / np.sqrt(2.0 * np.pi)
    psi0 = pref * np.sqrt(np.pi / a) * np.exp(b0**2 / (4.0 * a) - g.dx**2 * g.kx0**2)
    values = (HBAR / mass) * np.abs(psi0) ** 2 * np.real(b0 / (2.0 * a))
    return FluxSeries(times=t, values=values)


def free_position_amplitude(g: GaussianPacket1D, mass: float, x, t):
    """Freely evolved 1D Gaussian psi(x, t); x and t broadcast."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    a = g.dx**2 + 1j * HBAR * t / (2.0 * mass)
    b = 2.0 * g.dx**2 * g.kx0 + 1j * (x - g.x0)
    pref = (2.0 * g.dx**2 / np.pi) ** 0.25 / np.sqrt(2.0 * np.pi)
    return pref * np.sqrt(np.pi / a) * np.exp(b**2 / (4.0 * a) - g.dx**2 * g.kx0**2)


def _require_uniform(times, what: str) -> float:
    steps = np.diff(times)
    if steps.size == 0:
        raise ValueError(f"{what} needs at least two samples")
    dt = steps[0]
    if np.any(np.abs(steps - dt) > 1e-9 * dt):
        raise ValueError(f"{what} requires a uniform time grid; resample first")
    return float(dt)


def deconvolve(pi: ToaSeries, w: AtRestDistribution, epsilon: float = 1e-4) -> ToaSeries:
    """Solve Pi = Pi_id * W for Pi_id with Wiener regularization.

        Pi_id^ = Pi^ conj(W^) / (|W^|^2 + epsilon max|W^|^2)

    Both series must share one uniform dt.  The raw output is returned
    without renormalization; judging its quality is the caller's job.
    """
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon!r}")
    dt_pi = _require_uniform(pi.times, "deconvolve")
    dt_w = _require_uniform(w.times, "deconvolve")
    if abs(dt_pi - dt_w) > 1e-9 * dt_pi:
        raise ValueError(
            f"time grids mismatch: dt = {dt_pi!r} vs {dt_w!r}"
        )
    n = pi.pi.size + w.values.size
    P = np.fft.rfft(pi.pi, n) * dt_pi
    W = np.fft.rfft(w.values, n) * dt_pi
    H = P * np.conj(W) / (np.abs(W) ** 2 + epsilon * np.max(np.abs(W)) ** 2)
    values = np.fft.irfft(H, n)[: pi.pi.size] / dt_pi
    meta = {"engine": "deconvolve", "epsilon": epsilon}
    return ToaSeries.from_values(pi.times, values, meta)


def convolve(pi_id_values, w: AtRestDistribution, dt: float):
    """Forward model Pi = Pi_id * W by direct time-domain convolution.

    Kept separate from `deconvolve`'s Fourier route so round-trip tests
    exercise two independent code paths.
    """
    full = np.convolve(np.asarray(pi_id_values, dtype=float), w.values) * dt
    return full[: np.asarray(pi_id_values).size]
