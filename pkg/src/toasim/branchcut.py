"""Branch selection for the complex square roots of the scattering solvers.

Two rules live here so that every module draws its roots from one audited
place and the 1D and 2D solvers can never end up on different sheets:

* wavenumber roots (k+-, q) take the root with positive imaginary part, so
  the wave decays into the region it penetrates.  If the imaginary part is
  exactly zero -- possible only for decay-free parameters -- the tie is
  broken toward positive real part (outgoing wave).
* the discriminant inside the dressed branch frequencies uses the plain
  principal square root (nonnegative real part).  Selecting Im > 0 there
  would merely relabel the two branches, but it would do so inconsistently
  across the detuning axis and break the zero-coupling limit in which the
  "+" branch must stay the transparent one.
"""

from __future__ import annotations

import numpy as np


def decaying_sqrt(z):
    """Square root with Im >= 0; for real results the positive root.

    Accepts scalars or arrays; always returns an ndarray (0-d for scalar
    input), dtype complex128.
    """
    r = np.sqrt(np.asarray(z, dtype=np.complex128))
    flip = (r.imag < 0) | ((r.imag == 0) & (r.real < 0))
    return np.where(flip, -r, r)


def principal_sqrt(z):
    """Principal square root (branch cut on the negative real axis)."""
    return np.sqrt(np.asarray(z, dtype=np.complex128))
