"""Pure-numpy propagation kernel (fallback backend)."""

import numpy as np


def propagate_kernel(mats, coeffs, dt, psi0):
    """Midpoint-exponential stepping via numpy's Hermitian eigensolver.

    mats: (K, D, D) complex monomial matrices.
    coeffs: (S, K) complex midpoint coefficients.
    Returns the (S+1, D) state trajectory starting from psi0.
    """
    mats = np.asarray(mats, dtype=complex)
    coeffs = np.asarray(coeffs, dtype=complex)
    psi = np.asarray(psi0, dtype=complex).copy()
    n_steps = coeffs.shape[0]
    out = np.empty((n_steps + 1, psi.shape[0]), dtype=complex)
    out[0] = psi
    for s in range(n_steps):
        x = np.tensordot(coeffs[s], mats, axes=(0, 0))
        h = x + x.conj().T
        w, v = np.linalg.eigh(h)
        psi = v @ (np.exp(-1j * w * dt) * (v.conj().T @ psi))
        out[s + 1] = psi
    return out
