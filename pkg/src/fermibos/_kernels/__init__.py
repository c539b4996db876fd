"""Propagation kernel backends.

The compiled Cython kernel is preferred when its extension module built;
otherwise a pure-numpy implementation of the same stepping loop is used.
Both share the contract of :func:`propagate_kernel`: given K static
monomial matrices and an (S, K) table of midpoint coefficients, step

    psi <- exp(-i (sum_k c[s,k] M_k + h.c.) dt) psi

via Hermitian eigendecomposition, returning all S+1 states.
"""

from ._fallback import propagate_kernel as propagate_kernel_python

try:
    from ._prop import propagate_kernel as propagate_kernel_cython

    propagate_kernel = propagate_kernel_cython
    BACKEND = "cython"
except ImportError:  # extension not built
    propagate_kernel_cython = None
    propagate_kernel = propagate_kernel_python
    BACKEND = "python"

__all__ = [
    "BACKEND",
    "propagate_kernel",
    "propagate_kernel_python",
    "propagate_kernel_cython",
]
