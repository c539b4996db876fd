"""Truncated Hilbert space and ladder operators.

The three-mode space is a product of one fermionic and one antifermionic
two-level mode with a boson mode truncated at n_max.  The fermionic
operators are built by a Jordan-Wigner mapping onto two qubits so that
all anticommutation relations hold as exact (integer-entry) matrix
identities; the boson ladder operator is the standard truncated one,
whose only commutator defect sits in the top level.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np

__all__ = [
    "DIMENSION_CAP",
    "FockBasis",
    "StateVector",
    "LadderOperators",
    "build_basis",
    "ladder_operators",
    "parity_operator",
    "manymode_dimension",
    "jordan_wigner_chain",
    "boson_ladder",
]

# Dense matrices only; anything larger must be reformulated.
DIMENSION_CAP = 2**16

# Single-qubit blocks in (unoccupied, occupied) ordering.  SZ assigns -1 to
# the empty level so that b^dag d^dag |0,0> = -|1,1>, the sign convention
# the ion encoding relies on.
_SP = np.array([[0.0, 0.0], [1.0, 0.0]])  # creation on one mode
_SM = _SP.T.copy()
_SZ = np.diag([-1.0, 1.0])
_I2 = np.eye(2)


@dataclass(frozen=True)
class FockBasis:
    """Product basis (n_b, n_d, n) with index ((2 n_b + n_d)(n_max+1) + n)."""

    n_max: int

    def __post_init__(self):
        if self.n_max < 0:
            raise ValueError("n_max must be >= 0")
        if self.dimension > DIMENSION_CAP:
            raise ValueError(f"basis dimension exceeds cap {DIMENSION_CAP}")

    @property
    def n_levels(self) -> int:
        return self.n_max + 1

    @property
    def dimension(self) -> int:
        return 4 * (self.n_max + 1)

    def index(self, n_b: int, n_d: int, n: int) -> int:
        if n_b not in (0, 1) or n_d not in (0, 1):
            raise ValueError("fermionic occupations must be 0 or 1")
        if not 0 <= n <= self.n_max:
            raise ValueError(f"boson number {n} outside 0..{self.n_max}")
        return (2 * n_b + n_d) * self.n_levels + n

    def unindex(self, i: int) -> tuple[int, int, int]:
        if not 0 <= i < self.dimension:
            raise ValueError("index out of range")
        sector, n = divmod(i, self.n_levels)
        return sector // 2, sector % 2, n

    def state(self, n_b: int, n_d: int, n: int) -> np.ndarray:
        """Unit vector for the basis state |n_b, n_d, n>."""
        psi = np.zeros(self.dimension, dtype=complex)
        psi[self.index(n_b, n_d, n)] = 1.0
        return psi

    def sector_mask(self, n_b: int, n_d: int) -> np.ndarray:
        mask = np.zeros(self.dimension, dtype=bool)
        start = (2 * n_b + n_d) * self.n_levels
        mask[start : start + self.n_levels] = True
        return mask

    def boson_numbers(self) -> np.ndarray:
        """Diagonal of the boson number operator."""
        return np.tile(np.arange(self.n_levels, dtype=float), 4)

    def top_level_mask(self) -> np.ndarray:
        mask = np.zeros(self.dimension, dtype=bool)
        mask[self.n_max :: self.n_levels] = True
        return mask


@dataclass
class StateVector:
    """Normalized amplitudes over a FockBasis."""

    basis: FockBasis
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (self.basis.dimension,):
            raise ValueError("amplitude vector does not match basis dimension")
        if abs(np.linalg.norm(self.amplitudes) - 1.0) > 1e-9:
            raise ValueError("state vector is not normalized within 1e-9")

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class LadderOperators:
    a: np.ndarray
    a_dag: np.ndarray
    b_in: np.ndarray
    b_in_dag: np.ndarray
    d_in: np.ndarray
    d_in_dag: np.ndarray


def build_basis(n_max: int) -> FockBasis:
    return FockBasis(n_max)


def boson_ladder(n_levels: int) -> np.ndarray:
    """Truncated annihilation operator, a|n> = sqrt(n)|n-1>."""
    return np.diag(np.sqrt(np.arange(1.0, n_levels)), 1)


def ladder_operators(basis: FockBasis) -> LadderOperators:
    """Jordan-Wigner fermionic operators and the boson ladder on the basis.

    b^dag = sp (x) I and d^dag = sz (x) sp on the (n_b, n_d) qubit pair,
    tensored with the boson identity; a acts on the boson factor alone.
    """
    nb = basis.n_levels
    ib = np.eye(nb)
    b_dag4 = np.kron(_SP, _I2)
    d_dag4 = np.kron(_SZ, _SP)
    a = np.kron(np.eye(4), boson_ladder(nb)).astype(complex)
    b_dag = np.kron(b_dag4, ib).astype(complex)
    d_dag = np.kron(d_dag4, ib).astype(complex)
    return LadderOperators(
        a=a,
        a_dag=a.conj().T,
        b_in=b_dag.conj().T,
        b_in_dag=b_dag,
        d_in=d_dag.conj().T,
        d_in_dag=d_dag,
    )


def parity_operator(basis: FockBasis) -> np.ndarray:
    """Fermion-number parity (1 - 2 b^dag b)(1 - 2 d^dag d) on the basis."""
    p4 = np.diag([1.0, -1.0, -1.0, 1.0])
    return np.kron(p4, np.eye(basis.n_levels)).astype(complex)


def manymode_dimension(n_ions: int, phonons_per_ion: int) -> int:
    """Hilbert-space dimension (2 * phonons_per_ion)^n_ions.

    Returned as an exact Python integer, so values beyond 2^63 are
    representable without overflow.
    """
    if n_ions < 1 or phonons_per_ion < 1:
        raise ValueError("need n_ions >= 1 and phonons_per_ion >= 1")
    return (2 * phonons_per_ion) ** n_ions


def jordan_wigner_chain(n_modes: int) -> list[np.ndarray]:
    """Annihilation operators for n_modes fermionic modes on 2^n_modes.

    Mode 0 occupies the most significant qubit; mode m carries a string of
    sz factors on modes < m.  For n_modes = 2 this reproduces b_in, d_in
    of :func:`ladder_operators` (without the boson factor).
    """
    if n_modes < 1:
        raise ValueError("need at least one fermionic mode")
    ops = []
    for m in range(n_modes):
        factors = [_SZ] * m + [_SM] + [_I2] * (n_modes - m - 1)
        ops.append(reduce(np.kron, factors).astype(complex))
    return ops
