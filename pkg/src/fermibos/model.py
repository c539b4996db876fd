"""Time-dependent interaction Hamiltonians.

The three-mode Hamiltonian is assembled as H(t) = sum_k c_k(t) M_k + h.c.
with static monomial matrices M_k and scalar coefficient functions c_k:

    M1 = (b^dag b + d d^dag) a        c1 = g1 exp(-i w0 t)
    M2 = b^dag d^dag a                c2 = g(t) exp(+i delta t)
    M3 = d b a                        c3 = g(t) exp(-i (2 w0 + delta) t)

with the Gaussian pulse g(t) = g2 exp(-(t - T/2)^2 / (2 sigma_t^2)).  The
counter-rotating M3 term is kept by default; dropping it (rotating_only)
isolates its effect in the ultrastrong-coupling regime.  The same
decomposition feeds the exponential integrator, the perturbative series
and the ion encoding, so all of them share one Hamiltonian definition.

The many-mode Hamiltonian generalizes this to arbitrary packet lists and
several boson modes, with every coefficient an exact Gaussian-overlap
functional instead of the reduced (g1, g2) form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .fock import DIMENSION_CAP, FockBasis, boson_ladder, jordan_wigner_chain, ladder_operators
from .modes import CouplingProfile, Species, WavePacket, coupling_between

__all__ = [
    "FieldScenario",
    "MultimodeScenario",
    "Monomial",
    "hamiltonian_field",
    "field_monomials",
    "vertex_monomials",
    "hamiltonian_multimode",
    "multimode_monomials",
    "multimode_parity",
]


@dataclass(frozen=True)
class Monomial:
    """One operator monomial with its scalar coefficient function.

    The full Hamiltonian is sum_k c_k(t) M_k, plus the Hermitian
    conjugate of that sum unless the monomial list already contains it
    (see vertex_monomials).
    """

    name: str
    matrix: np.ndarray = field(repr=False)
    coefficient: object  # callable t -> complex, vectorized over numpy arrays

    def conjugate(self) -> "Monomial":
        c = self.coefficient
        return Monomial(
            name=self.name + "_dag",
            matrix=self.matrix.conj().T,
            coefficient=lambda t, _c=c: np.conj(_c(t)),
        )


@dataclass(frozen=True)
class FieldScenario:
    """A coupling profile on a truncated basis, with term toggles."""

    profile: CouplingProfile
    basis: FockBasis
    rotating_only: bool = False
    normal_order_self: bool = False


def field_monomials(s: FieldScenario) -> list[Monomial]:
    """The (non-conjugated) monomials of the three-mode Hamiltonian."""
    p = s.profile
    ops = ladder_operators(s.basis)
    if s.normal_order_self:
        self_op = ops.b_in_dag @ ops.b_in - ops.d_in_dag @ ops.d_in
    else:
        self_op = ops.b_in_dag @ ops.b_in + ops.d_in @ ops.d_in_dag
    terms = [
        Monomial(
            "self_a",
            self_op @ ops.a,
            lambda t: p.g1 * np.exp(-1j * p.omega0 * np.asarray(t, dtype=float)),
        ),
        Monomial(
            "pair_create_a",
            ops.b_in_dag @ ops.d_in_dag @ ops.a,
            lambda t: p.pulse(t) * np.exp(1j * p.delta * np.asarray(t, dtype=float)),
        ),
    ]
    if not s.rotating_only:
        terms.append(
            Monomial(
                "pair_annihilate_a",
                ops.d_in @ ops.b_in @ ops.a,
                lambda t: p.pulse(t)
                * np.exp(-1j * (2.0 * p.omega0 + p.delta) * np.asarray(t, dtype=float)),
            )
        )
    return terms


def vertex_monomials(s: FieldScenario) -> list[Monomial]:
    """All elementary vertices including conjugates, for the Dyson series.

    With the self term split into its b^dag b and d d^dag pieces this is
    the full set of eight monomials (six with rotating_only).
    """
    p = s.profile
    ops = ladder_operators(s.basis)

    def c_self(t):
        return p.g1 * np.exp(-1j * p.omega0 * np.asarray(t, dtype=float))

    def c_pair(t):
        return p.pulse(t) * np.exp(1j * p.delta * np.asarray(t, dtype=float))

    def c_counter(t):
        return p.pulse(t) * np.exp(-1j * (2.0 * p.omega0 + p.delta) * np.asarray(t, dtype=float))

    if s.normal_order_self:
        self_b = ops.b_in_dag @ ops.b_in
        self_d = -(ops.d_in_dag @ ops.d_in)
    else:
        self_b = ops.b_in_dag @ ops.b_in
        self_d = ops.d_in @ ops.d_in_dag
    halves = [
        Monomial("bdagb_a", self_b @ ops.a, c_self),
        Monomial("ddddag_a", self_d @ ops.a, c_self),
        Monomial("bdagddag_a", ops.b_in_dag @ ops.d_in_dag @ ops.a, c_pair),
    ]
    if not s.rotating_only:
        halves.append(Monomial("db_a", ops.d_in @ ops.b_in @ ops.a, c_counter))
    return halves + [m.conjugate() for m in halves]


def _assemble(monomials, t: float) -> np.ndarray:
    dim = monomials[0].matrix.shape[0]
    x = np.zeros((dim, dim), dtype=complex)
    for m in monomials:
        x += complex(m.coefficient(t)) * m.matrix
    return x + x.conj().T


def hamiltonian_field(s: FieldScenario, t: float) -> np.ndarray:
    """The three-mode Hamiltonian matrix at time t (exactly Hermitian)."""
    return _assemble(field_monomials(s), t)


@dataclass(frozen=True)
class MultimodeScenario:
    """Packet modes coupled to one or more boson modes with a bare coupling.

    boson_modes is a sequence of (k_l, omega_l); n_max applies per boson
    mode (scalar or one value per mode).
    """

    packets: tuple[WavePacket, ...]
    boson_modes: tuple[tuple[float, float], ...]
    bare_g: float
    n_max: tuple[int, ...] | int = 8

    def __post_init__(self):
        if len(self.packets) < 1:
            raise ValueError("need at least one packet mode")
        if len(self.boson_modes) < 1:
            raise ValueError("need at least one boson mode")
        nm = self.n_max_per_mode
        if len(nm) != len(self.boson_modes):
            raise ValueError("n_max list does not match the number of boson modes")
        if self.dimension > DIMENSION_CAP:
            raise ValueError(f"total dimension {self.dimension} exceeds cap {DIMENSION_CAP}")

    @property
    def n_max_per_mode(self) -> tuple[int, ...]:
        if isinstance(self.n_max, int):
            return (self.n_max,) * len(self.boson_modes)
        return tuple(self.n_max)

    @property
    def dimension(self) -> int:
        dim = 2 ** len(self.packets)
        for nm in self.n_max_per_mode:
            dim *= nm + 1
        return dim


def _multimode_operators(s: MultimodeScenario):
    """(theta_i, a_l) matrices on the full product space.

    theta_i is the annihilation-like operator entering theta_i^dag theta_j:
    the mode annihilator for a fermion packet, the mode creator for an
    antifermion packet (the antifermion component of the field carries
    d^dag).
    """
    n_f = len(s.packets)
    chain = jordan_wigner_chain(n_f)
    boson_dims = [nm + 1 for nm in s.n_max_per_mode]
    boson_eye = reduce(np.kron, [np.eye(d) for d in boson_dims])
    thetas = []
    for packet, c in zip(s.packets, chain):
        op = c if packet.species is Species.FERMION else c.conj().T
        thetas.append(np.kron(op, boson_eye))
    ferm_eye = np.eye(2**n_f)
    bosons = []
    for l, d in enumerate(boson_dims):
        factors = [np.eye(dd) for dd in boson_dims]
        factors[l] = boson_ladder(d)
        bosons.append(np.kron(ferm_eye, reduce(np.kron, factors)).astype(complex))
    return thetas, bosons


def multimode_monomials(s: MultimodeScenario) -> list[Monomial]:
    """Monomials F^{i,j}_l(t) theta_i^dag theta_j a_l of the many-mode model."""
    thetas, bosons = _multimode_operators(s)
    terms = []
    for l, (k_l, omega_l) in enumerate(s.boson_modes):
        for i, p_i in enumerate(s.packets):
            for j, p_j in enumerate(s.packets):

                def coeff(t, pi=p_i, pj=p_j, k=k_l, w=omega_l):
                    tt = np.asarray(t, dtype=float)
                    if tt.ndim == 0:
                        return coupling_between(pi, pj, k, w, s.bare_g, float(tt))
                    return np.array(
                        [coupling_between(pi, pj, k, w, s.bare_g, float(x)) for x in tt]
                    )

                terms.append(
                    Monomial(
                        f"theta{i}dag_theta{j}_a{l}",
                        thetas[i].conj().T @ thetas[j] @ bosons[l],
                        coeff,
                    )
                )
    return terms


def hamiltonian_multimode(s: MultimodeScenario, t: float) -> np.ndarray:
    """The many-mode Hamiltonian matrix at time t (exactly Hermitian)."""
    return _assemble(multimode_monomials(s), t)


def multimode_parity(s: MultimodeScenario) -> np.ndarray:
    """Total fermion-number parity on the multimode space."""
    n_f = len(s.packets)
    p2 = np.diag([1.0, -1.0])  # (1 - 2 n) on one mode
    ferm = reduce(np.kron, [p2] * n_f)
    boson_eye = reduce(np.kron, [np.eye(nm + 1) for nm in s.n_max_per_mode])
    return np.kron(ferm, boson_eye).astype(complex)
