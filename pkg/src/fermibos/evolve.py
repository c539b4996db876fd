"""Time evolution and observables.

A single propagation method is provided: the midpoint exponential rule
psi <- exp(-i H(t + dt/2) dt) psi, computed by exact Hermitian
eigendecomposition at every step.  Each step is exactly unitary, so the
norm is an invariant rather than an error source; the time-discretization
error is second order.  The stepping loop is executed by a compiled
kernel when available (see fermibos._kernels).

The g2 = 0 limit with a single initial fermion is an exactly solvable
driven oscillator; its closed-form coherent-state solution serves as the
independent oracle for the integrator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .fock import FockBasis, StateVector, build_basis
from .model import FieldScenario, Monomial, field_monomials
from .modes import CouplingProfile

__all__ = [
    "TruncationError",
    "IntegratorConfig",
    "TimeSeries",
    "Observables",
    "propagate",
    "observables",
    "field_time_series",
    "ion_time_series",
    "run_field",
    "run_ion",
    "run_field_adaptive",
    "driven_oscillator_oracle",
    "FIELD_SECTORS",
]

TOP_LEVEL_BUDGET = 1e-6

# (n_b, n_d) per named fermionic sector; ion level order is vac,f,fbar,pair.
FIELD_SECTORS = {"vac": (0, 0), "f": (1, 0), "fbar": (0, 1), "pair": (1, 1)}
_ION_LEVEL_SECTORS = ("vac", "f", "fbar", "pair")


class TruncationError(RuntimeError):
    """The boson truncation is insufficient for the requested evolution."""


@dataclass(frozen=True)
class IntegratorConfig:
    """Step size and horizon for the midpoint exponential propagator."""

    t_end: float
    dt: float = 2.0 * math.pi / 1000.0
    method: str = "midpoint_exponential"

    def __post_init__(self):
        if self.dt <= 0 or self.t_end <= 0:
            raise ValueError("dt and t_end must be positive")
        if self.method != "midpoint_exponential":
            raise ValueError(f"unknown integration method {self.method!r}")

    @staticmethod
    def default_dt(omega0: float = 1.0) -> float:
        return 2.0 * math.pi / (1000.0 * omega0)

    def validate(self, omega0: float) -> None:
        """Enforce that dt resolves the fastest phase (period 2 pi / 2 w0)."""
        if self.dt > 2.0 * math.pi / (100.0 * omega0):
            raise ValueError(
                f"dt={self.dt:g} too coarse: need dt <= 2*pi/(100*omega0)={2.0 * math.pi / (100.0 * omega0):g}"
            )

    @property
    def n_steps(self) -> int:
        return max(1, int(math.ceil(self.t_end / self.dt - 1e-9)))


@dataclass
class TimeSeries:
    """Sampled observables along an evolution."""

    times: np.ndarray
    survival: np.ndarray
    mean_boson: np.ndarray
    populations: dict[str, np.ndarray]
    norm_error: np.ndarray
    top_level_population: np.ndarray

    def at_time(self, t: float) -> int:
        """Index of the sample closest to t."""
        return int(np.argmin(np.abs(self.times - t)))


@dataclass(frozen=True)
class Observables:
    survival: float
    mean_boson: float
    populations: dict[str, float]
    norm: float


def propagate(
    hamiltonian: Sequence[Monomial] | Callable[[float], np.ndarray],
    psi0: np.ndarray | StateVector,
    cfg: IntegratorConfig,
) -> tuple[np.ndarray, np.ndarray]:
    """Propagate psi0, returning (times, states) with one state per step.

    `hamiltonian` is either a list of monomials (H = sum c_k(t) M_k + h.c.,
    dispatched to the stepping kernel) or a plain callable t -> Hermitian
    matrix.
    """
    if isinstance(psi0, StateVector):
        psi0 = psi0.amplitudes
    psi0 = np.asarray(psi0, dtype=complex)
    n = cfg.n_steps
    times = np.arange(n + 1) * cfg.dt
    midpoints = times[:-1] + cfg.dt / 2.0

    if callable(hamiltonian):
        states = np.empty((n + 1, psi0.shape[0]), dtype=complex)
        states[0] = psi0
        psi = psi0.copy()
        for s, tm in enumerate(midpoints):
            h = np.asarray(hamiltonian(float(tm)), dtype=complex)
            w, v = np.linalg.eigh(h)
            psi = v @ (np.exp(-1j * w * cfg.dt) * (v.conj().T @ psi))
            states[s + 1] = psi
        return times, states

    terms = list(hamiltonian)
    mats = np.array([m.matrix for m in terms], dtype=complex)
    coeffs = np.empty((n, len(terms)), dtype=complex)
    for k, m in enumerate(terms):
        coeffs[:, k] = np.asarray(m.coefficient(midpoints), dtype=complex)
    states = _kernels.propagate_kernel(mats, coeffs, cfg.dt, psi0)
    return times, states


def observables(state: StateVector, target: int) -> Observables:
    """Survival against a basis state, mean boson number, sector populations."""
    psi = state.amplitudes
    basis = state.basis
    probs = np.abs(psi) ** 2
    pops = {
        name: float(np.sum(probs[basis.sector_mask(*occ)])) for name, occ in FIELD_SECTORS.items()
    }
    return Observables(
        survival=float(probs[target]),
        mean_boson=float(np.real(np.sum(basis.boson_numbers() * probs))),
        populations=pops,
        norm=float(np.linalg.norm(psi)),
    )


def _series(times, states, target, sector_masks, boson_diag, top_mask) -> TimeSeries:
    probs = np.abs(states) ** 2
    norms = np.sqrt(np.sum(probs, axis=1))
    return TimeSeries(
        times=times,
        survival=probs[:, target],
        mean_boson=probs @ boson_diag,
        populations={name: probs[:, mask].sum(axis=1) for name, mask in sector_masks.items()},
        norm_error=np.abs(norms - 1.0),
        top_level_population=probs[:, top_mask].sum(axis=1),
    )


def field_time_series(times, states, basis: FockBasis, target: int) -> TimeSeries:
    masks = {name: basis.sector_mask(*occ) for name, occ in FIELD_SECTORS.items()}
    return _series(times, states, target, masks, basis.boson_numbers(), basis.top_level_mask())


def ion_time_series(times, states, basis: FockBasis, target: int) -> TimeSeries:
    """TimeSeries for an ion-encoded run, sectors named by their field image."""
    nb = basis.n_levels
    masks = {}
    for level, name in enumerate(_ION_LEVEL_SECTORS):
        mask = np.zeros(4 * nb, dtype=bool)
        mask[level * nb : (level + 1) * nb] = True
        masks[name] = mask
    return _series(times, states, target, masks, basis.boson_numbers(), basis.top_level_mask())


def _check_truncation(series: TimeSeries) -> None:
    over = series.top_level_population > TOP_LEVEL_BUDGET
    if np.any(over):
        t_bad = float(series.times[np.argmax(over)])
        raise TruncationError(
            f"top boson level population exceeds {TOP_LEVEL_BUDGET:g} at t={t_bad:g}; "
            "increase n_max"
        )


def run_field(
    s: FieldScenario,
    initial: str,
    cfg: IntegratorConfig,
    boson_n: int = 0,
    target: str | None = None,
    target_boson_n: int | None = None,
    check_truncation: bool = True,
) -> TimeSeries:
    """Evolve a named initial basis state under the field Hamiltonian."""
    cfg.validate(s.profile.omega0)
    basis = s.basis
    psi0 = basis.state(*FIELD_SECTORS[initial], boson_n)
    tgt = basis.index(
        *FIELD_SECTORS[target or initial],
        boson_n if target_boson_n is None else target_boson_n,
    )
    times, states = propagate(field_monomials(s), psi0, cfg)
    series = field_time_series(times, states, basis, tgt)
    if check_truncation:
        _check_truncation(series)
    return series


def run_ion(
    s: FieldScenario,
    initial: str,
    cfg: IntegratorConfig,
    boson_n: int = 0,
    target: str | None = None,
    target_boson_n: int | None = None,
    check_truncation: bool = True,
) -> TimeSeries:
    """Evolve the encoded initial state under the (implicit) ion Hamiltonian."""
    from .ion import encoding_isometry, ion_monomials

    cfg.validate(s.profile.omega0)
    basis = s.basis
    v = encoding_isometry(basis)
    psi0 = v @ basis.state(*FIELD_SECTORS[initial], boson_n)
    tgt_field = basis.state(
        *FIELD_SECTORS[target or initial],
        boson_n if target_boson_n is None else target_boson_n,
    )
    tgt = int(np.argmax(np.abs(v @ tgt_field)))
    times, states = propagate(ion_monomials(s), psi0, cfg)
    series = ion_time_series(times, states, basis, tgt)
    if check_truncation:
        _check_truncation(series)
    return series


def run_field_adaptive(
    profile: CouplingProfile,
    initial: str,
    cfg: IntegratorConfig,
    n_max_start: int = 8,
    boson_n: int = 0,
    target: str | None = None,
    target_boson_n: int | None = None,
    rotating_only: bool = False,
    normal_order_self: bool = False,
) -> tuple[TimeSeries, FockBasis]:
    """Run with the boson truncation doubled until the top level stays empty.

    Starts at n_max_start and doubles while the top-level population
    exceeds the 1e-6 budget; raises TruncationError at the dimension cap.
    """
    n_max = n_max_start
    while True:
        try:
            basis = build_basis(n_max)
        except ValueError as exc:
            raise TruncationError(f"adaptive truncation hit the dimension cap: {exc}") from exc
        s = FieldScenario(profile, basis, rotating_only, normal_order_self)
        try:
            series = run_field(
                s, initial, cfg, boson_n=boson_n, target=target, target_boson_n=target_boson_n
            )
            return series, basis
        except TruncationError:
            n_max *= 2


def driven_oscillator_oracle(g1: float, omega0: float, t):
    """Closed-form (mean_boson, survival) for g2 = 0 from a single fermion.

    The single-fermion projection is the driven oscillator
    2 g1 (a e^{-i w0 t} + a^dag e^{i w0 t}), producing a coherent state
    alpha(t) = -(2 g1/w0)(e^{i w0 t} - 1); mean boson number
    (4 g1/w0)^2 sin^2(w0 t / 2) and survival exp(-|alpha|^2).
    """
    t = np.asarray(t, dtype=float)
    mean = (4.0 * g1 / omega0) ** 2 * np.sin(omega0 * t / 2.0) ** 2
    return mean, np.exp(-mean)
