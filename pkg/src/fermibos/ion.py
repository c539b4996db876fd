"""Trapped-ion encoding of the field model.

The four fermionic basis states map onto four internal levels of one ion,
|vac> -> |1>, |f> -> |2>, |fbar> -> -|3>, |f,fbar> -> -|4>, with the
boson mode carried by a vibrational mode.  Because the Jordan-Wigner
construction already puts the minus signs on the field-side basis states
(d^dag|vac> = -e1, b^dag d^dag|vac> = -e3), the isometry V is a plain
permutation of the fermionic indices, and V H_field(t) V^dag equals the
four-line ion Hamiltonian identically at every t.

The identity-times-displacement line is realized either implicitly (as
written) or through an explicit spectator qubit coupled via sigma_x and
prepared in a sigma_x eigenstate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fock import FockBasis, boson_ladder
from .model import FieldScenario, Monomial

__all__ = [
    "EncodingError",
    "encoding_isometry",
    "hamiltonian_ion",
    "ion_monomials",
    "spectator_monomials",
    "SpectatorReport",
    "spectator_equivalence",
    "sideband_line_rotation",
]


class EncodingError(RuntimeError):
    """The ion encoding failed a certification check."""


# Fermionic-index permutation: field (vac, fbar-slot, f-slot, pair-slot)
# -> ion levels (|1>, |3>, |2>, |4>).  Rows are ion indices, columns field.
_PERM4 = np.zeros((4, 4))
_PERM4[0, 0] = 1.0  # |0,0>  -> |1>
_PERM4[1, 2] = 1.0  # e2 (f) -> |2>
_PERM4[2, 1] = 1.0  # e1     -> |3>   (physical |fbar> = -e1 -> -|3>)
_PERM4[3, 3] = 1.0  # e3     -> |4>   (physical |f,fbar> = -e3 -> -|4>)


def encoding_isometry(basis: FockBasis) -> np.ndarray:
    """V mapping the field basis to the ion basis (a permutation matrix)."""
    return np.kron(_PERM4, np.eye(basis.n_levels)).astype(complex)


def _level(i: int, j: int) -> np.ndarray:
    """|i><j| on the four ion levels, 1-based labels."""
    e = np.zeros((4, 4))
    e[i - 1, j - 1] = 1.0
    return e


def ion_monomials(s: FieldScenario) -> list[Monomial]:
    """Non-conjugated monomials of the four-line ion Hamiltonian.

    Built literally from the sideband decomposition, independently of the
    field model, so the conjugation identity is a real test:

        -g(t) |4><1| a e^{i delta t}                  (red sideband)
        -g(t) |1><4| a e^{-i (2 w0 + delta) t}        (blue sideband)
        -g1 (|3><3| - |2><2|) a e^{-i w0 t}  + h.c. half
        +g1 I a e^{-i w0 t}                  + h.c. half
    """
    p = s.profile
    nb = s.basis.n_levels
    a = np.kron(np.eye(4), boson_ladder(nb)).astype(complex)

    def lift(m4):
        return np.kron(m4, np.eye(nb)).astype(complex)

    def c_red(t):
        return -p.pulse(t) * np.exp(1j * p.delta * np.asarray(t, dtype=float))

    def c_blue(t):
        return -p.pulse(t) * np.exp(-1j * (2.0 * p.omega0 + p.delta) * np.asarray(t, dtype=float))

    def c_disp(t):
        return p.g1 * np.exp(-1j * p.omega0 * np.asarray(t, dtype=float))

    terms = [Monomial("red_sideband", lift(_level(4, 1)) @ a, c_red)]
    if not s.rotating_only:
        terms.append(Monomial("blue_sideband", lift(_level(1, 4)) @ a, c_blue))
    diag_line = lift(_level(3, 3) - _level(2, 2))
    terms.append(
        Monomial("level_diff_displacement", -diag_line @ a, c_disp)
    )
    if not s.normal_order_self:
        terms.append(Monomial("identity_displacement", lift(np.eye(4)) @ a, c_disp))
    return terms


def hamiltonian_ion(s: FieldScenario, t: float, spectator_explicit: bool = False) -> np.ndarray:
    """The ion Hamiltonian matrix at time t (exactly Hermitian)."""
    terms = spectator_monomials(s) if spectator_explicit else ion_monomials(s)
    dim = terms[0].matrix.shape[0]
    x = np.zeros((dim, dim), dtype=complex)
    for m in terms:
        x += complex(m.coefficient(t)) * m.matrix
    return x + x.conj().T


def spectator_monomials(s: FieldScenario) -> list[Monomial]:
    """Ion monomials with the identity-displacement line on a spectator qubit.

    Space ordering: spectator qubit (x) ion levels (x) boson, so the
    sigma_x sectors are the even/odd combinations of the two halves.
    """
    base = ion_monomials(FieldScenario(s.profile, s.basis, s.rotating_only, normal_order_self=True))
    # normal_order_self=True drops the identity line from ion_monomials;
    # re-add the level-difference sign convention of the scenario.
    if s.normal_order_self:
        raise ValueError("spectator construction targets the literal (non-normal-ordered) model")
    p = s.profile
    nb = s.basis.n_levels
    eye2 = np.eye(2)
    sigx = np.array([[0.0, 1.0], [1.0, 0.0]])
    a_ion = np.kron(np.eye(4), boson_ladder(nb)).astype(complex)

    def c_disp(t):
        return p.g1 * np.exp(-1j * p.omega0 * np.asarray(t, dtype=float))

    lifted = [
        Monomial(m.name, np.kron(eye2, m.matrix), m.coefficient) for m in base
    ]
    lifted.append(Monomial("spectator_displacement", np.kron(sigx, a_ion), c_disp))
    return lifted


def sideband_line_rotation() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Generator, rotation, and target for the level-difference line.

    Detuned red+blue sidebands on |2>, |3> produce the generator
    (|3><2| - |2><3|)/i; a carrier rotation taking sigma_y to sigma_z in
    that subspace turns it into |3><3| - |2><2|.  Returns (generator,
    rotation, target) as 4x4 matrices for the unit test of this identity.
    """
    generator = (_level(3, 2) - _level(2, 3)) / 1j
    # exp(-i (pi/4) sigma_x) on span{|2>,|3>} maps sigma_y -> sigma_z.
    rotation = np.eye(4, dtype=complex)
    block = [1, 2]
    c, s_ = np.cos(np.pi / 4), np.sin(np.pi / 4)
    rotation[np.ix_(block, block)] = np.array([[c, -1j * s_], [-1j * s_, c]])
    target = _level(3, 3) - _level(2, 2)
    return generator.astype(complex), rotation, target.astype(complex)


@dataclass(frozen=True)
class SpectatorReport:
    passed: bool
    max_observable_diff: float
    max_leakage: float
    spectator_sign: int
    note: str


def spectator_equivalence(
    s: FieldScenario,
    t_grid,
    initial_label: str = "pair",
    spectator_sign: int = 1,
    dt: float | None = None,
) -> SpectatorReport:
    """Certify the spectator construction against the implicit Hamiltonian.

    Evolves the same initial state under both forms with the spectator
    prepared in the given sigma_x eigenstate, then compares all sector
    populations and the mean boson number on t_grid, and measures the
    leakage out of the sigma_x sector.  Raises EncodingError when the
    leakage exceeds 1e-12.
    """
    from . import evolve  # deferred to keep module dependencies one-way

    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or len(t_grid) < 2:
        raise ValueError("t_grid must contain at least two times")
    t_end = float(t_grid[-1])
    cfg = evolve.IntegratorConfig(
        t_end=t_end, dt=dt if dt is not None else evolve.IntegratorConfig.default_dt(s.profile.omega0)
    )
    if spectator_sign not in (1, -1):
        raise ValueError("spectator_sign must be +1 or -1")

    series_impl = evolve.run_ion(s, initial_label, cfg)

    psi0_ion = _initial_ion_state(s, initial_label)
    qubit = np.array([1.0, spectator_sign], dtype=complex) / np.sqrt(2.0)
    psi0 = np.kron(qubit, psi0_ion)
    times, states = evolve.propagate(spectator_monomials(s), psi0, cfg)

    # sigma_x sector projections: components along |+> and |-> of the qubit.
    half = psi0_ion.shape[0]
    plus = (states[:, :half] + states[:, half:]) / np.sqrt(2.0)
    minus = (states[:, :half] - states[:, half:]) / np.sqrt(2.0)
    wanted, leaked = (plus, minus) if spectator_sign == 1 else (minus, plus)
    max_leakage = float(np.max(np.sum(np.abs(leaked) ** 2, axis=1)))
    if max_leakage > 1e-12:
        raise EncodingError(f"spectator leakage {max_leakage:.2e} exceeds 1e-12")

    series_exp = evolve.ion_time_series(times, wanted, s.basis, _ion_target(s, initial_label))

    diffs = [np.abs(series_exp.mean_boson - series_impl.mean_boson)]
    for key in series_impl.populations:
        diffs.append(np.abs(series_exp.populations[key] - series_impl.populations[key]))
    sample = np.searchsorted(times, t_grid[t_grid <= times[-1] + 1e-12])
    sample = np.clip(sample, 0, len(times) - 1)
    max_diff = float(max(np.max(d[sample]) for d in diffs))
    passed = max_diff < 1e-8
    note = "ok" if spectator_sign == 1 else (
        "spectator in -1 eigenstate: displacement sign absorbed by a -> -a; "
        "observables unaffected"
    )
    return SpectatorReport(
        passed=passed,
        max_observable_diff=max_diff,
        max_leakage=max_leakage,
        spectator_sign=spectator_sign,
        note=note,
    )


_FIELD_LABELS = {"vac": (0, 0), "f": (1, 0), "fbar": (0, 1), "pair": (1, 1)}


def _initial_ion_state(s: FieldScenario, label: str, boson_n: int = 0) -> np.ndarray:
    n_b, n_d = _FIELD_LABELS[label]
    v = encoding_isometry(s.basis)
    return v @ s.basis.state(n_b, n_d, boson_n)


def _ion_target(s: FieldScenario, label: str, boson_n: int = 0) -> int:
    psi = _initial_ion_state(s, label, boson_n)
    return int(np.argmax(np.abs(psi)))
