"""Simulator of interacting fermion, antifermion and boson field modes.

Covers the reduced three-mode model with time-dependent couplings, its
trapped-ion encoding on four internal levels plus a phonon mode, exact
time evolution, a finite-mode perturbative series, and a many-mode
generalization built from Gaussian wavepacket overlaps.
"""

from ._kernels import BACKEND
from .evolve import IntegratorConfig, TimeSeries, run_field, run_field_adaptive, run_ion
from .fock import FockBasis, StateVector, build_basis, ladder_operators, manymode_dimension
from .model import FieldScenario, MultimodeScenario, hamiltonian_field, hamiltonian_multimode
from .modes import CouplingProfile, Species, WavePacket, fit_effective_params

__all__ = [
    "BACKEND",
    "FockBasis",
    "StateVector",
    "build_basis",
    "ladder_operators",
    "manymode_dimension",
    "FieldScenario",
    "MultimodeScenario",
    "hamiltonian_field",
    "hamiltonian_multimode",
    "CouplingProfile",
    "Species",
    "WavePacket",
    "fit_effective_params",
    "IntegratorConfig",
    "TimeSeries",
    "run_field",
    "run_field_adaptive",
    "run_ion",
]

__version__ = "0.1.0"
