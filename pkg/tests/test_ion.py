"""Ion encoding: isometry, conjugation identity, spectator construction."""

import numpy as np
import pytest

from fermibos.fock import build_basis
from fermibos.ion import (
    encoding_isometry,
    hamiltonian_ion,
    ion_monomials,
    sideband_line_rotation,
    spectator_equivalence,
    spectator_monomials,
)
from fermibos.model import FieldScenario, hamiltonian_field
from fermibos.modes import CouplingProfile


def scenario(n_max=5, **kw):
    defaults = dict(g1=0.05, g2=0.2, sigma_t=3.0, T=30.0, delta=0.4)
    defaults.update(kw)
    return FieldScenario(CouplingProfile(**defaults), build_basis(n_max))


class TestEncodingIsometry:
    def test_unitary_permutation(self):
        v = encoding_isometry(build_basis(3))
        assert np.allclose(v @ v.conj().T, np.eye(16))
        assert np.array_equal(np.abs(v), np.abs(v) ** 2)  # entries 0 or 1

    def test_level_assignment(self):
        basis = build_basis(0)
        v = encoding_isometry(basis)
        # vac -> level 1, f -> level 2, fbar slot -> level 3, pair -> level 4
        assert np.argmax(np.abs(v @ basis.state(0, 0, 0))) == 0
        assert np.argmax(np.abs(v @ basis.state(1, 0, 0))) == 1
        assert np.argmax(np.abs(v @ basis.state(0, 1, 0))) == 2
        assert np.argmax(np.abs(v @ basis.state(1, 1, 0))) == 3


class TestConjugationIdentity:
    def test_exact_at_random_times_and_couplings(self):
        rng = np.random.default_rng(21)
        for _ in range(5):
            s = scenario(
                g1=float(rng.uniform(0, 0.3)),
                g2=float(rng.uniform(0, 0.5)),
                sigma_t=float(rng.uniform(1, 5)),
                delta=float(rng.uniform(-1, 1)),
            )
            v = encoding_isometry(s.basis)
            for t in rng.uniform(0.0, 30.0, size=20):
                diff = v @ hamiltonian_field(s, float(t)) @ v.conj().T - hamiltonian_ion(
                    s, float(t)
                )
                assert np.max(np.abs(diff)) < 1e-12

    def test_holds_with_rotating_only(self):
        s = scenario()
        s_rot = FieldScenario(s.profile, s.basis, rotating_only=True)
        v = encoding_isometry(s.basis)
        diff = v @ hamiltonian_field(s_rot, 12.0) @ v.conj().T - hamiltonian_ion(s_rot, 12.0)
        assert np.max(np.abs(diff)) < 1e-12

    def test_ion_hamiltonian_hermitian(self):
        s = scenario()
        h = hamiltonian_ion(s, 4.2)
        assert np.allclose(h, h.conj().T)


class TestIonMonomials:
    def test_line_count(self):
        s = scenario()
        assert len(ion_monomials(s)) == 4
        s_rot = FieldScenario(s.profile, s.basis, rotating_only=True)
        assert len(ion_monomials(s_rot)) == 3


class TestSidebandLineRotation:
    def test_carrier_rotation_produces_level_difference(self):
        generator, rotation, target = sideband_line_rotation()
        assert np.allclose(generator, generator.conj().T)
        assert np.allclose(rotation @ rotation.conj().T, np.eye(4))
        assert np.allclose(rotation @ generator @ rotation.conj().T, target)


class TestSpectator:
    def test_monomials_double_the_space(self):
        s = scenario(n_max=2)
        terms = spectator_monomials(s)
        assert terms[0].matrix.shape == (2 * s.basis.dimension,) * 2
        assert any(m.name == "spectator_displacement" for m in terms)

    def test_rejects_normal_ordered_model(self):
        s = scenario(n_max=2)
        s_no = FieldScenario(s.profile, s.basis, normal_order_self=True)
        with pytest.raises(ValueError):
            spectator_monomials(s_no)

    def test_explicit_hamiltonian_hermitian(self):
        s = scenario(n_max=2)
        h = hamiltonian_ion(s, 3.3, spectator_explicit=True)
        assert h.shape == (2 * s.basis.dimension,) * 2
        assert np.allclose(h, h.conj().T)

    def test_equivalence_both_eigenstates(self):
        s = scenario(n_max=6, g1=0.05, g2=0.2)
        t_grid = np.linspace(0.0, 8.0, 40)
        for sign in (1, -1):
            rep = spectator_equivalence(s, t_grid, initial_label="pair", spectator_sign=sign)
            assert rep.passed
            assert rep.max_observable_diff < 1e-8
            assert rep.max_leakage < 1e-12

    def test_rejects_bad_sign_and_grid(self):
        s = scenario(n_max=2)
        with pytest.raises(ValueError):
            spectator_equivalence(s, np.linspace(0, 4, 10), spectator_sign=0)
        with pytest.raises(ValueError):
            spectator_equivalence(s, [1.0])


class TestDynamicsEquivalence:
    def test_field_and_ion_paths_agree(self):
        from fermibos.evolve import IntegratorConfig, run_field, run_ion

        s = scenario(n_max=6, g1=0.02, g2=0.15, delta=0.0)
        cfg = IntegratorConfig(t_end=10.0)
        a = run_field(s, "pair", cfg)
        b = run_ion(s, "pair", cfg)
        assert np.max(np.abs(a.survival - b.survival)) < 1e-10
        assert np.max(np.abs(a.mean_boson - b.mean_boson)) < 1e-10
        for key in a.populations:
            assert np.max(np.abs(a.populations[key] - b.populations[key])) < 1e-10
