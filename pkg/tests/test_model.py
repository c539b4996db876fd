"""Hamiltonian assembly: three-mode model, vertex split, many-mode model."""

import numpy as np
import pytest

from fermibos.fock import build_basis, ladder_operators, parity_operator
from fermibos.model import (
    FieldScenario,
    Monomial,
    MultimodeScenario,
    field_monomials,
    hamiltonian_field,
    hamiltonian_multimode,
    multimode_monomials,
    multimode_parity,
    vertex_monomials,
)
from fermibos.modes import CouplingProfile, Species, WavePacket, fit_effective_params

SIGMA_P = 0.23570226039551587


def default_scenario(n_max=5, **kw):
    p = CouplingProfile(g1=0.1, g2=0.3, sigma_t=3.0, T=30.0, delta=0.5, **kw)
    return FieldScenario(p, build_basis(n_max))


class TestFieldHamiltonian:
    def test_hermitian_at_random_times(self):
        s = default_scenario()
        rng = np.random.default_rng(3)
        for t in rng.uniform(0.0, 30.0, size=10):
            h = hamiltonian_field(s, float(t))
            assert np.allclose(h, h.conj().T)

    def test_commutes_with_parity(self):
        s = default_scenario()
        p = parity_operator(s.basis)
        for t in (0.0, 7.3, 15.0):
            h = hamiltonian_field(s, t)
            assert np.allclose(h @ p - p @ h, 0.0)

    def test_monomial_count_and_rotating_toggle(self):
        s = default_scenario()
        assert len(field_monomials(s)) == 3
        s_rot = FieldScenario(s.profile, s.basis, rotating_only=True)
        assert len(field_monomials(s_rot)) == 2

    def test_rotating_only_drops_counter_rotating_term(self):
        s = default_scenario()
        s_rot = FieldScenario(s.profile, s.basis, rotating_only=True)
        ops = ladder_operators(s.basis)
        t = 14.0
        diff = hamiltonian_field(s, t) - hamiltonian_field(s_rot, t)
        coeff = s.profile.pulse(t) * np.exp(-1j * (2.0 + s.profile.delta) * t)
        x = coeff * (ops.d_in @ ops.b_in @ ops.a)
        assert np.allclose(diff, x + x.conj().T)

    def test_antifermion_annihilated_by_literal_self_term(self):
        # (b^dag b + d d^dag) kills the single-antifermion sector, so the
        # full Hamiltonian maps |fbar, 0> to zero; the normal-ordered
        # variant (b^dag b - d^dag d) does not.
        s = default_scenario()
        psi = s.basis.state(0, 1, 0)
        assert np.allclose(hamiltonian_field(s, 2.0) @ psi, 0.0)
        s_no = FieldScenario(s.profile, s.basis, normal_order_self=True)
        assert np.linalg.norm(hamiltonian_field(s_no, 2.0) @ psi) > 0.01

    def test_vertex_monomials_resum_to_hamiltonian(self):
        s = default_scenario()
        for t in (0.0, 9.1, 15.0, 22.4):
            h = sum(complex(m.coefficient(t)) * m.matrix for m in vertex_monomials(s))
            assert np.allclose(h, hamiltonian_field(s, t), atol=1e-14)

    def test_vertex_count(self):
        s = default_scenario()
        assert len(vertex_monomials(s)) == 8
        s_rot = FieldScenario(s.profile, s.basis, rotating_only=True)
        assert len(vertex_monomials(s_rot)) == 6


class TestMonomial:
    def test_conjugate(self):
        m = Monomial("x", np.array([[0.0, 1.0j], [0.0, 0.0]]), lambda t: 2.0j * t)
        mc = m.conjugate()
        assert mc.name == "x_dag"
        assert np.allclose(mc.matrix, m.matrix.conj().T)
        assert mc.coefficient(3.0) == pytest.approx(-6.0j)


def symmetric_packets():
    f = WavePacket(2.0, SIGMA_P, -15.0, Species.FERMION)
    fbar = WavePacket(-2.0, SIGMA_P, 15.0, Species.ANTIFERMION)
    return f, fbar


class TestMultimode:
    def test_dimension(self):
        f, fbar = symmetric_packets()
        s = MultimodeScenario((f, fbar), ((0.0, 1.0), (0.1, 1.2)), 0.05, (4, 2))
        assert s.dimension == 4 * 5 * 3

    def test_validation(self):
        f, fbar = symmetric_packets()
        with pytest.raises(ValueError):
            MultimodeScenario((f, fbar), ((0.0, 1.0),), 0.05, (4, 4))
        with pytest.raises(ValueError):
            MultimodeScenario((f, fbar), (), 0.05, 4)
        with pytest.raises(ValueError):
            MultimodeScenario((f, fbar), ((0.0, 1.0),), 0.05, 2**15)

    def test_hermitian_and_parity_commuting(self):
        f, fbar = symmetric_packets()
        s = MultimodeScenario((f, fbar), ((0.0, 1.0), (0.05, 1.2)), 0.05, (3, 2))
        par = multimode_parity(s)
        for t in (0.0, 14.5, 15.0):
            h = hamiltonian_multimode(s, t)
            assert np.allclose(h, h.conj().T)
            assert np.allclose(h @ par - par @ h, 0.0)

    def test_reduces_to_three_mode_model(self):
        # One boson mode and a symmetric packet pair: the exact-overlap
        # Hamiltonian must coincide entrywise with the reduced model built
        # from the fitted effective parameters.
        f, fbar = symmetric_packets()
        prof = fit_effective_params(f, fbar, 0.0, 1.0, 0.21)
        basis = build_basis(5)
        fs = FieldScenario(prof, basis)
        mm = MultimodeScenario((f, fbar), ((0.0, 1.0),), 0.21, 5)
        for t in (3.0, 14.2, 15.0, 21.7):
            hf = hamiltonian_field(fs, t)
            hmm = hamiltonian_multimode(mm, t)
            assert np.max(np.abs(hf - hmm)) < 1e-12

    def test_monomial_count(self):
        f, fbar = symmetric_packets()
        s = MultimodeScenario((f, fbar), ((0.0, 1.0), (0.05, 1.2)), 0.05, 2)
        assert len(multimode_monomials(s)) == 2 * 2 * 2  # modes x packets^2

    def test_coefficients_vectorize(self):
        f, fbar = symmetric_packets()
        s = MultimodeScenario((f, fbar), ((0.0, 1.0),), 0.05, 2)
        m = multimode_monomials(s)[0]
        ts = np.array([1.0, 15.0, 20.0])
        vec = m.coefficient(ts)
        assert vec.shape == (3,)
        assert vec[1] == pytest.approx(complex(m.coefficient(15.0)))
