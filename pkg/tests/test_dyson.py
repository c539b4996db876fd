"""Perturbative transition amplitudes and their comparison with exact evolution."""

import math

import numpy as np
import pytest

from fermibos.dyson import (
    dyson_amplitude,
    dyson_terms,
    dyson_trajectory,
    dyson_vs_exact_report,
)
from fermibos.fock import build_basis
from fermibos.model import FieldScenario
from fermibos.modes import CouplingProfile


def scenario(g1=0.0, g2=0.01, sigma_t=3.0, n_max=6, delta=0.0):
    p = CouplingProfile(g1=g1, g2=g2, sigma_t=sigma_t, T=30.0, delta=delta)
    return FieldScenario(p, build_basis(n_max))


def pulse_area(p):
    return p.g2 * math.sqrt(2.0 * math.pi) * p.sigma_t


class TestAmplitudes:
    def test_order_zero_is_identity(self):
        s = scenario()
        i0 = s.basis.index(1, 1, 0)
        assert dyson_amplitude(i0, i0, s, 0, 30.0) == 1.0
        assert dyson_amplitude(i0, s.basis.index(0, 0, 1), s, 0, 30.0) == 0.0

    def test_order_one_matches_pulse_area(self):
        # pair -> vacuum + one boson at zero detuning: the only connecting
        # vertex integrates the real Gaussian pulse, |A| = g2 sqrt(2 pi) sigma_t.
        s = scenario()
        amp = dyson_amplitude(
            s.basis.index(1, 1, 0), s.basis.index(0, 0, 1), s, 1, 30.0
        )
        # the [0, T] window clips 5-sigma tails worth ~6e-7 of the area
        assert abs(amp) == pytest.approx(pulse_area(s.profile), rel=1e-6)
        assert amp.real == pytest.approx(0.0, abs=1e-12)  # -i times a real integral

    def test_order_two_diagonal_matches_cosine_expansion(self):
        s = scenario()
        i0 = s.basis.index(1, 1, 0)
        amp = dyson_amplitude(i0, i0, s, 2, 30.0)
        area = pulse_area(s.profile)
        assert amp == pytest.approx(1.0 - area**2 / 2.0, abs=1e-8)

    def test_orders_above_two_rejected(self):
        s = scenario()
        with pytest.raises(ValueError):
            dyson_amplitude(0, 0, s, 3, 30.0)

    def test_terms_carry_vertex_names(self):
        s = scenario()
        terms = dyson_terms(s.basis.index(1, 1, 0), s.basis.index(0, 0, 1), s, 1, 30.0)
        assert len(terms) == 1
        assert terms[0].order == 1
        assert len(terms[0].vertices) == 1


class TestTrajectory:
    def test_consistent_with_pointwise_amplitude(self):
        s = scenario(g1=0.02)
        i0 = s.basis.index(1, 1, 0)
        times, amps = dyson_trajectory(i0, s, 30.0, 400)
        for f in (i0, s.basis.index(0, 0, 1), s.basis.index(1, 1, 1)):
            ref = dyson_amplitude(i0, f, s, 2, 30.0, n_panels=400)
            assert abs(amps[-1, f] - ref) < 1e-12

    def test_order_zero_is_constant(self):
        s = scenario()
        i0 = s.basis.index(1, 1, 0)
        _, amps = dyson_trajectory(i0, s, 30.0, 50, order=0)
        assert np.all(amps[:, i0] == 1.0)


class TestReport:
    def all_pairs(self, s, i0):
        finals = [
            s.basis.index(nb, nd, n) for nb in (0, 1) for nd in (0, 1) for n in (0, 1)
        ]
        return [(i0, f) for f in finals]

    def test_zero_coupling_residuals_vanish(self):
        s = scenario(g2=0.0)
        i0 = s.basis.index(1, 1, 0)
        rep = dyson_vs_exact_report(s, self.all_pairs(s, i0))
        assert rep.all_within
        assert all(r.residual < 1e-12 for r in rep.rows)

    def test_weak_coupling_within_cubic_budget(self):
        s = scenario(g2=0.005)
        i0 = s.basis.index(1, 1, 0)
        rep = dyson_vs_exact_report(s, self.all_pairs(s, i0))
        assert rep.perturbative
        assert rep.all_within

    def test_wide_pulse_order_three_tail_slightly_exceeds_budget(self):
        # For g2 = 0.01 with a sigma_t = 3 pulse the first omitted term of
        # the pair -> vacuum+boson probability is area^4/3 ~ 1.07e-5, just
        # above the cubic budget 10 g^3 = 1e-5.  The report must say so
        # rather than paper over it.
        s = scenario(g2=0.01)
        i0 = s.basis.index(1, 1, 0)
        rep = dyson_vs_exact_report(s, self.all_pairs(s, i0))
        assert rep.perturbative
        assert not rep.all_within
        worst = max(rep.rows, key=lambda r: r.residual)
        assert worst.final == s.basis.index(0, 0, 1)
        assert worst.threshold < worst.residual < 2.0 * worst.threshold

    def test_strong_coupling_flagged_nonperturbative(self):
        p = CouplingProfile(g1=0.1, g2=1.0, sigma_t=4.0, T=30.0, delta=0.0)
        s = FieldScenario(p, build_basis(16))
        i0 = s.basis.index(1, 1, 0)
        rep = dyson_vs_exact_report(s, [(i0, s.basis.index(0, 0, 1))])
        assert not rep.perturbative
