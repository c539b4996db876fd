"""Gaussian wavepacket modes and their time-dependent couplings.

A localized fermionic or antifermionic mode is described by a Gaussian
momentum-space envelope.  In the ultrarelativistic limit (dispersion
w = |p|, single momentum branch) the spatial envelope is again a Gaussian
that translates rigidly at unit speed, so every coupling functional that
appears in the interaction Hamiltonian reduces to a closed-form Gaussian
integral.  This module provides the closed forms, an independent adaptive
quadrature oracle, and the reduction of the couplings to the effective
parameter set (g1, g2, sigma_t, T, delta) used by the simulator.

Units: omega0 = 1 sets the energy scale; times are in 1/omega0, momenta
in omega0.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Species",
    "WavePacket",
    "SpacetimeEnvelope",
    "CouplingProfile",
    "ReductionError",
    "gaussian_overlap",
    "gaussian_overlap_quadrature",
    "coupling_self",
    "coupling_pair",
    "coupling_between",
    "fit_effective_params",
]


class ReductionError(RuntimeError):
    """The coupling profile cannot be reduced to the effective Gaussian form."""


class Species(enum.Enum):
    FERMION = "fermion"
    ANTIFERMION = "antifermion"


@dataclass(frozen=True)
class WavePacket:
    """Gaussian momentum-space envelope of an incoming mode.

    The amplitude (pi sigma_p^2)^(-1/4) exp(-(p - p0)^2 / (2 sigma_p^2))
    is L2-normalized.  The center momentum's sign encodes the direction of
    motion; |p0| >= 4 sigma_p keeps the wrong-sign momentum tail below
    1e-4 of the norm so the single-branch dispersion is valid.
    """

    center_momentum: float
    momentum_width: float
    center_position: float
    species: Species = Species.FERMION

    def __post_init__(self):
        if self.momentum_width <= 0:
            raise ValueError("momentum_width must be positive")
        if abs(self.center_momentum) < 4.0 * self.momentum_width:
            raise ValueError(
                "need |center_momentum| >= 4*momentum_width for a "
                "single-branch ultrarelativistic packet"
            )

    @property
    def direction(self) -> float:
        """Propagation direction, sign(center momentum)."""
        return 1.0 if self.center_momentum > 0 else -1.0

    @property
    def frequency(self) -> float:
        """Packet energy |p0| (ultrarelativistic dispersion)."""
        return abs(self.center_momentum)

    @property
    def spatial_width(self) -> float:
        """Width s = 1/sigma_p of the spatial Gaussian amplitude."""
        return 1.0 / self.momentum_width

    def momentum_amplitude(self, p):
        sp = self.momentum_width
        return (math.pi * sp**2) ** -0.25 * np.exp(
            -((p - self.center_momentum) ** 2) / (2.0 * sp**2)
        )

    def center_at(self, t: float) -> float:
        """Center of the spatial envelope at time t."""
        return self.center_position + self.direction * t

    @property
    def charge_sign(self) -> float:
        """Sign of the plane-wave phase exp(+-i(p x - w t)) carried in the field."""
        return 1.0 if self.species is Species.FERMION else -1.0


class SpacetimeEnvelope:
    """Spatial envelope of a packet: a rigidly translating Gaussian.

    The Fourier transform of the momentum Gaussian, on the single
    ultrarelativistic branch, is (sigma_p^2/pi)^(1/4)
    exp(-sigma_p^2 (x - x0 - v t)^2 / 2) with v = sign(p0); it stays
    L2-normalized in x at every t.
    """

    def __init__(self, packet: WavePacket):
        self.packet = packet

    def __call__(self, x, t):
        sp = self.packet.momentum_width
        c = self.packet.center_at(t)
        return (sp**2 / math.pi) ** 0.25 * np.exp(-(sp**2) * (np.asarray(x) - c) ** 2 / 2.0)


@dataclass(frozen=True)
class CouplingProfile:
    """Effective parameters of the reduced interaction Hamiltonian.

    g1 drives the always-on self-interaction, g2 the Gaussian pair
    creation/annihilation pulse of temporal width sigma_t centered at T/2,
    and delta = w_f + w_fbar - omega0 is the pair detuning.
    """

    g1: float
    g2: float
    sigma_t: float
    T: float
    delta: float
    omega0: float = 1.0
    k0: float = 0.0

    def __post_init__(self):
        if self.g1 < 0 or self.g2 < 0:
            raise ValueError("couplings g1, g2 must be non-negative")
        if self.sigma_t <= 0:
            raise ValueError("sigma_t must be positive")
        if self.T <= 0:
            raise ValueError("T must be positive")
        if self.omega0 <= 0:
            raise ValueError("omega0 must be positive")
        if abs(self.k0) > 0.1 * self.omega0:
            warnings.warn(
                "|k0| > 0.1*omega0: the slow-massive-boson reduction is "
                "questionable for this profile",
                stacklevel=3,
            )

    def pulse(self, t):
        """Pair-coupling envelope g2 exp(-(t - T/2)^2 / (2 sigma_t^2))."""
        return self.g2 * np.exp(-((np.asarray(t) - self.T / 2.0) ** 2) / (2.0 * self.sigma_t**2))


def gaussian_overlap(a: float, s1: float, b: float, s2: float, q: float) -> complex:
    """Closed form of int dx psi1*(x) psi2(x) exp(i q x).

    psi_j are L2-normalized Gaussian amplitudes of widths s_j centered at
    a and b.  The result has modulus <= 1.
    """
    if s1 <= 0 or s2 <= 0:
        raise ValueError("widths must be positive")
    ssum = s1**2 + s2**2
    amp = math.sqrt(2.0 * s1 * s2 / ssum)
    sep = math.exp(-((a - b) ** 2) / (2.0 * ssum))
    smear = math.exp(-(q**2) * (s1**2) * (s2**2) / (2.0 * ssum))
    mu = (a * s2**2 + b * s1**2) / ssum
    return amp * sep * smear * complex(math.cos(q * mu), math.sin(q * mu))


def _adaptive_simpson(f, lo: float, hi: float, tol: float, depth: int = 48) -> complex:
    """Recursive adaptive Simpson rule for a complex-valued integrand."""

    def simpson(x0, x2, f0, f1, f2):
        return (x2 - x0) / 6.0 * (f0 + 4.0 * f1 + f2)

    def recurse(x0, x2, f0, f1, f2, whole, eps, d):
        xm = 0.5 * (x0 + x2)
        xl = 0.5 * (x0 + xm)
        xr = 0.5 * (xm + x2)
        fl, fr = f(xl), f(xr)
        left = simpson(x0, xm, f0, fl, f1)
        right = simpson(xm, x2, f1, fr, f2)
        if d <= 0 or abs(left + right - whole) <= 15.0 * eps:
            return left + right + (left + right - whole) / 15.0
        return recurse(x0, xm, f0, fl, f1, left, eps / 2.0, d - 1) + recurse(
            xm, x2, f1, fr, f2, right, eps / 2.0, d - 1
        )

    mid = 0.5 * (lo + hi)
    f0, f1, f2 = f(lo), f(mid), f(hi)
    return recurse(lo, hi, f0, f1, f2, simpson(lo, hi, f0, f1, f2), tol, depth)


def gaussian_overlap_quadrature(
    a: float, s1: float, b: float, s2: float, q: float, tol: float = 1e-12
) -> complex:
    """Quadrature oracle for :func:`gaussian_overlap`.

    Adaptive Simpson over a window of +-12 standard deviations around the
    packet supports; intentionally independent of the closed form.
    """
    if s1 <= 0 or s2 <= 0:
        raise ValueError("widths must be positive")
    w = 12.0 * max(s1, s2)
    lo, hi = min(a, b) - w, max(a, b) + w

    n1 = (math.pi * s1**2) ** -0.25
    n2 = (math.pi * s2**2) ** -0.25

    def integrand(x):
        return (
            n1
            * n2
            * math.exp(-((x - a) ** 2) / (2 * s1**2) - ((x - b) ** 2) / (2 * s2**2))
            * complex(math.cos(q * x), math.sin(q * x))
        )

    # Split at the packet centers so a narrow bump cannot hide between the
    # initial Simpson sample points of a much wider window.
    cuts = sorted({lo, a, b, hi})
    return sum(
        _adaptive_simpson(integrand, x0, x1, tol / max(len(cuts) - 1, 1))
        for x0, x1 in zip(cuts[:-1], cuts[1:])
        if x1 > x0
    )


def coupling_between(
    packet_i: WavePacket,
    packet_j: WavePacket,
    k: float,
    omega: float,
    g: float,
    t: float,
) -> complex:
    """Generic coupling functional between two packet modes and a boson mode.

    Evaluates g * (int dx phi_i*(x,t) phi_j(x,t) exp(i k x)) * exp(-i w t)
    where phi = envelope * exp(+-i(p x - w_p t)) with + for fermionic and
    - for antifermionic packets.  Specializes to the self and pair
    couplings below.
    """
    chi_i, chi_j = packet_i.charge_sign, packet_j.charge_sign
    q = chi_j * packet_j.center_momentum - chi_i * packet_i.center_momentum + k
    phase_freq = chi_i * packet_i.frequency - chi_j * packet_j.frequency - omega
    overlap = gaussian_overlap(
        packet_i.center_at(t),
        packet_i.spatial_width,
        packet_j.center_at(t),
        packet_j.spatial_width,
        q,
    )
    return g * overlap * complex(math.cos(phase_freq * t), math.sin(phase_freq * t))


def coupling_self(packet: WavePacket, k0: float, omega0: float, g: float, t: float) -> complex:
    """Self-interaction coupling g (int dx |envelope|^2 e^{i k0 x}) e^{-i w0 t}.

    Its magnitude g exp(-k0^2 s^2 / 4) is time independent; rigid
    translation only drifts the phase by k0 (x0 + v t).
    """
    return coupling_between(packet, packet, k0, omega0, g, t)


def coupling_pair(
    packet_f: WavePacket,
    packet_fbar: WavePacket,
    k0: float,
    omega0: float,
    g: float,
    t: float,
) -> complex:
    """Pair creation/annihilation coupling between counter-propagating packets.

    The magnitude is a Gaussian window in t centered at the collision time
    t* = (x0_fbar - x0_f) / 2, of std sigma_t = s/sqrt(2) for equal
    spatial widths s; the phase carries exp(i (w_f + w_fbar - w0) t).
    """
    if packet_f.direction * packet_fbar.direction > 0:
        raise ValueError("pair coupling requires counter-propagating packets")
    if packet_f.species is not Species.FERMION or packet_fbar.species is not Species.ANTIFERMION:
        raise ValueError("expected a (fermion, antifermion) packet pair")
    return coupling_between(packet_f, packet_fbar, k0, omega0, g, t)


def fit_effective_params(
    packet_f: WavePacket,
    packet_fbar: WavePacket,
    k0: float,
    omega0: float,
    g: float,
) -> CouplingProfile:
    """Reduce the exact packet couplings to an effective CouplingProfile.

    g1 is the (time-independent) self-coupling magnitude, g2 the peak pair
    coupling, sigma_t and T come from a least-squares Gaussian fit of the
    pair-coupling window, and delta = w_f + w_fbar - omega0.

    Raises ReductionError when the window is not Gaussian to within a fit
    residual of 1e-4.
    """
    if g == 0:
        return CouplingProfile(0.0, 0.0, 1.0, 1.0, _delta(packet_f, packet_fbar, omega0), omega0, k0)
    g1 = abs(coupling_self(packet_f, k0, omega0, g, 0.0))
    v_f, v_fb = packet_f.direction, packet_fbar.direction
    t_star = (packet_fbar.center_position - packet_f.center_position) / (v_f - v_fb)
    if t_star <= 0:
        raise ValueError("packets are not approaching each other (collision in the past)")
    g2 = abs(coupling_pair(packet_f, packet_fbar, k0, omega0, g, t_star))

    # Fit log|pair coupling| to a parabola around the collision time.
    sigma_guess = 0.5 * math.hypot(packet_f.spatial_width, packet_fbar.spatial_width)
    ts = np.linspace(t_star - 2.0 * sigma_guess, t_star + 2.0 * sigma_guess, 41)
    mags = np.array([abs(coupling_pair(packet_f, packet_fbar, k0, omega0, g, t)) for t in ts])
    coeffs = np.polyfit(ts - t_star, np.log(mags), 2)
    residual = np.max(np.abs(np.polyval(coeffs, ts - t_star) - np.log(mags)))
    if residual > 1e-4 or coeffs[0] >= 0:
        raise ReductionError(
            f"pair-coupling window is not Gaussian (fit residual {residual:.2e})"
        )
    sigma_t = math.sqrt(-1.0 / (2.0 * coeffs[0]))
    return CouplingProfile(
        g1=g1,
        g2=g2,
        sigma_t=sigma_t,
        T=2.0 * t_star,
        delta=_delta(packet_f, packet_fbar, omega0),
        omega0=omega0,
        k0=k0,
    )


def _delta(packet_f: WavePacket, packet_fbar: WavePacket, omega0: float) -> float:
    return packet_f.frequency + packet_fbar.frequency - omega0
