"""Counting statistics of heat transferred between a hot and a cold bath.

Heat is counted positive when it flows from bath H to bath C; both baths sit
at zero chemical potential. The cumulant generating function per unit time is
the Levitov-Lesovik integral over the transport window, and its
Maxwell-Boltzmann limit is the ballistic formula.
"""

from dataclasses import dataclass
import math
import warnings

import numpy as np
from scipy import integrate
from scipy.special import expit

EPSREL = 1e-9
EPSABS = 0.0
QUAD_LIMIT = 500
WEAK_COUPLING_RATIO = 0.2

__all__ = [
    "TransportChannel",
    "CountingStatistics",
    "MarkovRelaxation",
    "MarkovTransport",
    "transmission_fermi",
    "transmission_bose",
    "fermi_channel",
    "bose_channel",
    "bose_band_channel",
    "scgf",
    "scgf_ballistic",
    "current_and_variance",
    "ballistic_current_and_variance",
    "markov_relaxation",
    "markov_transport",
    "WeakCouplingWarning",
]


class WeakCouplingWarning(UserWarning):
    """Coupling is not small compared with the thermal energy."""


def transmission_fermi(eps0, Gamma_H, Gamma_C):
    """Lorentzian transmission ``G_H G_C / ((w - eps0)^2 + (G_H + G_C)^2 / 4)`` of one level."""
    if not (Gamma_H > 0 and Gamma_C > 0):
        raise ValueError("coupling widths must be positive")
    g2 = (Gamma_H + Gamma_C) ** 2 / 4

    def T(w):
        return Gamma_H * Gamma_C / ((np.asarray(w) - eps0) ** 2 + g2)

    return T


def transmission_bose(omega0, gamma_H, gamma_C):
    """Transmission of one oscillator between two Ohmic baths ``J_a(w) = gamma_a w``."""
    if not (gamma_H > 0 and gamma_C > 0):
        raise ValueError("coupling slopes must be positive")

    def T(w):
        w = np.asarray(w, dtype=np.float64)
        JH, JC = gamma_H * w, gamma_C * w
        den = (w ** 2 - omega0 ** 2) ** 2 + w ** 2 * (JH + JC) ** 2
        with np.errstate(invalid="ignore", divide="ignore"):
            out = 4 * w ** 2 * JH * JC / den
        return np.where(den > 0, out, 0.0)

    return T


@dataclass(frozen=True)
class TransportChannel:
    """Two-terminal channel with transmission ``T`` on ``[w_min, w_max]``.

    ``statistics`` is ``"fermi"`` or ``"bose"``; ``peaks`` lists points where
    the integrand is sharply structured (passed to the quadrature).
    """

    statistics: str
    transmission: object
    w_min: float
    w_max: float
    beta_H: float
    beta_C: float
    peaks: tuple = ()

    def __post_init__(self):
        if self.statistics not in ("fermi", "bose"):
            raise ValueError(f"statistics must be 'fermi' or 'bose', got {self.statistics!r}")
        if not self.w_min < self.w_max:
            raise ValueError(f"empty window [{self.w_min}, {self.w_max}]")
        if self.statistics == "bose" and self.w_min < 0:
            raise ValueError("bosonic window must start at a non-negative frequency")
        if not (self.beta_H > 0 and self.beta_C > 0):
            raise ValueError("inverse temperatures must be positive")
        grid = np.linspace(self.w_min, self.w_max, 257)
        Tmax = float(np.max(self.transmission(grid)))
        if Tmax > 1 + 1e-9:
            raise ValueError(f"transmission exceeds 1 (max {Tmax:.6g}) on the window")

    @property
    def sign(self):
        return 1.0 if self.statistics == "fermi" else -1.0

    def occupation(self, w, beta):
        """``g = 1 / (exp(beta w) +- 1)``."""
        w = np.asarray(w, dtype=np.float64)
        if self.statistics == "fermi":
            return expit(-beta * w)
        with np.errstate(divide="ignore"):
            return 1.0 / np.expm1(beta * w)

    def _points(self):
        return [p for p in self.peaks if self.w_min < p < self.w_max] or None


def fermi_channel(eps0, Gamma_H, Gamma_C, W, beta_H, beta_C):
    """Single level on the window ``[eps0 - W/2, eps0 + W/2]``."""
    return TransportChannel("fermi", transmission_fermi(eps0, Gamma_H, Gamma_C),
                            eps0 - W / 2, eps0 + W / 2, beta_H, beta_C, (eps0,))


def bose_channel(omega0, gamma_H, gamma_C, omega_c, beta_H, beta_C):
    """Single oscillator on the window ``[0, omega_c]``."""
    return TransportChannel("bose", transmission_bose(omega0, gamma_H, gamma_C),
                            0.0, omega_c, beta_H, beta_C, (omega0,))


def bose_band_channel(omega0, gamma_H, gamma_C, W, beta_H, beta_C):
    """Single oscillator on the window ``[omega0 - W/2, omega0 + W/2]``."""
    if omega0 - W / 2 < 0:
        raise ValueError(f"window [omega0 - W/2, omega0 + W/2] must not reach below zero (W={W})")
    return TransportChannel("bose", transmission_bose(omega0, gamma_H, gamma_C),
                            omega0 - W / 2, omega0 + W / 2, beta_H, beta_C, (omega0,))


def _quad(f, ch):
    val, err = integrate.quad(f, ch.w_min, ch.w_max, epsabs=EPSABS, epsrel=EPSREL,
                              limit=QUAD_LIMIT, points=ch._points())
    return val / (2 * math.pi)


def _weights(ch, w):
    """``a = g_H h_C`` and ``b = g_C h_H`` with ``h = 1 -+ g``."""
    gH = ch.occupation(w, ch.beta_H)
    gC = ch.occupation(w, ch.beta_C)
    s = ch.sign
    return gH * (1 - s * gC), gC * (1 - s * gH)


def scgf(channel, lam):
    """Levitov-Lesovik cumulant generating function per unit time at counting field ``lam``."""
    ch = channel
    s = ch.sign
    if lam == 0:
        return 0.0

    def f(w):
        if w == 0:
            return 0.0
        a, b = _weights(ch, w)
        A = ch.transmission(w) * (np.expm1(lam * w) * a + np.expm1(-lam * w) * b)
        arg = 1 + s * A
        if not arg > 0:
            raise FloatingPointError(
                f"log argument {arg:.3e} <= 0 at w={w:.9g}; counting field {lam} is outside the "
                "convergence strip of the bosonic generating function"
            )
        return s * math.log1p(s * A)

    return _quad(f, ch)


def scgf_ballistic(channel, lam):
    """Maxwell-Boltzmann limit, shifted so that it vanishes at ``lam = 0``."""
    ch = channel
    if lam == 0:
        return 0.0

    def f(w):
        return ch.transmission(w) * (math.exp(-ch.beta_H * w) * math.expm1(lam * w)
                                     + math.exp(-ch.beta_C * w) * math.expm1(-lam * w))

    return _quad(f, ch)


@dataclass(frozen=True)
class CountingStatistics:
    """Mean heat current and its variance (per unit time), with the generating function."""

    J_Q: float
    var_JQ: float
    channel: TransportChannel
    ballistic: bool = False

    def chi(self, lam):
        return scgf_ballistic(self.channel, lam) if self.ballistic else scgf(self.channel, lam)


def current_and_variance(channel):
    """First two derivatives of the generating function at zero counting field.

    With ``A(lam) = T [(e^{lam w} - 1) a + (e^{-lam w} - 1) b]`` the derivatives
    at zero are ``A' = T w (a - b)`` and ``A'' = T w^2 (a + b)``, so
    ``J = int A'`` and ``Var = int A'' -+ A'^2`` over ``dw / 2 pi``.
    """
    ch = channel
    s = ch.sign

    def first(w):
        if w == 0:
            return 0.0
        a, b = _weights(ch, w)
        return ch.transmission(w) * w * (a - b)

    def second(w):
        if w == 0:
            return 0.0
        a, b = _weights(ch, w)
        T = ch.transmission(w)
        return T * w * w * (a + b) - s * (T * w * (a - b)) ** 2

    return CountingStatistics(_quad(first, ch), _quad(second, ch), ch)


def ballistic_current_and_variance(channel):
    """Current and variance of the Maxwell-Boltzmann limit."""
    ch = channel

    def first(w):
        return ch.transmission(w) * w * (math.exp(-ch.beta_H * w) - math.exp(-ch.beta_C * w))

    def second(w):
        return ch.transmission(w) * w * w * (math.exp(-ch.beta_H * w) + math.exp(-ch.beta_C * w))

    return CountingStatistics(_quad(first, ch), _quad(second, ch), ch, ballistic=True)


def _warn_weak(width, beta, what):
    if width * beta > WEAK_COUPLING_RATIO:
        warnings.warn(
            f"{what} = {width:.3g} exceeds {WEAK_COUPLING_RATIO} k_B T; the Markovian "
            "reference assumes weak coupling", WeakCouplingWarning, stacklevel=3,
        )


@dataclass(frozen=True)
class MarkovRelaxation:
    """Rate-equation relaxation of one level against one fermionic bath."""

    eps0: float
    Gamma: float
    beta: float
    mu: float
    n_initial: float

    @property
    def n_eq(self):
        return float(expit(-self.beta * (self.eps0 - self.mu)))

    def occupation(self, t):
        t = np.asarray(t, dtype=np.float64)
        return self.n_eq + (self.n_initial - self.n_eq) * np.exp(-self.Gamma * t)

    def heat(self, t):
        """Heat drawn from the bath, ``(eps0 - mu) Delta N_0``."""
        return (self.eps0 - self.mu) * (self.occupation(t) - self.n_initial)

    def entropy_flow(self, t):
        return -self.beta * self.heat(t)

    def sigma(self, t):
        from .fermion_gaussian import binary_entropy
        dS = binary_entropy(self.occupation(t)) - binary_entropy(self.n_initial)
        return dS + self.entropy_flow(t)


def markov_relaxation(spec, n_initial=0.0):
    """Rate-equation reference for a single fermionic bath described by ``spec``."""
    _warn_weak(spec.Gamma, spec.beta, "Gamma")
    return MarkovRelaxation(float(spec.eps0), float(spec.Gamma), float(spec.beta),
                            float(spec.mu), float(n_initial))


@dataclass(frozen=True)
class MarkovTransport:
    """Sequential-tunnelling heat current and entropy-production rate."""

    J_Q: float
    sigma_rate: float

    def sigma(self, t):
        return self.sigma_rate * np.asarray(t, dtype=np.float64)


def markov_transport(statistics, energy, rate_H, rate_C, beta_H, beta_C):
    """``J = e rH rC / (rH + rC) [g_H(e) - g_C(e)]`` and ``sigma_rate = (beta_C - beta_H) J``.

    For fermions the rates are the widths ``Gamma_a``; for bosons pass
    ``gamma_a * omega0``.
    """
    if statistics == "fermi":
        gH, gC = float(expit(-beta_H * energy)), float(expit(-beta_C * energy))
    elif statistics == "bose":
        gH, gC = 1 / math.expm1(beta_H * energy), 1 / math.expm1(beta_C * energy)
    else:
        raise ValueError(f"statistics must be 'fermi' or 'bose', got {statistics!r}")
    _warn_weak(max(rate_H, rate_C), max(beta_H, beta_C), "coupling rate")
    J = energy * rate_H * rate_C / (rate_H + rate_C) * (gH - gC)
    return MarkovTransport(J, (beta_C - beta_H) * J)
