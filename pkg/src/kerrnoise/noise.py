"""Photon-current noise, Fano factor and the noise-current scaling exponent.

The zero-frequency noise is always computed from the exact envelope,
S = J^2 int_0^inf z(t)^2 exp(-2 gamma t) dt.  The closed forms below are
asymptotes kept for comparison only.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np
from scipy import optimize

from .decoherence import phase_variance_d
from .errors import DomainError
from .params import SystemParams, current, j_star, kappa
from .quadrature import fourier_cosine, integrate

S_CUTOFF = 1e-16
GAMMA_STEP_DECADES = 0.005


def s0_spectrum(p: SystemParams, omega):
    """Non-interacting noise spectrum 8 F^2 gl^2 gr^2 / (gamma (omega^2 + 4 gamma^2))."""
    w = np.asarray(omega, dtype=float)
    g = p.gamma
    return 8.0 * p.f_occ ** 2 * p.gamma_l ** 2 * p.gamma_r ** 2 / (g * (w * w + 4.0 * g * g))


def _noise_kernel(p: SystemParams):
    g = p.gamma
    return lambda t: np.exp(-2.0 * phase_variance_d(p, t) - 2.0 * g * t)


def _noise_t_max(p: SystemParams) -> float:
    g = p.gamma
    target = -math.log(S_CUTOFF)

    def excess(t):
        return 2.0 * float(phase_variance_d(p, t)) + 2.0 * g * t - target

    return optimize.brentq(excess, 0.0, target / (2.0 * g), xtol=1e-15 / g, rtol=1e-12)


def _noise_scale(p: SystemParams) -> float:
    return 1.0 / max(p.gamma, kappa(p))


def s_zero_freq(p: SystemParams, rtol: float = 1e-10) -> float:
    """Zero-frequency noise by adaptive quadrature over the full envelope."""
    j = current(p)
    if j == 0:
        return 0.0
    res = integrate(_noise_kernel(p), 0.0, _noise_t_max(p), h0=_noise_scale(p),
                    order=16, rtol=rtol)
    return j * j * float(res.value)


def noise_spectrum(p: SystemParams, omega, rtol: float = 1e-8) -> np.ndarray:
    """Finite-frequency noise: Fourier transform of z^2(t) J^2 exp(-2 gamma |t|)/2."""
    j = current(p)
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    if j == 0:
        return np.zeros_like(omega)
    res = fourier_cosine(_noise_kernel(p), omega, _noise_t_max(p),
                         scale=_noise_scale(p), rtol=rtol,
                         atol=1e-6 * rtol / max(p.gamma, kappa(p)))
    return j * j * np.asarray(res.value)


# --- asymptotes -------------------------------------------------------------------

class ClosedForm(NamedTuple):
    value: float
    kappa_over_gamma: float  # the formula is meant for values >> 1


def s_closed_form(p: SystemParams) -> ClosedForm:
    """sqrt(pi/2) (gamma_r/eps) J / sqrt(1 + 2 gamma_r/J), valid for kappa >> gamma."""
    if p.epsilon == 0:
        raise DomainError("closed-form noise needs eps != 0")
    j = current(p)
    gr = p.gamma_r
    val = 0.0 if j == 0 else math.sqrt(math.pi / 2) * gr / abs(p.epsilon) * j / math.sqrt(1.0 + 2.0 * gr / j)
    return ClosedForm(val, kappa(p) / p.gamma)


def s_therm(p: SystemParams) -> float:
    return current(p) ** 2 / (2.0 * p.gamma)


def s_shot(p: SystemParams) -> float:
    """Linear shot-noise limit sqrt(pi/2) (gamma_r/|eps|) J."""
    return math.sqrt(math.pi / 2) * p.gamma_r / abs(p.epsilon) * current(p)


def s_shot_fractional(p: SystemParams) -> float:
    """J^{3/2} law sqrt(pi gamma_r)/(2|eps|) J^{3/2} for gamma >> J >> J*."""
    return math.sqrt(math.pi * p.gamma_r) / (2.0 * abs(p.epsilon)) * current(p) ** 1.5


def fano(p: SystemParams) -> float:
    j = current(p)
    if j <= 0:
        raise DomainError("Fano factor is undefined at zero current")
    return s_zero_freq(p) / j


def fano_therm(p: SystemParams) -> float:
    return current(p) / (2.0 * p.gamma)


def fano_shot(p: SystemParams) -> float:
    return math.sqrt(math.pi / 8) * p.gamma / abs(p.epsilon)


def fano_shot_fractional(p: SystemParams) -> float:
    return math.sqrt(math.pi / 8 * p.gamma * current(p) / p.epsilon ** 2)


def gamma_exponent(p: SystemParams, h_decades: float = GAMMA_STEP_DECADES) -> float:
    """Local exponent d ln S / d ln J by a central difference in ln J.

    J is proportional to F at fixed couplings, so the current is varied
    through the occupation.
    """
    if current(p) <= 0:
        raise DomainError("scaling exponent needs J > 0")
    h = h_decades * math.log(10.0)
    up = s_zero_freq(p.replace(f_occ=p.f_occ * math.exp(h)))
    dn = s_zero_freq(p.replace(f_occ=p.f_occ * math.exp(-h)))
    return (math.log(up) - math.log(dn)) / (2.0 * h)


def classify_regime(p: SystemParams, guard: float = 10.0) -> str:
    """Noise regime by the boundaries of the weak/strong interaction table.

    ``a << b`` is read as ``a <= b/guard``.  Interactions between the weak
    and strong rows only resolve the two outer regimes.
    """
    j, g, e = current(p), p.gamma, abs(p.epsilon)
    if e == 0:
        return "thermal"
    slack = 1.0 + 1e-12

    def much_less(a, b):
        return a * guard <= b * slack

    weak_scale = g * g / e
    strong_scale = g ** 3 / e ** 2
    if much_less(e, g):
        if much_less(j, weak_scale):
            return "thermal"
        if much_less(weak_scale, j):
            return "shot"
        return "crossover"
    if much_less(g, e):
        if much_less(j, strong_scale):
            return "thermal"
        if much_less(strong_scale, j) and much_less(j, g):
            return "fractional"
        if much_less(g, j):
            return "shot"
        return "crossover"
    if much_less(j, min(weak_scale, strong_scale)):
        return "thermal"
    if much_less(max(weak_scale, g), j):
        return "shot"
    return "crossover"


@dataclass(frozen=True)
class NoisePoint:
    current_j: float
    s_zero: float
    fano: float
    gamma_exp: float
    regime: str

    def as_dict(self) -> dict:
        return asdict(self)


def noise_point(p: SystemParams) -> NoisePoint:
    s = s_zero_freq(p)
    j = current(p)
    return NoisePoint(current_j=j, s_zero=s, fano=s / j, gamma_exp=gamma_exponent(p),
                      regime=classify_regime(p))


def j_star_of(p: SystemParams) -> float:
    return j_star(p)
