"""Transmission functions and the photonic Landauer current.

Spectral quantities take frequencies as detunings ``omega - omega_ac`` so
that the large cavity frequency never enters a subtraction.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import integrate as sp_integrate
from scipy import optimize

from .curves import SampledCurve, params_hash
from .decoherence import envelope_z, kappa, phase_variance_d
from .errors import DomainError, QuadratureError
from .params import DistributionFunction, SystemParams, omega_ac
from .quadrature import fourier_cosine, fourier_full, integrate

T_CUTOFF = 1e-12
T_CAP = 50.0  # in units of 1/gamma


def time_amplitude(p: SystemParams) -> float:
    """T(t = 0) = 2 gamma_l gamma_r / gamma, also the spectral weight."""
    return 2.0 * p.gamma_l * p.gamma_r / p.gamma


def tau_lorentzian(p: SystemParams, omega):
    """Breit-Wigner transmission 4 gamma_l gamma_r / ((omega - omega0)^2 + gamma^2)."""
    x = np.asarray(omega, dtype=float) - p.omega0
    return 4.0 * p.gamma_l * p.gamma_r / (x * x + p.gamma ** 2)


def transmission_time(p: SystemParams, t):
    t = np.asarray(t, dtype=float)
    return envelope_z(p, t) * time_amplitude(p) * np.exp(-p.gamma * np.abs(t) - 1j * omega_ac(p) * t)


def _damped_envelope(p):
    g = p.gamma
    return lambda t: np.exp(-phase_variance_d(p, t) - g * np.abs(t))


def t_max_rule(p: SystemParams, cutoff: float = T_CUTOFF) -> float:
    """Smallest t with z(t) exp(-gamma t) < cutoff, capped at 50/gamma."""
    g = p.gamma
    target = -math.log(cutoff)
    cap = T_CAP / g

    def excess(t):
        return float(phase_variance_d(p, t)) + g * t - target

    if excess(cap) <= 0:
        return cap
    return optimize.brentq(excess, 0.0, cap, xtol=1e-14 / g, rtol=1e-12)


def _time_scale(p: SystemParams) -> float:
    k = kappa(p)
    return 1.0 / max(p.gamma, k)


def _peak_scale(p: SystemParams) -> float:
    k = kappa(p)
    return 2.0 * time_amplitude(p) * min(1.0 / p.gamma, math.sqrt(math.pi) / (2.0 * k) if k else math.inf)


def spectrum_values(p: SystemParams, detuning, rtol: float = 1e-8) -> np.ndarray:
    """T at the given detunings from omega_ac, via the half-range cosine transform."""
    detuning = np.atleast_1d(np.asarray(detuning, dtype=float))
    amp = time_amplitude(p)
    if amp == 0:
        return np.zeros_like(detuning)
    res = fourier_cosine(_damped_envelope(p), detuning, t_max_rule(p),
                         scale=_time_scale(p), rtol=rtol,
                         atol=1e-4 * rtol * _peak_scale(p) / (2 * amp))
    return 2.0 * amp * np.asarray(res.value)


def transmission_spectrum(p: SystemParams, detuning, rtol: float = 1e-8) -> SampledCurve:
    """T_omega on a uniform detuning grid, with the imaginary part as a diagnostic.

    The Fourier integral runs over [-t_max, t_max]; for an even envelope its
    imaginary part vanishes and whatever remains is reported per point.
    """
    detuning = np.asarray(detuning, dtype=float)
    amp = time_amplitude(p)
    if amp == 0:
        vals = np.zeros_like(detuning)
        resid = np.zeros_like(detuning)
    else:
        g = _damped_envelope(p)
        res = fourier_full(g, detuning, t_max_rule(p), scale=_time_scale(p), rtol=rtol,
                           atol=1e-4 * rtol * _peak_scale(p) / amp)
        full = amp * np.asarray(res.value)
        vals, resid = full.real, full.imag
        if np.max(np.abs(resid)) > 1e-8 * np.max(np.abs(vals)):
            raise QuadratureError("imaginary residue of T_omega exceeds 1e-8 of its maximum",
                                  achieved=float(np.max(np.abs(resid))))
    meta = {"axis": "omega - omega_ac", "quantity": "T_omega",
            "params": p.as_dict(), "params_hash": params_hash(p.as_dict())}
    return SampledCurve(detuning, vals, meta=meta, imag_residue=resid)


def default_window(p: SystemParams, n: int = 401, span: float | None = None) -> np.ndarray:
    """Symmetric detuning grid covering omega_ac +- max(10 gamma, 8 kappa)."""
    half = span if span is not None else max(10.0 * p.gamma, 8.0 * kappa(p))
    return np.linspace(-half, half, n)


def gaussian_asymptote(p: SystemParams, detuning):
    """Large-kappa limit 2 sqrt(pi) gamma_l gamma_r/(gamma kappa) exp(-x^2/(4 kappa^2))."""
    k = kappa(p)
    if k == 0:
        raise DomainError("Gaussian asymptote needs kappa > 0")
    x = np.asarray(detuning, dtype=float)
    return 2.0 * math.sqrt(math.pi) * p.gamma_l * p.gamma_r / (p.gamma * k) * np.exp(-x * x / (4 * k * k))


def gaussian_fwhm(p: SystemParams) -> float:
    return 4.0 * kappa(p) * math.sqrt(math.log(2.0))


def peak_and_fwhm(p: SystemParams, rtol: float = 1e-10) -> tuple[float, float, float]:
    """(location, height, FWHM) of T_omega found by root search on the quadrature."""
    one = lambda x: float(spectrum_values(p, [x], rtol=rtol)[0])
    g, k = p.gamma, kappa(p)
    s = max(g, k)
    opt = optimize.minimize_scalar(lambda x: -one(x), bracket=(-0.3 * s, 0.0, 0.3 * s),
                                   tol=1e-10)
    loc = float(opt.x)
    height = one(loc)
    half = 0.5 * height
    hi = s
    while one(loc + hi) > half:
        hi *= 2.0
    right = optimize.brentq(lambda x: one(loc + x) - half, 0.0, hi, xtol=1e-12 * s)
    lo = s
    while one(loc - lo) > half:
        lo *= 2.0
    left = optimize.brentq(lambda x: one(loc - x) - half, 0.0, lo, xtol=1e-12 * s)
    return loc, height, left + right


def _tail_weight(p: SystemParams, cut: float) -> float:
    """int_{|x|>cut} T dx / 2 pi from the large-detuning expansion of T.

    For an even f(|t|) = A exp(-D - gamma|t|) the kink at t = 0 gives
    T ~ -2 f1/x^2 + 2 f3/x^4 - 2 f5/x^6, with fn the n-th derivative at 0+.
    """
    amp = time_amplitude(p)
    g, k = p.gamma, kappa(p)
    g2, k2 = g * g, k * k
    f1 = -g * amp
    f3 = g * (10.0 * k2 - g2) * amp
    f5 = g * (-g2 * g2 + 116.0 * g2 * k2 - 140.0 * k2 * k2) * amp
    # both tails: 2 * int_cut^inf (...) dx / (2 pi)
    return (-2.0 * f1 / cut + 2.0 * f3 / (3.0 * cut ** 3) - 2.0 * f5 / (5.0 * cut ** 5)) / math.pi


def spectral_weight(p: SystemParams, rtol: float = 1e-7) -> float:
    """int T_omega d omega / 2 pi by quadrature of the computed spectrum.

    The band |x| <= W is integrated numerically (T is even in x) after the
    substitution x = s tan(theta), which flattens the Lorentzian part; the
    algebraic tails beyond W come from the large-detuning expansion.
    """
    amp = time_amplitude(p)
    if amp == 0:
        return 0.0
    g, k = p.gamma, kappa(p)
    s = max(g, k)
    cut = max(30.0 * g, 12.0 * k)
    theta_max = math.atan(cut / s)

    def f(theta):
        c = np.cos(theta)
        return spectrum_values(p, s * np.tan(theta), rtol=rtol * 1e-2) * s / (c * c)

    res = integrate(f, 0.0, theta_max, h0=theta_max / 4, order=16, rtol=rtol,
                    atol=rtol * 1e-3 * amp)
    return 2.0 * float(res.value) / (2.0 * math.pi) + _tail_weight(p, cut)


def _occ_or_zero(dist: DistributionFunction, w):
    lo, hi = dist.support()
    w = np.asarray(w, dtype=float)
    inside = (w >= lo) & (w <= hi)
    out = np.zeros_like(w)
    if np.any(inside):
        out[inside] = dist(w[inside])
    return out


def landauer_current(p: SystemParams, n_left: DistributionFunction,
                     n_right: DistributionFunction, rtol: float = 1e-12) -> float:
    """J = int tau_omega (N_L - N_R) d omega / 2 pi.

    With omega - omega0 = gamma tan(theta) the Lorentzian weight becomes the
    constant 4 gamma_l gamma_r / gamma, so a narrow resonance inside a wide
    band costs nothing and flat bands integrate exactly.
    """
    supports = [d.support() for d in (n_left, n_right) if not d.is_empty]
    if not supports:
        return 0.0
    g = p.gamma
    lo = min(s[0] for s in supports) - p.omega0
    hi = max(s[1] for s in supports) - p.omega0
    th_lo, th_hi = math.atan(lo / g), math.atan(hi / g)
    brk = sorted({math.atan((b - p.omega0) / g) for d in (n_left, n_right) if not d.is_empty
                  for b in d.breakpoints()})
    brk = [b for b in brk if th_lo < b < th_hi]

    def integrand(theta):
        w = p.omega0 + g * math.tan(theta)
        return float(_occ_or_zero(n_left, w)) - float(_occ_or_zero(n_right, w))

    val, err = sp_integrate.quad(integrand, th_lo, th_hi, points=brk or None,
                                 limit=max(200, 4 * len(brk)), epsabs=0.0, epsrel=rtol)
    if not math.isfinite(val):
        raise QuadratureError("Landauer integral failed", achieved=err)
    return 4.0 * p.gamma_l * p.gamma_r / g * val / (2.0 * math.pi)
