"""Phase-fluctuation kernels, phase autocorrelation D(t) and the envelope z(t)."""
from __future__ import annotations

import numpy as np

from .params import DistributionFunction, SystemParams, kappa, n_ac


def keldysh_amplitude(p: SystemParams) -> float:
    """Prefactor c of alpha^K(t) = c exp(-2 gamma |t|); F(F+2) for symmetric couplings."""
    g = p.gamma
    return 4.0 * p.gamma_l * p.f_occ * (g + p.gamma_l * p.f_occ) / (g * g)


def alpha_k_time(p: SystemParams, t):
    return keldysh_amplitude(p) * np.exp(-2.0 * p.gamma * np.abs(t))


def alpha_k_freq(p: SystemParams, omega):
    """Fourier image of :func:`alpha_k_time`, a Lorentzian of half-width 2 gamma."""
    g = p.gamma
    w = np.asarray(omega, dtype=float)
    return 16.0 * p.gamma_l * p.f_occ * (g + p.gamma_l * p.f_occ) / (g * (4.0 * g * g + w * w))


def alpha_ra(p: SystemParams, omega=0.0) -> tuple[complex, complex]:
    """Retarded/advanced kernels; frequency independent and suppressed as delta**-3."""
    m = 16.0 * p.epsilon * p.f_occ ** 2 * p.gamma_l ** 2 / (np.pi * p.gamma * p.delta ** 3)
    return complex(0.0, m), complex(0.0, -m)


def kubo_shape(x):
    """x + exp(-x) - 1 for x >= 0, accurate down to x -> 0."""
    x = np.abs(np.asarray(x, dtype=float))
    small = x < 1e-2
    xs = np.where(small, x, 0.0)
    # Taylor series to x**8 keeps ~1e-17 relative accuracy below 1e-2
    series = xs * xs * (0.5 - xs * (1 / 6 - xs * (1 / 24 - xs * (1 / 120 - xs * (1 / 720 - xs * (1 / 5040 - xs / 40320))))))
    direct = x + np.expm1(-x)
    out = np.where(small, series, direct)
    return out if out.ndim else float(out)


def phase_variance_d(p: SystemParams, t):
    """D(t) = kappa^2/(2 gamma^2) (2 gamma |t| + exp(-2 gamma |t|) - 1)."""
    g = p.gamma
    k = kappa(p)
    return k * k / (2.0 * g * g) * kubo_shape(2.0 * g * np.asarray(t, dtype=float))


def phase_variance_rate(p: SystemParams, t):
    """dD/d|t| = (kappa^2/gamma)(1 - exp(-2 gamma |t|))."""
    g = p.gamma
    k = kappa(p)
    return -k * k / g * np.expm1(-2.0 * g * np.abs(np.asarray(t, dtype=float)))


def envelope_z(p: SystemParams, t):
    return np.exp(-phase_variance_d(p, t))


def fdt_violation(p: SystemParams, n_left: DistributionFunction,
                  n_right: DistributionFunction, omega) -> float:
    """Residual alpha^K - (alpha^R - alpha^A)(1 + 2 N_ac) of the equilibrium FDT.

    The Keldysh slot of the action carries i*alpha^K, so the comparison is
    made between imaginary parts and the residual is returned as a real
    number.  ``omega`` is measured from the cavity frequency omega0.
    """
    ar, aa = alpha_ra(p, omega)
    occ = n_ac(p, n_left, n_right, p.omega0 + np.asarray(omega, dtype=float))
    res = alpha_k_freq(p, omega) - (ar - aa).imag * (1.0 + 2.0 * np.asarray(occ))
    return res if np.ndim(res) else float(res)
