"""First- and second-order coherence of the transmitted light."""
from __future__ import annotations

import numpy as np

from .decoherence import envelope_z, phase_variance_d
from .params import SystemParams, current, j_star, omega_ac


def g1(p: SystemParams, t):
    """z(t) exp(-gamma |t|) exp(-i omega_ac t); g1(0) = 1."""
    t = np.asarray(t, dtype=float)
    return envelope_z(p, t) * np.exp(-p.gamma * np.abs(t) - 1j * omega_ac(p) * t)


def g2_excess(p: SystemParams, t):
    """g2(t) - 1 computed without the cancellation of forming 1 + x first."""
    t = np.asarray(t, dtype=float)
    return np.exp(-2.0 * phase_variance_d(p, t) - 2.0 * p.gamma * np.abs(t))


def g2(p: SystemParams, t):
    """1 + z(t)^2 exp(-2 gamma |t|), i.e. 1 + |g1|^2 by Wick's theorem."""
    return 1.0 + g2_excess(p, t)


def g2_regime(p: SystemParams, guard: float = 10.0) -> str:
    """'lorentzian' for J < J*/guard, 'gaussian' for J > guard J*, else 'crossover'."""
    j, js = current(p), j_star(p)
    if j < js / guard:
        return "lorentzian"
    if j > guard * js:
        return "gaussian"
    return "crossover"
