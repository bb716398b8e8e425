"""Decoherence, transmission and photon-current noise of a driven Kerr cavity.

The cavity sits between two waveguides; the left one carries a flat band of
incident photons with occupation F.  A weak Kerr term dephases the cavity
mode, which turns Lorentzian transmission into a Gaussian one and changes
the scaling of the zero-frequency noise with the current.
"""
from .correlators import g1, g2, g2_excess, g2_regime
from .curves import SampledCurve, format_table, read_matrix, read_table
from .decoherence import (alpha_k_freq, alpha_k_time, alpha_ra, envelope_z,
                          fdt_violation, phase_variance_d)
from .errors import ConvergenceError, DomainError, KerrNoiseError, QuadratureError
from .noise import (NoisePoint, classify_regime, fano, gamma_exponent, noise_point,
                    noise_spectrum, s0_spectrum, s_closed_form, s_zero_freq)
from .oracle import (EnsembleStats, OracleConfig, convergence_report,
                     simulate_envelope)
from .params import (DerivedQuantities, DistributionFunction, HierarchyWarning,
                     SystemParams, current, derive, j_star, kappa, n_ac,
                     params_at_current, saddle_point_flat, saddle_point_general)
from .transport import (gaussian_asymptote, landauer_current, spectral_weight,
                        tau_lorentzian, transmission_spectrum, transmission_time)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
