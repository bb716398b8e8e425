"""Physical inputs of the driven Kerr cavity and their closed-form consequences.

All rates share one frequency unit chosen by the caller.  The CLI uses
units where the total coupling Gamma equals one.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import integrate, optimize

from .errors import ConvergenceError, DomainError


class HierarchyWarning(UserWarning):
    """The frequency ordering omega0 >> delta >> (eps, gammas, kappa) is violated."""


@dataclass(frozen=True)
class SystemParams:
    """Cavity frequency, Kerr energy, couplings, drive bandwidth and occupation.

    ``f_occ`` is the occupation F of the incident modes in the left waveguide,
    flat over ``[omega0 - delta, omega0 + delta]``.  A negative ``epsilon``
    (attractive Kerr) is allowed.  Couplings may be zero so that a decoupled
    lead can be expressed; :func:`derive` still insists on strictly positive
    rates.
    """

    omega0: float = 1000.0
    epsilon: float = 1.0
    gamma_l: float = 0.5
    gamma_r: float = 0.5
    delta: float = 100.0
    f_occ: float = 1.0

    def __post_init__(self):
        for name in ("omega0", "epsilon", "gamma_l", "gamma_r", "delta", "f_occ"):
            v = getattr(self, name)
            if not isinstance(v, (int, float, np.floating, np.integer)) or not math.isfinite(v):
                raise DomainError(f"{name} must be a finite number, got {v!r}")
        if self.gamma_l < 0 or self.gamma_r < 0:
            raise DomainError("coupling rates must be non-negative")
        if self.gamma_l + self.gamma_r <= 0:
            raise DomainError("total coupling gamma_l + gamma_r must be positive")
        if self.delta <= 0:
            raise DomainError("drive half-bandwidth delta must be positive")
        if self.f_occ < 0:
            raise DomainError("occupation f_occ must be non-negative")

    @property
    def gamma(self) -> float:
        return self.gamma_l + self.gamma_r

    @property
    def symmetric(self) -> bool:
        return self.gamma_l == self.gamma_r

    def replace(self, **changes) -> "SystemParams":
        d = asdict(self)
        d.update(changes)
        return SystemParams(**d)

    def as_dict(self) -> dict:
        return {k: float(v) for k, v in asdict(self).items()}

    def hierarchy_violations(self, ratio: float = 10.0) -> list[str]:
        """Return human-readable violations of omega0 >> delta >> (eps, rates, kappa)."""
        out = []
        if self.omega0 < ratio * self.delta:
            out.append(f"omega0/delta = {self.omega0 / self.delta:.3g} < {ratio:g}")
        small = {
            "|epsilon|": abs(self.epsilon),
            "gamma_l": self.gamma_l,
            "gamma_r": self.gamma_r,
            "kappa": kappa(self),
        }
        for name, v in small.items():
            if v * ratio > self.delta:
                out.append(f"delta/{name} = {self.delta / v:.3g} < {ratio:g}")
        return out

    def check_hierarchy(self, ratio: float = 10.0) -> bool:
        """Warn (never raise) when the frequency hierarchy fails; True if it holds."""
        bad = self.hierarchy_violations(ratio)
        for msg in bad:
            warnings.warn(f"frequency hierarchy violated: {msg}", HierarchyWarning, stacklevel=2)
        return not bad


@dataclass(frozen=True)
class DerivedQuantities:
    gamma: float
    kappa: float
    omega_ac: float
    phi0: float
    current_j: float
    n_bar: float
    j_star: float
    hierarchy_ok: bool = True
    kappa_over_delta: float = 0.0

    def as_dict(self) -> dict:
        return asdict(self)


# --- closed forms -----------------------------------------------------------

def cavity_occupation(p: SystemParams) -> float:
    """<a^dagger a> = F * gamma_l / gamma."""
    return p.f_occ * p.gamma_l / p.gamma


def current(p: SystemParams) -> float:
    """Mean photon current J = 2 F gamma_l gamma_r / gamma."""
    return 2.0 * p.f_occ * p.gamma_l * p.gamma_r / p.gamma


def kappa(p: SystemParams) -> float:
    """Gaussian dephasing rate; depends on epsilon only through its modulus."""
    n = p.f_occ * p.gamma_l / p.gamma
    return abs(p.epsilon) * math.sqrt(n + n * n)


def kappa_from_current(p: SystemParams, j: float | None = None) -> float:
    """Same rate written through the current: |eps|/(2 gamma_r) sqrt(J (J + 2 gamma_r))."""
    j = current(p) if j is None else j
    return abs(p.epsilon) / (2.0 * p.gamma_r) * math.sqrt(j * (j + 2.0 * p.gamma_r))


def omega_ac(p: SystemParams) -> float:
    """Shifted mode frequency omega0 - eps + F eps gamma_l / gamma (signed eps)."""
    return p.omega0 + mode_shift(p)


def mode_shift(p: SystemParams) -> float:
    """omega_ac - omega0, computed without touching omega0."""
    return p.epsilon * (p.f_occ * p.gamma_l / p.gamma - 1.0)


def j_star(p: SystemParams) -> float:
    """Crossover current (gamma/2)(sqrt(1 + 4 gamma^2/eps^2) - 1); +inf at eps = 0."""
    if p.epsilon == 0:
        return math.inf
    g = p.gamma
    # with r = |eps|/(2 gamma) the bracket equals 1/(r (sqrt(r^2+1) + r)),
    # which neither overflows for tiny eps nor cancels for large eps
    r = abs(p.epsilon) / (2.0 * g)
    return 0.5 * g / (r * (math.hypot(r, 1.0) + r))


def saddle_point_flat(p: SystemParams) -> float:
    """Static saddle-point field for the wideband flat drive: eps (1 + F gamma_l/gamma)."""
    return p.epsilon * (1.0 + p.f_occ * p.gamma_l / p.gamma)


def derive(p: SystemParams, ratio: float = 10.0) -> DerivedQuantities:
    """All secondary scales of a parameter set.

    Raises DomainError unless both couplings and the bandwidth are positive.
    """
    if p.gamma_l <= 0 or p.gamma_r <= 0 or p.delta <= 0:
        raise DomainError("derive needs gamma_l, gamma_r and delta strictly positive")
    k = kappa(p)
    return DerivedQuantities(
        gamma=p.gamma,
        kappa=k,
        omega_ac=omega_ac(p),
        phi0=saddle_point_flat(p),
        current_j=current(p),
        n_bar=cavity_occupation(p),
        j_star=j_star(p),
        hierarchy_ok=not p.hierarchy_violations(ratio),
        kappa_over_delta=k / p.delta,
    )


def params_at_current(j: float, epsilon: float, *, gamma_l: float = 0.5,
                      gamma_r: float = 0.5, omega0: float = 1000.0,
                      delta: float = 100.0) -> SystemParams:
    """Parameter set whose flat drive produces the current ``j``."""
    if j < 0:
        raise DomainError("current must be non-negative")
    g = gamma_l + gamma_r
    f = j * g / (2.0 * gamma_l * gamma_r)
    return SystemParams(omega0=omega0, epsilon=epsilon, gamma_l=gamma_l,
                        gamma_r=gamma_r, delta=delta, f_occ=f)


# --- distributions ------------------------------------------------------------

@dataclass(frozen=True)
class DistributionFunction:
    """Occupation N(omega) of a waveguide: a flat band or a tabulated curve.

    Tabulated values are linearly interpolated; evaluating outside the table
    raises DomainError.  Flat bands vanish outside ``center +- halfwidth``.
    """

    kind: str
    center: float = 0.0
    halfwidth: float = 0.0
    occupation: float = 0.0
    grid: tuple = field(default=())
    values: tuple = field(default=())

    def __post_init__(self):
        if self.kind == "flat":
            if self.halfwidth < 0 or self.occupation < 0:
                raise DomainError("flat band needs halfwidth >= 0 and occupation >= 0")
        elif self.kind == "tabulated":
            g = np.asarray(self.grid, dtype=float)
            v = np.asarray(self.values, dtype=float)
            if g.ndim != 1 or g.size < 2 or g.shape != v.shape:
                raise DomainError("tabulated distribution needs matching 1-D grid and values")
            if np.any(np.diff(g) <= 0):
                raise DomainError("tabulated grid must be strictly increasing")
            if np.any(v < 0):
                raise DomainError("occupation values must be non-negative")
        else:
            raise DomainError(f"unknown distribution kind {self.kind!r}")

    @classmethod
    def flat(cls, center: float, halfwidth: float, occupation: float) -> "DistributionFunction":
        return cls("flat", center=center, halfwidth=halfwidth, occupation=occupation)

    @classmethod
    def vacuum(cls) -> "DistributionFunction":
        return cls("flat", center=0.0, halfwidth=0.0, occupation=0.0)

    @classmethod
    def tabulated(cls, grid, values) -> "DistributionFunction":
        return cls("tabulated", grid=tuple(map(float, grid)), values=tuple(map(float, values)))

    @classmethod
    def incident(cls, p: SystemParams) -> "DistributionFunction":
        """The flat left-lead drive described by ``p``."""
        return cls.flat(p.omega0, p.delta, p.f_occ)

    @property
    def is_empty(self) -> bool:
        return self.kind == "flat" and (self.occupation == 0 or self.halfwidth == 0)

    def support(self) -> tuple[float, float]:
        if self.kind == "flat":
            return self.center - self.halfwidth, self.center + self.halfwidth
        return self.grid[0], self.grid[-1]

    def __call__(self, omega):
        w = np.asarray(omega, dtype=float)
        if self.kind == "flat":
            inside = np.abs(w - self.center) <= self.halfwidth
            out = np.where(inside, self.occupation, 0.0)
        else:
            lo, hi = self.support()
            if np.any((w < lo) | (w > hi)):
                raise DomainError(f"frequency outside tabulated range [{lo}, {hi}]")
            out = np.interp(w, self.grid, self.values)
        return out if out.ndim else float(out)

    def breakpoints(self) -> list[float]:
        if self.kind == "flat":
            return list(self.support())
        return list(self.grid)


def n_ac(p: SystemParams, n_left: DistributionFunction,
         n_right: DistributionFunction, omega):
    """Cavity distribution (gamma_l N_L + gamma_r N_R) / gamma at ``omega``."""
    val = (p.gamma_l * np.asarray(n_left(omega)) + p.gamma_r * np.asarray(n_right(omega))) / p.gamma
    return val if np.ndim(val) else float(val)


def _lorentz_weighted(p, n_left, n_right, center, width):
    """int N_ac(w) / ((w - center)^2 + width^2) dw over the supports."""
    total = 0.0
    for dist, weight in ((n_left, p.gamma_l), (n_right, p.gamma_r)):
        if weight == 0 or dist.is_empty:
            continue
        lo, hi = dist.support()
        if dist.kind == "flat":
            # flat piece integrates in closed form
            total += weight / p.gamma * dist.occupation / width * (
                math.atan((hi - center) / width) - math.atan((lo - center) / width))
            continue
        pts = [x for x in dist.breakpoints() + [center] if lo < x < hi]
        val, _ = integrate.quad(
            lambda w: dist(w) / ((w - center) ** 2 + width * width),
            lo, hi, points=pts[:200] or None, limit=max(200, 4 * len(pts)),
            epsabs=0.0, epsrel=1e-12)
        total += weight / p.gamma * val
    return total


def saddle_point_general(p: SystemParams, n_left: DistributionFunction,
                         n_right: DistributionFunction, *, rtol: float = 1e-10,
                         max_iter: int = 200, damping: float = 0.5) -> float:
    """Solve the static saddle-point equation for arbitrary lead distributions.

    The Lorentzian in the occupation integral is centred on the saddle-point
    mode ``omega0 - eps + phi0`` with width gamma.  Damped fixed-point
    iteration is tried first; if it stalls the root is bracketed and bisected.
    """
    eps, g = p.epsilon, p.gamma
    if eps == 0:
        return 0.0

    def rhs(phi):
        return eps + eps * g / math.pi * _lorentz_weighted(
            p, n_left, n_right, p.omega0 - eps + phi, g)

    def residual(phi):
        return phi - rhs(phi)

    phi = saddle_point_flat(p)
    res = math.inf
    for _ in range(max_iter):
        res = residual(phi)
        if abs(res) <= rtol * max(abs(phi), abs(eps)):
            return phi
        phi -= damping * res

    # fallback: the right-hand side is bounded by eps (1 + max N_ac), so bracket there
    occ_max = max(_max_occ(n_left), _max_occ(n_right))
    bound = abs(eps) * (2.0 + occ_max) + 1.0
    a, b = -bound, bound
    if residual(a) * residual(b) > 0:
        raise ConvergenceError(
            f"saddle point did not converge in {max_iter} iterations; last residual {res:.3e}",
            residual=res)
    root, info = optimize.brentq(residual, a, b, xtol=1e-300, rtol=max(rtol, 4.5e-16),
                                 maxiter=max_iter, full_output=True, disp=False)
    if not info.converged:
        res = residual(root)
        raise ConvergenceError(
            f"saddle point did not converge in {max_iter} iterations; last residual {res:.3e}",
            residual=res)
    return root


def _max_occ(d: DistributionFunction) -> float:
    if d.kind == "flat":
        return d.occupation
    return float(np.max(d.values))
