"""Monte-Carlo check of the decoherence envelope.

The phase obeys dPhi/dt = eps xi(t) with xi a stationary Ornstein-Uhlenbeck
process of correlation rate 2 gamma.  xi is advanced with the exact one-step
update and Phi with the trapezoidal rule; nothing here uses the analytic
D(t), which is what the simulation is meant to test.

Trajectories are processed in fixed-size blocks.  Block ``b`` draws its
normals from ``SeedSequence(seed, spawn_key=(b,))`` so results do not depend
on the number of workers or the order in which blocks finish.
"""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .params import SystemParams, kappa

BLOCK_SIZE = 32768


@dataclass(frozen=True)
class OracleConfig:
    n_traj: int = 200_000
    dt: float = 5e-3
    t_max: float = 5.0
    seed: int = 0
    workers: int = 1
    record_stride: int = 1

    def check(self, p: SystemParams, strict: bool = True):
        """Validate against ``p``.  Resolution limits raise only when ``strict``."""
        if self.n_traj < 2:
            raise DomainError("n_traj must be at least 2")
        if not (self.dt > 0 and self.t_max > 0):
            raise DomainError("dt and t_max must be positive")
        if self.record_stride < 1 or self.n_steps % self.record_stride:
            raise DomainError("record_stride must be a positive divisor of the step count")
        if not 0 <= self.seed < 2 ** 64:
            raise DomainError("seed must be an unsigned 64-bit integer")
        problems = []
        if self.n_traj < 1000:
            problems.append(f"n_traj = {self.n_traj} < 1000")
        if self.dt > 0.05 / (2.0 * p.gamma) * (1 + 1e-12):
            problems.append(f"dt = {self.dt:g} exceeds 0.05/(2 gamma) = {0.05 / (2 * p.gamma):g}")
        if problems and strict:
            raise DomainError("invalid oracle config: " + "; ".join(problems))
        for msg in problems:
            warnings.warn(msg, RuntimeWarning, stacklevel=3)

    @property
    def n_steps(self) -> int:
        return int(round(self.t_max / self.dt))


@dataclass
class EnsembleStats:
    grid: np.ndarray
    mean_z: np.ndarray
    stderr: np.ndarray
    var_phi: np.ndarray
    var_stderr: np.ndarray
    mean_imag: np.ndarray
    imag_stderr: np.ndarray
    n_traj: int

    def columns(self) -> dict:
        return {"t": self.grid, "mean_z": self.mean_z, "stderr": self.stderr,
                "var_phi": self.var_phi, "var_stderr": self.var_stderr,
                "mean_imag": self.mean_imag, "imag_stderr": self.imag_stderr}


def noise_sigma(p: SystemParams) -> float:
    """Stationary standard deviation of xi.

    Chosen so that eps^2 <xi xi> = 2 kappa^2 exp(-2 gamma |t|), the
    correlator whose double time integral reproduces D(t); this is
    alpha^K(t)/2 in the normalisation of :func:`alpha_k_time`.
    """
    if p.epsilon == 0:
        n = p.f_occ * p.gamma_l / p.gamma
        return math.sqrt(2.0 * (n + n * n))
    return math.sqrt(2.0) * kappa(p) / abs(p.epsilon)


def _rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


def _block_moments(p, dt_fine, n_fine, n, rng, levels, stride):
    """Run ``n`` trajectories; return raw moment sums for every level.

    ``levels`` lists stride factors: level s integrates Phi with step
    ``s * dt_fine`` using every s-th value of the same xi path, which is an
    exact sample of the OU process on the coarser grid.  Moments are
    recorded every ``stride`` steps of each level.
    """
    g = p.gamma
    a = math.exp(-2.0 * g * dt_fine)
    sig = noise_sigma(p)
    kick = sig * math.sqrt(-math.expm1(-4.0 * g * dt_fine))
    eps = p.epsilon

    xi = sig * rng.standard_normal(n)
    out = {}
    for s in levels:
        out[s] = np.zeros((7, n_fine // (s * stride) + 1))
        out[s][0, 0] = n  # cos(0) summed
        out[s][2, 0] = n
    phi = {s: np.zeros(n) for s in levels}
    start = {s: xi.copy() for s in levels}
    noise = np.empty(n)
    for k in range(1, n_fine + 1):
        rng.standard_normal(out=noise)
        xi = a * xi + kick * noise
        for s in levels:
            if k % s:
                continue
            ph = phi[s]
            ph += (0.5 * eps * s * dt_fine) * (start[s] + xi)
            start[s] = xi
            if k % (s * stride):
                continue
            c, sn = np.cos(ph), np.sin(ph)
            p2 = ph * ph
            out[s][:, k // (s * stride)] = (c.sum(), sn.sum(), c @ c, sn @ sn,
                                            ph.sum(), p2.sum(), p2 @ p2)
    return out


def _reduce(sums: np.ndarray, n: int, spacing: float) -> EnsembleStats:
    c, s, c2, s2, m1, m2, m4 = sums
    mean_z = c / n
    mean_i = s / n
    var_c = np.maximum(c2 / n - mean_z ** 2, 0.0)
    var_s = np.maximum(s2 / n - mean_i ** 2, 0.0)
    mu = m1 / n
    var_phi = m2 / n - mu ** 2
    # stderr of the sample variance of a symmetric distribution
    var_var = np.maximum(m4 / n - (m2 / n) ** 2, 0.0)
    grid = spacing * np.arange(len(c))
    return EnsembleStats(
        grid=grid, mean_z=mean_z, stderr=np.sqrt(var_c / (n - 1)),
        var_phi=var_phi, var_stderr=np.sqrt(var_var / (n - 1)),
        mean_imag=mean_i, imag_stderr=np.sqrt(var_s / (n - 1)), n_traj=n)


def _run(p: SystemParams, cfg: OracleConfig, dt_fine: float, n_fine: int, levels):
    n_blocks = -(-cfg.n_traj // BLOCK_SIZE)
    sizes = [min(BLOCK_SIZE, cfg.n_traj - b * BLOCK_SIZE) for b in range(n_blocks)]

    def job(b):
        return _block_moments(p, dt_fine, n_fine, sizes[b], _rng(cfg.seed, b), levels,
                              cfg.record_stride)

    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            parts = list(pool.map(job, range(n_blocks)))
    else:
        parts = [job(b) for b in range(n_blocks)]
    # combine in block order so the reduction is independent of scheduling
    return {s: np.sum(np.stack([part[s] for part in parts]), axis=0) for s in levels}


def simulate_envelope(p: SystemParams, cfg: OracleConfig) -> EnsembleStats:
    """Ensemble estimate of z(t) = <exp(i Phi(0) - i Phi(t))> every record_stride steps."""
    cfg.check(p)
    sums = _run(p, cfg, cfg.dt, cfg.n_steps, levels=(1,))
    return _reduce(sums[1], cfg.n_traj, cfg.dt * cfg.record_stride)


def sample_noise_paths(p: SystemParams, n_traj: int, dt: float, n_steps: int,
                       seed: int = 0) -> np.ndarray:
    """xi on the grid k*dt for ``n_traj`` trajectories, shape (n_traj, n_steps + 1)."""
    g = p.gamma
    a = math.exp(-2.0 * g * dt)
    sig = noise_sigma(p)
    kick = sig * math.sqrt(-math.expm1(-4.0 * g * dt))
    out = np.empty((n_traj, n_steps + 1))
    for b in range(-(-n_traj // BLOCK_SIZE)):
        lo = b * BLOCK_SIZE
        hi = min(n_traj, lo + BLOCK_SIZE)
        rng = _rng(seed, b)
        out[lo:hi, 0] = sig * rng.standard_normal(hi - lo)
        for k in range(1, n_steps + 1):
            out[lo:hi, k] = a * out[lo:hi, k - 1] + kick * rng.standard_normal(hi - lo)
    return out


@dataclass
class ConvergenceReport:
    coarse: EnsembleStats
    fine: EnsembleStats
    max_abs_diff: float
    flagged: bool

    def summary(self) -> str:
        state = "RAISED" if self.flagged else "clear"
        return f"step-halving max |d mean_z| = {self.max_abs_diff:.3e}; flag {state}"


def convergence_report(p: SystemParams, cfg: OracleConfig) -> ConvergenceReport:
    """Compare runs at dt and dt/2 driven by the same noise realisation.

    The flag is raised when |mean_z(dt) - mean_z(dt/2)| exceeds the standard
    error at any shared grid point.
    """
    cfg.check(p, strict=False)
    sums = _run(p, cfg, 0.5 * cfg.dt, 2 * cfg.n_steps, levels=(1, 2))
    spacing = cfg.dt * cfg.record_stride
    fine = _reduce(sums[1], cfg.n_traj, 0.5 * spacing)
    coarse = _reduce(sums[2], cfg.n_traj, spacing)
    diff = np.abs(coarse.mean_z - fine.mean_z[::2])
    err = np.maximum(coarse.stderr, fine.stderr[::2])
    return ConvergenceReport(coarse=coarse, fine=fine, max_abs_diff=float(diff.max()),
                             flagged=bool(np.any(diff > err)))
