"""Reference-pulse phase estimation, quadrature rotation and a Monte Carlo
estimator of the residual phase-error variance."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import N0, DomainError, QuadraturePair, StatisticalPowerError, rng_stream

MIN_TRIALS = 1000
CHUNK = 1 << 16


class PhaseEstimationError(ValueError):
    pass


@dataclass(frozen=True)
class PhaseFrame:
    ref: QuadraturePair
    cal: QuadraturePair
    phi_est: float
    phi_true: float

    @classmethod
    def from_measurements(cls, ref: QuadraturePair, cal: QuadraturePair) -> "PhaseFrame":
        return cls(ref=ref, cal=cal, phi_est=estimate_phase(ref), phi_true=estimate_phase(cal))

    @property
    def error(self) -> float:
        return float(wrap_angle(self.phi_est - self.phi_true))


@dataclass(frozen=True)
class PhaseErrorEstimate:
    variance: float
    stderr: float
    mean: float
    trials: int


def wrap_angle(x):
    """Map angles onto ``(-pi, pi]``."""
    x = np.asarray(x, dtype=float)
    out = x - 2.0 * np.pi * np.ceil((x - np.pi) / (2.0 * np.pi))
    return out if out.ndim else float(out)


def estimate_phase(ref: QuadraturePair) -> float:
    """Laser phase from a reference measurement, ``-atan(P/X)`` with quadrant handling."""
    if ref.x == 0 and ref.p == 0:
        raise PhaseEstimationError("phase of a zero reference vector is undefined")
    return wrap_angle(-math.atan2(ref.p, ref.x))


def rotate(q: QuadraturePair, phi: float) -> QuadraturePair:
    c, s = math.cos(phi), math.sin(phi)
    return QuadraturePair(q.x * c - q.p * s, q.x * s + q.p * c)


def rotate_arrays(x, p, phi):
    c, s = np.cos(phi), np.sin(phi)
    return x * c - p * s, x * s + p * c


def _measure(phi_tru, n, eta, n0, rng):
    # amplitude normalised to 1; heterodyne noise 2*N0 per quadrature in units
    # where the pulse amplitude is sqrt(eta*n)
    scale = 0.0 if math.isinf(n) else math.sqrt(2.0 * n0 / (eta * n))
    x = np.cos(-phi_tru) + scale * rng.standard_normal(phi_tru.shape)
    p = np.sin(-phi_tru) + scale * rng.standard_normal(phi_tru.shape)
    return x, p


def _uniform_phase(rng, size):
    return rng.uniform(-np.pi, np.pi, size)


def phase_errors(n_ref, n_cal, eta, trials, seed, true_phase=_uniform_phase, n0=N0):
    """Wrapped differences between the reference and calibration phase estimates."""
    if n_ref <= 0 or n_cal <= 0 or not (0 < eta <= 1):
        raise DomainError(f"need n_ref, n_cal > 0 and eta in (0,1]; got {n_ref}, {n_cal}, {eta}")
    out = np.empty(trials)
    for k, start in enumerate(range(0, trials, CHUNK)):
        stop = min(start + CHUNK, trials)
        rng = rng_stream(seed, k)
        phi_tru = np.asarray(true_phase(rng, stop - start), dtype=float)
        xr, pr = _measure(phi_tru, n_ref, eta, n0, rng)
        xc, pc = _measure(phi_tru, n_cal, eta, n0, rng)
        out[start:stop] = wrap_angle(-np.arctan2(pr, xr) + np.arctan2(pc, xc))
    return out


def jackknife_variance(d):
    """Sample variance of ``d`` and its delete-one jackknife standard error."""
    n = d.size
    c = d - d.mean()
    s1, s2 = c.sum(), np.dot(c, c)
    loo = (s2 - c * c - (s1 - c) ** 2 / (n - 1)) / (n - 2)
    var = s2 / (n - 1)
    se = math.sqrt((n - 1) / n * float(np.sum((loo - loo.mean()) ** 2)))
    return var, se


def simulate_phase_error_variance(n_ref, n_cal, eta, trials, seed, true_phase=_uniform_phase,
                                  n0=N0) -> PhaseErrorEstimate:
    """Monte Carlo variance of ``phi - phi_tru`` for shot-noise-limited pulses."""
    if trials < MIN_TRIALS:
        raise StatisticalPowerError(f"need at least {MIN_TRIALS} trials, got {trials}")
    d = phase_errors(n_ref, n_cal, eta, trials, seed, true_phase, n0)
    var, se = jackknife_variance(d)
    return PhaseErrorEstimate(variance=var, stderr=se, mean=float(d.mean()), trials=trials)
