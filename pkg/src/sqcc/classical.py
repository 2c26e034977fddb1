"""QPSK bit error rate and the displacement needed to hit a target BER."""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import erfc, erfcinv

from .core import DomainError, PhaseNoiseBudget, SystemParams
from .noise import leakage_excess_noise


@dataclass(frozen=True)
class DisplacementSolution:
    alpha: float
    w: float
    mu_classical: float
    feasible: bool


def qpsk_ber(alpha, T, eta, n_tot, n0=0.25):
    """Per-quadrature BER of sign decoding with Gaussian receiver noise ``n_tot`` (SNU)."""
    if n_tot <= 0:
        raise DomainError(f"n_tot must be > 0, got {n_tot}")
    return 0.5 * float(erfc(math.sqrt(T * eta) * alpha / math.sqrt(4.0 * n_tot * n0)))


def w_factor(c_ber: float) -> float:
    """``erfinv(1 - 2*c_ber)``, evaluated as ``erfcinv(2*c_ber)``.

    The erfc form keeps full relative precision for tiny ``c_ber``; forming
    ``1 - 2e-9`` first throws away about seven digits.
    """
    if not (0 < c_ber <= 0.5):
        raise DomainError(f"c_ber must lie in (0, 0.5], got {c_ber}")
    return float(erfcinv(2.0 * c_ber))


def max_tolerable_phase_noise(c_ber: float) -> float:
    """Largest ``sigma_i + sigma_b`` for which a finite displacement reaches ``c_ber``."""
    w = w_factor(c_ber)
    return math.inf if w == 0.0 else 1.0 / (2.0 * w * w)


def solve_displacement(params: SystemParams, phase: PhaseNoiseBudget, T: float,
                       c_ber: float | None = None) -> DisplacementSolution:
    """Closed-form displacement giving BER ``c_ber`` (default ``params.ber_target``).

    Returns ``feasible=False`` with ``alpha = nan`` when the phase noise is at
    or beyond the tolerable limit; callers sweeping the boundary rely on this.
    """
    c_ber = params.ber_target if c_ber is None else c_ber
    if not (0 < c_ber < 0.5):
        raise DomainError(f"c_ber must lie in (0, 0.5), got {c_ber}")
    w = w_factor(c_ber)
    eps_le = leakage_excess_noise(params, T)
    denom = T * params.eta * (2.0 - 4.0 * w * w * phase.total)
    if denom <= 0 or phase.total >= max_tolerable_phase_noise(c_ber):
        return DisplacementSolution(alpha=math.nan, w=w, mu_classical=math.nan, feasible=False)
    num = T * params.eta * (params.v_a + eps_le + params.eps0) + 2.0 + 2.0 * params.v_el
    alpha = w * math.sqrt(num) / math.sqrt(denom)
    return DisplacementSolution(alpha=alpha, w=w, mu_classical=2.0 * alpha * alpha, feasible=True)
