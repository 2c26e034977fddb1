"""Receiver noise budget with the trusted/untrusted split.

Trusted: detector efficiency and electronic noise, and the shot-noise-limited
phase noise ``sigma_b`` of the reference pulse. Untrusted: interferometer
phase noise ``sigma_i``, reference leakage, signal-independent channel noise
and the classical-crosstalk term.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import N0, DomainError, PhaseNoiseBudget, SystemParams, db_to_linear_loss


@dataclass(frozen=True)
class NoiseDecomposition:
    eps_le: float
    eps_i: float
    eps_b: float
    eps_ber: float
    n_tot: float
    chi_het: float
    chi_line: float
    chi_tot: float
    n_le: float
    sigma_le: float


def _check_t(T):
    if not (0 < T <= 1):
        raise DomainError(f"transmittance must lie in (0, 1], got {T}")


def _extinction(params: SystemParams) -> float:
    return db_to_linear_loss(params.xi_a_db) * db_to_linear_loss(params.xi_p_db)


def leakage_photons(params: SystemParams, T: float) -> float:
    """Mean photon number of the reference-to-signal leakage at Alice."""
    _check_t(T)
    return params.n_ref / T * _extinction(params)


def leakage_phase_noise(params: SystemParams) -> float:
    """Laser phase diffusion between reference and leakage: ``2*dt/tau_c``."""
    return 2.0 * params.dt_s / params.tau_c_s


def leakage_excess_noise(params: SystemParams, T: float) -> float:
    """Leakage excess noise referred to the channel input, SNU (closed form)."""
    _check_t(T)
    return params.n_ref * params.dt_s / (T * params.n0 * params.tau_c_s) * _extinction(params)


def sigma_b_shot_limit(n_ref: float, eta: float, n0: float = N0) -> float:
    """Shot-noise floor of the reference-pulse phase estimate, rad^2."""
    if n_ref <= 0 or not (0 < eta <= 1) or n0 <= 0:
        raise DomainError(f"need n_ref > 0, eta in (0,1], n0 > 0; got {n_ref}, {eta}, {n0}")
    return 2.0 * n0 / (eta * n_ref)


def two_laser_phase_noise(dt, tau1, tau2, n_ref, eta, n0=N0):
    """Phase noise of the two-laser reference scheme.

    Laser terms ``dt/tau1 + dt/tau2`` plus the shot term. ``tau = inf`` drops
    the corresponding laser term.
    """
    if dt < 0 or tau1 <= 0 or tau2 <= 0:
        raise DomainError(f"need dt >= 0 and tau > 0; got {dt}, {tau1}, {tau2}")
    return dt / tau1 + dt / tau2 + sigma_b_shot_limit(n_ref, eta, n0)


def phase_excess_noises(params: SystemParams, phase: PhaseNoiseBudget, alpha: float):
    """``(eps_i, eps_b)``: phase noise times total signal power ``alpha^2/N0 + V_A``."""
    if alpha < 0:
        raise DomainError(f"alpha must be >= 0, got {alpha}")
    power = alpha * alpha / params.n0 + params.v_a
    return power * phase.sigma_i, power * phase.sigma_b


def receiver_noise(params: SystemParams, phase: PhaseNoiseBudget, alpha: float, T: float) -> float:
    """Total noise variance per quadrature at Bob's detector, SNU."""
    eps_le = leakage_excess_noise(params, T)
    return (
        0.5 * T * params.eta
        * (params.v_a + eps_le + params.eps0 + alpha * alpha / params.n0 * phase.total)
        + 1.0 + params.v_el
    )


def assemble(params: SystemParams, phase: PhaseNoiseBudget, alpha: float, T: float,
             c_ber: float) -> NoiseDecomposition:
    """Every derived noise term for one operating point.

    Recomputed from raw inputs on each call; nothing is cached.
    """
    _check_t(T)
    if not (0 < c_ber < 0.5):
        raise DomainError(f"c_ber must lie in (0, 0.5), got {c_ber}")
    n0 = params.n0
    eps_le = leakage_excess_noise(params, T)
    eps_i, eps_b = phase_excess_noises(params, phase, alpha)
    eps_ber = 4.0 * alpha * alpha / n0 * c_ber
    chi_het = (2.0 + 2.0 * params.v_el) / params.eta - 1.0 + T * eps_b
    chi_line = 1.0 / T - 1.0 + eps_le + params.eps0 + eps_i + eps_ber
    return NoiseDecomposition(
        eps_le=eps_le,
        eps_i=eps_i,
        eps_b=eps_b,
        eps_ber=eps_ber,
        n_tot=receiver_noise(params, phase, alpha, T),
        chi_het=chi_het,
        chi_line=chi_line,
        chi_tot=chi_line + chi_het / T,
        n_le=leakage_photons(params, T),
        sigma_le=leakage_phase_noise(params),
    )

