"""Simultaneous quantum and classical communication over a true local oscillator:
noise budget, classical BER, asymptotic key rate and Monte Carlo cross-checks."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    N0,
    DomainError,
    NumericalPhysicalityError,
    PhaseNoiseBudget,
    QuadraturePair,
    StatisticalPowerError,
    SystemParams,
    channel_transmittance,
    gaussian_sample,
    rng_stream,
)
from .classical import max_tolerable_phase_noise, qpsk_ber, solve_displacement, w_factor  # noqa: E402
from .keyrate import KeyRateReport, holevo_bound, key_rate, optimize_va  # noqa: E402
from .noise import NoiseDecomposition, assemble  # noqa: E402
