"""Shared parameter types, unit conventions and seeded random streams.

All noise variances are in shot-noise units (SNU). Quadrature values are in
units where the vacuum variance is ``N0 = 1/4``; ``N0`` is carried explicitly
rather than folded into the formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

import numpy as np

N0 = 0.25


class DomainError(ValueError):
    """Input outside the domain of a physical formula."""


class NumericalPhysicalityError(ArithmeticError):
    """A computed quantity violates a physical bound beyond float tolerance."""

    def __init__(self, message, **values):
        super().__init__(f"{message}: {values}" if values else message)
        self.values = values


class StatisticalPowerError(ValueError):
    """Too few samples for the requested statistical claim."""


def _require(cond, msg):
    if not cond:
        raise DomainError(msg)


@dataclass(frozen=True)
class SystemParams:
    """Physical and protocol constants. Defaults are the reference operating point used by the sweeps.

    ``xi_a_db``/``xi_p_db`` and ``tau_c_s`` accept ``math.inf`` for the ideal
    limits (perfect extinction, infinitely coherent laser).
    """

    gamma: float = 0.2
    length_km: float = 0.0
    eta: float = 0.5
    v_el: float = 0.1
    f_rec: float = 0.95
    v_a: float = 4.0
    eps0: float = 0.01
    n_ref: float = 1000.0
    dt_s: float = 50e-9
    tau_c_s: float = 1e-6
    xi_a_db: float = 30.0
    xi_p_db: float = 30.0
    ber_target: float = 1e-9
    n0: float = N0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise DomainError(f"{f.name} must be a real number, got {v!r}")
            if math.isnan(v):
                raise DomainError(f"{f.name} is NaN")
        _require(self.n0 == N0, f"n0 is fixed at {N0}, got {self.n0}")
        _require(math.isfinite(self.gamma) and self.gamma >= 0, "gamma must be >= 0")
        _require(math.isfinite(self.length_km) and self.length_km >= 0, "length_km must be >= 0")
        _require(0 < self.eta <= 1, "eta must lie in (0, 1]")
        _require(math.isfinite(self.v_el) and self.v_el >= 0, "v_el must be >= 0")
        _require(0 < self.f_rec <= 1, "f_rec must lie in (0, 1]")
        # v_a == 0 is admitted: it is the unmodulated (pure classical) limit
        _require(math.isfinite(self.v_a) and self.v_a >= 0, "v_a must be >= 0")
        _require(math.isfinite(self.eps0) and self.eps0 >= 0, "eps0 must be >= 0")
        _require(self.n_ref > 0, "n_ref must be > 0")
        _require(math.isfinite(self.dt_s) and self.dt_s >= 0, "dt_s must be >= 0")
        _require(self.tau_c_s > 0, "tau_c_s must be > 0")
        _require(self.xi_a_db >= 0 and self.xi_p_db >= 0, "extinction ratios must be >= 0 dB")
        _require(0 < self.ber_target < 0.5, "ber_target must lie in (0, 0.5)")

    def with_(self, **changes) -> "SystemParams":
        return replace(self, **changes)

    @property
    def transmittance(self) -> float:
        return channel_transmittance(self.gamma, self.length_km)

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class PhaseNoiseBudget:
    """Residual phase noise split into untrusted (``sigma_i``) and trusted (``sigma_b``) parts, rad^2.

    ``tau1_s``/``tau2_s`` are the laser coherence times of the two-laser
    reference scheme; they feed :func:`sqcc.noise.two_laser_phase_noise` only.
    """

    sigma_i: float
    sigma_b: float
    tau1_s: float | None = None
    tau2_s: float | None = None

    def __post_init__(self):
        _require(math.isfinite(self.sigma_i) and self.sigma_i >= 0, "sigma_i must be >= 0")
        _require(math.isfinite(self.sigma_b) and self.sigma_b >= 0, "sigma_b must be >= 0")
        _require(self.sigma_i + self.sigma_b < math.pi**2, "total phase noise must be < pi^2")
        for name in ("tau1_s", "tau2_s"):
            v = getattr(self, name)
            _require(v is None or v > 0, f"{name} must be > 0 when given")

    @property
    def total(self) -> float:
        return self.sigma_i + self.sigma_b

    def all_untrusted(self) -> "PhaseNoiseBudget":
        """Same total phase noise, all of it attributed to the eavesdropper."""
        return replace(self, sigma_i=self.sigma_i + self.sigma_b, sigma_b=0.0)

    @classmethod
    def shot_limited(cls, sigma_i: float, n_ref: float, eta: float) -> "PhaseNoiseBudget":
        from .noise import sigma_b_shot_limit

        return cls(sigma_i=sigma_i, sigma_b=sigma_b_shot_limit(n_ref, eta))


@dataclass(frozen=True)
class QuadraturePair:
    x: float
    p: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.p)):
            raise DomainError(f"quadratures must be finite, got ({self.x}, {self.p})")


def channel_transmittance(gamma: float, length_km: float) -> float:
    """Fiber transmittance ``10**(-gamma * L / 10)``."""
    if gamma < 0 or length_km < 0:
        raise DomainError(f"gamma and length must be >= 0, got {gamma}, {length_km}")
    return 10.0 ** (-gamma * length_km / 10.0)


def db_to_linear_loss(db: float) -> float:
    """``10**(-db/10)``; ``inf`` dB maps to exactly 0."""
    return 0.0 if math.isinf(db) else 10.0 ** (-db / 10.0)


def rng_stream(seed: int, *stream_ids: int) -> np.random.Generator:
    """Independent generator keyed by a master seed and a stream path.

    Streams with distinct ``stream_ids`` are statistically independent and
    reproducible regardless of the order in which they are created.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(s) for s in stream_ids))
    return np.random.Generator(np.random.PCG64(ss))


def gaussian_sample(mean, variance, stream: np.random.Generator, size=None):
    if np.any(np.asarray(variance) < 0):
        raise DomainError(f"variance must be >= 0, got {variance}")
    return stream.normal(mean, np.sqrt(variance), size=size)
