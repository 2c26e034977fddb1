"""Symbol-level Monte Carlo of the SQCC round.

Alice superimposes QPSK bits (displacement ``+-alpha``) on Gaussian QKD
modulation; the channel applies a random phase rotation, loss, detector
efficiency and the heterodyne split (folded into one mean scaling
``sqrt(T*eta/2)``) and additive Gaussian noise; Bob decodes signs and
rescales. This is the independent check on the closed-form BER and noise
budget.

Rounds are processed in fixed-size chunks, each drawing from its own stream
``rng_stream(seed, *stream_prefix, chunk_index)``, and reduced in chunk
order, so results do not depend on the number of workers.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .classical import solve_displacement
from .core import DomainError, PhaseNoiseBudget, StatisticalPowerError, SystemParams, rng_stream
from .noise import leakage_excess_noise
from .phase import rotate_arrays

MIN_ROUNDS = 10_000
CHUNK = 1 << 18
RECORD_COLUMNS = ("round_index", "m_a", "n_a", "x_a", "p_a", "x_r", "p_r",
                  "m_b", "n_b", "x_b", "p_b", "theta")


@dataclass(frozen=True)
class SymbolRecord:
    m_a: int
    n_a: int
    x_a: float
    p_a: float
    x_r: float
    p_r: float
    m_b: int
    n_b: int
    x_b: float
    p_b: float
    theta: float


@dataclass(frozen=True)
class Prepared:
    m_a: np.ndarray
    n_a: np.ndarray
    x_a: np.ndarray
    p_a: np.ndarray
    x_ideal: np.ndarray
    p_ideal: np.ndarray


def bit_sign(bit):
    """``exp(-i*pi*bit)``: +1 for bit 0, -1 for bit 1."""
    return 1 - 2 * np.asarray(bit)


def prepare(params: SystemParams, alpha: float, stream: np.random.Generator, size: int) -> Prepared:
    m = stream.integers(0, 2, size, dtype=np.int8)
    n = stream.integers(0, 2, size, dtype=np.int8)
    sd = math.sqrt(params.v_a * params.n0)
    x_a = stream.normal(0.0, sd, size)
    p_a = stream.normal(0.0, sd, size)
    return Prepared(m, n, x_a, p_a, x_a + bit_sign(m) * alpha, p_a + bit_sign(n) * alpha)


def added_noise_variance(params: SystemParams, T: float) -> float:
    """Variance per quadrature of the additive Gaussian noise at Bob (quadrature units)."""
    eps_le = leakage_excess_noise(params, T)
    return params.n0 * (0.5 * T * params.eta * (eps_le + params.eps0) + 1.0 + params.v_el)


def transmit_and_measure(prep: Prepared, params: SystemParams, phase: PhaseNoiseBudget, T: float,
                         stream: np.random.Generator, alpha: float | None = None, linearized=False):
    """Bob's raw quadratures ``(x_r, p_r, theta)``.

    ``linearized=True`` replaces the exact rotation by the first-order
    displacement kick ``-+alpha*theta``, i.e. exactly the Gaussian
    phase-noise term of the closed-form receiver noise; it requires ``alpha``.
    """
    size = prep.x_ideal.shape
    theta = stream.normal(0.0, math.sqrt(phase.total), size)
    if linearized:
        if alpha is None:
            raise DomainError("linearized phase noise needs alpha")
        x = prep.x_ideal - bit_sign(prep.n_a) * alpha * theta
        p = prep.p_ideal + bit_sign(prep.m_a) * alpha * theta
    else:
        x, p = rotate_arrays(prep.x_ideal, prep.p_ideal, theta)
    g = math.sqrt(T * params.eta / 2.0)
    sd = math.sqrt(added_noise_variance(params, T))
    x_r = g * x + stream.normal(0.0, sd, size)
    p_r = g * p + stream.normal(0.0, sd, size)
    return x_r, p_r, theta


def decode(x_r, p_r, alpha, T, eta):
    """Sign decoding and rescaling; ``x_r == 0`` decodes to bit 1."""
    if T <= 0 or eta <= 0:
        raise DomainError(f"T and eta must be > 0, got {T}, {eta}")
    x_r, p_r = np.asarray(x_r), np.asarray(p_r)
    m_b = np.where(x_r > 0, 0, 1).astype(np.int8)
    n_b = np.where(p_r > 0, 0, 1).astype(np.int8)
    k = math.sqrt(2.0 / (T * eta))
    x_b = k * x_r + (2 * m_b - 1) * alpha
    p_b = k * p_r + (2 * n_b - 1) * alpha
    return m_b, n_b, x_b, p_b


def simulate_batch(params, phase, T, alpha, size, stream, linearized=False) -> dict:
    prep = prepare(params, alpha, stream, size)
    x_r, p_r, theta = transmit_and_measure(prep, params, phase, T, stream, alpha, linearized)
    m_b, n_b, x_b, p_b = decode(x_r, p_r, alpha, T, params.eta)
    return dict(m_a=prep.m_a, n_a=prep.n_a, x_a=prep.x_a, p_a=prep.p_a, x_r=x_r, p_r=p_r,
                m_b=m_b, n_b=n_b, x_b=x_b, p_b=p_b, theta=theta)


def batch_records(batch: dict):
    for i in range(batch["x_r"].shape[0]):
        yield SymbolRecord(**{k: (int(v[i]) if v.dtype.kind == "i" else float(v[i]))
                              for k, v in batch.items()})


def _chunks(rounds, chunk_size):
    return [(k, min(chunk_size, rounds - s)) for k, s in enumerate(range(0, rounds, chunk_size))]


# --- streaming statistics -------------------------------------------------

class Moments:
    """Count, mean vector and co-moment matrix, mergeable in a fixed order."""

    def __init__(self, dim):
        self.n = 0
        self.mean = np.zeros(dim)
        self.m2 = np.zeros((dim, dim))

    @classmethod
    def of(cls, data):
        """``data`` has shape (dim, n)."""
        m = cls(data.shape[0])
        m.n = data.shape[1]
        m.mean = data.mean(axis=1)
        c = data - m.mean[:, None]
        m.m2 = c @ c.T
        return m

    def merge(self, other):
        if other.n == 0:
            return self
        n = self.n + other.n
        delta = other.mean - self.mean
        self.m2 = self.m2 + other.m2 + np.outer(delta, delta) * (self.n * other.n / n)
        self.mean = self.mean + delta * (other.n / n)
        self.n = n
        return self

    def cov(self):
        return self.m2 / (self.n - 1)


# order of the rows fed to Moments
_R_X, _R_P, _XA, _XB, _PA, _PB = range(6)


def _chunk_stats(args):
    params, phase, T, alpha, size, seed, ids, linearized = args
    b = simulate_batch(params, phase, T, alpha, size, rng_stream(seed, *ids), linearized)
    err_x = int(np.count_nonzero(b["m_a"] != b["m_b"]))
    err_p = int(np.count_nonzero(b["n_a"] != b["n_b"]))
    data = np.vstack([b["x_r"] * bit_sign(b["m_a"]), b["p_r"] * bit_sign(b["n_a"]),
                      b["x_a"], b["x_b"], b["p_a"], b["p_b"]])
    return err_x, err_p, Moments.of(data)


def wilson_interval(k, n, z=1.96):
    if n <= 0:
        raise StatisticalPowerError("empty sample")
    p = k / n
    den = 1.0 + z * z / n
    centre = (p + z * z / (2 * n)) / den
    half = z / den * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n))
    return max(centre - half, 0.0), min(centre + half, 1.0)


@dataclass(frozen=True)
class EmpiricalReport:
    rounds: int
    alpha: float
    errors_x: int
    errors_p: int
    ber_x: float
    ber_p: float
    ber_x_ci: tuple
    ber_p_ci: tuple
    ber_ci: tuple
    noise_x: float
    noise_p: float
    noise_se: float
    slope_x: float
    slope_p: float
    slope_se: float
    transmittance_fit: float
    chi_tot_x: float
    chi_tot_p: float
    excess_noise_x: float
    excess_noise_p: float
    excess_noise_se: float

    @property
    def ber(self):
        return (self.errors_x + self.errors_p) / (2 * self.rounds)

    @property
    def noise(self):
        return 0.5 * (self.noise_x + self.noise_p)


def run_campaign(params: SystemParams, phase: PhaseNoiseBudget, T: float | None, rounds: int,
                 seed: int, alpha: float | None = None, workers: int = 1, chunk_size: int = CHUNK,
                 linearized=False, stream_prefix=()) -> EmpiricalReport:
    """Empirical BER and noise over ``rounds`` symbols.

    ``alpha`` defaults to the closed-form displacement for ``params.ber_target``.
    Receiver noise is the variance of Bob's raw quadrature about the
    bit-conditional mean, in SNU. Excess noise comes from regressing Bob's
    rescaled variable on Alice's Gaussian: the residual variance in SNU is
    ``1 + chi_tot``, from which the known detector and loss contribution is
    removed.
    """
    if rounds < MIN_ROUNDS:
        raise StatisticalPowerError(f"need at least {MIN_ROUNDS} rounds, got {rounds}")
    T = params.transmittance if T is None else T
    if alpha is None:
        sol = solve_displacement(params, phase, T)
        if not sol.feasible:
            raise DomainError("phase noise exceeds the tolerable limit; no displacement reaches the BER target")
        alpha = sol.alpha
    jobs = [(params, phase, T, alpha, size, seed, (*stream_prefix, k), linearized)
            for k, size in _chunks(rounds, chunk_size)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_chunk_stats, jobs))
    else:
        parts = [_chunk_stats(j) for j in jobs]

    ex_, ep_, mom = 0, 0, Moments(6)
    for e_x, e_p, m in parts:
        ex_ += e_x
        ep_ += e_p
        mom.merge(m)
    n = mom.n
    cov = mom.cov()
    n0 = params.n0
    noise_x, noise_p = float(cov[_R_X, _R_X]) / n0, float(cov[_R_P, _R_P]) / n0

    def regress(ia, ib):
        slope = float(cov[ia, ib] / cov[ia, ia])
        resid = float(cov[ib, ib] - slope * cov[ia, ib])
        return slope, resid

    slope_x, res_x = regress(_XA, _XB)
    slope_p, res_p = regress(_PA, _PB)
    var_a = 0.5 * float(cov[_XA, _XA] + cov[_PA, _PA])
    detector_part = (2.0 + 2.0 * params.v_el) / (T * params.eta) - 1.0
    chi_x, chi_p = res_x / n0 - 1.0, res_p / n0 - 1.0
    rel = math.sqrt(2.0 / (n - 1))
    slope = 0.5 * (slope_x + slope_p)
    return EmpiricalReport(
        rounds=n, alpha=alpha, errors_x=ex_, errors_p=ep_,
        ber_x=ex_ / n, ber_p=ep_ / n,
        ber_x_ci=wilson_interval(ex_, n), ber_p_ci=wilson_interval(ep_, n),
        ber_ci=wilson_interval(ex_ + ep_, 2 * n),
        noise_x=noise_x, noise_p=noise_p, noise_se=0.5 * (noise_x + noise_p) * rel,
        slope_x=slope_x, slope_p=slope_p,
        slope_se=math.sqrt(0.5 * (res_x + res_p) / (n * var_a)),
        transmittance_fit=T * slope * slope,
        chi_tot_x=chi_x, chi_tot_p=chi_p,
        excess_noise_x=chi_x - detector_part, excess_noise_p=chi_p - detector_part,
        excess_noise_se=0.5 * (res_x + res_p) / n0 * rel,
    )


def write_records(out, params, phase, T, rounds, seed, alpha=None, chunk_size=CHUNK,
                  linearized=False, stream_prefix=()):
    """Dump every round as CSV, regenerating the exact chunks ``run_campaign`` uses."""
    T = params.transmittance if T is None else T
    if alpha is None:
        alpha = solve_displacement(params, phase, T).alpha
    w = csv.writer(out, lineterminator="\n")
    w.writerow(RECORD_COLUMNS)
    idx = 0
    for k, size in _chunks(rounds, chunk_size):
        b = simulate_batch(params, phase, T, alpha, size, rng_stream(seed, *stream_prefix, k), linearized)
        for rec in batch_records(b):
            w.writerow([idx, rec.m_a, rec.n_a, *(f"{getattr(rec, c):.17g}" for c in ("x_a", "p_a", "x_r", "p_r")),
                        rec.m_b, rec.n_b, *(f"{getattr(rec, c):.17g}" for c in ("x_b", "p_b", "theta"))])
            idx += 1
    return idx
