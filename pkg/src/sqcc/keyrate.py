"""Asymptotic reverse-reconciliation key rate and modulation-variance optimization.

The Holevo bound uses the heterodyne, trusted-detector-noise expressions with
``V = V_A + 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .classical import solve_displacement
from .core import DomainError, NumericalPhysicalityError, PhaseNoiseBudget, SystemParams
from .noise import NoiseDecomposition, assemble

# float dust below a physical bound is clamped; beyond this it is a model violation
ERROR_TOL = 1e-6
INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

_NAN4 = (math.nan,) * 4


@dataclass(frozen=True)
class KeyRateReport:
    i_ab: float
    chi_be: float
    lambdas: tuple
    abcd: tuple
    rate_raw: float
    v_total: float
    v_a: float
    alpha: float
    feasible: bool
    noise: NoiseDecomposition | None = None
    v_a_opt: float | None = None
    evaluations: int = field(default=1, compare=False)

    @property
    def rate(self) -> float:
        """User-facing rate: negative (or infeasible) values reported as 0."""
        return max(self.rate_raw, 0.0)


def g_function(x: float) -> float:
    """Von Neumann entropy of a thermal state with mean photon number ``x``, bits."""
    if x < 0:
        raise DomainError(f"G(x) needs x >= 0, got {x}")
    if x == 0:
        return 0.0
    # (x+1)log(x+1) - x log x, regrouped so large x does not cancel
    return (math.log1p(x) + x * math.log1p(1.0 / x)) / math.log(2.0)


def mutual_information(v_a: float, chi_tot: float) -> float:
    if chi_tot < 0:
        raise DomainError(f"chi_tot must be >= 0, got {chi_tot}")
    if v_a < 0:
        raise DomainError(f"v_a must be >= 0, got {v_a}")
    return math.log2((v_a + 1.0 + chi_tot) / (1.0 + chi_tot))


def _symplectic_pair(s, q, label):
    """Roots of ``l^4 - s l^2 + q = 0`` as ``(l1, l2)`` with clamping at 1."""
    disc = s * s - 4.0 * q
    if disc < 0:
        if disc < -ERROR_TOL * max(1.0, s * s):
            raise NumericalPhysicalityError(f"negative discriminant for {label}", sum=s, product=q, disc=disc)
        disc = 0.0
    big = 0.5 * (s + math.sqrt(disc))
    # small root from the product avoids cancellation when q << s^2
    small = q / big if big > 0 else 0.0
    out = []
    for sq in (big, small):
        if sq < 1.0:
            if sq < 1.0 - ERROR_TOL:
                raise NumericalPhysicalityError(f"symplectic eigenvalue below 1 for {label}",
                                                sum=s, product=q, lambda_sq=sq)
            sq = 1.0
        out.append(math.sqrt(sq))
    return tuple(out)


def holevo_abcd(v_total, T, chi_line, chi_het, chi_tot):
    V = v_total
    a = V * V * (1.0 - 2.0 * T) + 2.0 * T + T * T * (V + chi_line) ** 2
    b = T * T * (V * chi_line + 1.0) ** 2
    sb = math.sqrt(b)
    denom = (T * (V + chi_tot)) ** 2
    c = (a * chi_het**2 + b + 1.0 + 2.0 * chi_het * (V * sb + T * (V + chi_line))
         + 2.0 * T * (V * V - 1.0)) / denom
    d = ((V + sb * chi_het) / (T * (V + chi_tot))) ** 2
    return a, b, c, d


def holevo_bound(v_total, T, chi_line, chi_het, chi_tot):
    """Eve's Holevo information on Bob's data.

    Returns ``(chi_be, (l1, ..., l5), (A, B, C, D))``. Squared eigenvalues
    within ``1e-6`` below 1 are clamped to 1; anything further below raises
    :class:`NumericalPhysicalityError`.
    """
    if v_total < 1:
        raise DomainError(f"v_total must be >= 1, got {v_total}")
    if not (0 < T <= 1):
        raise DomainError(f"transmittance must lie in (0, 1], got {T}")
    a, b, c, d = holevo_abcd(v_total, T, chi_line, chi_het, chi_tot)
    l1, l2 = _symplectic_pair(a, b, "lambda1,2")
    l3, l4 = _symplectic_pair(c, d, "lambda3,4")
    l5 = 1.0
    g = lambda lam: g_function((lam - 1.0) / 2.0)
    chi_be = g(l1) + g(l2) - g(l3) - g(l4) - g(l5)
    return chi_be, (l1, l2, l3, l4, l5), (a, b, c, d)


def key_rate(params: SystemParams, phase: PhaseNoiseBudget, T: float | None = None) -> KeyRateReport:
    """``f * I_AB - chi_BE`` at ``params.v_a`` with the displacement fixed by the BER target."""
    T = params.transmittance if T is None else T
    sol = solve_displacement(params, phase, T)
    if not sol.feasible:
        return KeyRateReport(i_ab=math.nan, chi_be=math.nan, lambdas=(math.nan,) * 5, abcd=_NAN4,
                             rate_raw=-math.inf, v_total=params.v_a + 1.0, v_a=params.v_a,
                             alpha=math.nan, feasible=False)
    nd = assemble(params, phase, sol.alpha, T, params.ber_target)
    i_ab = mutual_information(params.v_a, nd.chi_tot)
    v = params.v_a + 1.0
    chi_be, lambdas, abcd = holevo_bound(v, T, nd.chi_line, nd.chi_het, nd.chi_tot)
    return KeyRateReport(i_ab=i_ab, chi_be=chi_be, lambdas=lambdas, abcd=abcd,
                         rate_raw=params.f_rec * i_ab - chi_be, v_total=v, v_a=params.v_a,
                         alpha=sol.alpha, feasible=True, noise=nd)


def golden_section_max(f, lo, hi, tol):
    """Maximize a unimodal ``f`` on ``[lo, hi]`` to absolute bracket width ``tol``.

    Returns ``(x_best, f_best, n_evals)``.
    """
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    n = 2
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
        n += 1
    return (c, fc, n) if fc >= fd else (d, fd, n)


def maximize_log_scale(f, lo, hi, rel_tol=1e-4, n_grid=32):
    """Maximize ``f(x)`` over ``x`` in ``[lo, hi]`` on a log axis.

    A log-spaced grid picks the bracket around the best point, then golden
    section refines it. Grid values are kept as candidates so a flat or
    infeasible shelf cannot win over a better grid point.
    """
    if not (0 < lo < hi):
        raise DomainError(f"need 0 < lo < hi, got {lo}, {hi}")
    u = np.linspace(math.log(lo), math.log(hi), n_grid)
    vals = [f(math.exp(x)) for x in u]
    i = int(np.argmax(vals))
    if not math.isfinite(vals[i]) and vals[i] < 0:
        return math.exp(u[i]), vals[i], n_grid
    ua, ub = u[max(i - 1, 0)], u[min(i + 1, n_grid - 1)]
    g = lambda x: f(math.exp(x))
    # bracket width in log space equals relative tolerance in x
    x, fx, n = golden_section_max(g, ua, ub, rel_tol)
    n += n_grid
    if vals[i] > fx:
        x, fx = u[i], vals[i]
    # neighbour probes; walk uphill if golden section stopped on a slope
    ulo, uhi = u[0], u[-1]
    for _ in range(100):
        nbrs = [min(max(x + s, ulo), uhi) for s in (-rel_tol, rel_tol)]
        fn = [g(v) for v in nbrs]
        n += 2
        j = int(np.argmax(fn))
        if fn[j] <= fx:
            break
        x, fx = nbrs[j], fn[j]
    return math.exp(x), fx, n


def optimize_va(params: SystemParams, phase: PhaseNoiseBudget, T: float | None = None,
                bounds=(1e-2, 1e2), rel_tol=1e-4, n_grid=32) -> KeyRateReport:
    """Key-rate report at the modulation variance that maximizes the raw rate."""
    T = params.transmittance if T is None else T

    def rate_at(v_a):
        return key_rate(params.with_(v_a=v_a), phase, T).rate_raw

    v_best, _, n = maximize_log_scale(rate_at, bounds[0], bounds[1], rel_tol, n_grid)
    rep = key_rate(params.with_(v_a=v_best), phase, T)
    return replace(rep, v_a_opt=v_best, evaluations=n + 1)
