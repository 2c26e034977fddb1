"""Independent reference computations used by the tests.

None of these import the code paths they check: erfc is evaluated by series
and continued fraction in extended precision, inverses by bisection, and the
receiver noise is re-typed from the model rather than taken from
``sqcc.noise``.
"""

import math

import mpmath as mp
import numpy as np

mp.mp.dps = 40


def erfc_oracle(x):
    """erfc from the Maclaurin series (x < 3) or Lentz continued fraction."""
    x = mp.mpf(x)
    if x < 0:
        return 2 - erfc_oracle(-x)
    if x < 3:
        term, total, n = x, x, 0
        while abs(term) > mp.mpf(10) ** (-45):
            n += 1
            term *= -x * x / n
            total += term / (2 * n + 1)
        return 1 - 2 / mp.sqrt(mp.pi) * total
    # erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    tiny = mp.mpf(10) ** -60
    f = x
    c, d = x, mp.mpf(0)
    for k in range(1, 2000):
        a = mp.mpf(k) / 2
        d = x + a * d
        d = tiny if d == 0 else d
        c = x + a / c
        c = tiny if c == 0 else c
        d = 1 / d
        delta = c * d
        f *= delta
        if abs(delta - 1) < mp.mpf(10) ** -38:
            break
    return mp.exp(-x * x) / mp.sqrt(mp.pi) / f


def bisect(f, lo, hi, target, iters=200, increasing=True):
    lo, hi = mp.mpf(lo), mp.mpf(hi)
    for _ in range(iters):
        mid = (lo + hi) / 2
        v = f(mid)
        if (v < target) == increasing:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def w_oracle(c_ber):
    """Solve ``erfc(w)/2 == c_ber`` by bisection on the series/CF oracle."""
    return float(bisect(lambda w: erfc_oracle(w) / 2, 0, 10, mp.mpf(c_ber), increasing=False))


def n_tot_oracle(T, eta, v_a, eps_le, eps0, alpha, sigma, v_el, n0=0.25):
    return 0.5 * T * eta * (v_a + eps_le + eps0 + alpha**2 / n0 * sigma) + 1 + v_el


def ber_oracle(alpha, T, eta, n_tot, n0=0.25):
    return erfc_oracle(mp.sqrt(T * eta) * alpha / mp.sqrt(4 * n_tot * n0)) / 2


def alpha_oracle(T, eta, v_a, eps_le, eps0, sigma, v_el, c_ber, n0=0.25, hi=1e4):
    """Displacement giving ``c_ber`` by bisection on the BER with direct noise assembly."""
    def ber(a):
        return ber_oracle(a, T, eta, n_tot_oracle(T, eta, v_a, eps_le, eps0, a, sigma, v_el, n0), n0)
    return float(bisect(ber, 0, hi, mp.mpf(c_ber), iters=300, increasing=False))


def eps_le_oracle(n_ref, dt, tau_c, T, xi_a, xi_p, n0=0.25):
    return n_ref * dt / (T * n0 * tau_c) * 10 ** (-xi_a / 10) * 10 ** (-xi_p / 10)


def rotation_exact_ber(alpha, T, eta, v_a, sigma, added_var, n0=0.25, order=120):
    """BER of sign decoding when the phase error rotates the symbol exactly.

    Conditional on the phase error ``theta`` and the other quadrature's bit,
    the measured quadrature is Gaussian; ``theta`` is integrated by
    Gauss-Hermite quadrature.
    """
    g = math.sqrt(T * eta / 2)
    var = g * g * v_a * n0 + added_var
    if sigma == 0:
        nodes, weights = np.zeros(1), np.ones(1)
    else:
        nodes, weights = np.polynomial.hermite_e.hermegauss(order)
        weights = weights / weights.sum()
        nodes = nodes * math.sqrt(sigma)
    from scipy.special import erfc

    total = 0.0
    for other in (1.0, -1.0):
        mean = g * alpha * (np.cos(nodes) - other * np.sin(nodes))
        total += 0.5 * np.sum(weights * 0.5 * erfc(mean / math.sqrt(2 * var)))
    return total


def grid_max(f, lo, hi, n):
    xs = np.logspace(math.log10(lo), math.log10(hi), n)
    vals = [f(x) for x in xs]
    i = int(np.argmax(vals))
    return xs[i], vals[i]
