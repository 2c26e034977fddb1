import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import eps_le_oracle, n_tot_oracle
from sqcc.core import DomainError, PhaseNoiseBudget, SystemParams
from sqcc.noise import (
    assemble,
    leakage_excess_noise,
    leakage_phase_noise,
    leakage_photons,
    phase_excess_noises,
    sigma_b_shot_limit,
    two_laser_phase_noise,
)

REF = SystemParams()
CURVE1 = PhaseNoiseBudget(1e-5, 1e-3)


@pytest.mark.parametrize("T, expected", [(1.0, 1e-3), (0.01, 0.1)])
def test_leakage_photons(T, expected):
    assert leakage_photons(REF, T) == pytest.approx(expected, rel=1e-12)


def test_leakage_photons_perfect_extinction():
    assert leakage_photons(REF.with_(xi_a_db=math.inf, xi_p_db=math.inf), 0.01) == 0.0


@pytest.mark.parametrize("T, expected", [(0.01, 0.02), (1.0, 2e-4)])
def test_leakage_excess_noise_reference(T, expected):
    assert leakage_excess_noise(REF, T) == pytest.approx(expected, rel=1e-12)


def test_leakage_excess_noise_zero_delay():
    assert leakage_excess_noise(REF.with_(dt_s=0.0), 0.01) == 0.0


def test_leakage_zero_transmittance():
    with pytest.raises(DomainError):
        leakage_excess_noise(REF, 0.0)
    with pytest.raises(DomainError):
        leakage_photons(REF, 0.0)


@given(n_ref=st.floats(1, 1e6), dt=st.floats(1e-10, 1e-6), tau=st.floats(1e-7, 1e-3),
       T=st.floats(1e-4, 1.0), xa=st.floats(0, 60), xp=st.floats(0, 60))
def test_leakage_composition_identity(n_ref, dt, tau, T, xa, xp):
    p = REF.with_(n_ref=n_ref, dt_s=dt, tau_c_s=tau, xi_a_db=xa, xi_p_db=xp)
    closed = leakage_excess_noise(p, T)
    composed = leakage_photons(p, T) * leakage_phase_noise(p) / (2 * p.n0)
    assert closed == pytest.approx(composed, rel=1e-12)
    assert closed == pytest.approx(eps_le_oracle(n_ref, dt, tau, T, xa, xp), rel=1e-12)


@pytest.mark.parametrize("n_ref, expected", [(1000, 1e-3), (1e4, 1e-4)])
def test_sigma_b(n_ref, expected):
    assert sigma_b_shot_limit(n_ref, 0.5) == pytest.approx(expected, rel=1e-14)


def test_sigma_b_limit_and_domain():
    assert sigma_b_shot_limit(math.inf, 0.5) == 0.0
    for args in [(0, 0.5), (1000, 0), (1000, 1.5)]:
        with pytest.raises(DomainError):
            sigma_b_shot_limit(*args)


def test_two_laser_phase_noise():
    assert two_laser_phase_noise(0.0, 1e-6, 1e-6, 1000, 0.5) == pytest.approx(1e-3)
    assert two_laser_phase_noise(50e-9, 1e-6, 1e-6, 1000, 0.5) == pytest.approx(0.101, rel=1e-12)
    assert two_laser_phase_noise(50e-9, math.inf, math.inf, 1000, 0.5) == pytest.approx(1e-3)
    with pytest.raises(DomainError):
        two_laser_phase_noise(50e-9, 0, 1e-6, 1000, 0.5)


def test_phase_excess_noises():
    assert phase_excess_noises(REF, PhaseNoiseBudget(0, 0), 3.0) == (0.0, 0.0)
    _, eps_b = phase_excess_noises(REF.with_(v_a=4.0), PhaseNoiseBudget(0, 1e-3), 0.0)
    assert eps_b == pytest.approx(4e-3)
    eps_i, _ = phase_excess_noises(REF.with_(v_a=0.0), PhaseNoiseBudget(1e-4, 0), 1.0)
    assert eps_i == pytest.approx(4e-4)
    with pytest.raises(DomainError):
        phase_excess_noises(REF, CURVE1, -1.0)


def test_assemble_ideal_limit():
    p = REF.with_(eta=1.0, v_el=0.0, eps0=0.0, xi_a_db=math.inf)
    nd = assemble(p, PhaseNoiseBudget(0, 0), 0.0, 1.0, 1e-9)
    assert (nd.chi_het, nd.chi_line, nd.chi_tot) == (1.0, 0.0, 1.0)


def test_assemble_chi_het_value():
    nd = assemble(REF, PhaseNoiseBudget(1e-4, 0), 2.0, 0.37, 1e-9)
    assert nd.chi_het == pytest.approx(3.4, rel=1e-14)


def test_assemble_reference_chi_line_100km():
    p = REF.with_(v_a=4.0)
    nd = assemble(p, PhaseNoiseBudget(1e-5, 1e-3), 0.0, 0.01, 1e-9)
    assert nd.chi_line == pytest.approx(99 + 0.02 + 0.01 + 4e-5, rel=1e-12)


def test_assemble_errors():
    with pytest.raises(DomainError):
        assemble(REF, CURVE1, 1.0, 0.0, 1e-9)
    with pytest.raises(DomainError):
        assemble(REF, CURVE1, 1.0, 0.5, 0.5)


params_st = st.builds(
    SystemParams,
    eta=st.floats(0.05, 1.0), v_el=st.floats(0, 1), v_a=st.floats(0, 50), eps0=st.floats(0, 0.1),
    n_ref=st.floats(10, 1e5), xi_a_db=st.floats(10, 60), xi_p_db=st.floats(10, 60),
)


@given(p=params_st, si=st.floats(0, 1e-2), sb=st.floats(0, 1e-2), alpha=st.floats(0, 50),
       T=st.floats(1e-3, 1), c=st.floats(1e-12, 0.4))
def test_assemble_against_direct_formulas(p, si, sb, alpha, T, c):
    nd = assemble(p, PhaseNoiseBudget(si, sb), alpha, T, c)
    eps_le = eps_le_oracle(p.n_ref, p.dt_s, p.tau_c_s, T, p.xi_a_db, p.xi_p_db)
    assert nd.n_tot == pytest.approx(n_tot_oracle(T, p.eta, p.v_a, eps_le, p.eps0, alpha, si + sb, p.v_el), rel=1e-12)
    assert nd.chi_tot == pytest.approx(nd.chi_line + nd.chi_het / T, rel=1e-12)
    for v in (nd.eps_le, nd.eps_i, nd.eps_b, nd.eps_ber, nd.n_tot, nd.chi_het, nd.chi_line,
              nd.chi_tot, nd.n_le, nd.sigma_le):
        assert v >= 0


@given(p=params_st, s=st.floats(1e-6, 1e-2), alpha=st.floats(0.1, 50), T=st.floats(1e-3, 1))
def test_trusted_untrusted_partition(p, s, alpha, T):
    base = assemble(p, PhaseNoiseBudget(s, s), alpha, T, 1e-9)
    no_b = assemble(p, PhaseNoiseBudget(s, 0), alpha, T, 1e-9)
    no_i = assemble(p, PhaseNoiseBudget(0, s), alpha, T, 1e-9)
    # sigma_b only touches chi_het, sigma_i only chi_line
    assert no_b.chi_line == base.chi_line and no_b.chi_het < base.chi_het
    assert no_i.chi_het == base.chi_het and no_i.chi_line < base.chi_line
    # eps0 and the crosstalk term never enter chi_het
    assert assemble(p.with_(eps0=p.eps0 + 0.5), PhaseNoiseBudget(s, s), alpha, T, 0.1).chi_het == \
        assemble(p, PhaseNoiseBudget(s, s), alpha, T, 1e-9).chi_het


@settings(max_examples=50)
@given(p=params_st, alpha=st.floats(0.1, 20), T=st.floats(1e-3, 1), d=st.floats(1e-3, 1))
def test_n_tot_increasing(p, alpha, T, d):
    ph = PhaseNoiseBudget(1e-4, 1e-3)
    base = assemble(p, ph, alpha, T, 1e-9).n_tot
    for q, a in [(p.with_(v_a=p.v_a + d), alpha), (p.with_(eps0=p.eps0 + d), alpha),
                 (p.with_(v_el=p.v_el + d), alpha), (p, alpha + d)]:
        assert assemble(q, ph, a, T, 1e-9).n_tot > base
