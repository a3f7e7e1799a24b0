import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ehmac import (DomainError, MomentSource, PmfTruncation, StabilityError, SystemParams,
                   TruncationError, aoi_average, aoi_both, moments_t, moments_x, pbar2, pmf_t,
                   pmf_t_total_mass)
from ehmac.aoi import average_aoi, closed_form_moments, paper_square_sum_closed_form
from ehmac.aoi import _paper_square_sum, DEFAULT_TRUNCATION

EH = SystemParams(delta=0.3, q2=0.8)


def exact_pmf(delta, q2, k):
    """Rational evaluation of the double sum."""
    d, q = Fraction(delta), Fraction(q2)
    pb = d / q
    charging = sum((1 - d) ** (k - l) * d ** l * (1 - q) ** (l - 1) * q for l in range(1, k + 1))
    return (1 - pb) * charging + pb * (1 - q) ** (k - 1) * q


@pytest.mark.parametrize("k", [1, 2, 5, 17])
def test_pmf_matches_rational_oracle(k):
    assert pmf_t(EH, k) == pytest.approx(float(exact_pmf(0.3, 0.8, k)), rel=1e-13)


def test_pmf_rejects_bad_k():
    for k in (0, -1, 1.5):
        with pytest.raises(ValueError):
            pmf_t(EH, k)


def test_reference_values():
    assert pmf_t_total_mass(EH) == pytest.approx(0.906914894, abs=1e-9)
    assert pmf_t_total_mass(SystemParams(delta=0.1, q2=0.9)) == pytest.approx(0.91919, abs=1e-5)
    assert moments_t(EH) == pytest.approx((2.275751660, 11.0150394), rel=1e-8)
    paper = moments_t(EH, "paper")
    assert paper[0] == pytest.approx(1.907309661, rel=1e-9)
    assert paper[1] == pytest.approx(11.0150394, rel=1e-8)
    both = aoi_both(EH)
    assert both[MomentSource.PMF_DERIVED].aoi == pytest.approx(3.4725, abs=1e-4)
    assert both[MomentSource.PAPER_VERBATIM].aoi == pytest.approx(3.8506, abs=1e-4)


def test_grid_mass_is_one_and_aoi_identity():
    p = SystemParams(s2_power="grid", q2=0.5, lam=0.2, q1=0.8)
    assert pmf_t_total_mass(p) == pytest.approx(1.0, abs=1e-12)
    a = aoi_average(p)
    assert a.aoi == pytest.approx(1.0 / (0.5 * a.pbar2), rel=1e-12)
    assert aoi_average(SystemParams(s2_power="grid", q2=0.5)).aoi == pytest.approx(2.568157, abs=1e-6)


def test_sources_agree_in_grid_mode():
    p = SystemParams(s2_power="grid", q2=0.3)
    both = aoi_both(p)
    assert both[MomentSource.PMF_DERIVED].aoi == pytest.approx(
        both[MomentSource.PAPER_VERBATIM].aoi, rel=1e-12)


def test_domain_errors():
    with pytest.raises(DomainError):
        moments_t(EH.with_(delta=0.0))
    with pytest.raises(StabilityError):
        moments_t(EH.with_(delta=0.8))
    with pytest.raises(DomainError):
        moments_x(2.0, 5.0, 0.0)


def test_truncation_error_when_budget_too_small():
    with pytest.raises(TruncationError):
        moments_t(EH.with_(delta=0.001, q2=0.5), trunc=PmfTruncation(k_max=50))


def test_truncation_validation():
    with pytest.raises(ValueError):
        PmfTruncation(tail_tolerance=0.0)


def test_moments_x_compound_geometric():
    # X = sum of N iid T with N geometric(p): E[X] = E[T]/p
    mean_x, second_x = moments_x(1.0, 1.0, 0.25)
    assert mean_x == 4.0
    assert second_x == pytest.approx(28.0)  # geometric(0.25): (2 - p)/p^2


def test_average_aoi_geometric_case():
    q, p = 0.4, 0.7
    assert average_aoi(1 / q, (2 - q) / q ** 2, p) == pytest.approx(1 / (q * p))


def test_pbar2_branches():
    p = SystemParams(lam=0.9)
    from ehmac import success_probs
    s = success_probs(p)
    assert pbar2(p) == pytest.approx(s.p2_solo * 0.4 + s.p2_joint * 0.6)
    assert pbar2(SystemParams(lam=0.0)) == pytest.approx(success_probs(p).p2_solo)


delta_q2 = st.tuples(st.floats(0.02, 1.0), st.floats(0.05, 0.95)).map(
    lambda t: (t[1] * t[0], t[0]))


@settings(max_examples=150, deadline=None)
@given(dq=delta_q2)
def test_mass_below_one_and_closed_form(dq):
    delta, q2 = dq
    p = SystemParams(delta=delta, q2=q2)
    mass = pmf_t_total_mass(p)
    closed_mass, _, _ = closed_form_moments(delta, q2, delta / q2)
    assert mass == pytest.approx(closed_mass, rel=1e-9)
    assert mass <= 1.0 + 1e-12


@settings(max_examples=150, deadline=None)
@given(dq=delta_q2)
def test_moments_consistent(dq):
    delta, q2 = dq
    p = SystemParams(delta=delta, q2=q2)
    m1, m2 = moments_t(p)
    assert m1 > 0 and m2 >= m1
    mass = pmf_t_total_mass(p)
    assert m2 * mass >= m1 ** 2 * (1 - 1e-9)  # Cauchy-Schwarz on the sub-probability measure
    a = aoi_average(p)
    assert a.aoi >= 1.0 and a.mean_x >= a.mean_t


@settings(max_examples=100, deadline=None)
@given(delta=st.floats(0.01, 0.9), a=st.floats(0.0, 0.95))
def test_paper_square_sum_closed_form(delta, a):
    assert _paper_square_sum(delta, a, DEFAULT_TRUNCATION) == pytest.approx(
        paper_square_sum_closed_form(delta, a), rel=1e-9)
