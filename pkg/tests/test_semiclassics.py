import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riesz_lab.errors import InvalidArgument
from riesz_lab.geometry import Ball, Box, Interval, Product, normalize_unit_volume
from riesz_lab.semiclassics import (
    aizenman_lieb_lift,
    boundary_term,
    default_alpha,
    lsc,
    normalized_ratio,
    normalized_ratios,
    remainder_profile,
    weyl_main,
    weyl_two_term,
)
from riesz_lab.spectrum import DIRICHLET, NEUMANN, riesz_mean

PI2 = math.pi**2


@pytest.mark.parametrize(
    "gamma, dim, expected",
    [(0, 1, 1 / math.pi), (1, 1, 2 / (3 * math.pi)), (0, 2, 1 / (4 * math.pi)), (1, 2, 1 / (8 * math.pi)),
     (0, 3, 1 / (6 * PI2)), (1, 0, 1.0), (0, 0, 1.0)],
)
def test_lsc_closed_forms(gamma, dim, expected):
    assert lsc(gamma, dim) == pytest.approx(expected, rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 5), st.integers(1, 6))
def test_lsc_dimension_step(gamma, d):
    ratio = lsc(gamma, d) / lsc(gamma, d - 1)
    expected = math.gamma(1 + gamma + (d - 1) / 2) / (math.sqrt(4 * math.pi) * math.gamma(1 + gamma + d / 2))
    assert ratio == pytest.approx(expected, rel=1e-12)


def test_weyl_main_examples():
    assert weyl_main(Box((1, 1)), 0, 50) == pytest.approx(50 / (4 * math.pi), rel=1e-14)
    assert weyl_main(Interval(1), 1, 1e4) == pytest.approx(212206.59, rel=1e-7)
    assert weyl_main(Ball(1, 3), 1.5, 0) == 0.0


def test_two_term_examples():
    t = weyl_two_term(Box((1, 1)), DIRICHLET, 1, 1000)
    assert t.main_term == pytest.approx(39788.7358, rel=1e-9)
    assert t.boundary_term == pytest.approx(2 / (3 * math.pi) * 1000**1.5, rel=1e-12)
    assert t.prediction == pytest.approx(33078.26, abs=0.1)
    assert weyl_two_term(Box((1, 1)), NEUMANN, 1, 1000).prediction == pytest.approx(46499.22, abs=0.1)
    for lam in (10.0, 1e3):
        p = weyl_two_term(Interval(1), DIRICHLET, 1, lam).prediction
        assert p == pytest.approx(2 / (3 * math.pi) * lam**1.5 - lam / 2, rel=1e-12)
    assert boundary_term(Interval(1), 0, 100) == pytest.approx(0.5)


def test_normalized_ratio_examples():
    assert normalized_ratio(Interval(1), DIRICHLET, 1, 1e4) == pytest.approx(0.9764, abs=1e-4)
    assert normalized_ratio(Box((1, 1)), DIRICHLET, 0, 50) == pytest.approx(3 / 3.9789, abs=1e-4)
    assert normalized_ratio(Box((1, 1)), DIRICHLET, 1, 10.0) == 0.0
    with pytest.raises(InvalidArgument):
        normalized_ratio(Box((1, 1)), DIRICHLET, 1, 0.0)
    lams = [10.0, 100.0, 1000.0]
    np.testing.assert_array_equal(
        normalized_ratios(Box((1, 2)), NEUMANN, 1, lams), [normalized_ratio(Box((1, 2)), NEUMANN, 1, x) for x in lams]
    )


def test_remainder_profile_box():
    prof = remainder_profile(Box((1, 1)), DIRICHLET, 1, np.logspace(2, 6, 40))
    assert prof.bounded is True
    assert len(prof.records) == 40
    assert prof.empirical_constant == max(r.rate_factor for r in prof.records)
    buf = io.StringIO()
    prof.to_csv(buf)
    assert buf.getvalue().splitlines()[0] == "lambda,value,main,boundary,remainder,normalized,rate_factor"


def test_remainder_profile_disk_normalized_remainder_decays():
    D = normalize_unit_volume(Ball(1, 2))[0]
    prof = remainder_profile(D, DIRICHLET, 1, np.logspace(2, 5, 12))
    early = max(r.normalized for r in prof.records[:4])
    late = max(r.normalized for r in prof.records[-4:])
    assert late < early


def test_remainder_profile_single_point_and_alpha_rules():
    prof = remainder_profile(Box((1, 1)), NEUMANN, 0.5, [100.0])
    assert prof.bounded is None and prof.records[0].alpha == default_alpha(0.5) == 0.25
    with pytest.raises(InvalidArgument):
        remainder_profile(Box((1, 1)), DIRICHLET, 1, [100.0], alpha=0.5)
    with pytest.raises(InvalidArgument):
        remainder_profile(Box((1, 1)), DIRICHLET, 0.5, [100.0], alpha=0.5)
    with pytest.raises(InvalidArgument):
        remainder_profile(Box((1, 1)), DIRICHLET, 1, [100.0, 10.0])


def test_lift_examples():
    assert aizenman_lieb_lift(Interval(math.pi), DIRICHLET, 0, 1, 10) == 16.0
    direct = (50 - 2 * PI2) ** 2 + 2 * (50 - 5 * PI2) ** 2
    assert riesz_mean(Box((1, 1)), DIRICHLET, 2, 50) == pytest.approx(direct, rel=1e-14)
    assert aizenman_lieb_lift(Box((1, 1)), DIRICHLET, 1, 2, 50) == pytest.approx(direct, rel=1e-12)
    assert aizenman_lieb_lift(Box((1, 1)), DIRICHLET, 0, 1, 2 * PI2) == 0.0
    with pytest.raises(InvalidArgument):
        aizenman_lieb_lift(Box((1, 1)), DIRICHLET, 1, 1, 50)


lift_domains = st.sampled_from(
    [Box((1, 1)), Box((0.7, 1.9)), Box((1, 1.2, 0.8)), Ball(0.6, 2), Ball(0.7, 3), Interval(2.0),
     Product(Interval(0.4), 1.3), Product(Ball(0.5, 2), 0.9)]
)


@settings(max_examples=80, deadline=None)
@given(lift_domains, st.sampled_from([DIRICHLET, NEUMANN]), st.sampled_from([0.0, 0.5, 1.0, 2.0]),
       st.sampled_from([0.5, 1.0, 1.5]), st.floats(20.0, 2000.0))
def test_lift_consistency(D, bc, g0, step, lam):
    lifted = aizenman_lieb_lift(D, bc, g0, g0 + step, lam)
    direct = riesz_mean(D, bc, g0 + step, lam)
    assert lifted == pytest.approx(direct, rel=1e-9)


@pytest.mark.parametrize("bc", [DIRICHLET, NEUMANN])
def test_sup_ratio_monotone_in_gamma(bc):
    D = Box((1, 1.7))
    lams = np.logspace(1, 4, 60)
    ext = []
    for g in (0.0, 0.5, 1.0, 1.5, 2.0):
        r = normalized_ratios(D, bc, g, lams)
        ext.append(r.max() if bc is DIRICHLET else r.min())
    diffs = np.diff(ext)
    assert np.all(diffs <= 1e-12) if bc is DIRICHLET else np.all(diffs >= -1e-12)
