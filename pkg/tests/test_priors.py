"""Prior catalog: parsing, marginals vs quadrature, Tweedie identity, tails.

Frozen reference values were computed with mpmath at 30+ digits.
"""

import math

import pytest

from conftest import BP_SPECIAL, CATALOG_SPECS, quad_log_marginal
from fabcr.errors import DomainError, SpecParseError
from fabcr.priors import PriorModel, parse_prior

Y_GRID = (0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0, 5.0, -5.0, 10.0, -10.0)


# -- parsing ----------------------------------------------------------------


def test_parse_basic():
    m = parse_prior("bp:a=1,b=0.5", sigma=2.0)
    assert m.kind == "bp" and m.a == 1.0 and m.b == 0.5 and m.sigma == 2.0
    assert parse_prior("gaussian").tau is None
    assert parse_prior("gaussian:tau=3").tau == 3.0
    assert parse_prior("laplace:kappa=2").kappa == 2.0
    assert parse_prior("flat+atom:gamma=0.1").gamma == 0.1
    assert parse_prior("horseshoe:loc=4").loc == 4.0


@pytest.mark.parametrize("spec", CATALOG_SPECS)
def test_spec_string_roundtrip(spec):
    m = parse_prior(spec, sigma=1.3)
    again = parse_prior(m.spec_string(), sigma=1.3)
    assert again == m


@pytest.mark.parametrize("bad", [
    "", "unknown", "bp", "bp:a=1", "bp:a=1,b=x", "laplace", "horseshoe:a=1",
    "flat:tau=1", "gaussian:sigma=1", "laplace:kappa=1,extra=2", "bp:=1",
])
def test_parse_rejects(bad):
    # a missing required parameter surfaces as DomainError from the model
    with pytest.raises((SpecParseError, DomainError)):
        parse_prior(bad)


def test_constructor_domain_checks():
    with pytest.raises(DomainError):
        PriorModel(kind="laplace", kappa=-1.0)
    with pytest.raises(DomainError):
        PriorModel(kind="bp", a=0.0, b=1.0)
    with pytest.raises(DomainError):
        PriorModel(kind="flat", sigma=0.0)
    with pytest.raises(DomainError):
        PriorModel(kind="gaussian", tau=-2.0)
    with pytest.raises(DomainError):
        PriorModel(kind="flat+atom")


# -- marginals --------------------------------------------------------------


def test_flat_marginal_trivial():
    m = parse_prior("flat")
    assert m.log_marginal(3.7) == 0.0
    assert m.dlog_marginal(-2.0) == 0.0
    assert m.posterior_mean(1.5) == 1.5


def test_gpd_marginal_at_zero():
    # the gpd-kind marginal at the origin equals 1 / (2 sigma sqrt(2 pi))
    m = parse_prior("gpd")
    assert abs(m.log_marginal(0.0)
               + 1.61208571376461805) < 1e-12


def test_horseshoe_marginal_frozen():
    m = parse_prior("horseshoe")
    assert abs(m.log_marginal(2.0) + 2.50997415534764664) < 1e-12


@pytest.mark.parametrize("name,a,b", BP_SPECIAL)
def test_special_forms_match_general(name, a, b):
    special = parse_prior(name)
    general = parse_prior("bp:a=%g,b=%g" % (a, b))
    for y in (0.1, -0.1, 1.0, -1.0, 5.0, -5.0, 20.0, -20.0):
        ls, lg = special.log_marginal(y), general.log_marginal(y)
        assert abs(ls - lg) <= 1e-10 * max(1.0, abs(lg)), (name, y)
        ds, dg = special.dlog_marginal(y), general.dlog_marginal(y)
        assert abs(ds - dg) <= 1e-9 * max(1.0, abs(dg)), (name, y)


@pytest.mark.parametrize("spec", CATALOG_SPECS)
def test_marginal_vs_quadrature(spec):
    m = parse_prior(spec)
    for y in Y_GRID:
        want = quad_log_marginal(spec, y)
        got = m.log_marginal(y)
        assert abs(math.exp(got) - math.exp(want)) <= 1e-8 * math.exp(want), \
            (spec, y)


@pytest.mark.parametrize("spec", CATALOG_SPECS)
def test_marginal_symmetry(spec):
    m = parse_prior(spec)
    assert m.symmetric
    for y in (0.3, 1.0, 4.2, 17.0):
        assert abs(m.log_marginal(y) - m.log_marginal(-y)) < 1e-12
        assert abs(m.dlog_marginal(y) + m.dlog_marginal(-y)) < 1e-10


@pytest.mark.parametrize("spec", CATALOG_SPECS)
def test_dlog_marginal_central_differences(spec):
    m = parse_prior(spec)
    for y in Y_GRID:
        h = 6e-6 * max(1.0, abs(y))
        num = (m.log_marginal(y + h) - m.log_marginal(y - h)) / (2 * h)
        assert abs(m.dlog_marginal(y) - num) <= 1e-6, (spec, y)


@pytest.mark.parametrize("spec", CATALOG_SPECS)
def test_tweedie_identity(spec):
    # posterior mean = y + sigma^2 * dlog_marginal(y)
    for sigma in (1.0, 2.5):
        m = parse_prior(spec, sigma=sigma)
        for y in (0.0, 0.7, -3.0, 12.0):
            want = y + sigma * sigma * m.dlog_marginal(y)
            assert abs(m.posterior_mean(y) - want) <= 1e-10 * max(1.0, abs(want))


def test_gaussian_posterior_mean_closed_form():
    m = parse_prior("gaussian:tau=1")
    assert abs(m.posterior_mean(2.0) - 1.0) < 1e-14
    m2 = parse_prior("gaussian:tau=2", sigma=1.0)
    assert abs(m2.posterior_mean(5.0) - 4.0) < 1e-13


def test_laplace_posterior_mean_shrinks_by_kappa():
    m = parse_prior("laplace:kappa=1")
    assert abs(m.posterior_mean(100.0) - 99.0) < 1e-6
    assert abs(m.posterior_mean(-100.0) + 99.0) < 1e-6
    # no overflow very far out
    assert abs(m.posterior_mean(1e6) - (1e6 - 1.0)) < 1e-3


def test_location_shift():
    base = parse_prior("horseshoe")
    shifted = parse_prior("horseshoe:loc=4")
    for y in (-1.0, 3.0, 10.0):
        assert abs(shifted.log_marginal(y) - base.log_marginal(y - 4.0)) < 1e-14
        assert abs(shifted.posterior_mean(y)
                   - (4.0 + base.posterior_mean(y - 4.0))) < 1e-12


# -- scale family -----------------------------------------------------------


@pytest.mark.parametrize("spec", ["flat", "horseshoe", "gpd", "bessel",
                                  "bp:a=1.5,b=2", "laplace:kappa=1",
                                  "gaussian"])
def test_scale_family(spec):
    # for sigma-tied kinds: f_sigma(y) = f_1(y / sigma) / sigma
    m1 = parse_prior(spec, sigma=1.0)
    assert m1.scale_tied
    for sigma in (0.5, 3.0):
        ms = parse_prior(spec, sigma=sigma)
        for y in (0.3, 2.0, -7.0):
            want = m1.log_marginal(y / sigma) - math.log(sigma)
            if spec == "flat":
                want = 0.0  # improper flat marginal is scale free
            assert abs(ms.log_marginal(y) - want) < 1e-11, (spec, sigma, y)


def test_scale_untied_kinds():
    assert not parse_prior("gaussian:tau=1").scale_tied
    assert not parse_prior("flat+atom:gamma=0.5").scale_tied


def test_with_sigma():
    m = parse_prior("laplace:kappa=2", sigma=1.0)
    m2 = m.with_sigma(3.0)
    assert m2.sigma == 3.0 and m2.kappa == 2.0 and m2.kind == "laplace"


# -- tail profiles ----------------------------------------------------------


def test_tail_profiles():
    assert parse_prior("gaussian:tau=1").tail_profile() is None
    flat = parse_prior("flat").tail_profile()
    assert (flat.kappa, flat.delta, flat.gamma) == (0.0, 0.0, 1.0)
    atom = parse_prior("flat+atom:gamma=0.25").tail_profile()
    assert (atom.kappa, atom.delta, atom.gamma) == (0.0, 0.0, 0.25)
    hs = parse_prior("horseshoe").tail_profile()
    assert hs.kappa == 0.0 and hs.delta == 2.0
    assert parse_prior("gpd").tail_profile().delta == 2.0
    assert parse_prior("bessel").tail_profile().delta == 3.0
    lap = parse_prior("laplace:kappa=2").tail_profile()
    assert lap.kappa == 2.0 and lap.delta == 0.0
    assert abs(lap.gamma - math.exp(2.0)) < 1e-12


@pytest.mark.parametrize("spec", ["horseshoe", "gpd", "bessel", "bp:a=1.5,b=2"])
def test_power_tail_law(spec):
    # log f(y) + delta log|y| - log gamma -> 0 along the tail
    m = parse_prior(spec)
    prof = m.tail_profile()
    for y in (1e3, 1e4):
        resid = (m.log_marginal(y) + prof.delta * math.log(y)
                 - math.log(prof.gamma))
        assert abs(resid) < 0.02, (spec, y, resid)


def test_laplace_exponential_tail_law():
    m = parse_prior("laplace:kappa=1")
    prof = m.tail_profile()
    for y in (50.0, 200.0):
        resid = m.log_marginal(y) + prof.kappa * y - math.log(prof.gamma)
        assert abs(resid) < 1e-6, (y, resid)


def test_non_finite_y_rejected():
    m = parse_prior("horseshoe")
    with pytest.raises(DomainError):
        m.log_marginal(float("nan"))
    with pytest.raises(DomainError):
        m.posterior_mean(float("inf"))
