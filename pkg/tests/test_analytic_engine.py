import cmath
import math

import numpy as np
import pytest

import ovbound.analytic_engine as analytic_engine
import ovbound.bounds as bounds
import ovbound.core as core
import ovbound.exception as exception
import ovbound.extremal as extremal

SMALL_PLAN = core.DiscSamplingPlan(16, 64, 0.99)

def extremal_k1(alpha, degrees=0.0):
    return extremal.extremal_map(extremal.ExtremalSpec(alpha, core.UnimodularConstant.from_degrees(degrees)))

def schwarz(alpha, d):
    return analytic_engine.SchwarzFamily(alpha, analytic_engine.ScaledIdentity(d))

def test_scaled_identity_evaluate():
    analytic_map = analytic_engine.ScaledIdentity(0.7)

    assert analytic_engine.evaluate(analytic_map, 0.2) == pytest.approx(0.14, abs=1e-15)
    assert analytic_engine.evaluate(analytic_map, 0j) == 0

def test_evaluate_rejects_points_outside_disc():
    with pytest.raises(exception.DomainException):
        analytic_engine.evaluate(analytic_engine.ScaledIdentity(0.7), 1.0)

def test_catalog_is_closed():
    class Unregistered(analytic_engine.ScaledIdentity):
        kind = "unregistered"

    with pytest.raises(exception.ValidationException, match="catalog"):
        analytic_engine.evaluate(Unregistered(0.5), 0.1)

    with pytest.raises(exception.ValidationException):
        analytic_engine.evaluate(lambda z: z, 0.1)

def test_catalog_members():
    assert set(analytic_engine.catalog) >= {"scaled_identity", "schwarz_family", "extremal_k1"}

def test_scaled_identity_omission_must_be_provable():
    with pytest.raises(exception.ValidationException):
        analytic_engine.ScaledIdentity(0.5, omits=[0.3])

    with pytest.raises(exception.DomainException):
        analytic_engine.ScaledIdentity(1.5)

    analytic_map = analytic_engine.ScaledIdentity(0.25, omits=[0.5])
    assert analytic_map.declared_set().alphas == (0.5,)

def test_declared_set_required():
    with pytest.raises(exception.PreconditionException):
        analytic_engine.ScaledIdentity(0.25).declared_set()

def test_describe():
    descriptor = schwarz(0.5, 0.8).describe()

    assert descriptor["kind"] == "schwarz_family"
    assert descriptor["inner"]["kind"] == "scaled_identity"
    assert descriptor["omits"] == [0.5]

def test_h_product_at_origin():
    assert analytic_engine.h_product(bounds.ExceptionalSet([0.3]), 0.0) == pytest.approx(0.3)
    assert analytic_engine.h_product(bounds.ExceptionalSet([0.25, 0.5]), 0.0) == pytest.approx(0.125)

def test_h_product_in_disc():
    rng = np.random.default_rng(42)
    fval = np.sqrt(rng.uniform(0.0, 0.999, 10000)) * np.exp(2j * np.pi * rng.uniform(size=10000))

    h = analytic_engine.h_product(bounds.ExceptionalSet([0.2, 0.5, 0.9]), fval)
    assert np.all(np.abs(h) < 1.0)

def test_analytic_log_base_point():
    exceptional_set = bounds.ExceptionalSet([0.5])
    trace = analytic_engine.analytic_log(extremal_k1(0.5), exceptional_set, 0j)

    assert trace.final == exceptional_set.log_sum()

SMALL_PRODUCT = bounds.ExceptionalSet([0.001, 0.002, 0.003, 0.004, 0.005, 0.006])

def test_analytic_log_with_tiny_product_at_origin():
    analytic_map = analytic_engine.ScaledIdentity(0.0)

    # h(0) is about 7e-16 here and still exact
    assert abs(analytic_engine.h_product(SMALL_PRODUCT, 0j)) < 1e-14

    for z in (0j, 0.5, -0.9j):
        trace = analytic_engine.analytic_log(analytic_map, SMALL_PRODUCT, z)
        assert trace.final == SMALL_PRODUCT.log_sum()

    assert analytic_engine.rho_prime_zero(analytic_map, SMALL_PRODUCT) == pytest.approx(0.0, abs=1e-12)

def test_unresolved_mask():
    exceptional_set = bounds.ExceptionalSet([0.25, 0.5])
    fval = np.array([0.0, 0.5, np.nextafter(0.25, 1.0), 0.5 - 1e-9, 0.25 + 1e-12j])

    assert analytic_engine.unresolved_mask(exceptional_set, fval).tolist() == [False, True, True, False, False]

def test_analytic_log_closed_form():
    analytic_map = extremal_k1(0.5)
    exceptional_set = analytic_map.declared_set()

    trace = analytic_engine.analytic_log(analytic_map, exceptional_set, 0.5)
    h = analytic_engine.h_product(exceptional_set, analytic_engine.evaluate(analytic_map, 0.5))

    assert abs(trace.final - 3.0 * math.log(0.5)) < 1e-9
    assert abs(cmath.exp(trace.final) - h) < 1e-9 * abs(h)
    assert np.all(np.abs(np.diff(trace.log_values.imag)) < math.pi / 2)

def test_log_values_have_negative_real_part():
    analytic_map = extremal_k1(0.5, 45.0)
    finals, resolved = analytic_engine.log_values(analytic_map, analytic_map.declared_set(), core.disc_grid(SMALL_PLAN))

    assert np.all(finals[resolved].real < 0.0)
    assert np.count_nonzero(resolved) > 0.98 * SMALL_PLAN.size()

@pytest.mark.parametrize("analytic_map", [
    extremal_k1(0.5),
    extremal_k1(0.25, 180.0),
    extremal_k1(0.75, 90.0),
    schwarz(0.5, 0.8),
    analytic_engine.ScaledIdentity(0.25, omits=[0.5]),
])
def test_exponential_consistency(analytic_map):
    plan = core.DiscSamplingPlan(32, 128, 0.999)
    residual, unresolved = analytic_engine.exponential_consistency(analytic_map, analytic_map.declared_set(), plan)

    assert residual < 1e-9
    assert unresolved <= 0.02 * plan.size()

@pytest.mark.parametrize("radius", [0.25, 0.5, 0.75])
@pytest.mark.parametrize("nodes", [64, 256])
def test_contour_exact_on_scaled_identity(radius, nodes):
    estimate = analytic_engine.derivative_at_zero(analytic_engine.ScaledIdentity(0.7), radius, nodes)

    assert abs(estimate.value - 0.7) < 1e-12
    assert estimate.accepted

@pytest.mark.parametrize("radius,nodes", [(0.0, 256), (0.8, 256), (0.5, 100), (0.5, 32)])
def test_contour_parameters(radius, nodes):
    with pytest.raises(exception.ValidationException):
        analytic_engine.derivative_at_zero(analytic_engine.ScaledIdentity(0.7), radius, nodes)

def test_derivative_of_extremal_map():
    estimate = analytic_engine.derivative_at_zero(extremal_k1(0.5))

    assert abs(abs(estimate.value) - 0.9241962407) < 1e-8
    assert estimate.error_indicator < 1e-9

    rotated = analytic_engine.derivative_at_zero(extremal_k1(0.5, 90.0))
    assert abs(abs(rotated.value) - abs(estimate.value)) < 1e-10
    assert rotated.to_dict()["argument_degrees"] == pytest.approx(90.0, abs=1e-6)

def test_rho_prime():
    analytic_map = extremal_k1(0.5, 30.0)
    assert analytic_engine.rho_prime_zero(analytic_map, analytic_map.declared_set()) == pytest.approx(2.0, abs=1e-6)

    exceptional_set = bounds.ExceptionalSet([0.5])
    constant = analytic_engine.rho_prime_zero(analytic_engine.ScaledIdentity(0.0), exceptional_set)
    assert constant == pytest.approx(0.0, abs=1e-12)

    assert analytic_engine.rho_prime_zero(analytic_engine.ScaledIdentity(0.25), exceptional_set) < 2.0

def test_verify_extremal_is_sharp():
    analytic_map = extremal_k1(0.5)
    verification = analytic_engine.verify_bound(analytic_map, analytic_map.declared_set())

    assert abs(verification.slack) < 1e-7
    assert verification.sharp
    assert verification.hypotheses_hold
    assert verification.origin_value == 0
    assert verification.self_map_margin > 0.0
    assert verification.omitted_min_distance > 0.0
    assert verification.rho_prime == pytest.approx(2.0, abs=1e-6)
    assert verification.identity_gap < 1e-6
    assert verification.unresolved_samples <= 0.02 * core.DEFAULT_PLAN.size()
    assert verification.evaluation_failures == 0

def test_verify_with_tiny_product():
    verification = analytic_engine.verify_bound(analytic_engine.ScaledIdentity(0.0005), SMALL_PRODUCT, SMALL_PLAN)

    assert verification.hypotheses_hold
    assert verification.unresolved_samples == 0
    assert verification.evaluation_failures == 0
    assert verification.identity_gap < 1e-8
    assert verification.slack > 0.0

def test_verify_extremal_with_small_alpha():
    analytic_map = extremal_k1(1e-5)
    verification = analytic_engine.verify_bound(analytic_map, analytic_map.declared_set(), SMALL_PLAN)

    # |h| falls to about 1e-15 on the contour, f is still far from alpha in ulp
    assert verification.hypotheses_hold
    assert verification.evaluation_failures == 0
    assert verification.sharp
    assert verification.rho_prime == pytest.approx(2.0, abs=1e-4)
    assert verification.omitted_min_distance > 0.0

def test_verify_scaled_identity_has_slack():
    exceptional_set = bounds.ExceptionalSet([0.5])
    verification = analytic_engine.verify_bound(analytic_engine.ScaledIdentity(0.25), exceptional_set, SMALL_PLAN)

    assert verification.slack == pytest.approx(bounds.bound_k1(0.5) - 0.25, abs=1e-10)
    assert verification.hypotheses_hold
    assert not verification.sharp

def test_verify_schwarz_family():
    verification = analytic_engine.verify_bound(schwarz(0.5, 0.8), bounds.ExceptionalSet([0.5]), SMALL_PLAN)
    bound = bounds.bound_k1(0.5)

    assert abs(abs(verification.derivative.value) - 0.8 * bound) < 1e-7
    assert abs(verification.slack - 0.2 * bound) < 1e-7

def test_bound_holds_across_schwarz_family():
    count = 0

    for alpha in (0.3, 0.5, 0.7):
        for modulus in (0.0, 0.3, 0.8, 0.95):
            for degrees in (0.0, 45.0, 90.0, 180.0, 270.0):
                d = modulus * cmath.exp(1j * math.radians(degrees))
                analytic_map = schwarz(alpha, d)
                verification = analytic_engine.verify_bound(analytic_map, bounds.ExceptionalSet([alpha]), SMALL_PLAN)

                assert abs(abs(verification.derivative.value) - modulus * bounds.bound_k1(alpha)) < 1e-7
                assert verification.slack >= -1e-7
                assert verification.hypotheses_hold
                assert verification.rho_prime <= 2.0 + 1e-8
                assert verification.identity_gap < 1e-6
                count += 1

    assert count >= 50

def test_report_serializes():
    analytic_map = extremal_k1(0.5)
    result = analytic_engine.verify_bound(analytic_map, analytic_map.declared_set(), SMALL_PLAN).to_dict()

    assert list(result.keys())[:3] == ["map", "self_map_margin", "origin_value"]
    assert result["bound"]["k"] == 1
    assert result["derivative"]["accepted"]
