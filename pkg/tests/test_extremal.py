import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import ovbound.analytic_engine as analytic_engine
import ovbound.bounds as bounds
import ovbound.core as core
import ovbound.exception as exception
import ovbound.extremal as extremal

CONSTANTS = {"1": 0.0, "-1": 180.0, "i": 90.0}

def spec(alpha, degrees=0.0):
    return extremal.ExtremalSpec(alpha, core.UnimodularConstant.from_degrees(degrees))

def test_registered():
    assert analytic_engine.catalog["extremal_k1"] is extremal.ExtremalK1

def test_fixes_origin():
    analytic_map = extremal.extremal_map(spec(0.5))

    assert analytic_engine.evaluate(analytic_map, 0j) == 0
    assert analytic_map.declared_set().alphas == (0.5,)

def test_hand_evaluation():
    value = analytic_engine.evaluate(extremal.extremal_map(spec(0.5)), 0.3)

    power = 0.5 ** (1.3 / 0.7)
    assert abs(value - (0.5 - power) / (1.0 - 0.5 * power)) < 1e-15
    assert abs(value) < 1.0
    assert abs(value - 0.5) > 0.0

@pytest.mark.parametrize("alpha", [0.1, 0.25, 0.5, 0.75, 0.9])
@pytest.mark.parametrize("constant", list(CONSTANTS))
def test_sharpness(alpha, constant):
    analytic_map = extremal.extremal_map(spec(alpha, CONSTANTS[constant]))

    estimate = analytic_engine.derivative_at_zero(analytic_map, 0.5, 256)
    assert abs(abs(estimate.value) - bounds.bound_k1(alpha)) < 1e-8

    check = analytic_engine.derivative_at_zero(analytic_map, 0.25, 256)
    assert abs(check.value - estimate.value) < 1e-8

def test_closed_form():
    assert extremal.extremal_derivative_closed_form(spec(0.5)) == pytest.approx(0.9241962407, abs=1e-10)

    rotated = extremal.extremal_derivative_closed_form(spec(0.5, 90.0))
    assert abs(rotated - 0.9241962407j) < 1e-10

def test_closed_form_matches_contour():
    for degrees in (0.0, 30.0, 135.0, 300.0):
        analytic_map = extremal.extremal_map(spec(0.4, degrees))
        estimate = analytic_engine.derivative_at_zero(analytic_map)

        assert abs(estimate.value - extremal.extremal_derivative_closed_form(analytic_map.spec)) < 1e-8

def test_closed_form_modulus_is_the_bound():
    rng = np.random.default_rng(7)

    for alpha in rng.uniform(0.001, 0.999, 100):
        assert abs(extremal.extremal_derivative_closed_form(spec(float(alpha)))) == bounds.bound_k1(float(alpha))

@given(
    degrees=st.floats(min_value=0.0, max_value=360.0),
    radius=st.floats(min_value=0.0, max_value=0.99),
    angle=st.floats(min_value=0.0, max_value=2.0 * math.pi)
)
def test_rotation_equivariance(degrees, radius, angle):
    z = radius * complex(math.cos(angle), math.sin(angle))
    rotated = extremal.extremal_map(spec(0.5, degrees))
    base = extremal.extremal_map(spec(0.5))

    expected = analytic_engine.evaluate(base, rotated.spec.c.value * np.asarray(z, dtype=complex))
    assert abs(analytic_engine.evaluate(rotated, z) - expected) < 1e-12

def test_self_map_on_default_grid():
    values = np.asarray(extremal.extremal_map(spec(0.5)).evaluate(core.disc_grid(core.DEFAULT_PLAN)))

    assert np.max(np.abs(values)) < 1.0

def test_omission():
    analytic_map = extremal.extremal_map(spec(0.5))

    # Inside 0.95 the distance to alpha is representable
    values = np.asarray(analytic_map.evaluate(core.disc_grid(core.DiscSamplingPlan(100, 100, 0.95))))
    assert np.min(np.abs(values - 0.5)) > 0.0

    samples = analytic_engine.sample_hypotheses(analytic_map, analytic_map.declared_set(), core.DiscSamplingPlan(100, 100, 0.999))
    assert samples.omitted_min_distance > 0.0

def test_exponent_has_negative_real_part():
    exponent = np.asarray(extremal.exponent(spec(0.5, 60.0), core.disc_grid(core.DEFAULT_PLAN)))

    # exp of the exponent underflows to 0 toward conj(c); Re < 0 is the same omission check without underflow
    assert np.all(exponent.real < 0.0)
    assert np.all(np.isfinite(exponent))

def test_invalid_spec():
    with pytest.raises(exception.DomainException):
        extremal.ExtremalSpec(1.0)

    with pytest.raises(exception.ValidationException):
        extremal.ExtremalSpec(0.5, 1j)
