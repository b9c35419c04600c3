"""The adaptive integrator against closed forms."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geowalk.errors import OracleError, PreconditionError
from geowalk.quadrature import DEFAULT_SPEC, QuadratureSpec, integrate


def test_polynomial_is_exact_up_to_tolerance():
    assert integrate(lambda x: x**3, 0.0, 1.0) == pytest.approx(0.25, abs=1e-12)


def test_exponential_matches_closed_form():
    value = integrate(math.exp, 0.0, 1.0)
    assert abs(value - (math.e - 1.0)) < 1e-10


def test_empty_and_reversed_intervals():
    assert integrate(math.sin, 2.0, 2.0) == 0.0
    with pytest.raises(PreconditionError):
        integrate(math.sin, 1.0, 0.0)
    with pytest.raises(PreconditionError):
        integrate(math.sin, 0.0, math.inf)


def test_breakpoints_handle_kinks():
    def tent(x):
        return 1.0 - abs(x)

    direct = integrate(tent, -1.0, 1.0, breakpoints=(0.0,))
    assert abs(direct - 1.0) < 1e-10


def test_large_magnitude_integrand_meets_relative_tolerance():
    # integral of (2x+1)^19 over [0, 3]: closed form (7^20 - 1) / 40.
    exact = (7.0**20 - 1.0) / 40.0
    value = integrate(lambda x: (2.0 * x + 1.0) ** 19, 0.0, 3.0)
    assert abs(value - exact) <= 1e-9 * exact


def test_budget_exhaustion_raises():
    spec = QuadratureSpec(abs_tol=1e-14, rel_tol=0.0, max_subdivisions=4)
    with pytest.raises(OracleError):
        integrate(lambda x: math.sin(37.0 * x) * math.exp(x), 0.0, 3.0, spec)


def test_results_are_deterministic():
    first = integrate(lambda x: math.exp(-x * x), 0.0, 2.0)
    second = integrate(lambda x: math.exp(-x * x), 0.0, 2.0)
    assert first == second


@settings(max_examples=50, deadline=None)
@given(
    a=st.floats(-5.0, 5.0),
    width=st.floats(0.1, 5.0),
    c0=st.floats(-2.0, 2.0),
    c1=st.floats(-2.0, 2.0),
)
def test_quadratics_match_antiderivative(a, width, c0, c1):
    b = a + width

    def anti(x):
        return c0 * x + 0.5 * c1 * x * x

    value = integrate(lambda x: c0 + c1 * x, a, b)
    assert value == pytest.approx(anti(b) - anti(a), abs=1e-9)
