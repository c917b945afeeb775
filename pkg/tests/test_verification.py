"""BDD tests for the lemma checks and the rescaling bookkeeping."""

import numpy as np
import pytest
from pytest_bdd import given, parsers, scenarios, then, when

from cattaneo_layer.lemmas import product_law_suite, triangle_power_check
from cattaneo_layer.models import Parameters, Regime, RescalingParams
from cattaneo_layer.rescaling import manufactured_fields, scale_terms, trace_ratio

scenarios("verification.feature")


@pytest.fixture
def context():
    """Shared context for test steps."""
    return {}


@given("the manufactured test fields")
def manufactured(context):
    context["fields"] = manufactured_fields()


@given("manufactured test fields with a unit magnetic wall trace")
def wall_trace_fields(context):
    context["fields"] = manufactured_fields(b1_wall=1.0)


@when(parsers.parse("I run {n_cases:d} product-law cases with seed {seed:d}"))
def run_product_law(context, n_cases, seed):
    context["cases"] = product_law_suite(seed, n_cases)


@when(
    parsers.parse(
        "I check the triangle inequality for sigma {sigma:g} "
        "on the integers from {low:d} to {high:d}"
    )
)
def run_triangle(context, sigma, low, high):
    axis = np.arange(low, high + 1, dtype=float)
    context["ratio"] = triangle_power_check(sigma, axis, axis)


@when(parsers.parse('I fit term orders for the "{regime}" rescaling'))
def fit_orders(context, regime):
    context["table"] = scale_terms(
        context["fields"], Regime(regime), _sweep(Regime(regime)), limit=Parameters(H=0.7)
    )


@when(parsers.parse("I lift them to the Hartmann layer with delta {delta:g}"))
def lift_hartmann(context, delta):
    rp = RescalingParams.for_limit(Regime.HARTMANN, delta, Parameters())
    context["ratio"] = trace_ratio(context["fields"], rp, "b1")


@then(parsers.parse("the case log has {rows:d} rows"))
def case_rows(context, rows):
    assert len(context["cases"]) == rows


@then("every ratio is at most 1")
def ratios_bounded(context):
    assert context["cases"]["ratio"].max() <= 1.0


@then("the worst ratio is at most 1")
def worst_ratio(context):
    assert context["ratio"] <= 1.0


@then(parsers.parse("every fitted order is within {tol:g} of its claim"))
def orders_within(context, tol):
    table = context["table"]
    off = [(r.equation, r.term, r.observed) for r in table.rows if not r.within(tol)]
    assert not off


@then(parsers.parse("the b1 wall trace grows by a factor of {factor:g}"))
def trace_grows(context, factor):
    assert context["ratio"] == pytest.approx(factor, rel=1e-12)


def _sweep(regime: Regime) -> list[float]:
    if regime is Regime.PRANDTL:
        return [0.2, 0.1, 0.05, 0.025, 0.0125]
    return [0.1, 0.05, 0.025, 0.0125, 0.00625]
