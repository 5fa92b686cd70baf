"""Tests for domains, constraint sets and the compatibility check."""

import numpy as np
import pytest

from tensorcon.constraints import AxisConstraint, ConstraintModel, ConstraintSet, Domain
from tensorcon.errors import ConstraintError, DomainSpecError
from tensorcon.expr_engine import ExprEngine
from tensorcon.main import load_builtins

from tests.helpers import random_polynomial

load_builtins()


@pytest.fixture
def exprs():
    return ExprEngine()


@pytest.fixture
def model(exprs):
    return ConstraintModel(exprs=exprs)


def sliced(exprs, axis, point, text, order=0, names=("x", "y")):
    return AxisConstraint(axis, point, order, exprs.parse(text, names), sliced=True)


class TestDomain:

    def test_unit_square(self, model):
        domain = model.make_domain([(0, 1), (0, 1)])
        assert domain.dimension == 2
        assert domain.names == ("x", "y")
        assert domain.interval(2) == (0.0, 1.0)

    def test_offset_box(self, model):
        domain = model.make_domain([(-2, 1), (1, 3)])
        assert domain.interval(1) == (-2.0, 1.0)
        assert domain.name(2) == "y"

    def test_univariate(self, model):
        assert model.make_domain([(0, 1)]).names == ("x",)

    def test_four_axes_use_indexed_names(self, model):
        domain = model.make_domain([(0, 1)] * 4)
        assert domain.names == ("x1", "x2", "x3", "x4")

    def test_custom_names(self, model):
        assert model.make_domain([(0, 1), (0, 2)], ["s", "t"]).names == ("s", "t")

    @pytest.mark.parametrize("intervals", [
        [(1, 1)],
        [(0, 1), (2, -1)],
        [],
        [(0, 1)] * 5,
    ])
    def test_invalid(self, model, intervals):
        with pytest.raises(DomainSpecError):
            model.make_domain(intervals)

    def test_duplicate_names(self, model):
        with pytest.raises(DomainSpecError):
            model.make_domain([(0, 1), (0, 1)], ["x", "x"])

    def test_name_count(self):
        with pytest.raises(DomainSpecError):
            Domain(((0, 1), (0, 1)), ("x",))


class TestAddConstraint:

    def test_derivative_constraint(self, model, exprs):
        domain = model.make_domain([(-2, 2), (-2, 1)])
        result = model.add_constraint(ConstraintSet(domain), sliced(exprs, 2, 0.0, "0", order=1))
        assert result.counts == (0, 1)
        assert result.on_axis(2)[0].order == 1

    def test_sets_are_not_mutated(self, model, exprs):
        empty = ConstraintSet(model.make_domain([(0, 1), (0, 1)]))
        model.add_constraint(empty, sliced(exprs, 1, 0.0, "y"))
        assert len(empty) == 0

    def test_kept_sorted_by_point_then_order(self, model, exprs):
        result = ConstraintSet(model.make_domain([(-2, 2), (-2, 3)]))
        for point, order in [(3.0, 0), (-2.0, 0), (1.0, 1), (1.0, 0)]:
            result = model.add_constraint(result, sliced(exprs, 2, point, "x", order=order))
        assert [c.key for c in result.on_axis(2)] == [(-2.0, 0), (1.0, 0), (1.0, 1), (3.0, 0)]

    def test_duplicate(self, model, exprs):
        result = model.add_constraint(ConstraintSet(model.make_domain([(0, 1), (0, 1)])), sliced(exprs, 1, 0.0, "y"))
        with pytest.raises(ConstraintError, match="duplicate"):
            model.add_constraint(result, sliced(exprs, 1, 0.0, "2*y"))

    def test_same_point_other_order_allowed(self, model, exprs):
        result = model.add_constraint(ConstraintSet(model.make_domain([(0, 1), (0, 1)])), sliced(exprs, 1, 0.0, "y"))
        result = model.add_constraint(result, sliced(exprs, 1, 0.0, "0", order=1))
        assert result.counts == (2, 0)

    def test_axis_beyond_dimension(self, model, exprs):
        with pytest.raises(ConstraintError, match="axis"):
            model.add_constraint(ConstraintSet(model.make_domain([(0, 1), (0, 1)])), sliced(exprs, 7, 0.0, "x"))

    def test_point_outside_interval(self, model, exprs):
        with pytest.raises(ConstraintError, match="outside"):
            model.add_constraint(ConstraintSet(model.make_domain([(0, 1), (0, 1)])), sliced(exprs, 2, 1.5, "x"))

    def test_sliced_must_not_contain_axis_variable(self, model, exprs):
        with pytest.raises(ConstraintError, match="still contains"):
            model.add_constraint(ConstraintSet(model.make_domain([(0, 1), (0, 1)])), sliced(exprs, 2, 0.0, "x*y"))

    def test_foreign_variable(self, model, exprs):
        with pytest.raises(ConstraintError, match="outside the domain"):
            model.add_constraint(ConstraintSet(model.make_domain([(0, 1), (0, 1)])),
                                 sliced(exprs, 2, 0.0, "x + z", names=None))


class TestSlices:

    def test_unsliced_applies_boundary_operator(self, model, exprs):
        domain = model.make_domain([(0, 1), (0, 1)])
        c = exprs.parse("exp(x)*sin(2*y) + x*y^2")
        constraints = model.from_function(domain, [(2, 0.0, 1)], c)
        s = model.slice_of(constraints, constraints.on_axis(2)[0])
        assert not s.depends_on("y")
        xs = np.linspace(0, 1, 5)
        np.testing.assert_allclose(exprs.evaluate(s, {"x": xs}), 2.0 * np.exp(xs), rtol=1e-14)

    def test_sliced_is_returned_as_is(self, model, exprs):
        domain = model.make_domain([(0, 1), (0, 1)])
        c = sliced(exprs, 1, 0.0, "cos(y)")
        constraints = model.add_constraint(ConstraintSet(domain), c)
        assert model.slice_of(constraints, c) is c.expr

    def test_from_function_keeps_expression(self, model, exprs):
        domain = model.make_domain([(0, 1), (0, 1)])
        c = exprs.parse("x*y")
        constraints = model.from_function(domain, [(1, 0, 0), (1, 1, 0), (2, 0.5, 1)], c)
        assert constraints.counts == (2, 1)
        assert all(item.expr is c and not item.sliced for item in constraints.all())


class TestCompatibility:

    def test_dirichlet_trig_corners_agree(self, model, exprs):
        constraints = ConstraintSet(model.make_domain([(0, 1), (0, 1)]))
        for axis, point, text in [
            (2, 0.0, "sin(3*x - pi/4)*cos(pi/3)"),
            (2, 1.0, "sin(3*x - pi/4)*cos(4 + pi/3)"),
            (1, 0.0, "sin(-pi/4)*cos(4*y + pi/3)"),
            (1, 1.0, "sin(3 - pi/4)*cos(4*y + pi/3)"),
        ]:
            constraints = model.add_constraint(constraints, sliced(exprs, axis, point, text))
        report = model.validate_compatibility(constraints, 1e-9)
        assert report.passed
        assert len(report.checks) == 4

    def test_corner_mismatch(self, model, exprs):
        constraints = ConstraintSet(model.make_domain([(0, 1), (0, 1)]))
        constraints = model.add_constraint(constraints, sliced(exprs, 2, 0.0, "0"))
        constraints = model.add_constraint(constraints, sliced(exprs, 1, 0.0, "1"))
        report = model.validate_compatibility(constraints, 1e-9)
        assert not report.passed
        assert len(report.failures) == 1
        assert report.worst.mismatch == pytest.approx(1.0)
        assert report.worst.first.axis == 1

    def test_single_axis_is_vacuous(self, model, exprs):
        constraints = ConstraintSet(model.make_domain([(-2, 2), (-2, 1)]))
        constraints = model.add_constraint(constraints, sliced(exprs, 2, -2.0, "sin(2*x)"))
        constraints = model.add_constraint(constraints, sliced(exprs, 2, 1.0, "9*exp(-x^2)"))
        report = model.validate_compatibility(constraints)
        assert report.passed
        assert report.checks == []
        assert report.worst is None

    def test_mixed_orders_compare_cross_derivatives(self, model, exprs):
        c = exprs.parse("exp(x)*sin(2*y) + x*y^2")
        constraints = ConstraintSet(model.make_domain([(0, 1), (0, 1)]))
        constraints = model.add_constraint(
            constraints, AxisConstraint(1, 0.0, 1, exprs.substitute(exprs.diff(c, "x"), "x", 0.0), sliced=True))
        constraints = model.add_constraint(
            constraints, AxisConstraint(2, 0.0, 1, exprs.substitute(exprs.diff(c, "y"), "y", 0.0), sliced=True))
        assert model.validate_compatibility(constraints).passed

    def test_symmetric_in_axis_order(self, model, exprs):
        def build(intervals, names, specs):
            constraints = ConstraintSet(model.make_domain(intervals, names))
            for axis, point, text in specs:
                constraints = model.add_constraint(constraints, sliced(exprs, axis, point, text, names=names))
            return model.validate_compatibility(constraints)

        texts = [("x", 0.0, "y^2"), ("y", 1.0, "x + 2"), ("y", 0.0, "sin(x)")]
        forward = build([(0, 1), (0, 1)], ("x", "y"),
                        [(2 if var == "y" else 1, p, t) for var, p, t in texts])
        swapped = build([(0, 1), (0, 1)], ("y", "x"),
                        [(1 if var == "y" else 2, p, t) for var, p, t in texts])
        assert sorted(c.mismatch for c in forward.checks) == pytest.approx(
            sorted(c.mismatch for c in swapped.checks))
        assert not forward.passed

    @pytest.mark.parametrize("seed", range(5))
    def test_slices_of_one_polynomial_always_pass(self, model, seed):
        rng = np.random.default_rng(seed)
        domain = model.make_domain([(-1, 1), (0, 2), (-0.5, 0.5)])
        c = random_polynomial(rng, ("x", "y", "z"), 4)
        specs = [(1, -1.0, 0), (1, 0.3, 1), (2, 2.0, 0), (2, 0.0, 2), (3, 0.5, 1)]
        report = model.validate_compatibility(model.from_function(domain, specs, c), 1e-9)
        assert report.passed
        # axes (1,2): 2*2 pairs, (1,3): 2*1, (2,3): 2*1; 7 samples of the remaining axis each
        assert len(report.checks) == (4 + 2 + 2) * 7

    def test_evaluation_failure_is_reported(self, model, exprs):
        constraints = ConstraintSet(model.make_domain([(0, 1), (0, 1)]))
        constraints = model.add_constraint(constraints, sliced(exprs, 2, 0.0, "ln(x)"))
        constraints = model.add_constraint(constraints, sliced(exprs, 1, 0.0, "y"))
        report = model.validate_compatibility(constraints)
        assert not report.passed
        assert report.checks[0].mismatch == float("inf")
        assert report.checks[0].note
