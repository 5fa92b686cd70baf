"""Tests for v vectors, M tensors and the assembled constrained expression."""

import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from tensorcon.constraints import AxisConstraint, ConstraintModel, ConstraintSet
from tensorcon.errors import IncompatibleConstraintsError, SingularSystemError, TensorconError
from tensorcon.expr import ZERO, is_const
from tensorcon.expr_engine import ExprEngine
from tensorcon.main import load_builtins
from tensorcon.tensor import TensorEngine

from tests.helpers import central_difference, random_points, random_polynomial, random_smooth

load_builtins()

INTERVALS = ((-1.0, 1.0), (0.0, 2.0), (-0.5, 0.5), (1.0, 2.0))


@pytest.fixture
def exprs():
    return ExprEngine()


@pytest.fixture
def model(exprs):
    return ConstraintModel(exprs=exprs)


@pytest.fixture
def engine(exprs, model):
    return TensorEngine(exprs=exprs, model=model, tolerance=1e-9, strict=True)


def random_specs(rng, intervals):
    """Per axis 0-3 constraints whose orders keep the monomial system solvable.

    Points sit in the middle of distinct quarters of the interval.
    """
    specs = []
    for axis, (lo, hi) in enumerate(intervals, start=1):
        count = int(rng.integers(0, 4))
        orders = sorted(int(rng.integers(0, m + 1)) for m in range(count))
        width = (hi - lo) / 4
        quarters = rng.choice(4, count, replace=False)
        points = lo + width * (quarters + rng.uniform(0.2, 0.8, count))
        for order, point in zip(orders, points):
            specs.append((axis, float(point), order))
    return specs


def dirichlet_square(model, exprs, c):
    domain = model.make_domain([(0, 1), (0, 1)])
    return model.from_function(domain, [(1, 0, 0), (1, 1, 0), (2, 0, 0), (2, 1, 0)], c)


def hermite_square(model, exprs, c):
    domain = model.make_domain([(0, 1), (0, 1)])
    specs = [(axis, p, d) for axis in (1, 2) for p in (0, 1) for d in (0, 1)]
    return model.from_function(domain, specs, c)


def values(exprs, e, at):
    return exprs.evaluate(e, at)


class TestBcOperator:

    def test_nested_three_axes(self, engine, model, exprs):
        rng = np.random.default_rng(1)
        domain = model.make_domain([(0, 1)] * 3)
        c = random_polynomial(rng, ("x", "y", "z"), 4)
        inner = engine.bc_operator(c, domain, 3, 0.0, 1)
        nested = engine.bc_operator(engine.bc_operator(inner, domain, 2, 0.0, 0), domain, 1, 1.0, 0)
        direct = exprs.diff(c, "z")
        expected = values(exprs, direct, {"x": 1.0, "y": 0.0, "z": 0.0})
        assert values(exprs, nested, {}) == pytest.approx(expected, abs=1e-13)

    def test_order_zero_on_free_expression(self, engine, model, exprs):
        domain = model.make_domain([(0, 1), (0, 1)])
        e = exprs.parse("sin(x)")
        assert engine.bc_operator(e, domain, 2, 0.5, 0) is e

    def test_result_is_free_of_axis(self, engine, model, exprs):
        domain = model.make_domain([(0, 1), (0, 1)])
        assert not engine.bc_operator(exprs.parse("exp(x*y)"), domain, 2, 0.3, 2).depends_on("y")

    def test_product_rule(self, engine, model, exprs):
        rng = np.random.default_rng(9)
        domain = model.make_domain([(0, 1), (0, 1)])
        e1, e2 = random_polynomial(rng, degree=3), random_polynomial(rng, degree=3)

        def b(e, d):
            return engine.bc_operator(e, domain, 2, 0.6, d)

        expanded = b(e1, 0) * b(e2, 2) + 2.0 * b(e1, 1) * b(e2, 1) + b(e1, 2) * b(e2, 0)
        xs = rng.uniform(0, 1, 20)
        np.testing.assert_allclose(
            values(exprs, b(e1 * e2, 2), {"x": xs}), values(exprs, expanded, {"x": xs}), atol=1e-12)

    def test_negative_order(self, engine, model, exprs):
        with pytest.raises(TensorconError):
            engine.bc_operator(exprs.parse("x"), model.make_domain([(0, 1)]), 1, 0.0, -1)


class TestBuildV:

    def test_dirichlet(self, engine, model, exprs):
        constraints = dirichlet_square(model, exprs, exprs.parse("x*y"))
        v = engine.build_v(constraints, 1)
        np.testing.assert_allclose(v.alpha, [[1, 0], [-1, 1]])
        xs = np.linspace(0, 1, 6)
        np.testing.assert_allclose(values(exprs, v.components[1], {"x": xs}), 1 - xs, atol=1e-15)
        np.testing.assert_allclose(values(exprs, v.components[2], {"x": xs}), xs, atol=1e-15)
        assert is_const(v.components[0], 1.0)

    def test_neumann_retries_shifted_monomials(self, engine, model, exprs):
        domain = model.make_domain([(0, 1), (0, 1)])
        constraints = model.from_function(domain, [(1, 0, 1), (1, 1, 1)], exprs.parse("x*y"))
        v = engine.build_v(constraints, 1)
        xs = np.linspace(0, 1, 6)
        np.testing.assert_allclose(values(exprs, v.components[1], {"x": xs}), xs - xs**2 / 2, atol=1e-15)
        np.testing.assert_allclose(values(exprs, v.components[2], {"x": xs}), xs**2 / 2, atol=1e-15)

    def test_hermite(self, engine, model, exprs):
        constraints = hermite_square(model, exprs, exprs.parse("x*y"))
        v = engine.build_v(constraints, 2)
        z = np.linspace(0, 1, 7)
        expected = [2 * z**3 - 3 * z**2 + 1, z**3 - 2 * z**2 + z, -2 * z**3 + 3 * z**2, z**3 - z**2]
        for component, want in zip(v.components[1:], expected):
            np.testing.assert_allclose(values(exprs, component, {"y": z}), want, atol=1e-14)

    @pytest.mark.parametrize("seed", range(10))
    def test_kronecker_property(self, engine, model, seed):
        rng = np.random.default_rng(seed)
        domain = model.make_domain(INTERVALS[:2])
        specs = [s for s in random_specs(rng, INTERVALS[:2]) if s[0] == 1] or [(1, 0.0, 0)]
        constraints = model.from_function(domain, specs, ZERO)
        v = engine.build_v(constraints, 1)
        table = np.array([
            [float(engine.exprs.evaluate(engine.bc_operator(h, domain, 1, c.point, c.order), {"x": c.point}))
             for h in v.components[1:]]
            for c in constraints.on_axis(1)
        ])
        np.testing.assert_allclose(table, np.eye(len(specs)), atol=1e-12)

    def test_unconstrained_axis(self, engine, model, exprs):
        constraints = model.from_function(model.make_domain([(0, 1), (0, 1)]), [(2, 0, 0)], exprs.parse("x"))
        v = engine.build_v(constraints, 1)
        assert v.extent == 1
        assert is_const(v.components[0], 1.0)

    def test_singular_after_retry(self, engine, model, exprs):
        domain = model.make_domain([(0, 1), (0, 1)])
        constraints = model.from_function(domain, [(1, 0, 2), (1, 1, 2)], exprs.parse("x"))
        with pytest.raises(SingularSystemError) as info:
            engine.build_v(constraints, 1)
        assert "explicit basis" in str(info.value)

    def test_explicit_basis(self, engine, model, exprs):
        constraints = dirichlet_square(model, exprs, exprs.parse("x*y"))
        v = engine.build_v(constraints, 1, [exprs.parse("1"), exprs.parse("sin(x)")])
        ends = {"x": np.array([0.0, 1.0])}
        np.testing.assert_allclose(values(exprs, v.components[1], ends), [1, 0], atol=1e-14)
        np.testing.assert_allclose(values(exprs, v.components[2], ends), [0, 1], atol=1e-14)

    def test_explicit_basis_count(self, engine, model, exprs):
        constraints = dirichlet_square(model, exprs, exprs.parse("x*y"))
        with pytest.raises(TensorconError):
            engine.build_v(constraints, 1, [exprs.parse("1")])


class TestBuildM:

    @pytest.fixture
    def three_d(self, model):
        rng = np.random.default_rng(4)
        c = random_polynomial(rng, ("x", "y", "z"), 4)
        domain = model.make_domain([(0, 1)] * 3)
        specs = [(1, 0, 0), (1, 1, 0), (2, 0, 0), (2, 0, 1), (3, 0, 0), (3, 0, 1)]
        return model.from_function(domain, specs, c), c

    @pytest.mark.parametrize("from_slices", [True, False])
    def test_three_d_entries(self, engine, exprs, three_d, from_slices):
        constraints, c = three_d
        source = engine.slice_table(constraints) if from_slices else c
        m = engine.build_m(constraints, source)
        assert m.extents == (3, 3, 3)
        assert is_const(m[(0, 0, 0)], 0.0)
        xs = np.linspace(0, 1, 5)
        np.testing.assert_allclose(
            values(exprs, m[(0, 2, 1)], {"x": xs}),
            -values(exprs, exprs.diff(c, "y"), {"x": xs, "y": 0.0, "z": 0.0}), atol=1e-12)
        np.testing.assert_allclose(
            values(exprs, m[(1, 1, 0)], {"z": xs}),
            -values(exprs, c, {"x": 0.0, "y": 0.0, "z": xs}), atol=1e-12)
        corner = {"x": 1.0, "y": 0.0, "z": 0.0}
        assert values(exprs, m[(2, 2, 2)], {}) == pytest.approx(
            values(exprs, exprs.diff(exprs.diff(c, "y"), "z"), corner), abs=1e-12)
        assert values(exprs, m[(2, 1, 2)], {}) == pytest.approx(values(exprs, exprs.diff(c, "z"), corner), abs=1e-12)

    def test_first_order_entries_are_slices(self, engine, model, three_d):
        constraints, _ = three_d
        table = engine.slice_table(constraints)
        m = engine.build_m(constraints, table)
        assert m[(2, 0, 0)] is table[0][1]
        assert m[(0, 1, 0)] is table[1][0]
        assert m[(0, 0, 2)] is table[2][1]

    def test_permutation_invariance(self, engine, exprs, three_d):
        constraints, _ = three_d
        domain = constraints.domain
        table = engine.slice_table(constraints)
        m = engine.build_m(constraints, table)
        # seed from the axis-3 slice, then apply axis 1 and axis 2
        other = engine.bc_operator(engine.bc_operator(table[2][1], domain, 1, 1.0, 0), domain, 2, 0.0, 1)
        assert values(exprs, m[(2, 2, 2)], {}) == pytest.approx(values(exprs, other, {}), abs=1e-10)

    def test_sign_law(self, engine, exprs, three_d):
        constraints, c = three_d
        domain = constraints.domain
        m = engine.build_m(constraints, c)
        xs = np.linspace(0, 1, 4)
        pair = engine.bc_operator(engine.bc_operator(c, domain, 1, 1.0, 0), domain, 3, 0.0, 1)
        np.testing.assert_allclose(values(exprs, m[(2, 0, 2)], {"y": xs}), -values(exprs, pair, {"y": xs}), atol=1e-13)

    def test_dirichlet_square_matrix(self, engine, model, exprs):
        c = exprs.parse("exp(x)*cos(2*y) + x*y")
        constraints = dirichlet_square(model, exprs, c)
        m = engine.build_m(constraints, engine.slice_table(constraints))
        ts = np.linspace(0, 1, 5)
        np.testing.assert_allclose(values(exprs, m[(0, 1)], {"x": ts}), values(exprs, c, {"x": ts, "y": 0.0}))
        np.testing.assert_allclose(values(exprs, m[(2, 0)], {"y": ts}), values(exprs, c, {"x": 1.0, "y": ts}))
        for i, x in ((1, 0.0), (2, 1.0)):
            for j, y in ((1, 0.0), (2, 1.0)):
                assert values(exprs, m[(i, j)], {}) == pytest.approx(-values(exprs, c, {"x": x, "y": y}))

    def test_zero_slices(self, engine, model):
        constraints = dirichlet_square(model, None, ZERO)
        m = engine.build_m(constraints, engine.slice_table(constraints))
        assert all(is_const(e, 0.0) for e in m.entries.flat)


class TestAssemble:

    @pytest.mark.parametrize("seed", range(200))
    def test_boundary_reproduction(self, engine, model, seed):
        rng = np.random.default_rng(seed)
        intervals = INTERVALS[:1 + seed % 4]
        domain = model.make_domain(intervals)
        names = domain.names
        degree = 4 if len(names) < 4 else 3
        c = random_polynomial(rng, names, degree)
        constraints = model.from_function(domain, random_specs(rng, intervals), c)
        for _ in range(3):
            ce = engine.assemble(constraints, random_polynomial(rng, names, degree))
            for item in engine.boundary_residuals(ce, 100, seed):
                assert item.max_residual <= 1e-9, item.constraint

    @pytest.mark.parametrize("seed", range(5))
    def test_free_part_vanishes_on_constraints(self, engine, model, seed):
        rng = np.random.default_rng(100 + seed)
        domain = model.make_domain(INTERVALS[:2])
        constraints = model.from_function(domain, random_specs(rng, INTERVALS[:2]) or [(1, 0.0, 0)], ZERO)
        ce = engine.assemble(constraints, random_polynomial(rng))
        for item in engine.boundary_residuals(ce, 50, seed):
            assert item.max_residual <= 1e-9

    def test_coons_at_boundary(self, engine, model, exprs):
        c = exprs.parse("sin(3*x - pi/4)*cos(4*y + pi/3)")
        ce = engine.assemble(dirichlet_square(model, exprs, c), ZERO)
        assert ce.evaluate({"x": 0.0, "y": 0.37}) == pytest.approx(values(exprs, c, {"x": 0.0, "y": 0.37}), abs=1e-14)

    def test_satisfying_g_is_returned(self, engine, model, exprs):
        c = exprs.parse("exp(x)*cos(2*y) + x*y")
        ce = engine.assemble(dirichlet_square(model, exprs, c), c)
        at = random_points(np.random.default_rng(0), ((0, 1), (0, 1)), ("x", "y"), 50)
        np.testing.assert_allclose(ce.evaluate(at), values(exprs, c, at), atol=1e-12)

    def test_trig_figure_keeps_edges(self, engine, model, exprs):
        c = exprs.parse("sin(3*x - pi/4)*cos(4*y + pi/3)")
        g = exprs.parse("cos(4*pi*x)*sin(6*pi*y)/3 - x^2*cos(2*pi*y)")
        ce = engine.assemble(dirichlet_square(model, exprs, c), g)
        assert max(item.max_residual for item in engine.boundary_residuals(ce)) <= 1e-9

    def test_idempotent(self, engine, model, exprs):
        rng = np.random.default_rng(8)
        constraints = hermite_square(model, exprs, exprs.parse("exp(x)*sin(2*y) + x*y^2"))
        ce = engine.assemble(constraints, random_polynomial(rng))
        again = engine.assemble(constraints, ce.as_expr())
        at = random_points(rng, ((0, 1), (0, 1)), ("x", "y"), 40)
        np.testing.assert_allclose(again.evaluate(at), ce.evaluate(at), atol=1e-10)

    def test_empty_set_gives_g(self, engine, model, exprs):
        g = exprs.parse("x^2 - y")
        ce = engine.assemble(ConstraintSet(model.make_domain([(0, 1), (0, 1)])), g)
        assert ce.evaluate({"x": 0.5, "y": 0.25}) == pytest.approx(0.0)

    def test_single_axis(self, engine, model, exprs):
        constraints = ConstraintSet(model.make_domain([(-2, 2), (-2, 1)]))
        for point, order, text in [(-2.0, 0, "sin(2*x)"), (0.0, 1, "0"), (1.0, 0, "9*exp(-x^2)")]:
            constraints = model.add_constraint(
                constraints, AxisConstraint(2, point, order, exprs.parse(text), sliced=True))
        ce = engine.assemble(constraints, exprs.parse("x*y^3 - cos(3*y)"))
        xs = np.linspace(-2, 2, 9)
        np.testing.assert_allclose(ce.evaluate({"x": xs, "y": 1.0}), 9 * np.exp(-xs**2), atol=1e-12)
        np.testing.assert_allclose(ce.evaluate({"x": xs, "y": 0.0}, (0, 1)), 0.0, atol=1e-12)

    def test_strict_rejects_incompatible(self, engine, model, exprs):
        constraints = ConstraintSet(model.make_domain([(0, 1), (0, 1)]))
        constraints = model.add_constraint(constraints, AxisConstraint(2, 0.0, 0, exprs.parse("0"), sliced=True))
        constraints = model.add_constraint(constraints, AxisConstraint(1, 0.0, 0, exprs.parse("1"), sliced=True))
        with pytest.raises(IncompatibleConstraintsError) as info:
            engine.assemble(constraints, ZERO)
        assert info.value.mismatch == pytest.approx(1.0)

    def test_lenient_logs_incompatible(self, exprs, model, caplog):
        lenient = TensorEngine(exprs=exprs, model=model, tolerance=1e-9, strict=False)
        constraints = ConstraintSet(model.make_domain([(0, 1), (0, 1)]))
        constraints = model.add_constraint(constraints, AxisConstraint(2, 0.0, 0, exprs.parse("0"), sliced=True))
        constraints = model.add_constraint(constraints, AxisConstraint(1, 0.0, 0, exprs.parse("1"), sliced=True))
        with caplog.at_level(logging.WARNING, logger="tensorcon.builtins.tensor"):
            ce = lenient.assemble(constraints, ZERO)
        assert "disagree" in caplog.text
        assert np.isfinite(ce.evaluate({"x": 0.5, "y": 0.5}))

    def test_vector_count_checked(self, engine, model, exprs):
        constraints = dirichlet_square(model, exprs, exprs.parse("x*y"))
        v = engine.build_v(constraints, 1)
        with pytest.raises(TensorconError):
            engine.assemble(constraints, ZERO, vectors=[v])


class TestEvaluate:

    @pytest.fixture
    def hermite(self, engine, model, exprs):
        c = exprs.parse("exp(x)*sin(2*y) + x*y^2")
        g = exprs.parse("cos(3*x)*y^3 - x^2")
        return engine.assemble(hermite_square(model, exprs, c), g), c

    def test_scalar_returns_float(self, hermite):
        ce, _ = hermite
        assert isinstance(ce.evaluate({"x": 0.2, "y": 0.4}), float)

    def test_partial_on_edge(self, hermite, exprs):
        ce, c = hermite
        xs = np.random.default_rng(3).uniform(0, 1, 20)
        expected = values(exprs, exprs.diff(c, "y"), {"x": xs, "y": 0.0})
        np.testing.assert_allclose(ce.evaluate({"x": xs, "y": np.zeros(20)}, (0, 1)), expected, atol=1e-12)

    def test_twist_at_corner(self, hermite, exprs):
        ce, c = hermite
        expected = values(exprs, exprs.diff(exprs.diff(c, "x"), "y"), {"x": 0.0, "y": 0.0})
        assert ce.evaluate({"x": 0.0, "y": 0.0}, (1, 1)) == pytest.approx(expected, abs=1e-12)

    def test_zero_multi_index_is_value(self, hermite):
        ce, _ = hermite
        at = {"x": 0.3, "y": 0.6}
        assert ce.evaluate(at, (0, 0)) == ce.evaluate(at)

    @pytest.mark.parametrize("delta", [(1, 0), (0, 1), (2, 1), (1, 3)])
    def test_partials_match_symbolic(self, hermite, exprs, delta):
        ce, _ = hermite
        f = ce.as_expr()
        for name, order in zip(("x", "y"), delta):
            f = exprs.diff(f, name, order)
        at = random_points(np.random.default_rng(6), ((0, 1), (0, 1)), ("x", "y"), 30)
        np.testing.assert_allclose(ce.evaluate(at, delta), values(exprs, f, at), rtol=1e-9, atol=1e-9)

    def test_partial_matches_finite_differences(self, hermite):
        ce, _ = hermite
        at = {"x": 0.35, "y": 0.55}
        numeric = central_difference(lambda p: ce.evaluate(p), at, "x")
        assert ce.evaluate(at, (1, 0)) == pytest.approx(numeric, rel=1e-6)

    @pytest.mark.parametrize("seed", range(10))
    def test_random_partials_match_finite_differences(self, engine, model, seed):
        rng = np.random.default_rng(300 + seed)
        domain = model.make_domain(INTERVALS[:2])
        c = random_polynomial(rng, domain.names, 4)
        constraints = model.from_function(domain, random_specs(rng, INTERVALS[:2]) or [(2, 1.0, 0)], c)
        ce = engine.assemble(constraints, random_smooth(rng, domain.names))
        at = random_points(rng, INTERVALS[:2], domain.names, 50)
        for axis, name in enumerate(domain.names):
            delta = [0, 0]
            delta[axis] = 1
            numeric = central_difference(lambda p: ce.evaluate(p), at, name)
            np.testing.assert_allclose(ce.evaluate(at, delta), numeric, rtol=1e-6, atol=1e-7)

    def test_engine_entry_points(self, engine, hermite):
        ce, _ = hermite
        at = {"x": 0.1, "y": 0.9}
        assert engine.eval_f(ce, at) == ce.evaluate(at)
        assert engine.eval_f_partial(ce, at, (0, 2)) == ce.evaluate(at, (0, 2))

    @pytest.mark.parametrize("delta", [(3, 2), (1,), (-1, 0)])
    def test_invalid_multi_index(self, hermite, delta):
        ce, _ = hermite
        with pytest.raises(TensorconError):
            ce.evaluate({"x": 0.1, "y": 0.1}, delta)

    def test_missing_binding(self, hermite):
        ce, _ = hermite
        with pytest.raises(TensorconError):
            ce.evaluate({"x": 0.1})

    def test_parts_add_up(self, hermite):
        ce, _ = hermite
        at = random_points(np.random.default_rng(2), ((0, 1), (0, 1)), ("x", "y"), 25)
        a, b = ce.evaluate_parts(at, (0, 1))
        np.testing.assert_allclose(a + b, ce.evaluate(at, (0, 1)), atol=1e-14)

    def test_with_free_function(self, engine, hermite, exprs):
        ce, _ = hermite
        g = exprs.parse("sin(x + y)")
        moved = ce.with_free_function(g)
        rebuilt = engine.assemble(ce.constraints, g)
        at = random_points(np.random.default_rng(5), ((0, 1), (0, 1)), ("x", "y"), 25)
        np.testing.assert_allclose(moved.evaluate(at), rebuilt.evaluate(at), atol=1e-13)
        assert moved.m_c is ce.m_c

    def test_concurrent_evaluation(self, hermite):
        ce, _ = hermite
        at = random_points(np.random.default_rng(1), ((0, 1), (0, 1)), ("x", "y"), 200)
        with ThreadPoolExecutor(max_workers=8) as pool:
            results = list(pool.map(lambda _: ce.evaluate(at, (1, 2)), range(16)))
        for r in results[1:]:
            np.testing.assert_array_equal(r, results[0])
