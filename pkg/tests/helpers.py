"""Random data shared by the tests."""

from __future__ import annotations

import numpy as np

from tensorcon.expr import Expr, Var, const, mul, power, sin, total


def random_polynomial(rng: np.random.Generator, names: tuple[str, ...] = ("x", "y"), degree: int = 4) -> Expr:
    """Dense polynomial of total degree <= degree with coefficients in [-1, 1]."""
    terms = []
    for exponents in np.ndindex(*(degree + 1,) * len(names)):
        if sum(exponents) > degree:
            continue
        term: Expr = const(float(rng.uniform(-1.0, 1.0)))
        for name, k in zip(names, exponents):
            if k:
                term = mul(term, power(Var(name), const(k)))
        terms.append(term)
    return total(terms)


def random_smooth(rng: np.random.Generator, names: tuple[str, ...] = ("x", "y")) -> Expr:
    """Polynomial plus a sine of a random linear form."""
    phase = total([mul(const(float(rng.uniform(-2.0, 2.0))), Var(name)) for name in names])
    return random_polynomial(rng, names, 3) + mul(const(float(rng.uniform(0.5, 1.5))), sin(phase))


def random_points(
    rng: np.random.Generator,
    intervals: tuple[tuple[float, float], ...],
    names: tuple[str, ...],
    count: int,
) -> dict[str, np.ndarray]:
    return {name: rng.uniform(lo, hi, count) for name, (lo, hi) in zip(names, intervals)}


def central_difference(f, at: dict[str, float], name: str, h: float = 1e-5) -> float:
    """Second-order central difference of ``f(point) -> float`` along ``name``."""
    up = dict(at, **{name: at[name] + h})
    down = dict(at, **{name: at[name] - h})
    return (f(up) - f(down)) / (2.0 * h)
