"""tensorcon.main -- Wiring of the service objects and config loading."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from tensorcon.commands import Commands, PdeSpec, ProblemConfig
from tensorcon.constraints import AxisConstraint, ConstraintModel, ConstraintSet
from tensorcon.errors import ConfigError, TensorconError
from tensorcon.expr import Expr
from tensorcon.expr_engine import ExprEngine
from tensorcon.pde import OperatorTerm, PdeSolver
from tensorcon.runtime.impl_loader import ImplLoader
from tensorcon.surfaces import SurfaceForms
from tensorcon.tensor import TensorEngine
from tensorcon.univariate import UnivariateBuilder

_builtins_loaded = False

DEFAULT_TOLERANCE = 1e-9


def load_builtins() -> None:
    """Load all builtin .impl.py files. Safe to call multiple times."""
    global _builtins_loaded
    if _builtins_loaded:
        return
    builtins_dir = Path(__file__).parent / "builtins"
    loader = ImplLoader()
    loader.load_all(builtins_dir, "tensorcon.builtins")
    _builtins_loaded = True


@dataclass
class Workbench:
    """Every service object, sharing one expression engine.

    Attributes:
        exprs: Expression engine.
        model: Constraint model.
        univariate: One-axis builder.
        engine: Tensor engine.
        surfaces: Bivariate closed forms.
        pde: PDE solver.
        commands: CLI commands.
    """

    exprs: ExprEngine
    model: ConstraintModel
    univariate: UnivariateBuilder
    engine: TensorEngine
    surfaces: SurfaceForms
    pde: PdeSolver
    commands: Commands


def create_workbench(
    tolerance: float = DEFAULT_TOLERANCE,
    strict: bool = False,
    workers: int = 1,
) -> Workbench:
    """Create every service object and wire them together.

    Loads the builtin implementations first (if not already loaded).

    Args:
        tolerance: Compatibility tolerance of the tensor engine and the closed forms.
        strict: Raise on incompatible data at assembly instead of logging it.
        workers: Threads for PDE column assembly.

    Returns:
        A ready-to-use Workbench.
    """
    load_builtins()

    exprs = ExprEngine()
    model = ConstraintModel(exprs=exprs)
    engine = TensorEngine(exprs=exprs, model=model, tolerance=tolerance, strict=strict)
    surfaces = SurfaceForms(exprs=exprs, engine=engine, tolerance=tolerance)
    pde = PdeSolver(exprs=exprs, engine=engine, workers=workers)
    commands = Commands(exprs=exprs, model=model, engine=engine, surfaces=surfaces, pde=pde)
    return Workbench(
        exprs=exprs,
        model=model,
        univariate=UnivariateBuilder(exprs=exprs),
        engine=engine,
        surfaces=surfaces,
        pde=pde,
        commands=commands,
    )


def _expr(bench: Workbench, text: Any, names: tuple[str, ...], where: str, path: str) -> Expr:
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        text = repr(float(text))
    if not isinstance(text, str):
        raise ConfigError(f"{where}: expected an expression string", path)
    try:
        return bench.exprs.parse(text, names)
    except TensorconError as exc:
        raise ConfigError(f"{where}: {exc}", path) from exc


def _number(value: Any, where: str, path: str, kind: type = float) -> Any:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {value!r}", path)
    if kind is int and value != int(value):
        raise ConfigError(f"{where}: expected an integer, got {value!r}", path)
    return kind(value)


def problem_from_dict(data: Any, bench: Workbench, path: str = "") -> ProblemConfig:
    """Build a ProblemConfig from a decoded config document.

    Raises:
        ConfigError: Missing or malformed entries, with their location.
    """
    if not isinstance(data, dict):
        raise ConfigError("config root must be an object", path)
    if "domain" not in data:
        raise ConfigError("missing 'domain'", path)
    raw = data["domain"]
    if not isinstance(raw, (list, dict)):
        raise ConfigError("domain: expected an object or a list of intervals", path)
    intervals, names = (raw, None) if isinstance(raw, list) else (raw.get("intervals"), raw.get("names"))
    if not isinstance(intervals, list):
        raise ConfigError("domain: expected a list of intervals", path)
    try:
        domain = bench.model.make_domain(
            [tuple(_number(v, f"domain[{k}]", path) for v in interval) for k, interval in enumerate(intervals)],
            names,
        )
    except (TypeError, TensorconError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"domain: {exc}", path) from exc

    constraints = ConstraintSet(domain)
    for k, entry in enumerate(data.get("constraints", [])):
        where = f"constraints[{k}]"
        if not isinstance(entry, dict) or "expr" not in entry or "axis" not in entry:
            raise ConfigError(f"{where}: needs at least 'axis' and 'expr'", path)
        c = AxisConstraint(
            axis=_number(entry["axis"], f"{where}.axis", path, int),
            point=_number(entry.get("point", 0.0), f"{where}.point", path),
            order=_number(entry.get("order", 0), f"{where}.order", path, int),
            expr=_expr(bench, entry["expr"], domain.names, f"{where}.expr", path),
            sliced=bool(entry.get("sliced", True)),
            label=str(entry.get("label", "")),
        )
        try:
            constraints = bench.model.add_constraint(constraints, c)
        except TensorconError as exc:
            raise ConfigError(f"{where}: {exc}", path) from exc

    pde = None
    if "pde" in data:
        block = data["pde"]
        if not isinstance(block, dict) or not all(isinstance(t, dict) for t in block.get("operator", [])):
            raise ConfigError("pde: expected an object with a list of operator terms", path)
        terms = tuple(
            OperatorTerm(
                delta=tuple(_number(d, f"pde.operator[{k}].delta", path, int) for d in term.get("delta", ())),
                coefficient=_expr(bench, term.get("coefficient", "1"), domain.names,
                                  f"pde.operator[{k}].coefficient", path),
            )
            for k, term in enumerate(block.get("operator", []))
        )
        grid = block.get("grid")
        pde = PdeSpec(
            terms=terms,
            source=_expr(bench, block.get("source", "0"), domain.names, "pde.source", path),
            degree=_number(block.get("degree", 10), "pde.degree", path, int),
            grid=None if grid is None else _number(grid, "pde.grid", path, int),
        )

    tolerances = data.get("tolerances", {})
    return ProblemConfig(
        constraints=constraints,
        free_function=_expr(bench, data.get("free_function", "0"), domain.names, "free_function", path),
        pde=pde,
        boundary_tolerance=_number(tolerances.get("boundary", DEFAULT_TOLERANCE), "tolerances.boundary", path),
        compatibility_tolerance=_number(
            tolerances.get("compatibility", DEFAULT_TOLERANCE), "tolerances.compatibility", path),
        samples=_number(data.get("samples", 100), "samples", path, int),
        path=path,
    )


def load_config(path: str | Path, bench: Workbench | None = None) -> ProblemConfig:
    """Load a JSON problem config.

    Raises:
        ConfigError: Unreadable file, JSON syntax error (with its line), or
            an invalid entry.
    """
    bench = bench or create_workbench()
    path = str(path)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", path) from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(exc.msg, path, exc.lineno) from exc
    return problem_from_dict(data, bench, path)
