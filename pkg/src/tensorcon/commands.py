"""tensorcon.commands -- Command objects behind the tensorcon CLI."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Any, Optional

import tensorcon
from tensorcon.errors import ConfigError

if TYPE_CHECKING:
    from tensorcon.constraints import ConstraintModel, ConstraintSet
    from tensorcon.expr import Expr
    from tensorcon.expr_engine import ExprEngine
    from tensorcon.pde import OperatorTerm, PdeSolver
    from tensorcon.surfaces import ComboTable, SurfaceForms
    from tensorcon.tensor import TensorEngine

MODES = ("eval", "verify", "solve-pde", "table-sweep")
DEFAULT_GRID = 101
SWEEP_RESIDUAL = 1e-10
SWEEP_SENSITIVITY = 1e-3


@dataclass(frozen=True)
class RunConfig:
    """One CLI invocation.

    Attributes:
        mode: One of ``MODES``.
        config: Problem config path (unused by table-sweep).
        out: Output path; None writes to stdout.
        grid: Points per axis; a single value applies to every axis.
        seed: Seed for randomized verification.
        tolerance: Overrides the boundary tolerance of the config.
        partial: Optional multi-index for an extra derivative column.
    """

    mode: str
    config: Optional[Path] = None
    out: Optional[Path] = None
    grid: tuple[int, ...] = (DEFAULT_GRID,)
    seed: int = 0
    tolerance: Optional[float] = None
    partial: Optional[tuple[int, ...]] = None

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode '{self.mode}'")
        if not self.grid or any(n < 2 for n in self.grid):
            raise ConfigError(f"grid resolutions must be >= 2, got {list(self.grid)}")
        if self.config is not None and self.out is not None:
            if Path(self.config).resolve() == Path(self.out).resolve():
                raise ConfigError("output path equals the config path", str(self.out))
        if self.tolerance is not None and not self.tolerance > 0.0:
            raise ConfigError(f"tolerance must be positive, got {self.tolerance}")

    def resolution(self, dimension: int) -> tuple[int, ...]:
        if len(self.grid) == 1:
            return self.grid * dimension
        if len(self.grid) != dimension:
            raise ConfigError(f"--grid has {len(self.grid)} values for {dimension} axes")
        return self.grid


@dataclass(frozen=True)
class PdeSpec:
    """The ``pde`` block of a config.

    Attributes:
        terms: Operator terms.
        source: Right-hand side.
        degree: Basis degree.
        grid: Collocation points per axis, or None for the default.
    """

    terms: tuple[OperatorTerm, ...]
    source: Expr
    degree: int
    grid: Optional[int] = None


@dataclass(frozen=True)
class ProblemConfig:
    """A parsed config document.

    Attributes:
        constraints: Domain and constraints.
        free_function: g.
        pde: Optional PDE block.
        boundary_tolerance: Pass threshold for boundary residuals.
        compatibility_tolerance: Pass threshold for intersection checks.
        samples: Sample points per constraint in verification.
        path: Source file, if any.
    """

    constraints: ConstraintSet
    free_function: Expr
    pde: Optional[PdeSpec] = None
    boundary_tolerance: float = 1e-9
    compatibility_tolerance: float = 1e-9
    samples: int = 100
    path: str = ""


@dataclass
class VerifyReport:
    """Machine-readable outcome of ``cmd_verify``.

    Attributes:
        constraints: One record per constraint (max residual, pass flag).
        compatibility: One record per constraint pair on different axes.
        tolerances: Thresholds applied.
    """

    constraints: list[dict[str, Any]] = field(default_factory=list)
    compatibility: list[dict[str, Any]] = field(default_factory=list)
    tolerances: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r["passed"] for r in self.constraints) and all(r["passed"] for r in self.compatibility)

    def to_dict(self) -> dict[str, Any]:
        return {
            "passed": self.passed,
            "tolerances": self.tolerances,
            "constraints": self.constraints,
            "compatibility": self.compatibility,
        }


@dataclass(frozen=True)
class SweepRow:
    """Result for one tabulated combination.

    Attributes:
        index: 1-based row number.
        labels: Prescribed constraints.
        max_residual: Worst residual over the prescribed constraints.
        min_sensitivity: Smallest change of an unprescribed functional under a
            perturbation of g (inf when every constraint is prescribed).
        error: Message when the row could not be built.
    """

    index: int
    labels: tuple[str, ...]
    max_residual: float
    min_sensitivity: float
    error: str = ""

    @property
    def passed(self) -> bool:
        return (not self.error and self.max_residual <= SWEEP_RESIDUAL
                and self.min_sensitivity > SWEEP_SENSITIVITY)


@dataclass
class SweepReport:
    """All rows of one table sweep."""

    seed: int
    rows: list[SweepRow] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)

    @property
    def failures(self) -> list[SweepRow]:
        return [row for row in self.rows if not row.passed]

    def render(self) -> str:
        lines = [f"{'row':>4}  {'residual':>10}  {'sensitivity':>11}  status  constraints"]
        for row in self.rows:
            status = "pass" if row.passed else "FAIL"
            lines.append(
                f"{row.index:>4}  {row.max_residual:>10.2e}  {row.min_sensitivity:>11.2e}  "
                f"{status:<6}  {','.join(row.labels)}" + (f"  ({row.error})" if row.error else "")
            )
        lines.append(f"{len(self.rows) - len(self.failures)}/{len(self.rows)} rows passed (seed {self.seed})")
        return "\n".join(lines)


class Commands(tensorcon.Object):
    """The four CLI commands over one wired workbench.

    Attributes:
        exprs: Shared expression engine.
        model: Constraint model.
        engine: Tensor engine.
        surfaces: Bivariate forms (table sweep).
        pde: PDE solver.
    """

    exprs: ExprEngine
    model: ConstraintModel
    engine: TensorEngine
    surfaces: SurfaceForms
    pde: PdeSolver

    def cmd_eval(self, run: RunConfig, problem: ProblemConfig) -> str:
        """Evaluate f on a uniform grid and render CSV.

        Header: the domain variables, ``f``, then ``f_<d1>_<d2>...`` when a
        partial is requested. Rows run with axis 1 fastest; numbers use 17
        significant digits and LF line endings.
        """
        ...

    def cmd_verify(self, run: RunConfig, problem: ProblemConfig) -> VerifyReport:
        """Boundary residual per constraint and intersection checks per constraint pair."""
        ...

    def cmd_solve_pde(self, run: RunConfig, problem: ProblemConfig) -> str:
        """Solve the config's PDE and render CSV rows (x, y, f, residual) on the output grid.

        Raises:
            ConfigError: The config has no ``pde`` block.
        """
        ...

    def cmd_table_sweep(self, seed: int = 0, table: ComboTable | None = None) -> SweepReport:
        """Check every tabulated combination with random polynomial data.

        Prescribed functionals must hold to 1e-10; every unprescribed one
        must move by more than 1e-3 when g is perturbed.
        """
        ...
