"""HalfSpaceSolver - public interface for configured half-space solves.

Provides three solve methods:
- solve(): Strict solve, raises on failure
- solve_safe(): Safe solve, returns None on failure
- solve_with_diagnostics(): Full result with iteration and boundary diagnostics
"""

import logging
from collections.abc import Mapping
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from bsns.analysis.exponents import critical_p
from bsns.config import DataSpec, RunConfig, load_config
from bsns.evolution.duhamel import NeumannResidual, neumann_residual, solve_linear
from bsns.evolution.nonlinear import NonlinearProblem, SolveDiagnostics, boundary_nonlinearity, picard_solve
from bsns.exceptions import (
    GridMismatchError,
    InsufficientResolutionError,
    InvalidParameterError,
    NonConvergenceError,
    SolverError,
)
from bsns.fields import BoundaryTrace, HalfSpaceField, SpaceTimeField, check_same_grids
from bsns.fixtures import (
    GaussianEnsemble,
    compact_forcing,
    gaussian_boundary,
    gaussian_datum,
    pathological_datum,
    rough_boundary,
    separable_forcing,
)
from bsns.numerics.grids import CartesianGrid, TimeGrid, WeightedRadialGrid
from bsns.snapshot import read_snapshot

logger = logging.getLogger(__name__)

_GAUSSIAN_DATUM = {"alpha_x": 1.0, "alpha_z": 1.0, "center": 0.0, "amplitude": 1.0, "phase": 0.0, "poly": 0.0}
_GAUSSIAN_FORCING = {**_GAUSSIAN_DATUM, "frequency": 0.0}
_GAUSSIAN_BOUNDARY = {"alpha": 1.0, "center": 0.0, "amplitude": 1.0, "phase": 0.0, "frequency": 0.0}


def _params(spec: DataSpec, defaults: Mapping[str, Any], what: str) -> dict[str, Any]:
    unknown = sorted(set(spec.params) - set(defaults))
    if unknown:
        raise InvalidParameterError(message=f"Unknown {what} parameters for type {spec.type}: {unknown}")
    return {**defaults, **spec.params}


def _amplitude(params: Mapping[str, Any]) -> complex:
    return complex(params["amplitude"]) * complex(np.exp(1j * float(params["phase"])))


def _fixture_name(spec: DataSpec, allowed: tuple[str, ...], what: str) -> str:
    name = spec.params.get("name")
    if name not in allowed:
        raise InvalidParameterError(message=f"{what} fixture name must be one of {allowed}, got {name!r}")
    return name


def _ensemble_index(spec: DataSpec) -> int:
    index = _params(spec, {"name": "ensemble", "index": 0}, "ensemble")["index"]
    if isinstance(index, bool) or not isinstance(index, int) or index < 0:
        raise InvalidParameterError(message=f"Ensemble index must be a nonnegative integer, got {index!r}")
    return index


def _from_file(spec: DataSpec, kind: type, *grid_owners: Any) -> Any:
    params = _params(spec, {"path": None}, "file")
    if params["path"] is None:
        raise InvalidParameterError(message="File data needs params.path")
    value = read_snapshot(Path(params["path"])).to_field()
    if not isinstance(value, kind):
        raise GridMismatchError(
            message=f"Snapshot {params['path']} holds the wrong kind of field",
            expected=kind.__name__,
            actual=type(value).__name__,
        )
    check_same_grids(value, *grid_owners)
    return value


def build_datum(spec: DataSpec, xgrid: CartesianGrid, zgrid: WeightedRadialGrid, seed: int = 0) -> HalfSpaceField:
    """Initial datum from its configuration.

    Raises:
        InvalidParameterError: On unknown types, names or parameters.
        GridMismatchError: If a file datum lives on other grids.
    """
    if spec.type == "zero":
        return HalfSpaceField.zeros(xgrid, zgrid)
    if spec.type == "gaussian":
        p = _params(spec, _GAUSSIAN_DATUM, "u0")
        return gaussian_datum(xgrid, zgrid, p["alpha_x"], p["alpha_z"], p["center"], _amplitude(p), p["poly"])
    if spec.type == "fixture":
        name = _fixture_name(spec, ("pathological", "ensemble"), "u0")
        if name == "pathological":
            _params(spec, {"name": name}, "u0")
            return pathological_datum(xgrid, zgrid)
        index = _ensemble_index(spec)
        return GaussianEnsemble(seed, index + 1).data(xgrid, zgrid)[index]
    return _from_file(spec, HalfSpaceField, HalfSpaceField.zeros(xgrid, zgrid))


def build_forcing(
    spec: DataSpec, xgrid: CartesianGrid, zgrid: WeightedRadialGrid, tgrid: TimeGrid, seed: int = 0
) -> SpaceTimeField | None:
    """Bulk forcing from its configuration; None for zero forcing."""
    if spec.type == "zero":
        return None
    if spec.type == "gaussian":
        p = _params(spec, _GAUSSIAN_FORCING, "F")
        datum = gaussian_datum(xgrid, zgrid, p["alpha_x"], p["alpha_z"], p["center"], _amplitude(p), p["poly"])
        return separable_forcing(datum, tgrid, p["frequency"])
    if spec.type == "fixture":
        name = _fixture_name(spec, ("compact", "ensemble"), "F")
        if name == "compact":
            p = _params(spec, {"name": name, "support": 2.0, "alpha_x": 1.0, "amplitude": 1.0, "phase": 0.0}, "F")
            return compact_forcing(xgrid, zgrid, tgrid, p["support"], p["alpha_x"], _amplitude(p))
        index = _ensemble_index(spec)
        return GaussianEnsemble(seed, index + 1).forcings(xgrid, zgrid, tgrid)[index]
    return _from_file(spec, SpaceTimeField, SpaceTimeField.zeros(xgrid, zgrid, tgrid))


def build_boundary(spec: DataSpec, xgrid: CartesianGrid, tgrid: TimeGrid, seed: int = 0) -> BoundaryTrace | None:
    """Neumann datum from its configuration; None for the homogeneous condition."""
    if spec.type == "zero":
        return None
    if spec.type == "gaussian":
        p = _params(spec, _GAUSSIAN_BOUNDARY, "Phi")
        return gaussian_boundary(xgrid, tgrid, p["alpha"], p["center"], _amplitude(p), p["frequency"])
    if spec.type == "fixture":
        name = _fixture_name(spec, ("rough", "ensemble"), "Phi")
        if name == "rough":
            p = _params(spec, {"name": name, "modes": 8}, "Phi")
            return rough_boundary(xgrid, tgrid, seed, p["modes"])
        index = _ensemble_index(spec)
        return GaussianEnsemble(seed, index + 1).boundaries(xgrid, tgrid)[index]
    return _from_file(spec, BoundaryTrace, BoundaryTrace.zeros(xgrid, tgrid))


@dataclass(frozen=True, slots=True, eq=False)
class SolveResult:
    """Full solve result with diagnostics.

    Attributes:
        solution: The computed field, or None if the solve failed.
        success: Whether the solve succeeded.
        error: Error if the solve failed, None otherwise.
        nonlinear: Whether the Picard solver ran.
        diagnostics: Picard diagnostics; also set for non-convergence.
        neumann: Weighted-flux residual against the boundary datum, when the grid resolves it.
        mass_drift: max_t |m(t) - m(0)| / m(0) of the solution.
        config_digest: SHA-256 of the merged configuration.
    """

    solution: SpaceTimeField | None
    success: bool
    error: SolverError | None
    nonlinear: bool
    diagnostics: SolveDiagnostics | None = field(default=None, repr=False)
    neumann: NeumannResidual | None = field(default=None, repr=False)
    mass_drift: float | None = None
    config_digest: str = ""


class HalfSpaceSolver:
    """Configured solver for the linear and nonlinear half-space problems.

    Example:
        solver = HalfSpaceSolver.from_file("run.yaml")

        # Strict solve (raises on failure)
        U = solver.solve()

        # Safe solve (returns None on failure)
        U = solver.solve_safe()

        # Full diagnostics
        result = solver.solve_with_diagnostics()
    """

    def __init__(self, config: RunConfig) -> None:
        """Build the grids of a configuration.

        Args:
            config: Parsed run configuration.

        Raises:
            InvalidParameterError: If the grids cannot be built.
        """
        self._config = config
        self._xgrid = config.grid.build_xgrid(config.d)
        self._zgrid = config.grid.build_zgrid(config.a)
        self._tgrid = config.time.build()

    @classmethod
    def from_file(cls, path: Path | str) -> "HalfSpaceSolver":
        return cls(load_config(path))

    @property
    def config(self) -> RunConfig:
        return self._config

    @property
    def xgrid(self) -> CartesianGrid:
        return self._xgrid

    @property
    def zgrid(self) -> WeightedRadialGrid:
        return self._zgrid

    @property
    def tgrid(self) -> TimeGrid:
        return self._tgrid

    @property
    def power(self) -> float:
        """Configured power, or the critical one."""
        if self._config.p is not None:
            return self._config.p
        return critical_p(self._config.a, self._config.d)

    def build_data(self) -> tuple[HalfSpaceField, SpaceTimeField | None, BoundaryTrace | None]:
        """(u0, F, Phi) on the solver grids."""
        c = self._config
        u0 = build_datum(c.u0, self._xgrid, self._zgrid, c.seed)
        F = build_forcing(c.F, self._xgrid, self._zgrid, self._tgrid, c.seed)
        Phi = build_boundary(c.Phi, self._xgrid, self._tgrid, c.seed)
        return u0, F, Phi

    def problem(self) -> NonlinearProblem:
        """The nonlinear problem of the configuration.

        Raises:
            InvalidParameterError: If a Neumann datum is configured; the nonlinearity replaces it.
        """
        c = self._config
        u0, F, Phi = self.build_data()
        if Phi is not None:
            raise InvalidParameterError(message="Nonlinear solves take the Neumann datum from the nonlinearity")
        return NonlinearProblem(
            a=c.a,
            d=c.d,
            mu=c.mu,
            p=self.power,
            u0=u0,
            tgrid=self._tgrid,
            F=F,
            r=c.exponents.r,
            q=c.exponents.q,
            q_inf=c.exponents.q_inf,
            substeps=c.solver.substeps,
        )

    def _use_nonlinear(self, nonlinear: bool | None) -> bool:
        return self._config.mu != 0 if nonlinear is None else nonlinear

    def solve(self, nonlinear: bool | None = None) -> SpaceTimeField:
        """Solve the configured problem.

        Args:
            nonlinear: Run Picard (True) or the linear solve (False); by default Picard
                runs exactly when mu != 0.

        Returns:
            The solution on every time node, with its trace layer.

        Raises:
            InvalidParameterError: On invalid configuration.
            NumericalFailureError: If the iteration diverges.
            NonConvergenceError: If the iteration exhausts its budget.
        """
        result = self.solve_with_diagnostics(nonlinear)
        if result.error is not None:
            raise result.error
        return result.solution

    def solve_safe(self, nonlinear: bool | None = None) -> SpaceTimeField | None:
        """Solve, returning None on any failure."""
        try:
            result = self.solve_with_diagnostics(nonlinear)
            return result.solution if result.success else None
        except Exception:
            logger.exception("Unexpected error during solve")
            return None

    def solve_with_diagnostics(self, nonlinear: bool | None = None) -> SolveResult:
        """Solve and collect diagnostics; solver errors are returned, not raised."""
        use_picard = self._use_nonlinear(nonlinear)
        digest = self._config.digest
        try:
            if use_picard:
                prob = self.problem()
                solver = self._config.solver
                U, diagnostics = picard_solve(prob, solver.tol, solver.max_iter, solver.ceiling)
                datum = boundary_nonlinearity(U, prob.mu, prob.p)
            else:
                u0, F, Phi = self.build_data()
                c = self._config
                U = solve_linear(c.a, c.d, u0, F, Phi, self._tgrid, c.solver.substeps)
                diagnostics, datum = None, Phi
        except NonConvergenceError as exc:
            return SolveResult(None, False, exc, use_picard, exc.diagnostics, config_digest=digest)
        except SolverError as exc:
            return SolveResult(None, False, exc, use_picard, config_digest=digest)

        logger.info("Solved %s problem: a=%g, d=%d", "nonlinear" if use_picard else "linear", U.a, self._config.d)
        return SolveResult(
            solution=U,
            success=True,
            error=None,
            nonlinear=use_picard,
            diagnostics=diagnostics,
            neumann=self._neumann(U, datum),
            mass_drift=_mass_drift(U),
            config_digest=digest,
        )

    def _neumann(self, U: SpaceTimeField, datum: BoundaryTrace | None) -> NeumannResidual | None:
        try:
            return neumann_residual(U.a, U, datum)
        except InsufficientResolutionError as exc:
            logger.debug("Skipping Neumann residual: %s", exc)
            return None


def _mass_drift(U: SpaceTimeField) -> float:
    mass = U.mass_profile()
    if mass[0] == 0.0:
        return 0.0
    return float(np.max(np.abs(mass - mass[0])) / mass[0])
