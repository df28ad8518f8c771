"""Run configuration: bundled defaults, user documents and the BSNS_THREADS setting.

A run is described by one JSON or YAML document. It is deep-merged over the bundled
defaults in bsns/data/defaults.yaml; any key the defaults do not know is an error.
"""

import copy
import hashlib
import json
import logging
import math
import os
from collections.abc import Mapping
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any, Literal

import yaml

from bsns.exceptions import InvalidParameterError
from bsns.numerics.grids import (
    RADIAL_SCHEMES,
    CartesianGrid,
    RadialScheme,
    TimeGrid,
    WeightedRadialGrid,
    build_radial_grid,
    self_dual_radial_grid,
)

logger = logging.getLogger(__name__)

DataType = Literal["gaussian", "zero", "fixture", "file"]

DATA_TYPES: tuple[DataType, ...] = ("gaussian", "zero", "fixture", "file")

THREADS_ENV = "BSNS_THREADS"

# Mappings under these keys are taken as given instead of checked against the defaults.
_FREE_FORM = frozenset({"params"})


def worker_count() -> int:
    """Worker threads for ensemble runs: BSNS_THREADS if set, else the CPU count."""
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw.strip() == "":
        return os.cpu_count() or 1
    try:
        count = int(raw)
    except ValueError as e:
        raise InvalidParameterError(message=f"{THREADS_ENV} must be an integer, got {raw!r}") from e
    if count < 1:
        raise InvalidParameterError(message=f"{THREADS_ENV} must be positive, got {count}")
    return count


@lru_cache(maxsize=1)
def _bundled_defaults() -> dict[str, Any]:
    data_files = resources.files("bsns.data")
    defaults_file = data_files.joinpath("defaults.yaml")
    with resources.as_file(defaults_file) as path:
        with open(path, encoding="utf-8") as f:
            return yaml.safe_load(f)


def load_defaults() -> dict[str, Any]:
    """A fresh copy of the bundled defaults document."""
    return copy.deepcopy(_bundled_defaults())


def merge_config(base: Mapping[str, Any], override: Mapping[str, Any], path: str = "") -> dict[str, Any]:
    """Deep-merge override into base.

    Raises:
        InvalidParameterError: If override carries a key base does not have.
    """
    merged = copy.deepcopy(dict(base))
    for key, value in override.items():
        where = f"{path}.{key}" if path else str(key)
        if key not in merged:
            raise InvalidParameterError(message=f"Unknown configuration key: {where}")
        current = merged[key]
        if isinstance(current, Mapping) and key not in _FREE_FORM:
            if not isinstance(value, Mapping):
                raise InvalidParameterError(message=f"Configuration key {where} must be a mapping")
            merged[key] = merge_config(current, value, where)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def _number(value: Any, where: str, allow_none: bool = False) -> float | None:
    if value is None and allow_none:
        return None
    if isinstance(value, str) and value.strip().lower() in ("inf", "+inf", "infinity"):
        return math.inf
    if isinstance(value, bool) or not isinstance(value, int | float):
        raise InvalidParameterError(message=f"Configuration key {where} must be a number, got {value!r}")
    return float(value)


def _integer(value: Any, where: str, allow_none: bool = False) -> int | None:
    if value is None and allow_none:
        return None
    if isinstance(value, bool) or not isinstance(value, int):
        raise InvalidParameterError(message=f"Configuration key {where} must be an integer, got {value!r}")
    return value


@dataclass(frozen=True, slots=True)
class GridConfig:
    """Spatial grids.

    Attributes:
        zmax: Radial truncation; None selects the self-dual collocation radius.
        nz: Radial nodes.
        xmax: Half-width of the x-box.
        nx: x-nodes per axis.
        scheme: Radial quadrature scheme.
    """

    zmax: float | None
    nz: int
    xmax: float
    nx: int
    scheme: RadialScheme

    def build_xgrid(self, d: int) -> CartesianGrid:
        return CartesianGrid(d, self.xmax, self.nx)

    def build_zgrid(self, a: float) -> WeightedRadialGrid:
        if self.zmax is None:
            if self.scheme != "bessel_collocation":
                raise InvalidParameterError(message=f"grid.Zmax is required for the {self.scheme} scheme")
            return self_dual_radial_grid(a, self.nz)
        return build_radial_grid(a, self.zmax, self.nz, self.scheme)


@dataclass(frozen=True, slots=True)
class TimeConfig:
    """Time window [0, T] with Nt steps."""

    T: float
    nt: int

    def build(self) -> TimeGrid:
        return TimeGrid(self.T, self.nt)


@dataclass(frozen=True, slots=True)
class DataSpec:
    """One datum (u0, F or Phi).

    Attributes:
        type: gaussian, zero, fixture or file.
        params: Type-specific parameters.
    """

    type: DataType
    params: Mapping[str, Any] = field(default_factory=dict)


@dataclass(frozen=True, slots=True)
class SolverConfig:
    """Picard iteration and boundary quadrature settings."""

    tol: float
    max_iter: int
    ceiling: float
    substeps: int | None


@dataclass(frozen=True, slots=True)
class ExponentConfig:
    """Norm exponents; None entries are derived from (a, d, p)."""

    q: float | None
    r: float | None
    m: float
    q_inf: float | None


@dataclass(frozen=True, slots=True)
class RunConfig:
    """A fully merged and validated run configuration.

    Attributes:
        a: Bessel parameter.
        d: Tangential dimension.
        grid: Spatial grids.
        time: Time window.
        u0: Initial datum.
        F: Bulk forcing.
        Phi: Neumann datum.
        mu: Coupling of the boundary nonlinearity.
        p: Nonlinear power; None selects the critical power.
        exponents: Norm exponents.
        solver: Iteration settings.
        seed: Seed for every random data family.
        document: The merged document the fields were parsed from.
    """

    a: float
    d: int
    grid: GridConfig
    time: TimeConfig
    u0: DataSpec
    F: DataSpec
    Phi: DataSpec
    mu: complex
    p: float | None
    exponents: ExponentConfig
    solver: SolverConfig
    seed: int
    document: Mapping[str, Any] = field(repr=False, compare=False, default_factory=dict)

    @property
    def digest(self) -> str:
        """SHA-256 of the canonical JSON form of the merged document."""
        canonical = json.dumps(self.document, sort_keys=True, separators=(",", ":"), default=str)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _data_spec(doc: Mapping[str, Any], name: str) -> DataSpec:
    kind = doc.get("type")
    if kind not in DATA_TYPES:
        raise InvalidParameterError(message=f"data.{name}.type must be one of {DATA_TYPES}, got {kind!r}")
    params = doc.get("params") or {}
    if not isinstance(params, Mapping):
        raise InvalidParameterError(message=f"data.{name}.params must be a mapping")
    return DataSpec(type=kind, params=dict(params))


def parse_config(document: Mapping[str, Any]) -> RunConfig:
    """Merge a user document over the defaults and validate it.

    Raises:
        InvalidParameterError: On unknown keys or ill-typed values.
    """
    doc = merge_config(load_defaults(), document)
    grid, time, solver, exps = doc["grid"], doc["time"], doc["solver"], doc["exponents"]

    scheme = grid["scheme"]
    if scheme not in RADIAL_SCHEMES:
        raise InvalidParameterError(message=f"grid.scheme must be one of {RADIAL_SCHEMES}, got {scheme!r}")

    config = RunConfig(
        a=_number(doc["a"], "a"),
        d=_integer(doc["d"], "d"),
        grid=GridConfig(
            zmax=_number(grid["Zmax"], "grid.Zmax", allow_none=True),
            nz=_integer(grid["Nz"], "grid.Nz"),
            xmax=_number(grid["Xmax"], "grid.Xmax"),
            nx=_integer(grid["Nx"], "grid.Nx"),
            scheme=scheme,
        ),
        time=TimeConfig(T=_number(time["T"], "time.T"), nt=_integer(time["Nt"], "time.Nt")),
        u0=_data_spec(doc["data"]["u0"], "u0"),
        F=_data_spec(doc["data"]["F"], "F"),
        Phi=_data_spec(doc["data"]["Phi"], "Phi"),
        mu=complex(_number(doc["mu"]["re"], "mu.re"), _number(doc["mu"]["im"], "mu.im")),
        p=_number(doc["p"], "p", allow_none=True),
        exponents=ExponentConfig(
            q=_number(exps["q"], "exponents.q", allow_none=True),
            r=_number(exps["r"], "exponents.r", allow_none=True),
            m=_number(exps["m"], "exponents.m"),
            q_inf=_number(exps["q_inf"], "exponents.q_inf", allow_none=True),
        ),
        solver=SolverConfig(
            tol=_number(solver["tol"], "solver.tol"),
            max_iter=_integer(solver["max_iter"], "solver.max_iter"),
            ceiling=_number(solver["ceiling"], "solver.ceiling"),
            substeps=_integer(solver["substeps"], "solver.substeps", allow_none=True),
        ),
        seed=_integer(doc["seed"], "seed"),
        document=doc,
    )
    if config.d < 1:
        raise InvalidParameterError(message=f"d must be >= 1, got {config.d}")
    return config


def load_config(path: Path | str) -> RunConfig:
    """Read a JSON or YAML document and parse it.

    Raises:
        InvalidParameterError: If the file is missing, unparsable or invalid.
    """
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as f:
            document = yaml.safe_load(f)
    except FileNotFoundError as e:
        raise InvalidParameterError(message=f"Configuration file not found: {path}") from e
    except yaml.YAMLError as e:
        raise InvalidParameterError(message=f"Configuration file {path} is not valid JSON or YAML: {e}") from e

    if document is None:
        document = {}
    if not isinstance(document, Mapping):
        raise InvalidParameterError(message=f"Configuration file {path} must hold a mapping")
    logger.info("Loaded configuration from %s", path)
    return parse_config(document)
