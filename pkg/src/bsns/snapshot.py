"""Field snapshots, diagnostic tables and run manifests.

Snapshot layout (all little-endian):

    magic "BSNS" | version u32 | d, Nx, Nz, Nt u32 | a, Xmax, Zmax, T f64 | values

Values are (re, im) float64 pairs with x varying fastest, then z, then t. A half-space
field is stored with Nt = 0 and T = 0, a boundary trace with Nz = 0 and Zmax = 0. Each
snapshot has a JSON sidecar with the radial scheme and free-form provenance; without it
a reader assumes Bessel collocation.
"""

import csv
import hashlib
import json
import logging
import struct
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Literal

import numpy as np
from numpy.typing import NDArray

from bsns.exceptions import InvalidParameterError
from bsns.fields import BoundaryTrace, HalfSpaceField, SpaceTimeField
from bsns.numerics.grids import CartesianGrid, RadialScheme, TimeGrid, build_radial_grid

logger = logging.getLogger(__name__)

MAGIC = b"BSNS"
FORMAT_VERSION = 1

_HEADER = struct.Struct("<4s5I4d")

SnapshotKind = Literal["half_space", "space_time", "boundary"]

Field = HalfSpaceField | SpaceTimeField | BoundaryTrace


@dataclass(frozen=True, slots=True, eq=False)
class Snapshot:
    """A decoded snapshot.

    Attributes:
        d: Tangential dimension.
        nx: x-nodes per axis.
        nz: Radial nodes; 0 for a boundary trace.
        nt: Time steps; 0 for a half-space field.
        a: Bessel parameter.
        xmax: Half-width of the x-box.
        zmax: Radial truncation.
        T: Final time.
        values: Samples in field layout, (Nx,)*d + (Nz,) + (Nt+1,) without empty axes.
        scheme: Radial scheme from the sidecar.
        provenance: Sidecar provenance, empty without a sidecar.
    """

    d: int
    nx: int
    nz: int
    nt: int
    a: float
    xmax: float
    zmax: float
    T: float
    values: NDArray[np.complex128] = field(repr=False)
    scheme: RadialScheme = "bessel_collocation"
    provenance: Mapping[str, Any] = field(default_factory=dict, repr=False)

    @property
    def kind(self) -> SnapshotKind:
        if self.nz == 0:
            return "boundary"
        return "half_space" if self.nt == 0 else "space_time"

    def to_field(self) -> Field:
        """Rebuild the grids and wrap the values."""
        xgrid = CartesianGrid(self.d, self.xmax, self.nx)
        if self.kind == "boundary":
            return BoundaryTrace(xgrid, TimeGrid(self.T, self.nt), self.values)
        zgrid = build_radial_grid(self.a, self.zmax, self.nz, self.scheme)
        if self.kind == "half_space":
            return HalfSpaceField(xgrid, zgrid, self.values)
        return SpaceTimeField(xgrid, zgrid, TimeGrid(self.T, self.nt), self.values)


def _describe(value: Field) -> tuple[tuple[int, int, int, int], tuple[float, float, float, float], NDArray]:
    xgrid = value.xgrid
    if isinstance(value, BoundaryTrace):
        sizes = (xgrid.d, xgrid.nx, 0, value.tgrid.nt)
        extents = (0.0, xgrid.xmax, 0.0, value.tgrid.T)
        return sizes, extents, value.values
    if isinstance(value, HalfSpaceField):
        sizes = (xgrid.d, xgrid.nx, value.zgrid.size, 0)
        extents = (value.a, xgrid.xmax, value.zgrid.zmax, 0.0)
        return sizes, extents, value.values
    sizes = (xgrid.d, xgrid.nx, value.zgrid.size, value.tgrid.nt)
    extents = (value.a, xgrid.xmax, value.zgrid.zmax, value.tgrid.T)
    return sizes, extents, value.values


def encode_snapshot(value: Field) -> bytes:
    """Header and values of a field in the snapshot format."""
    sizes, extents, values = _describe(value)
    header = _HEADER.pack(MAGIC, FORMAT_VERSION, *sizes, *extents)
    # Fortran order puts the first x axis fastest and time slowest.
    body = np.asarray(values, dtype="<c16").ravel(order="F").tobytes()
    return header + body


def decode_snapshot(data: bytes) -> Snapshot:
    """Parse snapshot bytes.

    Raises:
        InvalidParameterError: On a bad magic, an unknown version or a truncated body.
    """
    if len(data) < _HEADER.size:
        raise InvalidParameterError(message=f"Snapshot too short for its header: {len(data)} bytes")
    magic, version, d, nx, nz, nt, a, xmax, zmax, T = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise InvalidParameterError(message=f"Not a BSNS snapshot (magic {magic!r})")
    if version != FORMAT_VERSION:
        raise InvalidParameterError(message=f"Unsupported snapshot version {version}")

    shape = (nx,) * d + ((nz,) if nz else ()) + ((nt + 1,) if nt else ())
    count = int(np.prod(shape))
    body = data[_HEADER.size :]
    if len(body) != 16 * count:
        raise InvalidParameterError(message=f"Snapshot body holds {len(body)} bytes, expected {16 * count}")
    values = np.frombuffer(body, dtype="<c16").reshape(shape, order="F").astype(np.complex128)
    return Snapshot(d=d, nx=nx, nz=nz, nt=nt, a=a, xmax=xmax, zmax=zmax, T=T, values=values)


def sidecar_path(path: Path) -> Path:
    return path.with_suffix(path.suffix + ".json")


def _sidecar(value: Field, provenance: Mapping[str, Any] | None) -> dict[str, Any]:
    grids: dict[str, Any] = {"d": value.xgrid.d, "Xmax": value.xgrid.xmax, "Nx": value.xgrid.nx}
    if not isinstance(value, BoundaryTrace):
        grids.update({"a": value.a, "Zmax": value.zgrid.zmax, "Nz": value.zgrid.size, "scheme": value.zgrid.scheme})
    if not isinstance(value, HalfSpaceField):
        grids.update({"T": value.tgrid.T, "Nt": value.tgrid.nt})
    return {"format": "BSNS", "version": FORMAT_VERSION, "grids": grids, "provenance": dict(provenance or {})}


def write_json(path: Path, payload: Mapping[str, Any]) -> Path:
    """Write JSON with sorted keys so identical payloads give identical bytes."""
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")
    return path


def write_snapshot(path: Path | str, value: Field, provenance: Mapping[str, Any] | None = None) -> list[Path]:
    """Write a field and its sidecar; a space-time field with a trace layer also gets a trace snapshot.

    Returns:
        Every file written.
    """
    path = Path(path)
    path.write_bytes(encode_snapshot(value))
    written = [path, write_json(sidecar_path(path), _sidecar(value, provenance))]

    if isinstance(value, SpaceTimeField) and value.trace is not None:
        trace_path = path.with_name(f"{path.stem}.trace{path.suffix}")
        written.extend(write_snapshot(trace_path, value.boundary(), provenance))
    logger.info("Wrote snapshot %s", path)
    return written


def read_snapshot(path: Path | str) -> Snapshot:
    """Read a snapshot and, when present, its sidecar.

    Raises:
        InvalidParameterError: If the file is missing or malformed.
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except FileNotFoundError as e:
        raise InvalidParameterError(message=f"Snapshot not found: {path}") from e
    snapshot = decode_snapshot(data)

    side = sidecar_path(path)
    if not side.exists():
        return snapshot
    meta = json.loads(side.read_text(encoding="utf-8"))
    scheme = meta.get("grids", {}).get("scheme", snapshot.scheme)
    return Snapshot(
        d=snapshot.d,
        nx=snapshot.nx,
        nz=snapshot.nz,
        nt=snapshot.nt,
        a=snapshot.a,
        xmax=snapshot.xmax,
        zmax=snapshot.zmax,
        T=snapshot.T,
        values=snapshot.values,
        scheme=scheme,
        provenance=meta.get("provenance", {}),
    )


def _cell(value: Any) -> str:
    if isinstance(value, bool) or value is None:
        return str(value)
    if isinstance(value, int | np.integer):
        return str(int(value))
    if isinstance(value, float | np.floating):
        return "%.17g" % float(value)
    return str(value)


def write_csv(path: Path | str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """One diagnostic table with a header row; floats as %.17g so reruns match byte for byte."""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            if len(row) != len(header):
                raise InvalidParameterError(message=f"Row of {len(row)} cells under a header of {len(header)}")
            writer.writerow([_cell(v) for v in row])
    logger.info("Wrote table %s", path)
    return path


def sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(out_dir: Path | str, files: Iterable[Path], config_digest: str | None = None) -> Path:
    """manifest.json listing every emitted file (relative to out_dir) with its SHA-256."""
    out_dir = Path(out_dir)
    entries = {str(Path(f).resolve().relative_to(out_dir.resolve())): sha256_file(Path(f)) for f in files}
    payload = {"config_sha256": config_digest, "files": dict(sorted(entries.items()))}
    return write_json(out_dir / "manifest.json", payload)
