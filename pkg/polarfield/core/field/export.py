"""Field, vector, sample and streamline files."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import TYPE_CHECKING, Any

import numpy as np
import orjson
import pandas as pd
from scipy import sparse

from polarfield.core.exceptions import ParseError, ZeroAtFractionalPowerError
from polarfield.core.field.power_linear import PowerLinearField

if TYPE_CHECKING:
    from collections.abc import Sequence

    import numpy.typing as npt

    from polarfield.core.bevel.complex import BeveledMesh
    from polarfield.core.field.types import FieldSample, Streamline
    from polarfield.core.mesh.paths import Waypoint
    from polarfield.core.mesh.surface import SurfaceMesh

LOGGER = logging.getLogger(__name__)

JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY
FLOAT_FORMAT = "%.12g"
FIELD_FORMAT = "polarfield-field"


def dump_json(document: Any) -> bytes:  # noqa: ANN401
    """Serialize a document deterministically."""
    return orjson.dumps(document, option=JSON_OPTIONS)


def write_json(path: Path | str, document: Any) -> None:  # noqa: ANN401
    """Write a document with sorted keys."""
    Path(path).write_bytes(dump_json(document))


def field_to_dict(field: PowerLinearField) -> dict[str, Any]:
    """Return JSON ready dictionary of the root corner values."""
    values = field.root_values
    return {
        "format": FIELD_FORMAT,
        "N": field.n,
        "faces": [
            {
                "corners": [[float(value.real), float(value.imag)] for value in corners],
                "exponent": int(exponent),
            }
            for corners, exponent in zip(values, field.exponents, strict=True)
        ],
    }


def write_field(path: Path | str, field: PowerLinearField) -> None:
    """Write field export."""
    write_json(path, field_to_dict(field))
    LOGGER.info("Field of %d faces written to %s", len(field.exponents), path)


def parse_field(content: str | bytes, mesh: SurfaceMesh) -> PowerLinearField:
    """Parse a field export for ``mesh``.

    Raises:
        ParseError: Content is not a field export of a mesh with this face count.
    """
    try:
        document = orjson.loads(content)
    except orjson.JSONDecodeError as error:
        msg = f"Field is not valid JSON: {error}"
        raise ParseError(msg) from error
    if not isinstance(document, dict) or document.get("format") != FIELD_FORMAT:
        msg = "Not a field export"
        raise ParseError(msg)
    try:
        faces = document["faces"]
        roots = np.array(
            [[complex(re, im) for re, im in item["corners"]] for item in faces],
            dtype=np.complex128,
        )
        exponents = np.array([int(item["exponent"]) for item in faces], dtype=np.int64)
        n = int(document["N"])
    except (KeyError, TypeError, ValueError) as error:
        msg = f"Invalid field entry: {error}"
        raise ParseError(msg) from error
    if len(faces) != mesh.n_faces:
        msg = f"Field has {len(faces)} faces, mesh has {mesh.n_faces}"
        raise ParseError(msg)
    try:
        return PowerLinearField(mesh, roots, exponents, n)
    except ValueError as error:
        raise ParseError(str(error)) from error


def read_field(path: Path | str, mesh: SurfaceMesh) -> PowerLinearField:
    """Read field export."""
    LOGGER.info("Reading field from %s", path)
    return parse_field(Path(path).read_bytes(), mesh)


def write_vector(path: Path | str, name: str, values: npt.ArrayLike) -> None:
    """Write ``{"name": ..., "values": [...]}``."""
    array = np.asarray(values)
    write_json(path, {"name": name, "size": int(array.size), "values": array.tolist()})


def read_vector(path: Path | str) -> npt.NDArray[Any]:
    """Read a vector written by ``write_vector``.

    Raises:
        ParseError: File is missing or is not a vector document.
    """
    try:
        document = orjson.loads(Path(path).read_bytes())
        return np.asarray(document["values"])
    except (OSError, orjson.JSONDecodeError, KeyError, TypeError) as error:
        msg = f"Invalid vector file {path}: {error}"
        raise ParseError(msg) from error


def sample_grid(mesh: SurfaceMesh, density: int) -> list[Waypoint]:
    """Return a regular barycentric grid with ``density`` subdivisions per face."""
    if density <= 0:
        return []
    points = [
        np.array([density - i - j, i, j], dtype=np.float64) / density
        for i in range(density + 1)
        for j in range(density + 1 - i)
    ]
    return [(face, bary) for face in range(mesh.n_faces) for bary in points]


def samples_frame(samples: Sequence[FieldSample], n: int) -> pd.DataFrame:
    """Return one row per sample with real and imaginary parts per branch."""
    records = []
    for sample in samples:
        record: dict[str, float | int] = {
            "face": sample["face"],
            "b0": sample["bary"][0],
            "b1": sample["bary"][1],
            "b2": sample["bary"][2],
        }
        for branch in range(n):
            record[f"re{branch}"] = sample["values"][branch].real
            record[f"im{branch}"] = sample["values"][branch].imag
        record["log_scale"] = sample["log_scale"]
        record["phase"] = sample["phase"]
        records.append(record)
    columns = ["face", "b0", "b1", "b2"]
    columns += [f"{part}{branch}" for branch in range(n) for part in ("re", "im")]
    columns += ["log_scale", "phase"]
    return pd.DataFrame.from_records(records, columns=columns)


def write_samples(
    path: Path | str,
    field: PowerLinearField,
    waypoints: Sequence[Waypoint],
    unit: bool = False,
) -> pd.DataFrame:
    """Sample ``field`` at ``waypoints`` and write a CSV file.

    Points at a zero of a fractional power field are skipped.
    """
    samples = []
    for face, bary in waypoints:
        try:
            sample = field.sample(face, bary)
        except ZeroAtFractionalPowerError:
            continue
        if unit:
            sample["values"] = [
                value / abs(value) if value != 0 else value for value in sample["values"]
            ]
        samples.append(sample)
    frame = samples_frame(samples, field.n)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    LOGGER.info("%d samples written to %s", len(frame), path)
    return frame


def write_streamlines(path: Path | str, lines: Sequence[Streamline]) -> None:
    """Write polylines as OBJ vertex and line records."""
    rows = []
    lines_out = []
    offset = 1
    for line in lines:
        points = np.asarray(line["points"])
        rows.extend(
            "v " + " ".join(FLOAT_FORMAT % coordinate for coordinate in point) for point in points
        )
        if len(points) > 1:
            indices = range(offset, offset + len(points))
            lines_out.append("l " + " ".join(str(index) for index in indices))
        offset += len(points)
    Path(path).write_text("\n".join([*rows, *lines_out]) + "\n")
    LOGGER.info("%d streamlines written to %s", len(lines), path)


def write_triplets(path: Path | str, matrix: sparse.spmatrix) -> None:
    """Write ``row col value`` triplets with the shape in the header."""
    coo = sparse.coo_matrix(matrix)
    order = np.lexsort((coo.col, coo.row))
    table = np.column_stack([coo.row[order], coo.col[order], coo.data[order]])
    np.savetxt(
        path,
        table,
        fmt=["%d", "%d", FLOAT_FORMAT],
        header=f"{coo.shape[0]} {coo.shape[1]} {coo.nnz}",
    )


def beveled_to_dict(bm: BeveledMesh) -> dict[str, Any]:
    """Return debug description of the beveled complex."""
    return {
        "n_corners": bm.n_corners,
        "n_split_edges": bm.n_split_edges,
        "n_jump_edges": bm.n_jump_edges,
        "n_faces": bm.n_faces,
        "corner_vertex": bm.corner_vertex,
        "corner_face": bm.corner_face,
        "edge_tail": bm.edge_tail,
        "edge_head": bm.edge_head,
        "edge_kind": bm.edge_kind,
        "face_kind": bm.face_kind,
    }
