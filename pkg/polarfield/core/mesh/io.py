"""Read OBJ and OFF triangle meshes."""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np

from polarfield.core.exceptions import NonTriangularError, ParseError
from polarfield.core.mesh.surface import SurfaceMesh
from polarfield.core.mesh.types import MeshFormat

LOGGER = logging.getLogger(__name__)


def read_mesh(path: Path | str) -> SurfaceMesh:
    """Read mesh file, format is taken from the suffix.

    Raises:
        ParseError: Unknown suffix or malformed content.
        OSError: File cannot be read.
    """
    path = Path(path)
    try:
        mesh_format = MeshFormat.from_suffix(path.suffix)
    except ValueError as error:
        msg = f"Unsupported mesh format: {path.suffix!r}"
        raise ParseError(msg, path=str(path)) from error
    content = path.read_text(encoding="utf-8", errors="replace")
    LOGGER.info("Reading %s mesh from %s", mesh_format, path)
    return load_mesh(content, mesh_format)


def load_mesh(content: str | bytes, mesh_format: MeshFormat) -> SurfaceMesh:
    """Parse mesh content.

    Args:
        content (str | bytes): File content.
        mesh_format (MeshFormat): Content format.

    Returns:
        SurfaceMesh: Validated mesh.
    """
    if isinstance(content, bytes):
        content = content.decode("utf-8", errors="replace")
    if mesh_format is MeshFormat.OBJ:
        positions, faces = _parse_obj(content)
    else:
        positions, faces = _parse_off(content)
    return SurfaceMesh(np.asarray(positions, dtype=np.float64).reshape(-1, 3), faces)


def _parse_obj(content: str) -> tuple[list[list[float]], list[list[int]]]:
    positions: list[list[float]] = []
    faces: list[list[int]] = []
    for line_number, raw_line in enumerate(content.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if tokens[0] == "v":
            try:
                positions.append([float(value) for value in tokens[1:4]])
            except ValueError as error:
                msg = f"Invalid vertex on line {line_number}"
                raise ParseError(msg, line=line_number) from error
            if len(positions[-1]) != 3:  # noqa: PLR2004
                msg = f"Vertex on line {line_number} needs three coordinates"
                raise ParseError(msg, line=line_number)
        elif tokens[0] == "f":
            indices = []
            for token in tokens[1:]:
                try:
                    index = int(token.split("/", 1)[0])
                except ValueError as error:
                    msg = f"Invalid face index {token!r} on line {line_number}"
                    raise ParseError(msg, line=line_number) from error
                if index == 0:
                    msg = f"Face index 0 on line {line_number}"
                    raise ParseError(msg, line=line_number)
                # negative indices count back from the latest vertex
                indices.append(index - 1 if index > 0 else len(positions) + index)
            if len(indices) != 3:  # noqa: PLR2004
                msg = f"Face on line {line_number} has {len(indices)} vertices"
                raise NonTriangularError(msg, line=line_number)
            faces.append(indices)
    if not positions or not faces:
        msg = "OBJ content has no vertices or faces"
        raise ParseError(msg)
    return positions, faces


def _parse_off(content: str) -> tuple[list[list[float]], list[list[int]]]:
    lines = [
        stripped
        for raw_line in content.splitlines()
        if (stripped := raw_line.split("#", 1)[0].strip())
    ]
    if not lines or not lines[0].startswith("OFF"):
        msg = "OFF content must start with an OFF header"
        raise ParseError(msg)

    header_tail = lines[0][3:].split()
    body = lines[1:]
    if header_tail:
        counts_tokens = header_tail
    else:
        if not body:
            msg = "OFF content has no element counts"
            raise ParseError(msg)
        counts_tokens = body[0].split()
        body = body[1:]
    try:
        n_vertices, n_faces = int(counts_tokens[0]), int(counts_tokens[1])
    except (IndexError, ValueError) as error:
        msg = "Invalid OFF element counts"
        raise ParseError(msg) from error
    if len(body) < n_vertices + n_faces:
        msg = f"OFF content declares {n_vertices + n_faces} elements but has {len(body)} lines"
        raise ParseError(msg)

    positions: list[list[float]] = []
    for line in body[:n_vertices]:
        try:
            positions.append([float(value) for value in line.split()[:3]])
        except ValueError as error:
            msg = f"Invalid OFF vertex: {line!r}"
            raise ParseError(msg) from error
        if len(positions[-1]) != 3:  # noqa: PLR2004
            msg = f"OFF vertex needs three coordinates: {line!r}"
            raise ParseError(msg)

    faces: list[list[int]] = []
    for line in body[n_vertices : n_vertices + n_faces]:
        tokens = line.split()
        try:
            size = int(tokens[0])
            values = [int(value) for value in tokens[1 : size + 1]]
        except ValueError as error:
            msg = f"Invalid OFF face: {line!r}"
            raise ParseError(msg) from error
        if len(values) < size:
            msg = f"Truncated OFF face: {line!r}"
            raise ParseError(msg)
        if size != 3:  # noqa: PLR2004
            msg = f"OFF face has {size} vertices"
            raise NonTriangularError(msg)
        faces.append(values)
    return positions, faces


def write_obj(path: Path | str, mesh: SurfaceMesh) -> None:
    """Write mesh as OBJ."""
    lines = [f"v {x:.17g} {y:.17g} {z:.17g}" for x, y, z in mesh.positions]
    lines += [f"f {a + 1} {b + 1} {c + 1}" for a, b, c in mesh.faces]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
