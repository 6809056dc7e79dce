"""Prescription JSON reading and writing."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

import orjson

from polarfield.core.exceptions import ParseError
from polarfield.core.prescribe.types import (
    AlignmentCurve,
    CurvePoint,
    Prescription,
    Singularity,
    SingularityKind,
)

LOGGER = logging.getLogger(__name__)


def parse_prescription(content: str | bytes) -> Prescription:
    """Parse prescription JSON.

    Schema: ``{"N": int, "singularities": [{"type": "vertex"|"edge"|"face",
    "element": int, "t": float?, "bary": [f, f, f]?, "index": int}],
    "homology": [int], "boundary": [int], "power": bool?}``.

    Raises:
        ParseError: Content is not valid JSON or misses required keys.
    """
    try:
        document = orjson.loads(content)
    except orjson.JSONDecodeError as error:
        msg = f"Prescription is not valid JSON: {error}"
        raise ParseError(msg) from error
    if not isinstance(document, dict):
        msg = "Prescription must be a JSON object"
        raise ParseError(msg)
    try:
        singularities = [_parse_singularity(item) for item in document.get("singularities", [])]
        return Prescription(
            n=int(document.get("N", 1)),
            singularities=singularities,
            homology=[int(value) for value in document.get("homology", [])],
            boundary=[int(value) for value in document.get("boundary", [])],
            power=bool(document.get("power", True)),
        )
    except (KeyError, TypeError, ValueError) as error:
        msg = f"Invalid prescription entry: {error}"
        raise ParseError(msg) from error


def _parse_singularity(item: dict[str, Any]) -> Singularity:
    singularity = Singularity(
        kind=SingularityKind(item["type"]),
        element=int(item["element"]),
        index=int(item["index"]),
    )
    if "t" in item:
        singularity["t"] = float(item["t"])
    if "bary" in item:
        singularity["bary"] = [float(value) for value in item["bary"]]
    return singularity


def prescription_to_dict(prescription: Prescription) -> dict[str, Any]:
    """Return JSON ready dictionary."""
    singularities = []
    for item in prescription.singularities:
        entry: dict[str, Any] = {
            "type": str(item["kind"]),
            "element": item["element"],
            "index": item["index"],
        }
        if "t" in item:
            entry["t"] = item["t"]
        if "bary" in item:
            entry["bary"] = list(item["bary"])
        singularities.append(entry)
    document: dict[str, Any] = {
        "N": prescription.n,
        "singularities": singularities,
        "homology": list(prescription.homology),
        "boundary": list(prescription.boundary),
    }
    if not prescription.power:
        document["power"] = False
    return document


def dump_prescription(prescription: Prescription) -> bytes:
    """Serialize prescription deterministically."""
    return orjson.dumps(
        prescription_to_dict(prescription),
        option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS,
    )


def read_prescription(path: Path | str) -> Prescription:
    """Read prescription file."""
    LOGGER.info("Reading prescription from %s", path)
    return parse_prescription(Path(path).read_bytes())


def write_prescription(path: Path | str, prescription: Prescription) -> None:
    """Write prescription file."""
    Path(path).write_bytes(dump_prescription(prescription))


def parse_curves(content: str | bytes) -> list[AlignmentCurve]:
    """Parse alignment curve JSON.

    Schema: ``{"curves": [{"points": [{"face": int, "bary": [f, f, f]}],
    "closed": bool?}]}``.

    Raises:
        ParseError: Content is not valid JSON or a curve is malformed.
    """
    try:
        document = orjson.loads(content)
    except orjson.JSONDecodeError as error:
        msg = f"Curves are not valid JSON: {error}"
        raise ParseError(msg) from error
    if not isinstance(document, dict):
        msg = "Curves must be a JSON object"
        raise ParseError(msg)
    curves = []
    try:
        for item in document.get("curves", []):
            points = [
                CurvePoint(face=int(point["face"]), bary=[float(v) for v in point["bary"]])
                for point in item["points"]
            ]
            if len(points) < 2 or any(len(point["bary"]) != 3 for point in points):
                msg = "Curves need at least two points with three barycentric coordinates"
                raise ParseError(msg)
            curves.append(AlignmentCurve(points=points, closed=bool(item.get("closed", False))))
    except (KeyError, TypeError, ValueError) as error:
        msg = f"Invalid curve entry: {error}"
        raise ParseError(msg) from error
    return curves


def read_curves(path: Path | str) -> list[AlignmentCurve]:
    """Read alignment curve file."""
    LOGGER.info("Reading alignment curves from %s", path)
    return parse_curves(Path(path).read_bytes())
