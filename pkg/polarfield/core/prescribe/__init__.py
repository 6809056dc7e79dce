"""Singularity prescriptions and isotropy targets."""

from polarfield.core.prescribe.io import (
    dump_prescription,
    parse_curves,
    parse_prescription,
    read_curves,
    read_prescription,
    write_prescription,
)
from polarfield.core.prescribe.targets import (
    assemble_targets,
    edge_targets,
    face_targets,
    vertex_targets,
)
from polarfield.core.prescribe.types import (
    AlignmentCurve,
    CurvePoint,
    IsotropyTargets,
    Prescription,
    Singularity,
    SingularityKind,
    TargetGroup,
)
from polarfield.core.prescribe.validate import snap_placements, validate

__all__ = [
    "AlignmentCurve",
    "CurvePoint",
    "IsotropyTargets",
    "Prescription",
    "Singularity",
    "SingularityKind",
    "TargetGroup",
    "assemble_targets",
    "dump_prescription",
    "edge_targets",
    "face_targets",
    "parse_curves",
    "parse_prescription",
    "read_curves",
    "read_prescription",
    "snap_placements",
    "validate",
    "vertex_targets",
    "write_prescription",
]
