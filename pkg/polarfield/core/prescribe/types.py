"""Prescription types."""

from __future__ import annotations

from enum import Enum
from typing import TYPE_CHECKING, NotRequired, TypedDict

import numpy as np

if TYPE_CHECKING:
    from collections.abc import Iterable

    import numpy.typing as npt


class SingularityKind(Enum):
    """Mesh element carrying a singularity."""

    VERTEX = "vertex"
    EDGE = "edge"
    FACE = "face"

    def __str__(self) -> str:
        """Return kind name."""
        return self.value


class Singularity(TypedDict):
    """Prescribed singular point and its index numerator."""

    kind: SingularityKind
    element: int
    index: int
    t: NotRequired[float]
    bary: NotRequired[list[float]]


class Prescription:
    """Singularities, symmetry degree and loop indices of a design."""

    def __init__(
        self,
        n: int = 1,
        singularities: Iterable[Singularity] = (),
        homology: Iterable[int] = (),
        boundary: Iterable[int] = (),
        power: bool = True,
    ) -> None:
        """Initialize prescription.

        Args:
            n (int): Symmetry degree N.
            singularities (Iterable[Singularity]): Singular points.
            homology (Iterable[int]): Index numerator per homology generator.
            boundary (Iterable[int]): Index numerator per boundary loop.
            power (bool): Allow face indices other than +-1.
        """
        self._n = int(n)
        self._singularities = list(singularities)
        self._homology = [int(value) for value in homology]
        self._boundary = [int(value) for value in boundary]
        self._power = bool(power)

    @property
    def n(self) -> int:
        """Returns symmetry degree N."""
        return self._n

    @n.setter
    def n(self, new_value: int) -> None:
        """Set symmetry degree."""
        if new_value < 1:
            msg = f"Symmetry degree must be >= 1, got {new_value}"
            raise ValueError(msg)
        self._n = int(new_value)

    @property
    def singularities(self) -> list[Singularity]:
        """Returns singular points."""
        return self._singularities

    @property
    def homology(self) -> list[int]:
        """Returns index numerator per homology generator."""
        return self._homology

    @homology.setter
    def homology(self, new_value: list[int]) -> None:
        """Set homology indices."""
        self._homology = [int(value) for value in new_value]

    @property
    def boundary(self) -> list[int]:
        """Returns index numerator per boundary loop."""
        return self._boundary

    @boundary.setter
    def boundary(self, new_value: list[int]) -> None:
        """Set boundary indices."""
        self._boundary = [int(value) for value in new_value]

    @property
    def power(self) -> bool:
        """Returns whether power fields are allowed."""
        return self._power

    def of_kind(self, kind: SingularityKind) -> list[Singularity]:
        """Return singularities on elements of ``kind``."""
        return [item for item in self._singularities if item["kind"] is kind]

    @property
    def is_vertex_only(self) -> bool:
        """Returns True when every singularity sits on a vertex."""
        return all(item["kind"] is SingularityKind.VERTEX for item in self._singularities)

    def index_sum(self) -> int:
        """Return sum of singularity and boundary index numerators."""
        return sum(item["index"] for item in self._singularities) + sum(self._boundary)

    def copy(self) -> Prescription:
        """Return deep copy."""
        return Prescription(
            n=self._n,
            singularities=[Singularity(**item) for item in self._singularities],  # type: ignore
            homology=list(self._homology),
            boundary=list(self._boundary),
            power=self._power,
        )

    def __eq__(self, other: object) -> bool:
        """Compare field by field."""
        if not isinstance(other, Prescription):
            return NotImplemented
        return (
            self._n == other.n
            and self._singularities == other.singularities
            and self._homology == other.homology
            and self._boundary == other.boundary
            and self._power == other.power
        )

    def __hash__(self) -> int:
        """Hash on symmetry degree and element ids."""
        return hash((self._n, tuple(item["element"] for item in self._singularities)))

    def __repr__(self) -> str:
        """Return short description."""
        return (
            f"Prescription(n={self._n}, singularities={len(self._singularities)}, "
            f"homology={self._homology}, boundary={self._boundary})"
        )


class TargetGroup(TypedDict):
    """Isotropy targets of one singular element.

    ``edges`` are beveled edge ids, ``values`` the targets in stored edge
    orientation, ``flaps`` the interior mesh edges whose flap rows form the
    group's operator rows. Face groups use ``face`` instead of flaps.
    """

    kind: SingularityKind
    element: int
    edges: npt.NDArray[np.int64]
    values: npt.NDArray[np.float64]
    flaps: list[int]
    face: int


class IsotropyTargets:
    """Concatenated isotropy targets with per element grouping."""

    def __init__(self, groups: Iterable[TargetGroup] = ()) -> None:
        """Initialize from groups."""
        self._groups = list(groups)

    @property
    def groups(self) -> list[TargetGroup]:
        """Returns per element groups."""
        return self._groups

    @property
    def edges(self) -> npt.NDArray[np.int64]:
        """Returns beveled edge id per target row."""
        if not self._groups:
            return np.zeros(0, dtype=np.int64)
        return np.concatenate([group["edges"] for group in self._groups])

    @property
    def values(self) -> npt.NDArray[np.float64]:
        """Returns target value per row."""
        if not self._groups:
            return np.zeros(0, dtype=np.float64)
        return np.concatenate([group["values"] for group in self._groups])

    def __len__(self) -> int:
        """Return number of target rows."""
        return sum(len(group["edges"]) for group in self._groups)


class CurvePoint(TypedDict):
    """Alignment curve waypoint in barycentric coordinates of a face."""

    face: int
    bary: list[float]


class AlignmentCurve(TypedDict):
    """Polyline the field should follow."""

    points: list[CurvePoint]
    closed: bool
