"""Piecewise power-linear fields.

Each face carries a linear root field ``a z + b conj(z) + c`` given by its
three corner values in the face frame. The power field of the face is the
root raised to the face exponent, and the ``N`` directions at a point are
the ``N``-th roots of the power field.
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np

from polarfield.core.exceptions import (
    AtSingularityError,
    DegenerateTriangleError,
    ZeroAtFractionalPowerError,
)
from polarfield.core.field.types import (
    Classification,
    FieldClass,
    FieldSample,
    SingularLocus,
    SingularLocusKind,
)
from polarfield.core.mesh.geometry import local_basis

if TYPE_CHECKING:
    import numpy.typing as npt

    from polarfield.core.mesh.surface import SurfaceMesh
    from polarfield.core.mesh.types import LocalBasis

LOGGER = logging.getLogger(__name__)

PARABOLIC_TOLERANCE = 1e-9
DEGENERATE_TOLERANCE = 1e-12
ZERO_TOLERANCE = 1e-14


def face_coefficients(
    values: npt.ArrayLike,
    corners: npt.ArrayLike,
) -> tuple[npt.NDArray[np.complex128], npt.NDArray[np.complex128], npt.NDArray[np.complex128]]:
    """Return ``(a, b, c)`` with ``a z + b conj(z) + c`` matching the corner values.

    Works on single faces (shape ``(3,)``) and batches (shape ``(F, 3)``).

    Raises:
        DegenerateTriangleError: Corners are collinear.
    """
    values = np.asarray(values, dtype=np.complex128)
    corners = np.asarray(corners, dtype=np.complex128)
    first = corners[..., 1] - corners[..., 0]
    second = corners[..., 2] - corners[..., 0]
    doubled_area = np.abs((np.conj(first) * second).imag)
    scale = np.maximum(np.abs(first), np.abs(second)) ** 2
    if np.any(doubled_area <= DEGENERATE_TOLERANCE * scale):
        msg = "Triangle corners are collinear"
        raise DegenerateTriangleError(msg)
    system = np.stack([corners, np.conj(corners), np.ones_like(corners)], axis=-1)
    solution = np.linalg.solve(system, values[..., None])[..., 0]
    return solution[..., 0], solution[..., 1], solution[..., 2]


def classify(a: complex, b: complex) -> Classification:
    """Classify a linear field by ``det(J) = |a|^2 - |b|^2``.

    Fields with ``||a| - |b|| <= 1e-9 (|a| + |b|)`` are parabolic.
    """
    det = float(abs(a) ** 2 - abs(b) ** 2)
    if abs(abs(a) - abs(b)) <= PARABOLIC_TOLERANCE * (abs(a) + abs(b)):
        return Classification(kind=FieldClass.PARABOLIC, det=det)
    kind = FieldClass.ELLIPTIC if det > 0.0 else FieldClass.HYPERBOLIC
    return Classification(kind=kind, det=det)


def jacobian(a: complex, b: complex) -> npt.NDArray[np.float64]:
    """Return real 2x2 Jacobian of ``a z + b conj(z)``."""
    plus, minus = a + b, a - b
    return np.array([[plus.real, -minus.imag], [plus.imag, minus.real]])


def locate_singularity(a: complex, b: complex, c: complex) -> SingularLocus:
    """Solve ``a s + b conj(s) + c = 0``."""
    scale = abs(a) + abs(b)
    if scale <= ZERO_TOLERANCE * max(1.0, abs(c)):
        if abs(c) <= ZERO_TOLERANCE:
            return SingularLocus(kind=SingularLocusKind.PLANE, point=None, direction=None)
        return SingularLocus(kind=SingularLocusKind.NONE, point=None, direction=None)
    matrix = jacobian(a, b)
    rhs = -np.array([c.real, c.imag])
    if classify(a, b)["kind"] is not FieldClass.PARABOLIC:
        x, y = np.linalg.solve(matrix, rhs)
        return SingularLocus(kind=SingularLocusKind.POINT, point=complex(x, y), direction=None)
    (x, y), *_ = np.linalg.lstsq(matrix, rhs, rcond=None)
    if np.linalg.norm(matrix @ np.array([x, y]) - rhs) > PARABOLIC_TOLERANCE * max(scale, abs(c)):
        return SingularLocus(kind=SingularLocusKind.NONE, point=None, direction=None)
    _, _, vh = np.linalg.svd(matrix)
    return SingularLocus(
        kind=SingularLocusKind.LINE,
        point=complex(x, y),
        direction=complex(vh[-1, 0], vh[-1, 1]),
    )


def pointwise_phase_gradient(
    a: complex,
    b: complex,
    c: complex,
    z: complex,
) -> npt.NDArray[np.float64]:
    """Return gradient of ``arg(a z + b conj(z) + c)`` in the face frame.

    Raises:
        AtSingularityError: Field vanishes at ``z``.
    """
    u = a * z + b * np.conj(z) + c
    magnitude = abs(u) ** 2
    if magnitude <= ZERO_TOLERANCE**2:
        msg = f"Field vanishes at {z}"
        raise AtSingularityError(msg)
    return np.array([((a + b) * np.conj(u)).imag, ((a - b) * np.conj(u)).real]) / magnitude


class PowerLinearField:
    """Root corner values, per face exponents and the symmetry order ``N``."""

    def __init__(
        self,
        mesh: SurfaceMesh,
        root_values: npt.ArrayLike,
        exponents: npt.ArrayLike | None = None,
        n: int = 1,
    ) -> None:
        """Initialize field.

        Raises:
            ValueError: Shapes do not match the mesh or parameters are out of range.
        """
        values = np.asarray(root_values, dtype=np.complex128).reshape(-1, 3)
        if values.shape[0] != mesh.n_faces:
            msg = f"Expected {mesh.n_faces} faces of corner values, got {values.shape[0]}"
            raise ValueError(msg)
        powers = (
            np.ones(mesh.n_faces, dtype=np.int64)
            if exponents is None
            else np.asarray(exponents, dtype=np.int64)
        )
        if powers.shape != (mesh.n_faces,) or np.any(powers < 1):
            msg = "Exponents must be one integer >= 1 per face"
            raise ValueError(msg)
        if n < 1:
            msg = f"N must be >= 1, got {n}"
            raise ValueError(msg)
        self._mesh = mesh
        self._root_values = values
        self._exponents = powers
        self._n = int(n)
        self._coefficients: tuple[npt.NDArray[np.complex128], ...] | None = None
        self._basis: LocalBasis | None = None

    @classmethod
    def from_corner_values(
        cls,
        mesh: SurfaceMesh,
        power_values: npt.NDArray[np.complex128],
        theta: npt.NDArray[np.float64],
        exponents: npt.NDArray[np.int64],
        n: int = 1,
    ) -> PowerLinearField:
        """Take exponent roots of integrated power corner values.

        Corner phases inside a face are unwrapped along its split edges so
        the root of a face with exponent ``p`` uses ``theta / p``.
        """
        values = np.asarray(power_values, dtype=np.complex128).reshape(-1, 3)
        split = np.asarray(theta[: 3 * mesh.n_faces]).reshape(-1, 3)
        phases = np.empty(values.shape)
        phases[:, 0] = np.angle(values[:, 0])
        for corner in (1, 2):
            guess = phases[:, corner - 1] + split[:, corner - 1]
            offset = np.angle(values[:, corner] * np.exp(-1j * guess))
            phases[:, corner] = guess + offset
        powers = np.asarray(exponents, dtype=np.float64)[:, None]
        roots = np.abs(values) ** (1.0 / powers) * np.exp(1j * phases / powers)
        return cls(mesh, roots, exponents, n)

    @property
    def mesh(self) -> SurfaceMesh:
        """Returns carrier mesh."""
        return self._mesh

    @property
    def root_values(self) -> npt.NDArray[np.complex128]:
        """Returns root corner values, shape (F, 3)."""
        return self._root_values

    @property
    def exponents(self) -> npt.NDArray[np.int64]:
        """Returns exponent per face."""
        return self._exponents

    @property
    def n(self) -> int:
        """Returns symmetry order."""
        return self._n

    @property
    def coefficients(self) -> tuple[npt.NDArray[np.complex128], ...]:
        """Returns ``(a, b, c)`` arrays of the root fields."""
        if self._coefficients is None:
            self._coefficients = face_coefficients(self._root_values, self._mesh.corner_coords)
        return self._coefficients

    def face_coefficients(self, face: int) -> tuple[complex, complex, complex]:
        """Return ``(a, b, c)`` of one face."""
        a, b, c = self.coefficients
        return complex(a[face]), complex(b[face]), complex(c[face])

    def root(self, face: int, bary: npt.ArrayLike) -> complex:
        """Return root field at a barycentric point."""
        return complex(np.dot(np.asarray(bary, dtype=np.float64), self._root_values[face]))

    def power(self, face: int, bary: npt.ArrayLike) -> complex:
        """Return power field at a barycentric point."""
        return self.root(face, bary) ** int(self._exponents[face])

    def evaluate(
        self,
        face: int,
        bary: npt.ArrayLike,
        branch: int = 0,
        normalize: bool = False,
    ) -> complex:
        """Return one direction of the field at a barycentric point.

        Branch 0 is the principal ``N``-th root with argument in
        ``(-pi/N, pi/N]``; branch ``k`` multiplies it by ``exp(2 pi i k / N)``.

        Raises:
            ValueError: Branch out of range.
            ZeroAtFractionalPowerError: Fractional power taken at a zero.
        """
        if not 0 <= branch < self._n:
            msg = f"Branch must be in [0, {self._n}), got {branch}"
            raise ValueError(msg)
        value = self.power(face, bary)
        if self._n > 1:
            if abs(value) == 0.0 and self._exponents[face] % self._n:
                msg = f"Fractional power of a zero in face {face}"
                raise ZeroAtFractionalPowerError(msg, face=face)
            value = abs(value) ** (1.0 / self._n) * np.exp(
                1j * (np.angle(value) + 2.0 * np.pi * branch) / self._n,
            )
        if normalize and value != 0:
            value = value / abs(value)
        return complex(value)

    def branches(self, face: int, bary: npt.ArrayLike, normalize: bool = False) -> list[complex]:
        """Return all ``N`` directions at a barycentric point."""
        return [self.evaluate(face, bary, branch, normalize) for branch in range(self._n)]

    def sample(self, face: int, bary: npt.ArrayLike) -> FieldSample:
        """Return branch values with log-scale and phase of the principal branch."""
        values = self.branches(face, bary)
        principal = values[0]
        return FieldSample(
            face=int(face),
            bary=[float(value) for value in bary],
            values=values,
            log_scale=float(np.log(abs(principal))) if principal != 0 else float("-inf"),
            phase=float(np.angle(principal)),
        )

    def classify(self, face: int) -> Classification:
        """Return class of the root field of a face."""
        a, b, _ = self.face_coefficients(face)
        return classify(a, b)

    def singular_locus(self, face: int) -> SingularLocus:
        """Return zero set of the root field of a face, in face coordinates."""
        return locate_singularity(*self.face_coefficients(face))

    def phase_gradient(self, face: int, z: complex) -> npt.NDArray[np.float64]:
        """Return gradient of the power field phase at a face point."""
        a, b, c = self.face_coefficients(face)
        return int(self._exponents[face]) * pointwise_phase_gradient(a, b, c, z)

    def rotated(self, angle: float, faces: npt.ArrayLike | None = None) -> PowerLinearField:
        """Return field whose power values are turned by ``angle`` on ``faces``."""
        roots = self._root_values.copy()
        selected = np.arange(self._mesh.n_faces) if faces is None else np.asarray(faces)
        roots[selected] *= np.exp(1j * angle / self._exponents[selected])[:, None]
        return PowerLinearField(self._mesh, roots, self._exponents, self._n)

    def to_world(self, face: int, value: complex) -> npt.NDArray[np.float64]:
        """Return 3D vector of a face frame value."""
        if self._basis is None:
            self._basis = local_basis(self._mesh)
        return value.real * self._basis["e1"][face] + value.imag * self._basis["e2"][face]

    def world_point(self, face: int, bary: npt.ArrayLike) -> npt.NDArray[np.float64]:
        """Return 3D position of a barycentric point."""
        corners = self._mesh.positions[self._mesh.faces[face]]
        return np.asarray(bary, dtype=np.float64) @ corners
