"""Programmatic meshes shared by the tests."""

from __future__ import annotations

import itertools

import numpy as np
import pytest
from scipy.spatial import ConvexHull

from polarfield.core.mesh.surface import SurfaceMesh
from polarfield.core.prescribe.types import Prescription, Singularity, SingularityKind

GOLDEN = (1.0 + np.sqrt(5.0)) / 2.0


def convex_mesh(points: np.ndarray) -> SurfaceMesh:
    """Hull of points around the origin with outward faces."""
    points = np.asarray(points, dtype=np.float64)
    faces = ConvexHull(points).simplices.copy()
    for face in faces:
        a, b, c = points[face]
        if np.dot(np.cross(b - a, c - a), a + b + c) < 0.0:
            face[[1, 2]] = face[[2, 1]]
    return SurfaceMesh(points, faces)


def tetrahedron_mesh() -> SurfaceMesh:
    return convex_mesh([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]])


def octahedron_mesh() -> SurfaceMesh:
    return convex_mesh(
        [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]],
    )


def icosahedron_points() -> np.ndarray:
    points = []
    for a, b in itertools.product((-1.0, 1.0), repeat=2):
        points += [[0.0, a, b * GOLDEN], [a, b * GOLDEN, 0.0], [b * GOLDEN, 0.0, a]]
    return np.asarray(points)


def icosahedron_mesh() -> SurfaceMesh:
    return convex_mesh(icosahedron_points())


def icosphere_mesh(levels: int = 1) -> SurfaceMesh:
    """Icosahedron with every triangle split in four, projected to the sphere."""
    mesh = icosahedron_mesh()
    points = [point / np.linalg.norm(point) for point in mesh.positions]
    faces = mesh.faces.tolist()
    for _ in range(levels):
        midpoints: dict[tuple[int, int], int] = {}

        def midpoint(a: int, b: int) -> int:
            key = (min(a, b), max(a, b))
            if key not in midpoints:
                middle = points[a] + points[b]
                points.append(middle / np.linalg.norm(middle))
                midpoints[key] = len(points) - 1
            return midpoints[key]

        refined = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            refined += [[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]
        faces = refined
    return SurfaceMesh(np.asarray(points), faces)


def torus_mesh(n_major: int = 12, n_minor: int = 8, major: float = 2.0, minor: float = 0.7):
    points = []
    for i in range(n_major):
        u = 2.0 * np.pi * i / n_major
        for j in range(n_minor):
            v = 2.0 * np.pi * j / n_minor
            radius = major + minor * np.cos(v)
            points.append([radius * np.cos(u), radius * np.sin(u), minor * np.sin(v)])
    faces = []
    for i, j in itertools.product(range(n_major), range(n_minor)):
        a = i * n_minor + j
        b = ((i + 1) % n_major) * n_minor + j
        c = ((i + 1) % n_major) * n_minor + (j + 1) % n_minor
        d = i * n_minor + (j + 1) % n_minor
        faces += [[a, b, c], [a, c, d]]
    return SurfaceMesh(np.asarray(points), faces)


def disk_mesh(n: int = 6, size: float = 1.0) -> SurfaceMesh:
    """Flat square grid, a topological disk."""
    points = [
        [size * i / n, size * j / n, 0.0] for i, j in itertools.product(range(n + 1), repeat=2)
    ]
    faces = []
    for i, j in itertools.product(range(n), repeat=2):
        a = i * (n + 1) + j
        b = (i + 1) * (n + 1) + j
        c = (i + 1) * (n + 1) + j + 1
        d = i * (n + 1) + j + 1
        faces += [[a, b, c], [a, c, d]]
    return SurfaceMesh(np.asarray(points), faces)


def annulus_mesh(n_rings: int = 3, n_around: int = 16) -> SurfaceMesh:
    points = []
    for i in range(n_rings + 1):
        radius = 1.0 + i / n_rings
        for j in range(n_around):
            angle = 2.0 * np.pi * j / n_around
            points.append([radius * np.cos(angle), radius * np.sin(angle), 0.0])
    faces = []
    for i, j in itertools.product(range(n_rings), range(n_around)):
        a = i * n_around + j
        b = (i + 1) * n_around + j
        c = (i + 1) * n_around + (j + 1) % n_around
        d = i * n_around + (j + 1) % n_around
        faces += [[a, b, c], [a, c, d]]
    return SurfaceMesh(np.asarray(points), faces)


def plate_mesh(width: int = 3, height: int = 3, holes: tuple[tuple[int, int], ...] = ()):
    """Boundary of a one voxel thick plate, each removed voxel adds a handle."""
    occupied = {
        (i, j, 0) for i, j in itertools.product(range(width), range(height))
    } - {(i, j, 0) for i, j in holes}
    index: dict[tuple[int, int, int], int] = {}
    faces = []

    def vertex(point: tuple[int, int, int]) -> int:
        return index.setdefault(point, len(index))

    for voxel in sorted(occupied):
        for axis, sign in itertools.product(range(3), (1, -1)):
            neighbour = list(voxel)
            neighbour[axis] += sign
            if tuple(neighbour) in occupied:
                continue
            b, c = (axis + 1) % 3, (axis + 2) % 3
            base = np.array(voxel)
            if sign > 0:
                base[axis] += 1
            step_b = np.eye(3, dtype=int)[b]
            step_c = np.eye(3, dtype=int)[c]
            quad = [base, base + step_b, base + step_b + step_c, base + step_c]
            if sign < 0:
                quad = quad[::-1]
            ids = [vertex(tuple(int(x) for x in corner)) for corner in quad]
            faces += [[ids[0], ids[1], ids[2]], [ids[0], ids[2], ids[3]]]
    points = np.zeros((len(index), 3))
    for point, position in index.items():
        points[position] = point
    return SurfaceMesh(points, faces)


def vertex_singularity(vertex: int, index: int) -> Singularity:
    return Singularity(kind=SingularityKind.VERTEX, element=vertex, index=index)


def two_pole_prescription(mesh: SurfaceMesh, n: int = 1) -> Prescription:
    """Index ``n * chi / 2`` on each of two far apart vertices of a sphere."""
    positions = mesh.positions
    north = int(np.argmax(positions[:, 2]))
    south = int(np.argmin(positions[:, 2]))
    half = n * mesh.euler_characteristic // 2
    return Prescription(
        n=n,
        singularities=[vertex_singularity(north, half), vertex_singularity(south, half)],
    )


@pytest.fixture()
def triangle() -> SurfaceMesh:
    return SurfaceMesh([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], [[0, 1, 2]])


@pytest.fixture()
def tetrahedron() -> SurfaceMesh:
    return tetrahedron_mesh()


@pytest.fixture()
def octahedron() -> SurfaceMesh:
    return octahedron_mesh()


@pytest.fixture()
def icosahedron() -> SurfaceMesh:
    return icosahedron_mesh()


@pytest.fixture()
def icosphere() -> SurfaceMesh:
    return icosphere_mesh(1)


@pytest.fixture()
def torus() -> SurfaceMesh:
    return torus_mesh()


@pytest.fixture()
def disk() -> SurfaceMesh:
    return disk_mesh()


@pytest.fixture()
def annulus() -> SurfaceMesh:
    return annulus_mesh()


@pytest.fixture()
def plate() -> SurfaceMesh:
    return plate_mesh()


@pytest.fixture()
def plate_genus_one() -> SurfaceMesh:
    return plate_mesh(3, 3, holes=((1, 1),))


@pytest.fixture()
def plate_genus_two() -> SurfaceMesh:
    return plate_mesh(5, 3, holes=((1, 1), (3, 1)))
