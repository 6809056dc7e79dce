"""Flap integral operators, mass matrices and Laplacians."""

from polarfield.core.discretize.flaps import build_D, build_L, build_Q, flap_mass
from polarfield.core.discretize.singular import build_DS_MS, build_index_laplacian
from polarfield.core.discretize.types import FlapOperator, MassMatrices

__all__ = [
    "FlapOperator",
    "MassMatrices",
    "build_D",
    "build_DS_MS",
    "build_L",
    "build_Q",
    "build_index_laplacian",
    "flap_mass",
]
