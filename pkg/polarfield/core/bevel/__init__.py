"""Beveled cell complex and its cycle operators."""

from polarfield.core.bevel.complex import BeveledMesh, build_beveled
from polarfield.core.bevel.operators import build_operators, right_lift

__all__ = ["BeveledMesh", "build_beveled", "build_operators", "right_lift"]
