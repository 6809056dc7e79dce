"""Class to manage run config."""

from __future__ import annotations

import hashlib
import os
from pathlib import Path
from typing import TYPE_CHECKING, Any

import orjson

if TYPE_CHECKING:
    import argparse

THREADS_ENV = "POLARFIELD_THREADS"


class RunConfig:
    """Manage the parameters of one cli invocation."""

    def __init__(  # noqa: PLR0913
        self,
        mesh: Path | str | None = None,
        prescription: Path | str | None = None,
        out: Path | str = "out",
        align: Path | str | None = None,
        field: Path | str | None = None,
        lambda_j: float = 50.0,
        lambda_s: float = 50.0,
        eps: float = 1e-6,
        n: int | None = None,
        samples: int = 0,
        trace_seeds: int = 0,
        trace_step: float = 0.2,
        trace_steps: int = 500,
        unit: bool = False,
        dump_operators: bool = False,
    ) -> None:
        """Initialize and validate every parameter."""
        self._mesh = Path(mesh) if mesh is not None else None
        self._prescription = Path(prescription) if prescription is not None else None
        self._out = Path(out)
        self._align = Path(align) if align is not None else None
        self._field = Path(field) if field is not None else None
        self._lambda_j = 0.0
        self._lambda_s = 0.0
        self._eps = 0.0
        self._n: int | None = None
        self._samples = 0
        self._trace_seeds = 0
        self._trace_step = 0.0
        self._trace_steps = 0
        self._unit = bool(unit)
        self._dump_operators = bool(dump_operators)
        self._threads = os.environ.get(THREADS_ENV)

        self.lambda_j = lambda_j
        self.lambda_s = lambda_s
        self.eps = eps
        self.n = n
        self.samples = samples
        self.trace_seeds = trace_seeds
        self.trace_step = trace_step
        self.trace_steps = trace_steps

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> RunConfig:
        """Build config from parsed cli flags."""
        return cls(
            mesh=getattr(args, "mesh", None),
            prescription=getattr(args, "prescription", None),
            out=getattr(args, "out", "out"),
            align=getattr(args, "align", None),
            field=getattr(args, "field", None),
            lambda_j=getattr(args, "lambda_j", 50.0),
            lambda_s=getattr(args, "lambda_s", 50.0),
            eps=getattr(args, "eps", 1e-6),
            n=getattr(args, "n", None),
            samples=getattr(args, "samples", 0),
            trace_seeds=getattr(args, "trace_seeds", 0),
            trace_step=getattr(args, "trace_step", 0.2),
            trace_steps=getattr(args, "trace_steps", 500),
            unit=getattr(args, "unit", False),
            dump_operators=getattr(args, "dump_operators", False),
        )

    @property
    def mesh(self) -> Path | None:
        """Returns mesh path."""
        return self._mesh

    @property
    def prescription(self) -> Path | None:
        """Returns prescription path."""
        return self._prescription

    @property
    def out(self) -> Path:
        """Returns output directory."""
        return self._out

    @property
    def align(self) -> Path | None:
        """Returns alignment curve path."""
        return self._align

    @property
    def field(self) -> Path:
        """Returns field export path, ``<out>/field.json`` when unset."""
        return self._field if self._field is not None else self._out.joinpath("field.json")

    @property
    def lambda_j(self) -> float:
        """Returns jump weight."""
        return self._lambda_j

    @lambda_j.setter
    def lambda_j(self, new_value: float) -> None:
        """Set jump weight."""
        if not new_value >= 1.0:
            msg = f"lambda_j must be >= 1, got {new_value}"
            raise ValueError(msg)
        self._lambda_j = float(new_value)

    @property
    def lambda_s(self) -> float:
        """Returns isotropy weight."""
        return self._lambda_s

    @lambda_s.setter
    def lambda_s(self, new_value: float) -> None:
        """Set isotropy weight."""
        if not new_value >= 0.0:
            msg = f"lambda_s must be >= 0, got {new_value}"
            raise ValueError(msg)
        self._lambda_s = float(new_value)

    @property
    def eps(self) -> float:
        """Returns lower bound on scales."""
        return self._eps

    @eps.setter
    def eps(self, new_value: float) -> None:
        """Set lower bound on scales."""
        if not new_value > 0.0:
            msg = f"eps must be > 0, got {new_value}"
            raise ValueError(msg)
        self._eps = float(new_value)

    @property
    def n(self) -> int | None:
        """Returns symmetry order override, None to use the prescription."""
        return self._n

    @n.setter
    def n(self, new_value: int | None) -> None:
        """Set symmetry order override."""
        if new_value is not None and new_value < 1:
            msg = f"N must be >= 1, got {new_value}"
            raise ValueError(msg)
        self._n = None if new_value is None else int(new_value)

    @property
    def samples(self) -> int:
        """Returns sample grid density per face."""
        return self._samples

    @samples.setter
    def samples(self, new_value: int) -> None:
        """Set sample grid density."""
        if new_value < 0:
            msg = f"samples must be >= 0, got {new_value}"
            raise ValueError(msg)
        self._samples = int(new_value)

    @property
    def trace_seeds(self) -> int:
        """Returns number of streamline seeds."""
        return self._trace_seeds

    @trace_seeds.setter
    def trace_seeds(self, new_value: int) -> None:
        """Set number of streamline seeds."""
        if new_value < 0:
            msg = f"trace seeds must be >= 0, got {new_value}"
            raise ValueError(msg)
        self._trace_seeds = int(new_value)

    @property
    def trace_step(self) -> float:
        """Returns streamline step as a fraction of the mean edge length."""
        return self._trace_step

    @trace_step.setter
    def trace_step(self, new_value: float) -> None:
        """Set streamline step."""
        if not new_value > 0.0:
            msg = f"trace step must be > 0, got {new_value}"
            raise ValueError(msg)
        self._trace_step = float(new_value)

    @property
    def trace_steps(self) -> int:
        """Returns step cap per streamline."""
        return self._trace_steps

    @trace_steps.setter
    def trace_steps(self, new_value: int) -> None:
        """Set step cap per streamline."""
        if new_value < 1:
            msg = f"trace steps must be >= 1, got {new_value}"
            raise ValueError(msg)
        self._trace_steps = int(new_value)

    @property
    def unit(self) -> bool:
        """Returns whether exported samples are normalized."""
        return self._unit

    @property
    def dump_operators(self) -> bool:
        """Returns whether operator matrices are written."""
        return self._dump_operators

    @property
    def threads(self) -> str | None:
        """Returns thread count pinned through the environment."""
        return self._threads

    def to_dict(self) -> dict[str, Any]:
        """Return JSON ready dictionary."""

        def as_str(path: Path | None) -> str | None:
            return None if path is None else str(path)

        return {
            "mesh": as_str(self._mesh),
            "prescription": as_str(self._prescription),
            "out": str(self._out),
            "align": as_str(self._align),
            "field": as_str(self._field),
            "lambda_j": self._lambda_j,
            "lambda_s": self._lambda_s,
            "eps": self._eps,
            "n": self._n,
            "samples": self._samples,
            "trace_seeds": self._trace_seeds,
            "trace_step": self._trace_step,
            "trace_steps": self._trace_steps,
            "unit": self._unit,
            "dump_operators": self._dump_operators,
            "threads": self._threads,
        }

    def dump(self) -> bytes:
        """Return canonical JSON."""
        return orjson.dumps(self.to_dict(), option=orjson.OPT_SORT_KEYS)

    def digest(self) -> str:
        """Return sha256 of the canonical JSON."""
        return hashlib.sha256(self.dump()).hexdigest()

    def __repr__(self) -> str:
        """Return short description."""
        return f"RunConfig(mesh={self._mesh}, prescription={self._prescription}, out={self._out})"
