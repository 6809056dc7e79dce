"""Peewee models."""

from __future__ import annotations

from datetime import datetime, timezone
from pathlib import Path
from typing import TYPE_CHECKING, Any

import orjson
import pandas as pd
from peewee import (
    CharField,
    DateTimeField,
    FloatField,
    Model,
    SqliteDatabase,
    TextField,
)

if TYPE_CHECKING:
    from polarfield.core.config import RunConfig

DATABASE_NAME = "runs.db"
DATABASE = SqliteDatabase(None)


class BaseModel(Model):
    """Base class for Models."""

    class Meta:  # noqa: D106
        database = DATABASE


class RunRecord(BaseModel):
    """One compute or compare invocation."""

    command = CharField()
    mesh = TextField(null=True)
    prescription = TextField(null=True)
    config_digest = CharField(max_length=64)
    config = TextField()
    report = TextField()
    energy = FloatField(null=True)
    wall_time = FloatField()
    created = DateTimeField(default=lambda: datetime.now(tz=timezone.utc))


def create_database(path: Path | str) -> None:
    """Bind the database to ``path`` and create its tables."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    DATABASE.init(path)
    with DATABASE:
        DATABASE.create_tables([RunRecord])


def record_run(
    path: Path | str,
    command: str,
    config: RunConfig,
    report: dict[str, Any],
    wall_time: float,
    energy: float | None = None,
) -> RunRecord:
    """Insert one run into the registry at ``path``."""
    create_database(path)
    with DATABASE, DATABASE.atomic():
        return RunRecord.create(
            command=command,
            mesh=None if config.mesh is None else str(config.mesh),
            prescription=None if config.prescription is None else str(config.prescription),
            config_digest=config.digest(),
            config=config.dump().decode(),
            report=orjson.dumps(
                report,
                option=orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY,
            ).decode(),
            energy=energy,
            wall_time=wall_time,
        )


def list_runs(path: Path | str) -> pd.DataFrame:
    """Return every recorded run, oldest first."""
    create_database(path)
    with DATABASE:
        rows = list(RunRecord.select().order_by(RunRecord.id).dicts())
    return pd.DataFrame(
        rows,
        columns=[
            "id",
            "command",
            "mesh",
            "prescription",
            "config_digest",
            "config",
            "report",
            "energy",
            "wall_time",
            "created",
        ],
    )
