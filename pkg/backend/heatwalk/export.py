"""JSON and CSV artifacts, each carrying the manifest of the run that wrote it."""

from __future__ import annotations

import csv
import io
import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np
from pydantic import BaseModel

from . import __version__
from .schemas import RunManifest, TableResult


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    moment = (
        datetime.fromtimestamp(int(epoch), tz=timezone.utc) if epoch else datetime.now(timezone.utc)
    )
    return moment.strftime("%Y-%m-%dT%H:%M:%SZ")


def build_manifest(command: str, arguments: dict[str, Any], seed: int | None = None) -> RunManifest:
    return RunManifest(
        version=__version__,
        command=command,
        arguments=arguments,
        created=_timestamp(),
        seed=seed,
    )


def format_value(value: Any) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (float, np.floating)):
        return "%.17g" % value
    if isinstance(value, (list, tuple, dict)):
        return json.dumps(value)
    if value is None:
        return ""
    return str(value)


def _payload(result: BaseModel | Sequence[BaseModel]) -> Any:
    if isinstance(result, BaseModel):
        return result.model_dump(mode="json")
    return [item.model_dump(mode="json") for item in result]


def render_json(manifest: RunManifest, result: BaseModel | Sequence[BaseModel]) -> str:
    document = {"manifest": manifest.model_dump(mode="json"), "result": _payload(result)}
    return json.dumps(document, indent=2, ensure_ascii=False) + "\n"


def _as_table(result: BaseModel | Sequence[BaseModel]) -> tuple[list[str], list[list[Any]]]:
    if isinstance(result, TableResult):
        return result.columns, result.rows
    items = [result] if isinstance(result, BaseModel) else list(result)
    if not items:
        return [], []
    columns = list(items[0].model_dump(mode="json"))
    rows = [[item.model_dump(mode="json")[c] for c in columns] for item in items]
    return columns, rows


def render_csv(manifest: RunManifest, result: BaseModel | Sequence[BaseModel]) -> str:
    columns, rows = _as_table(result)
    buffer = io.StringIO()
    buffer.write("# manifest: " + manifest.model_dump_json() + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buffer.getvalue()


def write_artifact(text: str, output: str | Path | None = None) -> None:
    if output is None:
        sys.stdout.write(text)
        return
    Path(output).write_text(text, encoding="utf-8")


def read_artifact(path: str | Path) -> tuple[dict[str, Any], Any]:
    """Return ``(manifest, result)`` from a JSON artifact, or ``(manifest, rows)`` from a CSV one."""
    text = Path(path).read_text(encoding="utf-8")
    if text.startswith("# manifest: "):
        header, _, body = text.partition("\n")
        manifest = json.loads(header[len("# manifest: ") :])
        return manifest, list(csv.reader(io.StringIO(body)))
    document = json.loads(text)
    return document["manifest"], document["result"]


def write_trace_csv(path: str | Path, values: Iterable[complex]) -> None:
    """Per-sample values of a Monte Carlo run, one row per sample."""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["sample", "real", "imag"])
        for index, value in enumerate(values):
            writer.writerow([index, "%.17g" % value.real, "%.17g" % value.imag])
