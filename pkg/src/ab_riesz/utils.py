"""Utility functions for flattening and saving result records."""

import csv
import dataclasses
import json
import logging
import sys
from collections.abc import Mapping, Sequence
from pathlib import Path

import numpy as np


logger = logging.getLogger(__name__)

Scalar = str | int | float | bool
Record = dict[str, Scalar]


def _scalar(value: object) -> Scalar:
    """Convert one field to a value a delimited record can hold.

    >>> _scalar((0.5, 1.25))
    '0.5;1.25'
    >>> _scalar(1 + 2j)
    '(1+2j)'
    """
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, bool | int | float | str):
        return value
    if isinstance(value, complex):
        return str(value)
    if isinstance(value, Sequence | np.ndarray):
        return ";".join(str(_scalar(item)) for item in value)
    return str(value)


def to_record(item: object) -> Record:
    """Flatten a dataclass instance or a mapping into a single-level record.

    Nested mappings are prefixed with their field name, as in `details.low_regime`.

    Args:
        item (object): Dataclass instance or mapping.

    Returns:
        Record: Field names mapped to scalars.

    Raises:
        TypeError: If item is neither a dataclass instance nor a mapping.
    """
    if dataclasses.is_dataclass(item) and not isinstance(item, type):
        fields = {field.name: getattr(item, field.name) for field in dataclasses.fields(item)}
    elif isinstance(item, Mapping):
        fields = dict(item)
    else:
        error_message = f"Cannot build a record from {type(item).__name__}"
        raise TypeError(error_message)
    record: Record = {}
    for name, value in fields.items():
        if isinstance(value, Mapping):
            for key, inner in value.items():
                record[f"{name}.{key}"] = _scalar(inner)
        else:
            record[str(name)] = _scalar(value)
    return record


def write_records(rows: Sequence[Record], file_path: Path | None = None) -> None:
    """Write records as comma-delimited rows with a header line.

    The header is the union of the record keys in first-seen order.

    Args:
        rows (Sequence[Record]): Records to write.
        file_path (Path | None): Destination; standard output when None.
    """
    header: list[str] = []
    for row in rows:
        header.extend(key for key in row if key not in header)
    if file_path is None:
        writer = csv.DictWriter(sys.stdout, fieldnames=header, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        return
    try:
        with Path.open(file_path, "w", encoding="utf-8", newline="") as file:
            writer = csv.DictWriter(file, fieldnames=header, lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
    except OSError:
        logger.exception("Failed to write records to %s", file_path)
        raise
    logger.info("Wrote %d records to %s", len(rows), file_path)


def read_records(file_path: Path) -> list[dict[str, str]]:
    """Read records written by `write_records`.

    Args:
        file_path (Path): Source file.

    Returns:
        list[dict[str, str]]: One mapping per row, values as text.
    """
    with Path.open(file_path, encoding="utf-8", newline="") as file:
        return list(csv.DictReader(file))


def _json_default(value: object) -> object:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, complex):
        return {"real": value.real, "imag": value.imag}
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return to_record(value)
    error_message = f"Object of type {type(value).__name__} is not JSON serializable"
    raise TypeError(error_message)


def save_summary(summary: Mapping[str, object], file_path: Path) -> None:
    """Save a run summary to a JSON file.

    Args:
        summary (Mapping[str, object]): Summary fields; complex numbers are stored as
            {"real", "imag"} objects.
        file_path (Path): Path where the JSON summary will be saved.
    """
    try:
        with Path.open(file_path, "w", encoding="utf-8") as file:
            json.dump(summary, file, ensure_ascii=False, indent=4, default=_json_default)
    except OSError:
        logger.exception("Failed to write the summary to %s", file_path)
        raise
    logger.info("Summary saved to %s", file_path)
