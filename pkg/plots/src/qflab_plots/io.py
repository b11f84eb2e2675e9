"""Strict loading of qflab artifact files.

Figures must fail loudly if the experiment formats drift, so every loader
checks the exact columns/keys it needs and raises ArtifactError naming the
offending file and field.
"""

from __future__ import annotations

import csv
import json
import os


class ArtifactError(Exception):
    """A required artifact is missing or does not match its schema."""


def _path(directory: str, name: str) -> str:
    path = os.path.join(directory, name)
    if not os.path.isfile(path):
        raise ArtifactError(f"missing artifact file: {path}")
    return path


def load_csv(directory: str, name: str, columns) -> dict:
    """Columns of floats keyed by header name; every requested column must exist."""
    path = _path(directory, name)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for column in columns:
            if column not in header:
                raise ArtifactError(
                    f"{path}: missing column {column!r} (found {header})"
                )
        out = {column: [] for column in columns}
        for row_number, row in enumerate(reader, start=2):
            for column in columns:
                value = row[column]
                try:
                    out[column].append(float(value))
                except (TypeError, ValueError):
                    raise ArtifactError(
                        f"{path}: row {row_number}, column {column!r}: "
                        f"not a number: {value!r}"
                    ) from None
    if not out[columns[0]]:
        raise ArtifactError(f"{path}: no data rows")
    return out


def load_json(directory: str, name: str, keys) -> dict:
    path = _path(directory, name)
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ArtifactError(f"{path}: invalid JSON: {exc}") from None
    for key in keys:
        if key not in data:
            raise ArtifactError(f"{path}: missing key {key!r}")
    return data
