"""Artifact writers: CSV/JSON with deterministic bytes.

Floats are written with 17 significant digits (round-trip exact for IEEE
doubles), JSON keys are sorted, and nothing embeds a timestamp, so a rerun
with the same resolved config produces byte-identical files.
"""

from __future__ import annotations

import csv
import json
import os

ARTIFACT_VERSION = "0.1.0"


def format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, (int, str)):
        return str(value)
    if hasattr(value, "item"):  # numpy scalar
        return format_value(value.item())
    return str(value)


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(v) for v in row])


def json_clean(obj):
    """Make numpy containers JSON-serializable."""
    if hasattr(obj, "item") and not hasattr(obj, "__len__"):
        return obj.item()
    if hasattr(obj, "tolist"):
        return obj.tolist()
    if isinstance(obj, dict):
        return {str(k): json_clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [json_clean(v) for v in obj]
    return obj


def write_json(path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(json_clean(obj), fh, sort_keys=True, indent=2)
        fh.write("\n")


def write_manifest(out_dir, config, complete: bool, extra: dict = None) -> None:
    payload = {
        "artifact_version": ARTIFACT_VERSION,
        "config": config.to_dict(),
        "complete": complete,
    }
    if extra:
        payload.update(extra)
    write_json(os.path.join(out_dir, "manifest.json"), payload)
