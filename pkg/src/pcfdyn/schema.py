"""The JSON envelope written by the command line, and its parser.

Every run prints one object::

    {"schema": "pcfdyn.cli/1", "subcommand": ..., "result": {...} | "error": {...},
     "manifest": {"subcommand", "input_digest", "options", "artifact_version",
                  "outcome", "exit_code"}}

Rationals are strings; numeric complex values are [re, im] string pairs;
infinity is the string "inf".
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass
from typing import Any

SCHEMA_VERSION = "pcfdyn.cli/1"
OUTCOMES = {"accepted": 0, "negative": 2, "error": 1}

__all__ = ["SCHEMA_VERSION", "RunManifest", "input_digest", "envelope", "parse_output", "SchemaError"]


class SchemaError(ValueError):
    """A document does not follow the command-line output schema."""


def input_digest(inputs: dict) -> str:
    canon = json.dumps(inputs, sort_keys=True, separators=(",", ":"), ensure_ascii=True)
    return "sha256:" + hashlib.sha256(canon.encode()).hexdigest()


@dataclass(frozen=True)
class RunManifest:
    subcommand: str
    input_digest: str
    options: dict
    artifact_version: str
    outcome: str
    exit_code: int

    def __post_init__(self):
        if self.outcome not in OUTCOMES:
            raise SchemaError(f"unknown outcome {self.outcome!r}")
        if OUTCOMES[self.outcome] != self.exit_code:
            raise SchemaError("exit code does not match the outcome")

    def to_json(self) -> dict:
        return asdict(self)


def envelope(subcommand: str, manifest: RunManifest, result: Any = None, error: dict | None = None) -> dict:
    out: dict[str, Any] = {"schema": SCHEMA_VERSION, "subcommand": subcommand}
    if error is not None:
        out["error"] = error
    else:
        out["result"] = result
    out["manifest"] = manifest.to_json()
    return out


def parse_output(text: str | dict) -> dict:
    """Parse and validate one command-line JSON document."""
    doc = json.loads(text) if isinstance(text, str) else text
    if not isinstance(doc, dict):
        raise SchemaError("top level must be an object")
    if doc.get("schema") != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema {doc.get('schema')!r}")
    for key in ("subcommand", "manifest"):
        if key not in doc:
            raise SchemaError(f"missing key {key!r}")
    if ("result" in doc) == ("error" in doc):
        raise SchemaError("exactly one of 'result' and 'error' must be present")
    m = doc["manifest"]
    fields = ("subcommand", "input_digest", "options", "artifact_version", "outcome", "exit_code")
    missing = [f for f in fields if f not in m]
    if missing:
        raise SchemaError(f"manifest lacks {missing}")
    RunManifest(**{f: m[f] for f in fields})
    if m["subcommand"] != doc["subcommand"]:
        raise SchemaError("manifest subcommand differs from the envelope")
    if "error" in doc and m["outcome"] != "error":
        raise SchemaError("error documents must have outcome 'error'")
    if not str(m["input_digest"]).startswith("sha256:"):
        raise SchemaError("input digest must be a sha256 digest")
    return doc
