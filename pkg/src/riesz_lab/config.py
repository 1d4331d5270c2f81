"""Experiment configuration: JSON schema, defaults and normalization."""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass
from typing import Any, Dict

import jsonschema

from .errors import InvalidArgument

SCHEMA_VERSION = 1

TASKS = ("spectrum", "riesz", "weyl", "polya", "bly", "excess", "critical", "margin", "optimize", "multicomp", "scan")

_RANGE = {
    "type": "object",
    "properties": {
        "min": {"type": "number", "exclusiveMinimum": 0},
        "max": {"type": "number", "exclusiveMinimum": 0},
        "points": {"type": "integer", "minimum": 1},
        "spacing": {"enum": ["log", "linear"]},
    },
    "required": ["min", "max", "points"],
    "additionalProperties": False,
}

_GAMMA_RANGE = copy.deepcopy(_RANGE)
_GAMMA_RANGE["properties"]["min"] = {"type": "number", "minimum": 0}
_GAMMA_RANGE["properties"]["max"] = {"type": "number", "minimum": 0}

SCHEMA: Dict[str, Any] = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "riesz-lab experiment",
    "type": "object",
    "properties": {
        "task": {"enum": list(TASKS)},
        "domain": {"type": "string"},
        "family": {"type": "string"},
        "candidates": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "base_lambda": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 1},
        "bc": {"enum": ["dirichlet", "neumann"]},
        "gamma": {"type": "number", "minimum": 0},
        "gamma_grid": {
            "oneOf": [
                {"type": "array", "items": {"type": "number", "minimum": 0}, "minItems": 1},
                _GAMMA_RANGE,
            ]
        },
        "lambda": {
            "oneOf": [
                {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 1},
                _RANGE,
            ]
        },
        "grid": {"type": "integer", "minimum": 1},
        "tol": {"type": "number", "exclusiveMinimum": 0},
        "alpha": {"type": "number", "exclusiveMinimum": 0},
        "out": {"type": "string"},
        "budget": {"type": "integer", "minimum": 1},
        "threads": {"type": "integer", "minimum": 1},
    },
    "required": ["task"],
    "additionalProperties": False,
}

# keys each task needs beyond "task"
REQUIRED = {
    "spectrum": ("domain", "lambda"),
    "riesz": ("domain", "lambda"),
    "weyl": ("domain", "lambda"),
    "polya": ("domain", "lambda"),
    "bly": ("domain", "lambda"),
    "excess": ("family", "lambda"),
    "critical": ("family", "lambda"),
    "margin": ("family", "lambda"),
    "optimize": ("family", "lambda"),
    "multicomp": ("candidates", "base_lambda", "lambda"),
    "scan": ("family", "lambda"),
}

DEFAULTS = {"bc": "dirichlet", "grid": 64, "tol": 1e-4}

# keys that change how a run executes but not what it computes
RUNTIME_KEYS = ("out", "threads")

_ORDER = tuple(SCHEMA["properties"])


@dataclass(frozen=True)
class ExperimentConfig:
    """A validated, default-filled experiment description (wraps a plain dict)."""

    data: Dict[str, Any]

    @classmethod
    def from_dict(cls, raw) -> "ExperimentConfig":
        return cls(normalize(raw))

    def to_dict(self) -> Dict[str, Any]:
        return copy.deepcopy(self.data)

    def __getitem__(self, key):
        return self.data[key]

    def get(self, key, default=None):
        return self.data.get(key, default)

    @property
    def task(self) -> str:
        return self.data["task"]

    def digest(self) -> str:
        """sha256 of the canonical JSON of the non-runtime keys."""
        body = {k: v for k, v in self.data.items() if k not in RUNTIME_KEYS}
        return hashlib.sha256(json.dumps(body, sort_keys=True, separators=(",", ":")).encode()).hexdigest()


def _errors(raw):
    validator = jsonschema.Draft7Validator(SCHEMA)
    msgs = []
    for err in sorted(validator.iter_errors(raw), key=lambda e: list(map(str, e.path))):
        where = "/".join(str(p) for p in err.path) or "<root>"
        msgs.append(f"{where}: {err.message}")
    return msgs


def validate(raw):
    if not isinstance(raw, dict):
        raise InvalidArgument("config must be a JSON object")
    msgs = _errors(raw)
    if msgs:
        raise InvalidArgument("invalid config; " + "; ".join(msgs))
    task = raw["task"]
    missing = [k for k in REQUIRED[task] if k not in raw]
    if missing:
        raise InvalidArgument(f"task {task!r} needs keys: {', '.join(missing)}")
    if task == "critical" and "gamma_grid" not in raw:
        raise InvalidArgument("task 'critical' needs keys: gamma_grid")


def _number(x):
    # JSON integers and floats compare equal; keep floats for round trips
    return float(x)


def normalize(raw) -> Dict[str, Any]:
    """Validate, check descriptors, fill defaults and return a new dict in schema key order."""
    from .families import parse_family
    from .geometry import parse_domain

    validate(raw)
    cfg = copy.deepcopy(raw)
    for key, value in DEFAULTS.items():
        cfg.setdefault(key, value)
    if "gamma" not in cfg and cfg["task"] not in ("spectrum", "polya", "critical"):
        cfg["gamma"] = 1.0
    for key in ("gamma", "tol", "alpha"):
        if key in cfg:
            cfg[key] = _number(cfg[key])
    for key in ("lambda", "gamma_grid"):
        if key in cfg:
            v = cfg[key]
            if isinstance(v, list):
                cfg[key] = [_number(x) for x in v]
            else:
                v.setdefault("spacing", "log" if key == "lambda" else "linear")
                v["min"], v["max"] = _number(v["min"]), _number(v["max"])
                if v["min"] > v["max"]:
                    raise InvalidArgument(f"{key}: min {v['min']!r} exceeds max {v['max']!r}")
    if "base_lambda" in cfg:
        cfg["base_lambda"] = [_number(x) for x in cfg["base_lambda"]]
    if "domain" in cfg:
        parse_domain(cfg["domain"])
    if "family" in cfg:
        parse_family(cfg["family"])
    for c in cfg.get("candidates", ()):
        parse_domain(c)
    return {k: cfg[k] for k in _ORDER if k in cfg}


def load(path) -> Dict[str, Any]:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InvalidArgument(f"cannot read config {path!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InvalidArgument(f"config {path!r} is not valid JSON: {exc}") from None


def schema_json() -> str:
    return json.dumps(SCHEMA, indent=2) + "\n"
