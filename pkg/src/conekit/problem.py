"""Problem-file loading shared by every CLI subcommand.

One JSON schema covers all subcommands::

    {
      "dim": 2,
      "matrices": {"0": [[5, 0], [0, 1]], "1": [[1, 0], [0, 3]]},
      "automaton": {"states": [...], "alphabet": [...], "transitions": [[i, s, j], ...]},
      "cones": {"q0": {"generators": [[1, 1], [1, -1]]}, "q1": {"facets": [...]}},
      "config": {"gamma": 0.9, "tol": 1e-9},
      "initial": {"x0": [1, 0.5], "y0": [1, -0.5], "start": "q0"}
    }

Numbers may also be given as decimal strings.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import jsonschema
import numpy as np

from .automaton import Automaton, validate
from .cone import DEFAULT_TOL, PolyhedralCone
from .errors import ConeKitError
from .verify import SwitchedSystem

_NUMBER = {
    "oneOf": [
        {"type": "number"},
        {"type": "string", "pattern": r"^\s*[-+]?(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?\s*$"},
    ]
}
_VECTOR = {"type": "array", "items": _NUMBER, "minItems": 1}
_ROWS = {"type": "array", "items": _VECTOR, "minItems": 1}
_ID = {"type": ["string", "integer"]}

SCHEMA = {
    "type": "object",
    "required": ["matrices"],
    "properties": {
        "dim": {"type": "integer", "minimum": 1},
        "matrices": {"type": "object", "minProperties": 1, "additionalProperties": _ROWS},
        "automaton": {
            "type": "object",
            "required": ["states", "alphabet", "transitions"],
            "properties": {
                "states": {"type": "array", "items": _ID},
                "alphabet": {"type": "array", "items": _ID},
                "transitions": {
                    "type": "array",
                    "items": {"type": "array", "items": _ID, "minItems": 3, "maxItems": 3},
                },
            },
        },
        "cones": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "properties": {"generators": _ROWS, "facets": _ROWS},
                "anyOf": [{"required": ["generators"]}, {"required": ["facets"]}],
            },
        },
        "config": {"type": "object"},
        "initial": {
            "type": "object",
            "properties": {"x0": _VECTOR, "y0": _VECTOR, "start": _ID},
        },
    },
}


class ProblemError(ConeKitError, ValueError):
    """Schema or cross-reference error in a problem file."""


@dataclass
class Problem:
    system: SwitchedSystem
    automaton: Optional[Automaton] = None
    cones: Optional[dict] = None
    config: dict = field(default_factory=dict)
    initial: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.system.dim


def _vec(v) -> np.ndarray:
    return np.array([float(x) for x in v])


def _mat(rows) -> np.ndarray:
    return np.array([[float(x) for x in row] for row in rows])


def parse_problem(data: dict, tol: float = DEFAULT_TOL) -> Problem:
    try:
        jsonschema.validate(data, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ProblemError(f"schema error at {where}: {exc.message}") from exc
    try:
        system = SwitchedSystem({k: _mat(v) for k, v in data["matrices"].items()})
        dim = data.get("dim", system.dim)
        if dim != system.dim:
            raise ProblemError(f"dim={dim} but matrices are {system.dim}x{system.dim}")
        automaton = validate(data["automaton"]) if "automaton" in data else None
        if automaton is not None:
            unknown = [s for s in automaton.alphabet if s not in system.matrices]
            if unknown:
                raise ProblemError(f"automaton symbols without matrices: {unknown}")
        cones = None
        if "cones" in data:
            cones = {str(q): PolyhedralCone.from_dict(c, tol=tol) for q, c in data["cones"].items()}
            bad = [q for q, K in cones.items() if K.dim != dim]
            if bad:
                raise ProblemError(f"cones of wrong dimension: {bad}")
            if automaton is not None:
                stray = [q for q in cones if q not in automaton.states]
                if stray:
                    raise ProblemError(f"cones for undeclared states: {stray}")
        initial = dict(data.get("initial", {}))
        for key in ("x0", "y0"):
            if key in initial:
                initial[key] = _vec(initial[key])
                if initial[key].shape[0] != dim:
                    raise ProblemError(f"initial.{key} has the wrong length")
        if "start" in initial:
            initial["start"] = str(initial["start"])
    except ProblemError:
        raise
    except (ConeKitError, ValueError) as exc:
        raise ProblemError(str(exc)) from exc
    return Problem(system, automaton, cones, dict(data.get("config", {})), initial)


def load_problem(path, tol: float = DEFAULT_TOL) -> Problem:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ProblemError(f"cannot read problem file {path}: {exc}") from exc
    return parse_problem(data, tol)
