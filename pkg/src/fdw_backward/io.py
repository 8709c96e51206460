"""JSON/CSV serialisation, schemas and problem files.

Floats are always written with 17 significant digits so that every output
parses back to the identical double.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Any

import jsonschema
import numpy as np

from .spectral_model import SpectralCoeffs, Spectrum, dirichlet_laplacian_1d, user_spectrum

__all__ = [
    "SPECTRUM_SCHEMA",
    "PROBLEM_SCHEMA",
    "OUTPUT_SCHEMAS",
    "ProblemSpec",
    "ProblemSpecError",
    "format_float",
    "dumps",
    "write_csv",
    "spectrum_from_dict",
    "load_problem",
    "problem_from_dict",
    "validate_output",
    "problem_schema_text",
]


class ProblemSpecError(ValueError):
    """A problem file does not match :data:`PROBLEM_SCHEMA`."""


_NUMBER_LIST = {"type": "array", "items": {"type": "number"}}

SPECTRUM_SCHEMA: dict = {
    "oneOf": [
        {
            "type": "object",
            "properties": {
                "kind": {"const": "user_supplied"},
                "eigenvalues": {**_NUMBER_LIST, "minItems": 1, "items": {"type": "number", "exclusiveMinimum": 0}},
                "multiplicities": {"type": "array", "items": {"type": "integer", "minimum": 1}},
            },
            "required": ["eigenvalues"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "kind": {"const": "dirichlet_laplacian_1d"},
                "length": {"type": "number", "exclusiveMinimum": 0},
                "n_modes": {"type": "integer", "minimum": 1},
            },
            "required": ["kind", "length", "n_modes"],
            "additionalProperties": False,
        },
    ]
}

PROBLEM_SCHEMA: dict = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "ProblemSpec",
    "type": "object",
    "properties": {
        "alpha": {"type": "number", "exclusiveMinimum": 1, "exclusiveMaximum": 2},
        "T": {"type": "number", "exclusiveMinimum": 0},
        "t": {"type": "number", "minimum": 0},
        "spectrum": SPECTRUM_SCHEMA,
        "a": _NUMBER_LIST,
        "b": _NUMBER_LIST,
        "aT": _NUMBER_LIST,
        "bT": _NUMBER_LIST,
        "tolerances": {
            "type": "object",
            "properties": {"psi_floor": {"type": "number", "exclusiveMinimum": 0}},
            "additionalProperties": False,
        },
    },
    "required": ["alpha", "spectrum"],
    "additionalProperties": False,
}

_COEFFS = {"type": "array", "items": {"type": "number"}}
_DIAG = {
    "type": "object",
    "properties": {
        "min_abs_psi": {"type": "number", "minimum": 0},
        "argmin_mode": {"type": "integer", "minimum": 1},
        "condition_estimate": {"type": "number", "minimum": 1},
        "refused_modes": {"type": "array", "items": {"type": "integer", "minimum": 1}},
    },
    "required": ["min_abs_psi", "argmin_mode", "nearest_exceptional_T", "condition_estimate", "refused_modes"],
}


def _obj(required: list[str], **props) -> dict:
    return {"type": "object", "properties": props, "required": required}


OUTPUT_SCHEMAS: dict[str, dict] = {
    "ml": _obj(
        ["alpha", "beta", "eta", "value", "abs_error_estimate", "regime"],
        value={"type": "number"},
        regime={"enum": ["series", "contour", "asymptotic"]},
    ),
    "psi-zeros": _obj(
        ["alpha", "search_ceiling", "count", "zeros"],
        count={"type": "integer", "minimum": 1},
        zeros={
            "type": "array",
            "items": _obj(["index", "eta", "bracket", "residual"], eta={"type": "number", "exclusiveMinimum": 0}),
        },
    ),
    "psi-table": _obj(["alpha", "rows"], rows={"type": "array", "items": _obj(["eta", "psi"])}),
    "bound": _obj(
        ["alpha", "kappa1", "kappa2", "kappa3", "nu1", "nu2", "nu3", "eta_bound", "theta_used"],
        eta_bound={"type": "number", "exclusiveMinimum": 0},
    ),
    "lambda-set": _obj(
        ["alpha", "T_max", "upper_bound", "entries"],
        entries={"type": "array", "items": _obj(["T", "n", "k"])},
    ),
    "forward": _obj(["alpha", "t", "u", "du"], u=_COEFFS, du=_COEFFS),
    "backward": {
        "oneOf": [
            _obj(["status", "a", "b", "diagnostics"], status={"const": "ok"}, a=_COEFFS, b=_COEFFS, diagnostics=_DIAG),
            _obj(
                ["status", "modes", "diagnostics"],
                status={"const": "ill_posed"},
                modes={"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
                diagnostics=_DIAG,
            ),
        ]
    },
    "nullmode": _obj(
        ["alpha", "T", "mode", "zero_index", "a0", "b0", "a", "b", "final_u_norm", "final_du_norm"],
        a=_COEFFS,
        b=_COEFFS,
    ),
    "roundtrip": _obj(
        ["alpha", "T", "samples", "ratio_min", "ratio_max", "condition_estimate", "roundtrip_max_rel_error"],
    ),
    "ode": {
        "oneOf": [
            _obj(["direction", "status", "a", "b"], status={"const": "ok"}),
            _obj(["direction", "status", "modes", "diagnostics"], status={"const": "ill_posed"}),
        ]
    },
}


def validate_output(command: str, payload: Any) -> None:
    jsonschema.validate(payload, OUTPUT_SCHEMAS[command])


# -- serialisation ------------------------------------------------------------


def format_float(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialise non-finite value {x!r}")
    return format(x, ".17g")


def _encode(obj: Any, indent: int, level: int) -> str:
    pad = "\n" + " " * (indent * (level + 1))
    end = "\n" + " " * (indent * level)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[" + ",".join(pad + _encode(v, indent, level + 1) for v in obj) + end + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = (pad + json.dumps(str(k)) + ": " + _encode(v, indent, level + 1) for k, v in obj.items())
        return "{" + ",".join(items) + end + "}"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj: Any, indent: int = 1) -> str:
    """JSON text with 17-significant-digit floats and insertion-ordered keys."""
    return _encode(obj, indent, 0)


def write_csv(stream: IO[str], header: list[str], columns: list) -> None:
    cols = [np.asarray(c) for c in columns]
    n = len(cols[0])
    if any(len(c) != n for c in cols):
        raise ValueError("CSV columns differ in length")
    stream.write(",".join(header) + "\n")
    for i in range(n):
        cells = []
        for c in cols:
            v = c[i]
            cells.append(format_float(v) if np.issubdtype(c.dtype, np.floating) else str(v))
        stream.write(",".join(cells) + "\n")


# -- problem files ------------------------------------------------------------


def spectrum_from_dict(d: dict) -> Spectrum:
    try:
        jsonschema.validate(d, SPECTRUM_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ProblemSpecError(f"invalid spectrum: {exc.message}") from exc
    if d.get("kind") == "dirichlet_laplacian_1d":
        return dirichlet_laplacian_1d(float(d["length"]), int(d["n_modes"]))
    return user_spectrum(d["eigenvalues"], d.get("multiplicities"))


@dataclass(frozen=True)
class ProblemSpec:
    """A parsed problem file.

    ``a``/``b`` are initial data (forward) and ``aT``/``bT`` final data
    (backward).  Coefficient lists are flat, mode after mode.
    """

    alpha: float
    spectrum: Spectrum
    T: float | None = None
    t: float | None = None
    a: SpectralCoeffs | None = None
    b: SpectralCoeffs | None = None
    aT: SpectralCoeffs | None = None
    bT: SpectralCoeffs | None = None
    psi_floor: float | None = None

    def require(self, *names: str) -> None:
        missing = [n for n in names if getattr(self, n) is None]
        if missing:
            raise ProblemSpecError(f"problem file lacks {', '.join(missing)}")


def problem_from_dict(d: dict) -> ProblemSpec:
    try:
        jsonschema.validate(d, PROBLEM_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ProblemSpecError(f"invalid problem file: {exc.message}") from exc
    s = spectrum_from_dict(d["spectrum"])

    def coeffs(key):
        if key not in d:
            return None
        if len(d[key]) != s.size:
            raise ProblemSpecError(f"'{key}' has {len(d[key])} entries, spectrum needs {s.size}")
        return SpectralCoeffs.for_spectrum(s, d[key])

    tol = d.get("tolerances", {})
    return ProblemSpec(
        alpha=float(d["alpha"]),
        spectrum=s,
        T=d.get("T"),
        t=d.get("t"),
        a=coeffs("a"),
        b=coeffs("b"),
        aT=coeffs("aT"),
        bT=coeffs("bT"),
        psi_floor=tol.get("psi_floor"),
    )


def load_problem(path: str | Path) -> ProblemSpec:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return problem_from_dict(data)


def problem_schema_text() -> str:
    return json.dumps(copy.deepcopy(PROBLEM_SCHEMA), indent=2)
