"""JSON file formats for codes, angle systems, colorings and traces.

Floats are written with ``repr`` (shortest round-trip form), keys in a fixed
order and two-space indentation, so ``dumps(loads(text)) == text`` for any
canonical file.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

import numpy as np

from .bounds import LogValue
from .combinatorics import EdgeColoring
from .decomposition import Case, CaseRecord, DecompositionTrace
from .errors import DomainError, SchemaError
from .geometry import DEFAULT_CONFIG, AngleSystem, Code, ProjectionConfig, check_gram

TRACE_FORMAT = "spherecode-trace/1"


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _parse(text: str, source: str = "<input>"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{source}: line {exc.lineno} col {exc.colno}: {exc.msg}") from exc


_BARE_KEY = re.compile(r'([{,]\s*)([A-Za-z_][A-Za-z0-9_]*)\s*:')


def parse_inline(text: str):
    """JSON, also accepting unquoted keys such as ``{beta:0.25, angles:[]}``."""
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return _parse(_BARE_KEY.sub(r'\1"\2":', text), "<inline>")


def _number(value, field):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"expected a number, got {value!r}", field)
    return float(value)


def _matrix(rows, field):
    if not isinstance(rows, list) or any(not isinstance(r, list) for r in rows):
        raise SchemaError("expected a list of lists", field)
    return [[_number(v, f"{field}[{i}][{j}]") for j, v in enumerate(r)]
            for i, r in enumerate(rows)]


def _check_keys(data, allowed, required, where):
    if not isinstance(data, dict):
        raise SchemaError("expected a JSON object", where)
    extra = set(data) - set(allowed)
    if extra:
        raise SchemaError(f"unknown fields {sorted(extra)}", where)
    for key in required:
        if key not in data:
            raise SchemaError("missing required field", f"{where}.{key}")


# -- codes ----------------------------------------------------------------


def code_to_dict(code: Code, name=None, source=None) -> dict:
    out = {"dim": code.dim, "vectors": code.vectors.tolist()}
    meta = {k: v for k, v in (("name", name), ("source", source)) if v is not None}
    if meta:
        out["metadata"] = meta
    return out


def code_from_dict(data, cfg: ProjectionConfig = DEFAULT_CONFIG):
    """A ``Code`` (from ``vectors``) or a Gram matrix array (from ``gram``)."""
    _check_keys(data, ("dim", "vectors", "gram", "metadata"), ("dim",), "code")
    dim = data["dim"]
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise SchemaError("must be a positive integer", "code.dim")
    has_v, has_g = "vectors" in data, "gram" in data
    if has_v == has_g:
        raise SchemaError("exactly one of 'vectors' and 'gram' must be present", "code")
    if has_v:
        rows = _matrix(data["vectors"], "code.vectors")
        for i, r in enumerate(rows):
            if len(r) != dim:
                raise SchemaError(f"expected {dim} entries, got {len(r)}",
                                  f"code.vectors[{i}]")
        code = Code(dim, np.array(rows).reshape(len(rows), dim))
        code.check_unit(cfg)
        return code
    rows = _matrix(data["gram"], "code.gram")
    if any(len(r) != len(rows) for r in rows):
        raise SchemaError("Gram matrix must be square", "code.gram")
    return check_gram(np.array(rows).reshape(len(rows), len(rows)), cfg)


def load_code(path, cfg: ProjectionConfig = DEFAULT_CONFIG):
    text = Path(path).read_text()
    return code_from_dict(_parse(text, str(path)), cfg)


def dumps_code(code: Code, name=None, source=None) -> str:
    return _dump(code_to_dict(code, name, source))


def save_code(code: Code, path, name=None, source=None) -> None:
    Path(path).write_text(dumps_code(code, name, source))


def canonical_code_text(text: str) -> str:
    """Re-serialize a code file; fixed point on canonical input."""
    data = _parse(text)
    code = code_from_dict(data)
    if isinstance(code, np.ndarray):
        return _dump({"dim": data["dim"], "gram": code.tolist(),
                      **({"metadata": data["metadata"]} if "metadata" in data else {})})
    meta = data.get("metadata", {})
    return dumps_code(code, meta.get("name"), meta.get("source"))


# -- angle systems --------------------------------------------------------


def angles_to_dict(L: AngleSystem) -> dict:
    return {"beta": L.beta, "angles": list(L.angles)}


def angles_from_dict(data) -> AngleSystem:
    _check_keys(data, ("beta", "angles"), ("beta",), "angles")
    beta = _number(data["beta"], "angles.beta")
    raw = data.get("angles", [])
    if not isinstance(raw, list):
        raise SchemaError("expected a list", "angles.angles")
    values = [_number(v, f"angles.angles[{i}]") for i, v in enumerate(raw)]
    try:
        return AngleSystem(beta, values)
    except DomainError as exc:
        raise SchemaError(str(exc), "angles") from exc


def load_angles(path_or_inline: str) -> AngleSystem:
    """Read an angle file, or parse the argument itself if it looks like JSON."""
    text = path_or_inline.strip()
    if text.startswith("{"):
        return angles_from_dict(parse_inline(text))
    return angles_from_dict(_parse(Path(path_or_inline).read_text(), path_or_inline))


def save_angles(L: AngleSystem, path) -> None:
    Path(path).write_text(_dump(angles_to_dict(L)))


# -- colorings ------------------------------------------------------------


def coloring_from_dict(data) -> EdgeColoring:
    _check_keys(data, ("n", "colors"), ("colors",), "coloring")
    rows = data["colors"]
    if not isinstance(rows, list) or any(not isinstance(r, list) for r in rows):
        raise SchemaError("expected a list of lists", "coloring.colors")
    for i, r in enumerate(rows):
        if len(r) != len(rows):
            raise SchemaError("matrix must be square", f"coloring.colors[{i}]")
        for j, v in enumerate(r):
            if isinstance(v, bool) or not isinstance(v, int):
                raise SchemaError("colors must be integers", f"coloring.colors[{i}][{j}]")
    if "n" in data and data["n"] != len(rows):
        raise SchemaError(f"n = {data['n']} but matrix has {len(rows)} rows", "coloring.n")
    try:
        return EdgeColoring(np.array(rows, dtype=int).reshape(len(rows), len(rows)))
    except DomainError as exc:
        raise SchemaError(str(exc), "coloring.colors") from exc


def coloring_to_dict(c: EdgeColoring) -> dict:
    colors = np.array(c.colors)
    np.fill_diagonal(colors, 0)
    return {"n": c.n, "colors": colors.tolist()}


def load_coloring(path) -> EdgeColoring:
    return coloring_from_dict(_parse(Path(path).read_text(), str(path)))


# -- traces ---------------------------------------------------------------


def _bound_dict(value: int) -> dict:
    return {"value": value, "log2": LogValue.of(value).log2 if value > 0 else None}


def _params_to_json(params: dict) -> dict:
    out = {}
    for key, value in params.items():
        if isinstance(value, AngleSystem):
            value = angles_to_dict(value)
        elif isinstance(value, np.generic):
            value = value.item()
        elif isinstance(value, Case):
            value = value.value
        out[key] = value
    return out


def _params_from_json(params: dict) -> dict:
    out = dict(params)
    if "projected" in out:
        out["projected"] = angles_from_dict(out["projected"])
    return out


def record_to_dict(rec: CaseRecord) -> dict:
    return {
        "case": Case(rec.case).value,
        "angles": angles_to_dict(rec.angles),
        "dim": rec.code.dim,
        "vectors": rec.code.vectors.tolist(),
        "bound": _bound_dict(rec.bound),
        "fk_threshold": None if rec.fk_threshold is None else {"log2": rec.fk_threshold.log2},
        "params": _params_to_json(rec.params),
        "invalid": rec.invalid,
        "children": [record_to_dict(c) for c in rec.children],
    }


def record_from_dict(data, where="root") -> CaseRecord:
    _check_keys(data, ("case", "angles", "dim", "vectors", "bound", "fk_threshold",
                       "params", "invalid", "children"),
                ("case", "angles", "dim", "vectors", "bound"), where)
    try:
        case = Case(data["case"])
    except ValueError as exc:
        raise SchemaError(f"unknown case {data['case']!r}", f"{where}.case") from exc
    dim = data["dim"]
    rows = _matrix(data["vectors"], f"{where}.vectors")
    code = Code(dim, np.array(rows).reshape(len(rows), dim))
    bound = data["bound"]
    if not isinstance(bound, dict) or not isinstance(bound.get("value"), int):
        raise SchemaError("expected {value: int, log2: real}", f"{where}.bound")
    fk = data.get("fk_threshold")
    return CaseRecord(
        case,
        angles_from_dict(data["angles"]),
        code,
        bound["value"],
        _params_from_json(data.get("params", {})),
        [record_from_dict(c, f"{where}.{i}") for i, c in enumerate(data.get("children", []))],
        None if fk is None else LogValue(fk["log2"]),
        data.get("invalid"),
    )


def trace_to_dict(trace: DecompositionTrace) -> dict:
    return {
        "format": TRACE_FORMAT,
        "claimed_bound": _bound_dict(trace.claimed_bound),
        "fk_bound": None if trace.fk_bound is None else {"log2": trace.fk_bound.log2},
        "verified": trace.verified,
        "root": record_to_dict(trace.root),
    }


def trace_from_dict(data) -> DecompositionTrace:
    _check_keys(data, ("format", "claimed_bound", "fk_bound", "verified", "root"),
                ("format", "claimed_bound", "root"), "trace")
    if data["format"] != TRACE_FORMAT:
        raise SchemaError(f"unsupported format {data['format']!r}", "trace.format")
    fk = data.get("fk_bound")
    return DecompositionTrace(
        record_from_dict(data["root"]),
        data["claimed_bound"]["value"],
        None if fk is None else LogValue(fk["log2"]),
        data.get("verified"),
    )


def dumps_trace(trace: DecompositionTrace) -> str:
    return _dump(trace_to_dict(trace))


def save_trace(trace: DecompositionTrace, path) -> None:
    Path(path).write_text(dumps_trace(trace))


def load_trace(path) -> DecompositionTrace:
    return trace_from_dict(_parse(Path(path).read_text(), str(path)))
