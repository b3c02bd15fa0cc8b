"""Ring-spec documents (JSON) and presets.

Schema::

    {"field": {"p": 2}, "type": "truncated_polynomial", "exponent": 2}

    {"field": {"p": 2}, "type": "structure_constants", "dim": 3,
     "basis_labels": ["1", "x", "y"],
     "mult_table": [[0, 0, 0, 1], [0, 1, 1, 1], ...],   # (u, v, w, c): e_u e_v += c e_w
     "unit": [1, 0, 0],
     "maxideal_basis": [[0, 1, 0], [0, 0, 1]]}

Presets: ``trunc:E`` (``k[x]/(x^E)``), ``sq0:M`` (``k[x_1..x_M]`` modulo all
quadratic monomials) and ``field``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from homcert.algebra import (
    FiniteDimAlgebra,
    algebra_from_structure_constants,
    truncated_polynomial_algebra,
)
from homcert.errors import ParseError
from homcert.linalg import PrimeField, is_prime

TYPES = ("truncated_polynomial", "structure_constants")


def _require(doc: dict, key: str, where: str):
    if key not in doc:
        raise ParseError(f"missing field '{key}'", where or "<root>")
    return doc[key]


def _int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"expected an integer, got {value!r}", where)
    return value


def _int_list(value, where: str, length: int | None = None) -> list[int]:
    if not isinstance(value, list):
        raise ParseError(f"expected a list, got {type(value).__name__}", where)
    out = [_int(v, f"{where}[{k}]") for k, v in enumerate(value)]
    if length is not None and len(out) != length:
        raise ParseError(f"expected {length} entries, got {len(out)}", where)
    return out


def validate_ring_spec(doc: Any) -> dict:
    """Check shape and types; return a normalised copy. Raises ``ParseError`` with the field path."""
    if not isinstance(doc, dict):
        raise ParseError("ring spec must be an object", "<root>")
    fld = _require(doc, "field", "")
    if not isinstance(fld, dict):
        raise ParseError("expected an object", "field")
    p = _int(_require(fld, "p", "field"), "field.p")
    if not is_prime(p):
        raise ParseError(f"{p} is not prime", "field.p")
    kind = _require(doc, "type", "")
    if kind not in TYPES:
        raise ParseError(f"unknown type {kind!r}; expected one of {', '.join(TYPES)}", "type")
    out: dict = {"field": {"p": p}, "type": kind}
    if "name" in doc:
        out["name"] = str(doc["name"])
    if kind == "truncated_polynomial":
        e = _int(_require(doc, "exponent", ""), "exponent")
        if e < 2:
            raise ParseError(f"exponent must be at least 2, got {e}", "exponent")
        out["exponent"] = e
        return out
    dim = _int(_require(doc, "dim", ""), "dim")
    if dim < 1:
        raise ParseError("dim must be positive", "dim")
    labels = _require(doc, "basis_labels", "")
    if not isinstance(labels, list) or len(labels) != dim or not all(isinstance(s, str) for s in labels):
        raise ParseError(f"expected {dim} string labels", "basis_labels")
    table = _require(doc, "mult_table", "")
    if not isinstance(table, list):
        raise ParseError("expected a list of (u, v, w, c) triples", "mult_table")
    triples = []
    for k, t in enumerate(table):
        u, v, w, c = _int_list(t, f"mult_table[{k}]", 4)
        for name, x in zip("uvw", (u, v, w)):
            if not 0 <= x < dim:
                raise ParseError(f"index {name}={x} outside 0..{dim - 1}", f"mult_table[{k}]")
        triples.append([u, v, w, c % p])
    unit = _int_list(_require(doc, "unit", ""), "unit", dim)
    mib = _require(doc, "maxideal_basis", "")
    if not isinstance(mib, list):
        raise ParseError("expected a list of vectors", "maxideal_basis")
    rows = [_int_list(r, f"maxideal_basis[{k}]", dim) for k, r in enumerate(mib)]
    out.update(dim=dim, basis_labels=list(labels), mult_table=triples, unit=[x % p for x in unit],
               maxideal_basis=[[x % p for x in r] for r in rows])
    return out


def parse_ring_spec(document: str | bytes | dict) -> dict:
    """Parse JSON text (or an already-decoded object) into a validated spec."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, f"line {exc.lineno}, column {exc.colno}") from exc
    return validate_ring_spec(document)


def algebra_from_spec(spec: str | bytes | dict) -> FiniteDimAlgebra:
    """Build and verify the algebra; invariant failures surface as ``ValidationError`` subclasses."""
    spec = parse_ring_spec(spec)
    field = PrimeField(spec["field"]["p"])
    if spec["type"] == "truncated_polynomial":
        return truncated_polynomial_algebra(field, spec["exponent"])
    return algebra_from_structure_constants(
        field,
        spec["basis_labels"],
        spec["mult_table"],
        spec["unit"],
        spec["maxideal_basis"],
        name=spec.get("name"),
    )


def square_zero_spec(p: int, m: int) -> dict:
    """``k[x_1..x_m]`` modulo every product ``x_i x_j`` (dimension ``m + 1``)."""
    dim = m + 1
    labels = ["1"] + (["x", "y"][:m] if m <= 2 else [f"x{i}" for i in range(1, m + 1)])
    table = [[0, v, v, 1] for v in range(dim)] + [[u, 0, u, 1] for u in range(1, dim)]
    return {
        "field": {"p": p},
        "type": "structure_constants",
        "name": f"F_{p}[{','.join(labels[1:])}]/(deg 2)",
        "dim": dim,
        "basis_labels": labels,
        "mult_table": table,
        "unit": [1] + [0] * m,
        "maxideal_basis": [[1 if k == u else 0 for k in range(dim)] for u in range(1, dim)],
    }


def preset_spec(name: str, p: int) -> dict:
    """Expand ``trunc:E``, ``sq0:M`` or ``field`` into a spec document."""
    kind, _, arg = name.partition(":")
    if kind == "trunc":
        try:
            e = int(arg)
        except ValueError:
            raise ParseError(f"bad exponent {arg!r}", "ring") from None
        return {"field": {"p": p}, "type": "truncated_polynomial", "exponent": e}
    if kind == "sq0":
        try:
            m = int(arg)
        except ValueError:
            raise ParseError(f"bad variable count {arg!r}", "ring") from None
        if m < 1:
            raise ParseError("need at least one variable", "ring")
        return square_zero_spec(p, m)
    if kind == "field":
        return {"field": {"p": p}, "type": "structure_constants", "name": f"F_{p}", "dim": 1,
                "basis_labels": ["1"], "mult_table": [[0, 0, 0, 1]], "unit": [1], "maxideal_basis": []}
    raise ParseError(f"unknown preset {name!r} (use trunc:E, sq0:M, field or a JSON file)", "ring")


def load_ring(ref: str, p: int) -> tuple[FiniteDimAlgebra, dict]:
    """Resolve a ``--ring`` argument: a preset name or a path to a JSON document."""
    path = Path(ref)
    if path.suffix == ".json" or path.exists():
        try:
            text = path.read_text()
        except OSError as exc:
            raise ParseError(str(exc), str(path)) from exc
        spec = parse_ring_spec(text)
    else:
        if not is_prime(p):
            raise ParseError(f"{p} is not prime", "--p")
        spec = validate_ring_spec(preset_spec(ref, p))
    return algebra_from_spec(spec), spec
