"""Certificate documents: canonical JSON emit and parse.

A document is ``{"schema": SCHEMA, "kind": <kind>, "body": {...}}`` where
``kind`` is ``stage``, ``theorem``, ``envelope_tensor``, ``remark`` or ``resolution``.
Keys are sorted and the text ends with a newline, so equal certificates give
identical bytes.
"""

from __future__ import annotations

import json

from homcert.counterexample import GlobalCertificate, EnvelopeTensorReport, StageCertificate
from homcert.errors import ParseError

SCHEMA = "homcert-certificate/1"

_KINDS = {
    "stage": StageCertificate,
    "theorem": GlobalCertificate,
    "envelope_tensor": EnvelopeTensorReport,
}


def kind_of(obj) -> str:
    for kind, cls in _KINDS.items():
        if isinstance(obj, cls):
            return kind
    raise TypeError(f"no document kind for {type(obj).__name__}")


def emit(obj, kind: str | None = None) -> str:
    """Serialise a certificate dataclass, or a plain dict with an explicit ``kind``."""
    if kind is None:
        kind = kind_of(obj)
    body = obj if isinstance(obj, dict) else obj.to_dict()
    return json.dumps({"schema": SCHEMA, "kind": kind, "body": body}, sort_keys=True, indent=2) + "\n"


def parse(text: str):
    """Inverse of ``emit``: returns the dataclass (or the dict for untyped kinds)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno}, column {exc.colno}") from exc
    if not isinstance(doc, dict):
        raise ParseError("certificate must be an object", "<root>")
    if doc.get("schema") != SCHEMA:
        raise ParseError(f"unsupported schema {doc.get('schema')!r}", "schema")
    kind = doc.get("kind")
    body = doc.get("body")
    if not isinstance(body, dict):
        raise ParseError("missing body", "body")
    cls = _KINDS.get(kind)
    if cls is None:
        if kind in ("remark", "resolution"):
            return body
        raise ParseError(f"unknown kind {kind!r}", "kind")
    try:
        return cls.from_dict(body)
    except TypeError as exc:
        raise ParseError(str(exc), "body") from exc
