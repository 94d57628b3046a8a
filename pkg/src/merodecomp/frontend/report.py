"""Deterministic text and JSON rendering of command results.

JSON schema (all rationals are strings ``"p/q"`` or ``"p"``)::

    {"command": str, "input_sha256": str, "status": str, "exit_code": int,
     ...command specific fields...,
     "timing": {"seconds": float}}          # only with include_timing

Command specific fields use the names of the library results, e.g.
``lambdas``, ``G``, ``equations``, ``unknowns`` for ``decompose``.
Timing is kept out of the default rendering so output is byte-identical
across runs.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction

from ..algebra import Poly, format_poly, format_rational
from ..forms import OneForm, TwoForm
from .parser import ProblemFile


@dataclass
class Report:
    command: str
    input_digest: str
    status: str
    exit_code: int = 0
    data: dict = field(default_factory=dict)
    timing: float | None = None


def digest(text: bytes | str) -> str:
    if isinstance(text, str):
        text = text.encode("utf-8")
    return hashlib.sha256(text).hexdigest()


def rational(c) -> str:
    return format_rational(Fraction(c))


def poly_text(p: Poly, names) -> str:
    return format_poly(p, list(names))


def one_form_text(w: OneForm, names) -> str:
    pieces = [f"({poly_text(c, names)}) d{n}" for c, n in zip(w.coeffs, names) if not c.is_zero()]
    return " + ".join(pieces) if pieces else "0"


def two_form_text(w: TwoForm, names) -> str:
    pieces = []
    for (j, k), c in sorted(w.coeffs.items()):
        if not c.is_zero():
            pieces.append(f"({poly_text(c, names)}) d{names[j]}^d{names[k]}")
    return " + ".join(pieces) if pieces else "0"


def complex_text(z: complex) -> str:
    return f"{z.real:.15g}{z.imag:+.15g}i"


def _text_lines(key: str, value, out: list[str]) -> None:
    if key == "lambdas" and isinstance(value, list):
        for i, v in enumerate(value, start=1):
            out.append(f"lambda[{i}] = {v}")
    elif isinstance(value, dict):
        for k, v in value.items():
            _text_lines(f"{key}.{k}", v, out)
    elif isinstance(value, list) and value and isinstance(value[0], dict):
        for i, v in enumerate(value, start=1):
            _text_lines(f"{key}[{i}]", v, out)
    elif isinstance(value, list):
        out.append(f"{key} = [{', '.join(str(v) for v in value)}]")
    elif isinstance(value, bool):
        out.append(f"{key} = {'true' if value else 'false'}")
    elif value is None:
        out.append(f"{key} = none")
    else:
        out.append(f"{key} = {value}")


def render_report(r: Report, fmt: str = "text", include_timing: bool = False) -> str:
    if fmt == "json":
        payload = {"command": r.command, "input_sha256": r.input_digest, "status": r.status,
                   "exit_code": r.exit_code}
        payload.update(r.data)
        if include_timing and r.timing is not None:
            payload["timing"] = {"seconds": round(r.timing, 6)}
        return json.dumps(payload, indent=2, sort_keys=False) + "\n"
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    lines = [f"command: {r.command}", f"input: sha256:{r.input_digest}", f"status: {r.status}"]
    for key, value in r.data.items():
        _text_lines(key, value, lines)
    if include_timing and r.timing is not None:
        lines.append(f"time = {r.timing:.3f}s")
    return "\n".join(lines) + "\n"


def render_problem(p: ProblemFile) -> str:
    """Problem file text that parses back to ``p``."""
    names = list(p.vars)
    lines = [f"vars: {' '.join(names)}", f"eta: {one_form_text(p.eta, names) if not p.eta.is_zero() else '(0) d' + names[0]}"]
    lines.append("poles: " + ", ".join(f"({poly_text(f, names)})^{m}" for f, m in p.poles))
    for pt in p.points:
        lines.append("point: (" + " ".join(f"{z.real!r},{z.imag!r}" for z in pt) + ")")
    if p.expected is not None:
        parts = []
        if p.expected.lambdas is not None:
            parts.append("lambdas = " + ", ".join(rational(v) for v in p.expected.lambdas))
        if p.expected.G is not None:
            parts.append("G = " + poly_text(p.expected.G, names))
        lines.append("expected: " + "; ".join(parts))
    return "\n".join(lines) + "\n"
