"""JSON file formats.

Exact numbers are written as decimal strings (``"p/q"``, or ``"p"`` when the
denominator is 1) so that files never contain floats.  Keys are sorted and
the layout is fixed, which makes every file byte-stable for equal inputs.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .errors import FileFormatError
from .exact import MaxPmf, ProblemSpec, RationalSequence
from .guess import RecurrenceOperator


def format_rational(x) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text: str) -> Fraction:
    if not isinstance(text, str):
        raise FileFormatError(f"exact value must be a string, got {text!r}")
    num, sep, den = text.partition("/")
    try:
        if sep:
            return Fraction(int(num), int(den))
        return Fraction(int(num))
    except (ValueError, ZeroDivisionError) as exc:
        raise FileFormatError(f"not an exact rational: {text!r}") from exc


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj))


def read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: {exc}") from exc


def _require(obj, *keys):
    if not isinstance(obj, dict):
        raise FileFormatError("expected a JSON object")
    missing = [k for k in keys if k not in obj]
    if missing:
        raise FileFormatError(f"missing keys: {', '.join(missing)}")


def sequence_to_json(seq: RationalSequence) -> dict:
    return {"n": seq.spec.n, "r": seq.spec.r, "values": [format_rational(v) for v in seq.values]}


def sequence_from_json(obj) -> RationalSequence:
    _require(obj, "n", "r", "values")
    try:
        spec = ProblemSpec(int(obj["n"]), int(obj["r"]))
    except (TypeError, ValueError) as exc:
        raise FileFormatError(str(exc)) from exc
    return RationalSequence(spec, [parse_rational(v) for v in obj["values"]])


def pmf_to_json(spec: ProblemSpec, pmf: MaxPmf) -> dict:
    return {
        "n": spec.n,
        "r": spec.r,
        "T": pmf.round,
        "pmf": {str(m): format_rational(p) for m, p in pmf.entries.items()},
    }


def pmf_from_json(obj):
    _require(obj, "n", "r", "T", "pmf")
    spec = ProblemSpec(int(obj["n"]), int(obj["r"]))
    entries = {int(m): parse_rational(p) for m, p in obj["pmf"].items()}
    return spec, MaxPmf(int(obj["T"]), dict(sorted(entries.items())))


def recurrence_to_json(op: RecurrenceOperator, spec: ProblemSpec | None) -> dict:
    return {
        "n": spec.n if spec else None,
        "r": spec.r if spec else None,
        "order": op.order,
        "degree": op.degree,
        "validFrom": op.valid_from,
        "polys": [[str(c) for c in p] for p in op.polys],
        "initial": [format_rational(v) for v in op.initial],
    }


def recurrence_from_json(obj):
    """Returns (spec or None, operator)."""
    _require(obj, "order", "validFrom", "polys", "initial")
    try:
        polys = [[int(c) for c in p] for p in obj["polys"]]
    except (TypeError, ValueError) as exc:
        raise FileFormatError(f"polynomial coefficients must be integer strings: {exc}") from exc
    if len(polys) != int(obj["order"]) + 1:
        raise FileFormatError("order does not match the number of polynomials")
    op = RecurrenceOperator(polys, int(obj["validFrom"]), [parse_rational(v) for v in obj["initial"]])
    spec = None
    if obj.get("n") is not None and obj.get("r") is not None:
        spec = ProblemSpec(int(obj["n"]), int(obj["r"]))
    return spec, op


def load_sequence(path) -> RationalSequence:
    return sequence_from_json(read_json(path))


def load_recurrence(path):
    return recurrence_from_json(read_json(path))
