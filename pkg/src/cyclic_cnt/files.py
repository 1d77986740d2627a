"""JSON system files and analysis reports.

A system file looks like::

    {"rank": 3,
     "bunches": [{"p00": "1/8", "p01": "3/8", "p10": "3/8", "p11": "1/8"}, ...]}

Values may be ``"a/b"`` strings, exact decimal strings or JSON numbers (read as
decimals, never as binary floats).  Every rational written out is an
``"a/b"`` string, ``"0/1"`` included; atoms are integers whose bit ``k`` is
the value of coupling variable ``k`` (see :mod:`cyclic_cnt.vectorization`).
"""

from __future__ import annotations

import json
from decimal import Decimal
from fractions import Fraction
from typing import Any, Mapping

from .system import BunchDistribution, CyclicSystem, InvalidSystemError, as_fraction

CELLS = ("p00", "p01", "p10", "p11")


class SystemFileError(ValueError):
    """Input rejected; ``path`` locates the offending field (``bunches[2].p01``)."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


def format_rational(x: Fraction | int) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _parse_value(value: Any, path: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (int, str, Decimal)):
        raise SystemFileError(path, f"expected a rational string or number, got {value!r}")
    try:
        return as_fraction(value.strip() if isinstance(value, str) else value)
    except (ValueError, TypeError, ZeroDivisionError, ArithmeticError) as exc:
        raise SystemFileError(path, f"not an exact rational: {value!r} ({exc})") from None


def system_from_data(data: Any) -> CyclicSystem:
    if not isinstance(data, Mapping):
        raise SystemFileError("", "top level must be an object with 'rank' and 'bunches'")
    unknown = sorted(set(data) - {"rank", "bunches"})
    if unknown:
        raise SystemFileError(unknown[0], "unknown field")
    if "rank" not in data:
        raise SystemFileError("rank", "missing")
    rank = data["rank"]
    if isinstance(rank, bool) or not isinstance(rank, int):
        raise SystemFileError("rank", f"expected an integer, got {rank!r}")
    if rank < 2:
        raise SystemFileError("rank", f"must be at least 2, got {rank}")
    bunches = data.get("bunches")
    if not isinstance(bunches, list):
        raise SystemFileError("bunches", "expected a list of bunch objects")
    if len(bunches) != rank:
        raise SystemFileError("bunches", f"expected {rank} bunches, got {len(bunches)}")
    parsed = []
    for i, bunch in enumerate(bunches):
        where = f"bunches[{i}]"
        if not isinstance(bunch, Mapping):
            raise SystemFileError(where, "expected an object with p00, p01, p10, p11")
        extra = sorted(set(bunch) - set(CELLS))
        if extra:
            raise SystemFileError(f"{where}.{extra[0]}", "unknown field")
        cells = []
        for key in CELLS:
            if key not in bunch:
                raise SystemFileError(f"{where}.{key}", "missing")
            cells.append(_parse_value(bunch[key], f"{where}.{key}"))
        try:
            parsed.append(BunchDistribution(*cells))
        except InvalidSystemError as exc:
            raise SystemFileError(where, str(exc)) from None
    return CyclicSystem(rank, tuple(parsed))


def loads_system(text: str) -> CyclicSystem:
    try:
        data = json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise SystemFileError(f"line {exc.lineno}, column {exc.colno}", exc.msg) from None
    return system_from_data(data)


def system_to_data(system: CyclicSystem) -> dict[str, Any]:
    return {
        "rank": system.rank,
        "bunches": [
            dict(zip(CELLS, (format_rational(p) for p in b.as_tuple()))) for b in system.bunches
        ],
    }


def dumps_system(system: CyclicSystem) -> str:
    return json.dumps(system_to_data(system), indent=2) + "\n"


def measure_to_data(weights: Mapping[int, Fraction]) -> list[dict[str, Any]]:
    return [{"atom": v, "weight": format_rational(w)} for v, w in sorted(weights.items()) if w]


def measure_from_data(items: list[Mapping[str, Any]]) -> dict[int, Fraction]:
    return {int(item["atom"]): Fraction(item["weight"]) for item in items}
