"""File formats: system JSONL (replayable enumerations), finite-instance
JSON, and pair-relation JSONL for finite systems.

A system file starts with one header object recording the flavor, schedule,
and space descriptors; every following line carries one emitted quadruple
together with its stage, so files replay as enumerators with gaps preserved.
"""

from __future__ import annotations

import json
from typing import IO, Iterable, Optional

from .core import (
    DYADIC,
    HARMONIC,
    ApproxSysError,
    PrecisionSchedule,
    REnum,
    renum_from_dict,
)
from .spaces import (
    DiscreteNatSpace,
    FiniteInstance,
    NonnegRationalPairSpace,
    RationalVectorSpace,
    Space,
)
from .systems import ApproxSystem, MetricSystem, TopologicalSystem, UVApproxSystem

__all__ = [
    "FileFormatError",
    "space_from_descriptor",
    "schedule_from_name",
    "write_system_jsonl",
    "read_system_jsonl",
    "instance_to_json",
    "instance_from_json",
    "write_uv_jsonl",
    "read_uv_jsonl",
]

SYSTEM_FORMAT = "approxsys-system"
UV_FORMAT = "approxsys-uv"


class FileFormatError(ApproxSysError, ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


def schedule_from_name(name: str) -> PrecisionSchedule:
    if name == "dyadic":
        return DYADIC
    if name == "harmonic":
        return HARMONIC
    raise FileFormatError(f"unknown schedule {name!r}")


def space_from_descriptor(desc: dict) -> Space:
    kind = desc.get("type")
    if kind == "rational_vector":
        return RationalVectorSpace(int(desc["dim"]), desc.get("metric", "max"))
    if kind == "discrete_nat":
        return DiscreteNatSpace()
    if kind == "nonneg_rational_pair":
        return NonnegRationalPairSpace()
    raise FileFormatError(f"unknown space descriptor {desc!r}")


def write_system_jsonl(system: ApproxSystem, stages: int, out: IO[str]) -> int:
    """Write the first ``stages`` stages; returns the number of data lines."""
    if system.schedule.kind == "custom":
        raise ValueError("custom schedules are not serializable")
    header = {
        "format": SYSTEM_FORMAT,
        "kind": system.kind,
        "schedule": system.schedule.kind,
        "source": system.source.descriptor(),
        "target": system.target.descriptor(),
        "name": system.name,
    }
    out.write(json.dumps(header, sort_keys=True) + "\n")
    count = 0
    for s, (k, m, l, n) in system.enum.items(stages):
        row = {
            "s": s,
            "k": system.source.index_to_json(k),
            "m": m,
            "l": system.target.index_to_json(l),
            "n": n,
        }
        out.write(json.dumps(row, sort_keys=True) + "\n")
        count += 1
    return count


class ReplayedSystem(ApproxSystem):
    """A system replayed from a file; queries scan the full known extent."""

    def __init__(self, kind: str, source, target, schedule, table: dict,
                 name: str):
        self.kind = kind
        enum = renum_from_dict(table, label=f"replay:{name}")
        self._max_stage = max(table) + 1 if table else 0
        super().__init__(source, target, schedule, enum, None, name)

    def search_l(self, k, m, n, budget):
        return super().search_l(k, m, n, max(budget, self._max_stage))

    def member_semi(self, quad, budget):
        return super().member_semi(quad, max(budget, self._max_stage))

    def partners_ln(self, k, m, budget):
        return super().partners_ln(k, m, max(budget, self._max_stage))


def read_system_jsonl(lines: Iterable[str]) -> ReplayedSystem:
    it = iter(enumerate(lines, start=1))
    header = None
    for lineno, raw in it:
        if raw.strip():
            try:
                header = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise FileFormatError(f"bad JSON ({exc.msg})", lineno) from exc
            break
    if header is None or header.get("format") != SYSTEM_FORMAT:
        raise FileFormatError("missing system header line")
    kind = header.get("kind")
    if kind not in ("metric", "topological"):
        raise FileFormatError(f"unknown system kind {kind!r}")
    source = space_from_descriptor(header["source"])
    target = space_from_descriptor(header["target"])
    schedule = schedule_from_name(header["schedule"])
    table: dict[int, tuple] = {}
    for lineno, raw in it:
        if not raw.strip():
            continue
        try:
            row = json.loads(raw)
            quad = (source.index_from_json(row["k"]), int(row["m"]),
                    target.index_from_json(row["l"]), int(row["n"]))
            stage = int(row["s"])
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise FileFormatError(f"bad data line ({exc})", lineno) from exc
        if stage in table:
            raise FileFormatError(f"duplicate stage {stage}", lineno)
        table[stage] = quad
    return ReplayedSystem(kind, source, target, schedule, table,
                          header.get("name", "replay"))


# ---------------------------------------------------------------------------
# Finite instances
# ---------------------------------------------------------------------------

def instance_to_json(inst: FiniteInstance) -> dict:
    return {
        "x_points": list(inst.x_points),
        "y_points": list(inst.y_points),
        "u_tables": [sorted(u) for u in inst.u_tables],
        "v_tables": [sorted(v) for v in inst.v_tables],
        "domain": sorted(inst.domain),
        "f": [[x, inst.f_map[x]] for x in sorted(inst.domain)],
    }


def instance_from_json(data: dict) -> FiniteInstance:
    try:
        return FiniteInstance(
            x_points=tuple(data["x_points"]),
            y_points=tuple(data["y_points"]),
            u_tables=tuple(frozenset(u) for u in data["u_tables"]),
            v_tables=tuple(frozenset(v) for v in data["v_tables"]),
            domain=frozenset(data["domain"]),
            f_map={x: y for x, y in data["f"]},
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise FileFormatError(f"bad instance data: {exc}") from exc


# ---------------------------------------------------------------------------
# Pair relations over finite instances
# ---------------------------------------------------------------------------

def write_uv_jsonl(system: UVApproxSystem, stages: int, out: IO[str]) -> int:
    header = {"format": UV_FORMAT}
    out.write(json.dumps(header, sort_keys=True) + "\n")
    count = 0
    for s, (i, j) in system.pairs.items(stages):
        out.write(json.dumps({"s": s, "i": i, "j": j}, sort_keys=True) + "\n")
        count += 1
    return count


def read_uv_jsonl(lines: Iterable[str]) -> REnum:
    it = iter(enumerate(lines, start=1))
    header = None
    for lineno, raw in it:
        if raw.strip():
            try:
                header = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise FileFormatError(f"bad JSON ({exc.msg})", lineno) from exc
            break
    if header is None or header.get("format") != UV_FORMAT:
        raise FileFormatError("missing pair-relation header line")
    table: dict[int, tuple] = {}
    for lineno, raw in it:
        if not raw.strip():
            continue
        try:
            row = json.loads(raw)
            table[int(row["s"])] = (int(row["i"]), int(row["j"]))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise FileFormatError(f"bad data line ({exc})", lineno) from exc
    return renum_from_dict(table, label="uv-replay")
