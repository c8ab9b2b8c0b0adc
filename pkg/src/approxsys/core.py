"""Exact rationals, precision schedules, pairing, and stage-function enumerators.

Everything downstream runs on three primitives defined here: arbitrary
precision rationals (``fractions.Fraction``, aliased ``Rat``), computable
sequences of positive rational radii with 0 as an accumulation point
(``PrecisionSchedule``), and recursively enumerable sets represented as
deterministic stage functions (``REnum``).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterator, Optional, Sequence

Rat = Fraction

__all__ = [
    "Rat",
    "parse_rat",
    "format_rat",
    "PrecisionSchedule",
    "DYADIC",
    "HARMONIC",
    "custom_schedule",
    "find_m_below",
    "find_m_strictly_below",
    "pair",
    "unpair",
    "tuple_encode",
    "tuple_decode",
    "zigzag",
    "unzigzag",
    "REnum",
    "renum_from_list",
    "renum_from_dict",
    "renum_empty",
    "renum_naturals",
    "renum_map",
    "renum_filter",
    "dovetail_union",
    "dovetail_product",
    "member_by_stage",
    "ApproxSysError",
    "RatSyntaxError",
    "ScheduleError",
    "StepCapExceeded",
]


class ApproxSysError(Exception):
    """Base class for errors raised by this package."""


class RatSyntaxError(ApproxSysError, ValueError):
    """Text does not match the canonical rational grammar."""


class ScheduleError(ApproxSysError, ValueError):
    """A precision schedule produced a non-positive radius."""


class StepCapExceeded(ApproxSysError, RuntimeError):
    """A bounded search ran out of budget.

    Raised instead of diverging when an unbounded mu-search is driven by an
    input that violates its precondition; carries enough context to tell the
    caller which search gave up.
    """

    def __init__(self, what: str, cap: int):
        super().__init__(f"{what}: step cap {cap} exhausted")
        self.what = what
        self.cap = cap


# ---------------------------------------------------------------------------
# Canonical rational text form
# ---------------------------------------------------------------------------

_RAT_RE = re.compile(r"^(-?(?:0|[1-9]\d*))(?:/([1-9]\d*))?$")


def parse_rat(text: str) -> Rat:
    """Parse the canonical rational form: optional sign, numerator, optional
    ``/denominator``. Values are normalized to lowest terms."""
    m = _RAT_RE.match(text.strip())
    if m is None:
        raise RatSyntaxError(f"not a rational literal: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) else 1
    return Fraction(num, den)


def format_rat(q: Rat) -> str:
    """Canonical text of a rational (lowest terms, positive denominator)."""
    return str(q)


# ---------------------------------------------------------------------------
# Precision schedules
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PrecisionSchedule:
    """A computable sequence r_0, r_1, ... of positive rationals.

    The sequence must have 0 as an accumulation point; the built-in kinds
    guarantee it, custom schedules are probed at construction and re-checked
    on every evaluation.
    """

    kind: str
    _fn: Optional[Callable[[int], Rat]] = None

    def r(self, t: int) -> Rat:
        if t < 0:
            raise ValueError("schedule index must be a natural number")
        if self.kind == "custom":
            assert self._fn is not None
            value = Fraction(self._fn(t))
            if value <= 0:
                raise ScheduleError(
                    f"custom schedule produced r_{t} = {value} <= 0")
            return value
        cached = _RADIUS_CACHE.get((self.kind, t))
        if cached is None:
            if self.kind == "dyadic":
                cached = Fraction(1, 2 ** t)
            elif self.kind == "harmonic":
                cached = Fraction(1, t + 1)
            else:
                raise ScheduleError(f"unknown schedule kind {self.kind!r}")
            _RADIUS_CACHE[(self.kind, t)] = cached
        return cached


_RADIUS_CACHE: dict[tuple[str, int], Rat] = {}


DYADIC = PrecisionSchedule("dyadic")
HARMONIC = PrecisionSchedule("harmonic")

_CUSTOM_PROBE = 16


def custom_schedule(fn: Callable[[int], Rat]) -> PrecisionSchedule:
    """Wrap an arbitrary radius function; positivity is probed eagerly on a
    prefix so obviously bad schedules fail at construction time."""
    sch = PrecisionSchedule("custom", fn)
    for t in range(_CUSTOM_PROBE):
        sch.r(t)
    return sch


def find_m_below(sch: PrecisionSchedule, q: Rat) -> int:
    """Least m with r_m <= q. Terminates because 0 is an accumulation point."""
    if q <= 0:
        raise ValueError("bound must be positive")
    m = 0
    while sch.r(m) > q:
        m += 1
    return m


def find_m_strictly_below(sch: PrecisionSchedule, q: Rat) -> int:
    """Least m with r_m < q (strict variant, used for inclusion margins)."""
    if q <= 0:
        raise ValueError("bound must be positive")
    m = 0
    while sch.r(m) >= q:
        m += 1
    return m


# ---------------------------------------------------------------------------
# Cantor pairing and tuple codes
# ---------------------------------------------------------------------------

def pair(s: int, t: int) -> int:
    """Cantor pairing (s+t)(s+t+1)/2 + t, a bijection N x N -> N."""
    if s < 0 or t < 0:
        raise ValueError("pair is defined on naturals")
    w = s + t
    return w * (w + 1) // 2 + t


def unpair(n: int) -> tuple[int, int]:
    """Exact inverse of :func:`pair`."""
    if n < 0:
        raise ValueError("unpair is defined on naturals")
    w = (math.isqrt(8 * n + 1) - 1) // 2
    t = n - w * (w + 1) // 2
    return w - t, t


def tuple_encode(xs: Sequence[int]) -> int:
    """Right-nested pairing of a non-empty tuple of naturals."""
    if not xs:
        raise ValueError("cannot encode the empty tuple")
    acc = xs[-1]
    for x in reversed(xs[:-1]):
        acc = pair(x, acc)
    return acc


def tuple_decode(n: int, k: int) -> tuple[int, ...]:
    """Inverse of :func:`tuple_encode` for tuples of known length k >= 1."""
    if k < 1:
        raise ValueError("tuple length must be >= 1")
    out = []
    for _ in range(k - 1):
        a, n = unpair(n)
        out.append(a)
    out.append(n)
    return tuple(out)


def zigzag(z: int) -> int:
    """Bijection Z -> N: 0,-1,1,-2,2,... -> 0,1,2,3,4,..."""
    return 2 * z if z >= 0 else -2 * z - 1


def unzigzag(n: int) -> int:
    return n // 2 if n % 2 == 0 else -(n + 1) // 2


# ---------------------------------------------------------------------------
# Recursively enumerable sets as stage functions
# ---------------------------------------------------------------------------

class REnum:
    """A r.e. set given by a total, deterministic stage function.

    ``stage(s)`` yields at most one element per stage (``None`` marks a gap);
    the denoted set is the collection of all emitted elements, repetitions
    permitted. Stage functions are pure, so enumerators are restartable and
    freely shareable; the prefix memo below is only a cache.
    """

    __slots__ = ("_fn", "_memo", "_first_seen", "first_stage", "label")

    def __init__(
        self,
        fn: Callable[[int], Any],
        *,
        first_stage: Optional[Callable[[Any], Optional[int]]] = None,
        label: str = "renum",
    ):
        self._fn = fn
        self._memo: list = []
        self._first_seen: dict = {}
        # Exact shortcut: first_stage(x) is the least stage emitting x, or
        # None when x is never emitted. Only set when a closed form exists.
        self.first_stage = first_stage
        self.label = label

    def stage(self, s: int) -> Any:
        if s < 0:
            raise ValueError("stage index must be a natural number")
        memo = self._memo
        if s < len(memo):
            return memo[s]
        return self._fn(s)

    def force(self, stop: int) -> None:
        """Memoize stages [0, stop), tracking first occurrences."""
        memo = self._memo
        first = self._first_seen
        while len(memo) < stop:
            s = len(memo)
            x = self._fn(s)
            memo.append(x)
            if x is not None and x not in first:
                first[x] = s

    def items(self, stop: int) -> Iterator[tuple[int, Any]]:
        """Iterate emitted (stage, element) pairs with stage < stop."""
        self.force(stop)
        for s in range(stop):
            x = self._memo[s]
            if x is not None:
                yield s, x

    def emitted(self, stop: int) -> list:
        return [x for _, x in self.items(stop)]

    def denoted(self, stop: int) -> set:
        return set(self.emitted(stop))

    def member_by_stage(self, x: Any, s: int) -> bool:
        """True iff some stage s' <= s emits x; monotone in s."""
        if self.first_stage is not None:
            fs = self.first_stage(x)
            return fs is not None and fs <= s
        self.force(s + 1)
        fs = self._first_seen.get(x)
        return fs is not None and fs <= s


def member_by_stage(e: REnum, x: Any, s: int) -> bool:
    return e.member_by_stage(x, s)


def renum_from_list(xs: Sequence[Any], label: str = "list") -> REnum:
    items = list(xs)

    def fn(s: int):
        return items[s] if s < len(items) else None

    firsts: dict = {}
    for i, x in enumerate(items):
        if x is not None and x not in firsts:
            firsts[x] = i
    return REnum(fn, first_stage=firsts.get, label=label)


def renum_from_dict(d: dict[int, Any], label: str = "dict") -> REnum:
    table = dict(d)
    firsts: dict = {}
    for s in sorted(table):
        x = table[s]
        if x is not None and x not in firsts:
            firsts[x] = s
    return REnum(table.get, first_stage=firsts.get, label=label)


def renum_empty() -> REnum:
    return REnum(lambda s: None, first_stage=lambda x: None, label="empty")


def renum_naturals() -> REnum:
    return REnum(lambda s: s, first_stage=lambda x: x if x >= 0 else None,
                 label="naturals")


def renum_map(e: REnum, f: Callable[[Any], Any], label: str = "map") -> REnum:
    def fn(s: int):
        x = e.stage(s)
        return None if x is None else f(x)

    return REnum(fn, label=label)


def renum_filter(e: REnum, pred: Callable[[Any], bool],
                 label: str = "filter") -> REnum:
    def fn(s: int):
        x = e.stage(s)
        if x is None or not pred(x):
            return None
        return x

    return REnum(fn, label=label)


def dovetail_union(a: REnum, b: REnum) -> REnum:
    """Denotes the union of the denoted sets (even stages from a, odd from b)."""

    def fn(s: int):
        return a.stage(s // 2) if s % 2 == 0 else b.stage(s // 2)

    return REnum(fn, label="union")


def dovetail_product(a: REnum, b: REnum) -> REnum:
    """Denotes the Cartesian product, stage order driven by :func:`unpair`."""

    def fn(s: int):
        i, j = unpair(s)
        x = a.stage(i)
        if x is None:
            return None
        y = b.stage(j)
        if y is None:
            return None
        return (x, y)

    return REnum(fn, label="product")
