"""Streams naming points: fast-converging index names, set-enumeration names,
and the converters between the two representations.

A point name carries an optional witness describing the named point exactly
(a rational, or a refinable interval certificate for irrationals). Witnesses
exist purely so test oracles can check naming contracts with exact
arithmetic; no engine ever reads them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Optional

from .core import (
    DYADIC,
    PrecisionSchedule,
    Rat,
    StepCapExceeded,
    find_m_below,
    pair,
    unpair,
)
from .spaces import RationalVectorSpace, Space, formally_included, point_in_ball

__all__ = [
    "ExactWitness",
    "IntervalWitness",
    "SqrtBisection",
    "AlphaName",
    "SetName",
    "constant_name",
    "sqrt_name",
    "sqrt_sample",
    "pair_names",
    "reschedule",
    "canonical_set_name",
    "gamma_U_alpha",
    "gamma_beta_V",
    "check_name_contract",
]

DEFAULT_STEP_CAP = 20_000_000


@dataclass(frozen=True)
class ExactWitness:
    """The named point itself, given exactly."""

    exact_point: Any

    def box(self, eps: Rat) -> tuple[Any, Any]:
        return (self.exact_point, self.exact_point)


class IntervalWitness:
    """A point known only through arbitrarily tight exact enclosures."""

    exact_point = None

    def __init__(self, refine: Callable[[Rat], tuple[Any, Any]]):
        self._refine = refine

    def box(self, eps: Rat) -> tuple[Any, Any]:
        return self._refine(eps)


class SqrtBisection:
    """Exact bisection state for sqrt(c): maintains lo^2 <= c <= hi^2.

    Refinements are shared and monotone, so one instance can back both a
    name stream and a witness certificate.
    """

    def __init__(self, c: Rat):
        c = Fraction(c)
        if c < 0:
            raise ValueError("radicand must be non-negative")
        self.c = c
        self._lo = Fraction(0)
        self._hi = max(Fraction(1), c)

    def enclose(self, eps: Rat) -> tuple[Rat, Rat]:
        """Shrink until hi - lo < eps; returns the current enclosure."""
        if eps <= 0:
            raise ValueError("eps must be positive")
        c = self.c
        while self._hi - self._lo >= eps:
            mid = (self._lo + self._hi) / 2
            if mid * mid <= c:
                self._lo = mid
            else:
                self._hi = mid
        return self._lo, self._hi

    def approx(self, eps: Rat) -> Rat:
        """A rational within eps of sqrt(c) (midpoint of a tight enclosure)."""
        lo, hi = self.enclose(eps)
        return (lo + hi) / 2


def _rat_sqrt(c: Rat) -> Optional[Rat]:
    """Exact square root when c is a perfect rational square, else None."""
    rn, rd = math.isqrt(c.numerator), math.isqrt(c.denominator)
    if rn * rn == c.numerator and rd * rd == c.denominator:
        return Fraction(rn, rd)
    return None


class AlphaName:
    """A total stream t -> index with d(alpha(u(t)), x) < r_t for the named x."""

    def __init__(self, space: Space, schedule: PrecisionSchedule,
                 fn: Callable[[int], int], witness=None):
        self.space = space
        self.schedule = schedule
        self._fn = fn
        self.witness = witness
        self._memo: dict[int, int] = {}

    def index_at(self, t: int) -> int:
        if t < 0:
            raise ValueError("name positions are naturals")
        got = self._memo.get(t)
        if got is None:
            got = self._fn(t)
            self._memo[t] = got
        return got

    def point_at(self, t: int):
        return self.space.decode(self.index_at(t))


class SetName:
    """A total enumeration i -> natural of the base-set index set of a point."""

    def __init__(self, space: Space, schedule: PrecisionSchedule,
                 fn: Callable[[int], int], witness=None):
        self.space = space
        self.schedule = schedule
        self._fn = fn
        self.witness = witness
        self._memo: dict[int, int] = {}

    def at(self, i: int) -> int:
        if i < 0:
            raise ValueError("name positions are naturals")
        got = self._memo.get(i)
        if got is None:
            got = self._fn(i)
            self._memo[i] = got
        return got


def constant_name(space: Space, point, schedule: PrecisionSchedule = DYADIC) -> AlphaName:
    """The constant stream at the canonical index of an exact point."""
    idx = space.encode_point(point)
    return AlphaName(space, schedule, lambda t: idx,
                     witness=ExactWitness(space.decode(idx)))


def _scalar_space() -> RationalVectorSpace:
    return RationalVectorSpace(1, "max")


def sqrt_name(c: Rat, schedule: PrecisionSchedule = DYADIC,
              space: Optional[RationalVectorSpace] = None) -> AlphaName:
    """A name of sqrt(c) over scalar rationals, by exact interval bisection.

    Each output is the midpoint of an enclosure of width < r_t, so the
    naming contract holds with strict inequality. Perfect squares get an
    exact witness; other radicands carry the bisection as an interval
    certificate.
    """
    if space is None:
        space = _scalar_space()
    if space.dimension != 1:
        raise ValueError("sqrt names live in a scalar space")
    c = Fraction(c)
    bis = SqrtBisection(c)

    def fn(t: int) -> int:
        q = bis.approx(schedule.r(t))
        return space.encode_point((q,))

    root = _rat_sqrt(c)
    if root is not None:
        witness = ExactWitness((root,))
    else:
        witness = IntervalWitness(lambda eps: _boxed(bis.enclose(eps)))
    return AlphaName(space, schedule, fn, witness=witness)


def _boxed(interval: tuple[Rat, Rat]) -> tuple[tuple[Rat], tuple[Rat]]:
    lo, hi = interval
    return (lo,), (hi,)


def sqrt_sample(c: Rat) -> IntervalWitness:
    """Scalar interval certificate for sqrt(c), for probing scalar spaces
    whose points are bare rationals (not 1-tuples)."""
    root = _rat_sqrt(Fraction(c))
    if root is not None:
        return ExactWitness(root)  # type: ignore[return-value]
    bis = SqrtBisection(c)
    return IntervalWitness(bis.enclose)


def pair_names(u1: AlphaName, u2: AlphaName) -> AlphaName:
    """Zip two scalar names into a name over Q^2 with the max metric."""
    for u in (u1, u2):
        if not isinstance(u.space, RationalVectorSpace) or u.space.dimension != 1:
            raise ValueError("pair_names expects scalar names")
    if u1.schedule != u2.schedule:
        raise ValueError("pair_names expects a shared schedule")
    space2 = RationalVectorSpace(2, "max")

    def fn(t: int) -> int:
        (a,) = u1.point_at(t)
        (b,) = u2.point_at(t)
        return space2.encode_point((a, b))

    w = None
    if isinstance(u1.witness, ExactWitness) and isinstance(u2.witness, ExactWitness):
        w = ExactWitness((u1.witness.exact_point[0], u2.witness.exact_point[0]))
    return AlphaName(space2, u1.schedule, fn, witness=w)


def reschedule(u: AlphaName, new_schedule: PrecisionSchedule) -> AlphaName:
    """Re-time a name onto another schedule: u'(t) = u(mu s[r_s <= r'_t])."""

    def fn(t: int) -> int:
        return u.index_at(find_m_below(u.schedule, new_schedule.r(t)))

    return AlphaName(u.space, new_schedule, fn, witness=u.witness)


def canonical_set_name(space: Space, point,
                       schedule: PrecisionSchedule = DYADIC) -> SetName:
    """Deterministic U-name of an exact point: enumerates the pair codes
    pair(k, m) with d(alpha(k), point) < r_m in increasing code order.

    Test-fixture constructor; total because balls of every radius index
    contain the point (e.g. centered at the point itself).
    """
    target = space.decode(space.encode_point(point))
    found: list[int] = []
    state = {"next": 0}

    def accepts(code: int) -> bool:
        k, m = unpair(code)
        if not space.contains_index(k):
            return False
        return space.dist_lt_points(space.decode(k), target, schedule.r(m))

    def fn(i: int) -> int:
        while len(found) <= i:
            code = state["next"]
            state["next"] += 1
            if accepts(code):
                found.append(code)
        return found[i]

    return SetName(space, schedule, fn, witness=ExactWitness(target))


def gamma_U_alpha(u: SetName, step_cap: int = DEFAULT_STEP_CAP) -> AlphaName:
    """Convert a set-enumeration name into a fast-converging index name.

    Output position m searches the enumeration for the first entry whose
    pair code has second coordinate m and keeps the first coordinate. The
    search diverges on inputs that miss some radius index; the step cap
    turns that into a diagnostic error.
    """

    def fn(m: int) -> int:
        for i in range(step_cap):
            k, m2 = unpair(u.at(i))
            if m2 == m:
                return k
        raise StepCapExceeded(f"set-name conversion at position {m}", step_cap)

    return AlphaName(u.space, u.schedule, fn, witness=u.witness)


class _GammaBetaScan:
    """Shared scan state for the index-name -> set-name conversion.

    Stage codes t decode as (n, l', n', s); t is a hit when the ball
    (beta(v(n)), n) is formally included in (beta(l'), n') with confirmation
    stage s. Confirmation verdicts are cached monotonically so exact spaces
    cost one check per (v(n), n, l', n') combination.
    """

    def __init__(self, v: AlphaName, step_cap: int):
        self.v = v
        self.space = v.space
        self.schedule = v.schedule
        self.step_cap = step_cap
        self.hits: list[int] = []
        self._t_next = 0
        # key -> (True, confirmed_at) or (False, false_up_to)
        self._verdict: dict[tuple[int, int, int, int], tuple[bool, int]] = {}
        self._valid: dict[int, bool] = {}

    def _index_ok(self, l2: int) -> bool:
        got = self._valid.get(l2)
        if got is None:
            got = self.space.contains_index(l2)
            self._valid[l2] = got
        return got

    def _is_hit(self, t: int) -> bool:
        n, rest = unpair(t)
        l2, rest2 = unpair(rest)
        n2, s = unpair(rest2)
        if not self._index_ok(l2):
            return False
        ln = self.v.index_at(n)
        key = (ln, n, l2, n2)
        got = self._verdict.get(key)
        if got is not None:
            confirmed, at = got
            if confirmed and at <= s:
                return True
            if not confirmed and s <= at:
                return False
        ok = formally_included(self.space, self.schedule, (ln, n), (l2, n2), s)
        if ok:
            prev = self._verdict.get(key)
            best = s if prev is None or not prev[0] else min(prev[1], s)
            self._verdict[key] = (True, best)
        else:
            prev = self._verdict.get(key)
            if prev is None or (not prev[0] and prev[1] < s):
                self._verdict[key] = (False, s)
        return ok

    def hit(self, p: int) -> int:
        while len(self.hits) <= p:
            t = self._t_next
            if t >= self.step_cap:
                raise StepCapExceeded(
                    f"index-name conversion at output {p}", self.step_cap)
            self._t_next += 1
            if self._is_hit(t):
                self.hits.append(t)
        return self.hits[p]


def gamma_beta_V(v: AlphaName, step_cap: int = DEFAULT_STEP_CAP) -> SetName:
    """Convert a fast-converging index name into a set-enumeration name.

    Output position p is the pair code of the (l', n') part of the (p+1)-th
    hit in the dovetailed scan; totality holds for genuine names because the
    named point's base-set index set is infinite.
    """
    scan = _GammaBetaScan(v, step_cap)

    def fn(p: int) -> int:
        t = scan.hit(p)
        _, rest = unpair(t)
        l2, rest2 = unpair(rest)
        n2, _ = unpair(rest2)
        return pair(l2, n2)

    return SetName(v.space, v.schedule, fn, witness=v.witness)


def check_name_contract(u: AlphaName, t_max: int,
                        refine_cap: int = 80) -> list[int]:
    """Positions t <= t_max where d(alpha(u(t)), x) < r_t fails or cannot be
    certified against the witness. Empty list means the contract holds."""
    if u.witness is None:
        raise ValueError("name has no witness to check against")
    bad = []
    for t in range(t_max + 1):
        center = u.point_at(t)
        ok = point_in_ball(u.space, center, u.schedule.r(t), u.witness,
                           refine_cap)
        if ok is not True:
            bad.append(t)
    return bad
