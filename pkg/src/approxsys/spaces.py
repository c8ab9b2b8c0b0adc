"""Semi-computable space instances and the formal ball-inclusion relation.

A space exposes an index set (the domain of its point coding), decoding of
indices to exact point data, and a stage-parameterized semi-decision
``dist_lt`` of the strict distance relation. The bundled instances are all
exact -- they confirm at stage 0 whenever the relation is true -- but every
engine takes the stage parameter seriously, so genuinely semi-decidable
spaces plug in without code changes.
"""

from __future__ import annotations

import abc
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Mapping, NamedTuple, Optional

from .core import (
    ApproxSysError,
    PrecisionSchedule,
    Rat,
    REnum,
    pair,
    renum_filter,
    renum_naturals,
    tuple_decode,
    tuple_encode,
    unpair,
    unzigzag,
    zigzag,
)

__all__ = [
    "InvalidIndexError",
    "UnsupportedOperationError",
    "Space",
    "RationalVectorSpace",
    "DiscreteNatSpace",
    "NonnegRationalPairSpace",
    "BallIndex",
    "formally_included",
    "point_in_ball",
    "FiniteInstance",
]


class InvalidIndexError(ApproxSysError, ValueError):
    """An index outside the space's coding domain (distinct from Unknown)."""


class UnsupportedOperationError(ApproxSysError, RuntimeError):
    """The space cannot decide the requested predicate."""


class BallIndex(NamedTuple):
    center: int
    radius_index: int


class Space(abc.ABC):
    """Contract for a semi-computable space with indexed dense points."""

    @abc.abstractmethod
    def contains_index(self, index: int) -> bool:
        """Decidable membership of the coding domain (true for built-ins)."""

    @abc.abstractmethod
    def decode(self, index: int) -> Any:
        """Exact point data for an index; raises InvalidIndexError."""

    @abc.abstractmethod
    def encode_point(self, point: Any) -> int:
        """Canonical index of an exactly representable point."""

    @abc.abstractmethod
    def dist_lt_points(self, p: Any, q: Any, bound: Rat) -> bool:
        """Exact decision of d(p, q) < bound on decoded points."""

    @abc.abstractmethod
    def cmp_ball_box(self, center: Any, radius: Rat, box: tuple[Any, Any]) -> int:
        """Certify box position w.r.t. the open ball around ``center``.

        Returns 1 when every point of the box is certifiably inside
        (sup-distance < radius), -1 when certifiably outside (inf-distance
        >= radius), 0 when the box straddles and needs refinement.
        """

    @abc.abstractmethod
    def descriptor(self) -> dict:
        """JSON-serializable description (see jsonio)."""

    @abc.abstractmethod
    def index_to_json(self, index: int) -> Any: ...

    @abc.abstractmethod
    def index_from_json(self, data: Any) -> int: ...

    @property
    def index_set(self) -> REnum:
        return renum_filter(renum_naturals(), self.contains_index,
                            label="indices")

    def dist_lt(self, i: int, j: int, bound: Rat, stage: int) -> bool:
        """Semi-decide d(decode(i), decode(j)) < bound at the given stage.

        Sound and monotone in stage; exact instances ignore the stage and
        answer at 0. False means Unknown-so-far, never "certified >=".
        """
        if stage < 0:
            raise ValueError("stage must be a natural number")
        if bound <= 0:
            return False
        return self.dist_lt_points(self.decode(i), self.decode(j), bound)

    def same_point(self, i: int, j: int) -> bool:
        """Decidable index equivalence alpha(i) = alpha(j)."""
        return self.decode(i) == self.decode(j)


# ---------------------------------------------------------------------------
# Rational coding helpers
# ---------------------------------------------------------------------------

def _encode_rat(q: Rat) -> int:
    return pair(zigzag(q.numerator), q.denominator - 1)


def _decode_rat(code: int) -> Rat:
    a, b = unpair(code)
    num = unzigzag(a)
    den = b + 1
    if math.gcd(abs(num), den) != 1:
        raise InvalidIndexError(f"non-canonical rational code {code}")
    return Fraction(num, den)


def _is_rat_code(code: int) -> bool:
    a, b = unpair(code)
    return math.gcd(abs(unzigzag(a)), b + 1) == 1


def _interval_abs_bounds(c: Rat, lo: Rat, hi: Rat) -> tuple[Rat, Rat]:
    """Exact (inf, sup) of |c - x| for x in [lo, hi]."""
    if lo > hi:
        raise ValueError("empty interval")
    sup = max(hi - c, c - lo)
    if lo <= c <= hi:
        inf = Fraction(0)
    else:
        inf = min(abs(c - lo), abs(c - hi))
    return inf, sup


class RationalVectorSpace(Space):
    """Q^p dense in R^p under the max or Euclidean metric.

    Points are tuples of rationals; the coding is injective on canonical
    (lowest-terms) component codes, and indices carrying a non-canonical
    component are outside the coding domain.
    """

    def __init__(self, dimension: int, metric: str = "max"):
        if dimension < 1:
            raise ValueError("dimension must be positive")
        if metric not in ("max", "euclidean"):
            raise ValueError("metric must be 'max' or 'euclidean'")
        self.dimension = dimension
        self.metric = metric

    def contains_index(self, index: int) -> bool:
        if index < 0:
            return False
        try:
            self.decode(index)
        except InvalidIndexError:
            return False
        return True

    def decode(self, index: int) -> tuple[Rat, ...]:
        if index < 0:
            raise InvalidIndexError("negative index")
        comps = tuple_decode(index, self.dimension)
        return tuple(_decode_rat(c) for c in comps)

    def encode_point(self, point) -> int:
        vec = tuple(Fraction(c) for c in point)
        if len(vec) != self.dimension:
            raise ValueError(f"expected {self.dimension} components")
        return tuple_encode([_encode_rat(c) for c in vec])

    def dist_lt_points(self, p, q, bound: Rat) -> bool:
        if bound <= 0:
            return False
        if self.metric == "max":
            return max(abs(a - b) for a, b in zip(p, q)) < bound
        sq = sum((a - b) ** 2 for a, b in zip(p, q))
        return sq < bound * bound

    def cmp_ball_box(self, center, radius: Rat, box) -> int:
        lo, hi = box
        per = [_interval_abs_bounds(c, a, b)
               for c, a, b in zip(center, lo, hi)]
        if self.metric == "max":
            inf = max(x for x, _ in per)
            sup = max(x for _, x in per)
            if sup < radius:
                return 1
            if inf >= radius:
                return -1
            return 0
        inf_sq = sum(x * x for x, _ in per)
        sup_sq = sum(x * x for _, x in per)
        r_sq = radius * radius
        if sup_sq < r_sq:
            return 1
        if inf_sq >= r_sq:
            return -1
        return 0

    def descriptor(self) -> dict:
        return {"type": "rational_vector", "dim": self.dimension,
                "metric": self.metric}

    def index_to_json(self, index: int):
        point = self.decode(index)
        if self.dimension == 1:
            return str(point[0])
        return [str(c) for c in point]

    def index_from_json(self, data) -> int:
        from .core import parse_rat
        if isinstance(data, str):
            return self.encode_point((parse_rat(data),))
        return self.encode_point(tuple(parse_rat(c) for c in data))


class DiscreteNatSpace(Space):
    """N with the absolute-difference metric; indices are the points."""

    def contains_index(self, index: int) -> bool:
        return index >= 0

    def decode(self, index: int) -> int:
        if index < 0:
            raise InvalidIndexError("negative index")
        return index

    def encode_point(self, point: int) -> int:
        if point < 0 or point != int(point):
            raise ValueError("points are naturals")
        return int(point)

    def dist_lt_points(self, p: int, q: int, bound: Rat) -> bool:
        return abs(p - q) < bound

    def cmp_ball_box(self, center: int, radius: Rat, box) -> int:
        lo, hi = box
        inf, sup = _interval_abs_bounds(Fraction(center), Fraction(lo),
                                        Fraction(hi))
        if sup < radius:
            return 1
        if inf >= radius:
            return -1
        return 0

    def descriptor(self) -> dict:
        return {"type": "discrete_nat"}

    def index_to_json(self, index: int):
        return index

    def index_from_json(self, data) -> int:
        return int(data)


class NonnegRationalPairSpace(Space):
    """Non-negative rationals coded redundantly: index pair(p,q) names p/(q+1).

    Every point has infinitely many indices, which is exactly what the
    saturation machinery needs to exercise.
    """

    def contains_index(self, index: int) -> bool:
        return index >= 0

    def decode(self, index: int) -> Rat:
        if index < 0:
            raise InvalidIndexError("negative index")
        p, q = unpair(index)
        return Fraction(p, q + 1)

    def encode_point(self, point) -> int:
        x = Fraction(point)
        if x < 0:
            raise ValueError("points are non-negative rationals")
        return pair(x.numerator, x.denominator - 1)

    def dist_lt_points(self, p: Rat, q: Rat, bound: Rat) -> bool:
        return abs(p - q) < bound

    def cmp_ball_box(self, center: Rat, radius: Rat, box) -> int:
        lo, hi = box
        inf, sup = _interval_abs_bounds(center, lo, hi)
        if sup < radius:
            return 1
        if inf >= radius:
            return -1
        return 0

    def descriptor(self) -> dict:
        return {"type": "nonneg_rational_pair"}

    def index_to_json(self, index: int):
        return index

    def index_from_json(self, data) -> int:
        return int(data)


# ---------------------------------------------------------------------------
# Formal inclusion of balls
# ---------------------------------------------------------------------------

def formally_included(
    space: Space,
    schedule: PrecisionSchedule,
    inner: tuple[int, int],
    outer: tuple[int, int],
    stage: int,
) -> bool:
    """Semi-decide (alpha(k), m) < (alpha(k'), m'): d(alpha(k'), alpha(k))
    strictly below r_{m'} - r_m.

    A non-positive radius margin makes the relation plainly false, reported
    as a permanent Unknown rather than an error.
    """
    k, m = inner
    k2, m2 = outer
    margin = schedule.r(m2) - schedule.r(m)
    if margin <= 0:
        return False
    return space.dist_lt(k, k2, margin, stage)


def point_in_ball(space: Space, center: Any, radius: Rat, sample,
                  refine_cap: int = 80) -> Optional[bool]:
    """Certified strict ball membership of a sample point.

    ``sample`` is a witness object: either carrying an exact point
    (``exact_point``) or a refinable enclosure (``box(eps)``). Returns True
    (certified d < radius), False (certified d >= radius), or None if still
    undecided after ``refine_cap`` refinements.
    """
    exact = getattr(sample, "exact_point", None)
    if exact is not None:
        return space.dist_lt_points(center, exact, radius)
    eps = radius
    for _ in range(refine_cap):
        verdict = space.cmp_ball_box(center, radius, sample.box(eps))
        if verdict != 0:
            return verdict > 0
        eps = eps / 2
    return None


# ---------------------------------------------------------------------------
# Finite instances (explicit tables)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FiniteInstance:
    """A fully explicit pair of finite spaces with indexed base tables,
    a domain, and a function table.

    Base tables are arbitrary subsets of the carriers (not only balls), so
    general topological examples are representable.
    """

    x_points: tuple[str, ...]
    y_points: tuple[str, ...]
    u_tables: tuple[frozenset, ...]
    v_tables: tuple[frozenset, ...]
    domain: frozenset
    f_map: Mapping[str, str]

    def __post_init__(self):
        xs, ys = set(self.x_points), set(self.y_points)
        for i, u in enumerate(self.u_tables):
            if not u <= xs:
                raise ValueError(f"U_{i} is not a subset of X")
        for j, v in enumerate(self.v_tables):
            if not v <= ys:
                raise ValueError(f"V_{j} is not a subset of Y")
        if not self.domain <= xs:
            raise ValueError("domain is not a subset of X")
        for x in self.domain:
            if x not in self.f_map:
                raise ValueError(f"f undefined on domain point {x!r}")
            if self.f_map[x] not in ys:
                raise ValueError(f"f({x!r}) is not a point of Y")

    @property
    def i_indices(self) -> range:
        return range(len(self.u_tables))

    @property
    def j_indices(self) -> range:
        return range(len(self.v_tables))

    def f(self, x: str) -> str:
        if x not in self.domain:
            raise KeyError(f"{x!r} is outside the domain")
        return self.f_map[x]

    def bracket_u(self, x: str) -> frozenset:
        """[x]_U: indices of base sets containing x."""
        return frozenset(i for i, u in enumerate(self.u_tables) if x in u)

    def bracket_v(self, y: str) -> frozenset:
        return frozenset(j for j, v in enumerate(self.v_tables) if y in v)

    def f_preimage(self, j: int) -> frozenset:
        v = self.v_tables[j]
        return frozenset(x for x in self.domain if self.f_map[x] in v)
