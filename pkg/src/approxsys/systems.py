"""Approximation systems: enumerable sets of index quadruples (k, m, l, n)
tying source balls to target balls, in metric and topological flavors, plus
the finite-table flavor over explicit instances.

Beyond the raw stage enumeration every system answers three bounded queries
(search_l / member_semi / partners_ln). Default implementations scan the
enumeration prefix; structured systems (builders, transforms) override them
with direct witness searches so that evaluation over realistic index codes
stays tractable. Denoted sets are identical either way.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Optional, Sequence

from .core import (
    DYADIC,
    HARMONIC,
    ApproxSysError,
    PrecisionSchedule,
    Rat,
    REnum,
    pair,
    renum_from_list,
    renum_map,
    tuple_decode,
    tuple_encode,
    unpair,
)
from .spaces import (
    FiniteInstance,
    NonnegRationalPairSpace,
    RationalVectorSpace,
    Space,
    formally_included,
    point_in_ball,
)

__all__ = [
    "Quad",
    "Probe",
    "ApproxSystem",
    "MetricSystem",
    "TopologicalSystem",
    "BuilderSystem",
    "const_system",
    "id_system",
    "affine_system",
    "add_system",
    "mul_system",
    "sq_system",
    "empty_system",
    "halving_system",
    "UVApproxSystem",
    "maximal_uv_system",
    "check_uv_condition",
    "CheckBounds",
    "Violation",
    "Report",
    "check_metric",
    "check_topological",
    "saturate",
    "is_saturated",
    "LiftedSystem",
    "lift_point_system",
    "project_system",
    "renum_membership",
    "UnsaturatedSystemError",
]

Quad = tuple[int, int, int, int]


@dataclass(frozen=True)
class Probe:
    """Exact oracle for the represented function, used only by checks.

    ``f_point`` maps exact source points to exact target points; ``f_box``
    maps an exact enclosure to an exact enclosure of the image.
    """

    f_point: Callable[[Any], Any]
    f_box: Callable[[tuple[Any, Any]], tuple[Any, Any]]


class ApproxSystem:
    """Common core of the quadruple-based system flavors."""

    kind = "abstract"

    def __init__(self, source: Space, target: Space,
                 schedule: PrecisionSchedule, enum: REnum,
                 probe: Optional[Probe] = None, name: str = ""):
        self.source = source
        self.target = target
        self.schedule = schedule
        self.enum = enum
        self.probe = probe
        self.name = name

    # -- bounded queries (defaults scan the enumeration prefix) ------------

    def search_l(self, k: int, m: int, n: int, budget: int) -> Optional[int]:
        """First l with (k, m, l, n) enumerated within the budget, or None."""
        for _, q in self.enum.items(budget):
            if q[0] == k and q[1] == m and q[3] == n:
                return q[2]
        return None

    def member_semi(self, quad: Quad, budget: int) -> bool:
        """Bounded semi-decision of quadruple membership."""
        return self.enum.member_by_stage(quad, budget)

    def partners_ln(self, k: int, m: int, budget: int) -> list[tuple[int, int]]:
        """Bounded list of (l, n) with (k, m, l, n) in the system."""
        out, seen = [], set()
        for _, q in self.enum.items(budget):
            if q[0] == k and q[1] == m and (q[2], q[3]) not in seen:
                seen.add((q[2], q[3]))
                out.append((q[2], q[3]))
        return out


class MetricSystem(ApproxSystem):
    kind = "metric"


class TopologicalSystem(ApproxSystem):
    kind = "topological"


# ---------------------------------------------------------------------------
# Builder systems for exact rational arithmetic
# ---------------------------------------------------------------------------

class BuilderSystem(MetricSystem):
    """A metric system whose membership is a decidable predicate with a
    functional target index.

    ``quad_image(k, m, n)`` returns the unique l making (k, m, l, n) a
    member, or None. The enumeration dovetails (k, m, n) through the core
    tupling, so each member appears at exactly one stage and first-stage
    queries are closed-form.
    """

    def __init__(self, name: str, source: Space, target: Space,
                 schedule: PrecisionSchedule,
                 quad_image: Callable[[int, int, int], Optional[int]],
                 probe: Optional[Probe] = None):
        self.quad_image = quad_image

        def fn(s: int):
            k, m, n = tuple_decode(s, 3)
            if not source.contains_index(k):
                return None
            l = quad_image(k, m, n)
            if l is None:
                return None
            return (k, m, l, n)

        def first_stage(quad):
            if not (isinstance(quad, tuple) and len(quad) == 4):
                return None
            k, m, n = quad[0], quad[1], quad[3]
            if min(k, m, n) < 0 or not source.contains_index(k):
                return None
            if quad_image(k, m, n) != quad[2]:
                return None
            return tuple_encode((k, m, n))

        enum = REnum(fn, first_stage=first_stage, label=f"builder:{name}")
        super().__init__(source, target, schedule, enum, probe, name)

    def search_l(self, k, m, n, budget):
        if min(k, m, n) < 0 or not self.source.contains_index(k):
            return None
        return self.quad_image(k, m, n)

    def member_semi(self, quad, budget):
        return self.enum.first_stage(quad) is not None

    def partners_ln(self, k, m, budget):
        out = []
        for n in range(budget):
            l = self.quad_image(k, m, n)
            if l is not None:
                out.append((l, n))
        return out


def _scalar() -> RationalVectorSpace:
    return RationalVectorSpace(1, "max")


def _plane() -> RationalVectorSpace:
    return RationalVectorSpace(2, "max")


def const_system(c: Rat, schedule: PrecisionSchedule = DYADIC) -> BuilderSystem:
    """System for the constant function x |-> c on scalar rationals."""
    c = Fraction(c)
    src, tgt = _scalar(), _scalar()
    lc = tgt.encode_point((c,))
    probe = Probe(lambda p: (c,), lambda box: ((c,), (c,)))
    return BuilderSystem(f"const:{c}", src, tgt, schedule,
                         lambda k, m, n: lc, probe)


def id_system(schedule: PrecisionSchedule = DYADIC) -> BuilderSystem:
    """Identity on scalar rationals: member iff l = k and r_m <= r_n."""
    src, tgt = _scalar(), _scalar()

    def quad_image(k, m, n):
        return k if schedule.r(m) <= schedule.r(n) else None

    probe = Probe(lambda p: p, lambda box: box)
    return BuilderSystem("id", src, tgt, schedule, quad_image, probe)


def affine_system(a: Rat, b: Rat,
                  schedule: PrecisionSchedule = DYADIC) -> BuilderSystem:
    """x |-> a*x + b: member iff l codes a*alpha(k)+b and |a|*r_m < r_n
    (any m when a = 0)."""
    a, b = Fraction(a), Fraction(b)
    src, tgt = _scalar(), _scalar()

    def quad_image(k, m, n):
        if a != 0 and abs(a) * schedule.r(m) >= schedule.r(n):
            return None
        (x,) = src.decode(k)
        return tgt.encode_point((a * x + b,))

    def f_box(box):
        (lo,), (hi,) = box
        v1, v2 = a * lo + b, a * hi + b
        return ((min(v1, v2),), (max(v1, v2),))

    probe = Probe(lambda p: (a * p[0] + b,), f_box)
    return BuilderSystem(f"affine:{a},{b}", src, tgt, schedule, quad_image,
                         probe)


def add_system(schedule: PrecisionSchedule = DYADIC) -> BuilderSystem:
    """(x1, x2) |-> x1 + x2 from Q^2 (max metric): member iff 2*r_m < r_n."""
    src, tgt = _plane(), _scalar()

    def quad_image(k, m, n):
        if 2 * schedule.r(m) >= schedule.r(n):
            return None
        x1, x2 = src.decode(k)
        return tgt.encode_point((x1 + x2,))

    def f_box(box):
        (lo1, lo2), (hi1, hi2) = box
        return ((lo1 + lo2,), (hi1 + hi2,))

    probe = Probe(lambda p: (p[0] + p[1],), f_box)
    return BuilderSystem("add", src, tgt, schedule, quad_image, probe)


def mul_system(schedule: PrecisionSchedule = DYADIC) -> BuilderSystem:
    """(x1, x2) |-> x1 * x2: member iff (|k1|+|k2|+r_m)*r_m < r_n."""
    src, tgt = _plane(), _scalar()

    def quad_image(k, m, n):
        x1, x2 = src.decode(k)
        rm = schedule.r(m)
        if (abs(x1) + abs(x2) + rm) * rm >= schedule.r(n):
            return None
        return tgt.encode_point((x1 * x2,))

    def f_box(box):
        (lo1, lo2), (hi1, hi2) = box
        prods = [lo1 * lo2, lo1 * hi2, hi1 * lo2, hi1 * hi2]
        return ((min(prods),), (max(prods),))

    probe = Probe(lambda p: (p[0] * p[1],), f_box)
    return BuilderSystem("mul", src, tgt, schedule, quad_image, probe)


def sq_system(schedule: PrecisionSchedule = DYADIC) -> BuilderSystem:
    """x |-> x^2: the diagonal of mul, member iff (2|k|+r_m)*r_m < r_n."""
    src, tgt = _scalar(), _scalar()

    def quad_image(k, m, n):
        (x,) = src.decode(k)
        rm = schedule.r(m)
        if (2 * abs(x) + rm) * rm >= schedule.r(n):
            return None
        return tgt.encode_point((x * x,))

    def f_box(box):
        (lo,), (hi,) = box
        if lo >= 0:
            return ((lo * lo,), (hi * hi,))
        if hi <= 0:
            return ((hi * hi,), (lo * lo,))
        return ((Fraction(0),), (max(lo * lo, hi * hi),))

    probe = Probe(lambda p: (p[0] * p[0],), f_box)
    return BuilderSystem("sq", src, tgt, schedule, quad_image, probe)


def empty_system(schedule: PrecisionSchedule = DYADIC) -> BuilderSystem:
    """The empty metric system over scalar rationals."""
    return BuilderSystem("empty", _scalar(), _scalar(), schedule,
                         lambda k, m, n: None,
                         Probe(lambda p: p, lambda box: box))


def halving_system(schedule: PrecisionSchedule = HARMONIC) -> BuilderSystem:
    """x |-> x/2 on positive irrationals, over the redundant pair coding of
    the non-negative rationals: ((p,q), m, (p//2, q), n) with q >= n, m >= n.

    Sound under the harmonic schedule this fixture is pinned to; under the
    dyadic schedule the per-quadruple soundness margin 1/(2(q+1)) + r_m/2
    overshoots r_n, which the checks can certify on irrational samples.
    """
    src, tgt = NonnegRationalPairSpace(), NonnegRationalPairSpace()

    def quad_image(k, m, n):
        p, q = unpair(k)
        if q >= n and m >= n:
            return pair(p // 2, q)
        return None

    probe = Probe(lambda x: x / 2, lambda box: (box[0] / 2, box[1] / 2))
    return BuilderSystem("halving", src, tgt, schedule, quad_image, probe)


# ---------------------------------------------------------------------------
# Finite (U, V)-systems
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UVApproxSystem:
    """A relation between base indices of a finite instance."""

    instance: FiniteInstance
    pairs: REnum


def maximal_uv_system(inst: FiniteInstance) -> UVApproxSystem:
    """The largest sound relation: all (i, j) with U_i and E inside f^-1(V_j)."""
    out = []
    for i in inst.i_indices:
        ui_e = inst.u_tables[i] & inst.domain
        for j in inst.j_indices:
            if ui_e <= inst.f_preimage(j):
                out.append((i, j))
    return UVApproxSystem(inst, renum_from_list(out, label="maximal-uv"))


# ---------------------------------------------------------------------------
# Check reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    data: tuple = ()

    def __str__(self) -> str:
        return f"[{self.kind}] {self.message}"


@dataclass(frozen=True)
class Report:
    violations: tuple[Violation, ...]
    note: str = ""

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        if self.ok:
            return f"consistent up to bounds ({self.note})" if self.note \
                else "consistent up to bounds"
        lines = [str(v) for v in self.violations]
        return "\n".join(lines)


@dataclass(frozen=True)
class CheckBounds:
    """Caps for the bounded condition checks.

    Reports can only ever say "no witness within these bounds"; the
    completeness-style conditions are not refutable by finite search.
    """

    stage_cap: int = 100_000
    n_max: int = 6
    m_cap: int = 24
    index_cap: int = 400
    search_budget: int = 4096
    refine_cap: int = 60
    max_violations: int = 25


def check_uv_condition(inst: FiniteInstance, system: UVApproxSystem | REnum,
                       stage_cap: Optional[int] = None) -> Report:
    """Exhaustively verify that the relation tiles every f-preimage:
    f^-1(V_j) must equal the union of U_i intersected with the domain over
    the related pairs, for every j."""
    pairs_enum = system.pairs if isinstance(system, UVApproxSystem) else system
    if stage_cap is None:
        # Finite-instance relations are finite; a generous default prefix
        # covers every list/dict-backed enumerator completely.
        stage_cap = 4096
    rel = sorted(pairs_enum.denoted(stage_cap))
    violations = []
    for (i, j) in rel:
        if i not in inst.i_indices or j not in inst.j_indices:
            violations.append(Violation(
                "uv-unsound", f"pair ({i},{j}) uses out-of-range indices",
                (i, j)))
            continue
        ui_e = inst.u_tables[i] & inst.domain
        if not ui_e <= inst.f_preimage(j):
            bad = sorted(ui_e - inst.f_preimage(j))[0]
            violations.append(Violation(
                "uv-unsound",
                f"pair ({i},{j}) unsound: {bad!r} lies in U_{i} but "
                f"f({bad!r}) is outside V_{j}", (i, j, bad)))
    for j in inst.j_indices:
        covered = set()
        for (i, j2) in rel:
            if j2 == j and i in inst.i_indices:
                covered |= inst.u_tables[i] & inst.domain
        missing = inst.f_preimage(j) - covered
        if missing:
            x = sorted(missing)[0]
            violations.append(Violation(
                "uv-uncovered",
                f"f^-1(V_{j}) is not covered: point {x!r} has no related "
                f"base set containing it", (j, x)))
    return Report(tuple(violations), note=f"pairs={len(rel)}")


# ---------------------------------------------------------------------------
# Bounded metric / topological condition checks
# ---------------------------------------------------------------------------

def _dedup_quads(enum: REnum, stage_cap: int) -> list[Quad]:
    seen, out = set(), []
    for _, q in enum.items(stage_cap):
        if q not in seen:
            seen.add(q)
            out.append(q)
    return out


def _candidate_indices(space: Space, sample, index_cap: int) -> list[int]:
    cands = [i for _, i in space.index_set.items(index_cap)]
    exact = getattr(sample, "exact_point", None)
    if exact is not None:
        try:
            own = space.encode_point(exact)
        except (ValueError, ApproxSysError):
            own = None
        if own is not None and own not in cands:
            cands.append(own)
    return cands


def _sample_in_ball(space: Space, center, radius: Rat, sample,
                    refine_cap: int) -> Optional[bool]:
    return point_in_ball(space, center, radius, sample, refine_cap)


def _image_outside_ball(target: Space, probe: Probe, center, radius: Rat,
                        sample, refine_cap: int) -> Optional[bool]:
    """Certified e(center, f(x)) >= radius (True), < radius (False), or
    undecided (None)."""
    exact = getattr(sample, "exact_point", None)
    if exact is not None:
        fx = probe.f_point(exact)
        return not target.dist_lt_points(center, fx, radius)
    eps = radius
    for _ in range(refine_cap):
        fx_box = probe.f_box(sample.box(eps))
        verdict = target.cmp_ball_box(center, radius, fx_box)
        if verdict != 0:
            return verdict < 0
        eps = eps / 2
    return None


def check_metric(system: MetricSystem, samples: Sequence,
                 bounds: CheckBounds = CheckBounds(),
                 probe: Optional[Probe] = None) -> Report:
    """Bounded check of the metric-flavor conditions against exact samples.

    Per-quadruple soundness is certified exactly for every quadruple in the
    enumeration prefix; the per-precision covering condition is a bounded
    search whose failure reads "no witness radius index <= m_cap".
    """
    probe = probe or system.probe
    if probe is None:
        raise ValueError("no probe oracle available for this system")
    sched = system.schedule
    violations: list[Violation] = []
    quads = _dedup_quads(system.enum, bounds.stage_cap)

    # Condition (a): every enumerated quadruple is sound on every sample.
    for quad in quads:
        k, m, l, n = quad
        alpha_k = system.source.decode(k)
        beta_l = system.target.decode(l)
        for idx, sample in enumerate(samples):
            inside = _sample_in_ball(system.source, alpha_k, sched.r(m),
                                     sample, bounds.refine_cap)
            if inside is not True:
                continue
            outside = _image_outside_ball(system.target, probe, beta_l,
                                          sched.r(n), sample,
                                          bounds.refine_cap)
            if outside is True:
                violations.append(Violation(
                    "metric-a",
                    f"quadruple {quad} admits sample #{idx} in its source "
                    f"ball while the image misses the target ball", (quad, idx)))
                if len(violations) >= bounds.max_violations:
                    return Report(tuple(violations))

    # Condition (b): for each sample and precision, some radius index m
    # works for every candidate center.
    for idx, sample in enumerate(samples):
        cands = _candidate_indices(system.source, sample, bounds.index_cap)
        ball_memo: dict[tuple[int, int], Optional[bool]] = {}

        def possibly_inside(k: int, m: int) -> bool:
            got = ball_memo.get((k, m))
            if got is None and (k, m) not in ball_memo:
                got = _sample_in_ball(system.source, system.source.decode(k),
                                      sched.r(m), sample, bounds.refine_cap)
                ball_memo[(k, m)] = got
            return got is not False

        for n in range(bounds.n_max + 1):
            witness_m = None
            for m in range(bounds.m_cap + 1):
                ok = True
                for k in cands:
                    if not possibly_inside(k, m):
                        continue
                    if system.search_l(k, m, n, bounds.search_budget) is None:
                        ok = False
                        break
                if ok:
                    witness_m = m
                    break
            if witness_m is None:
                violations.append(Violation(
                    "metric-b",
                    f"sample #{idx}, precision n={n}: no covering radius "
                    f"index m <= {bounds.m_cap} within bounds", (idx, n)))
                if len(violations) >= bounds.max_violations:
                    return Report(tuple(violations))
    return Report(tuple(violations),
                  note=f"quads={len(quads)} samples={len(samples)}")


def check_topological(system: TopologicalSystem, samples: Sequence,
                      bounds: CheckBounds = CheckBounds(),
                      probe: Optional[Probe] = None) -> Report:
    """Bounded check of the topological-flavor equivalence on samples.

    The forward direction (ball hit implies an enumerated witness) searches
    candidate centers within bounds; the backward direction is certified
    exactly on the enumeration prefix.
    """
    probe = probe or system.probe
    if probe is None:
        raise ValueError("no probe oracle available for this system")
    sched = system.schedule
    violations: list[Violation] = []
    quads = _dedup_quads(system.enum, bounds.stage_cap)

    # Backward: enumerated quadruple plus source-ball hit forces target hit.
    for quad in quads:
        k, m, l, n = quad
        alpha_k = system.source.decode(k)
        beta_l = system.target.decode(l)
        for idx, sample in enumerate(samples):
            inside = _sample_in_ball(system.source, alpha_k, sched.r(m),
                                     sample, bounds.refine_cap)
            if inside is not True:
                continue
            outside = _image_outside_ball(system.target, probe, beta_l,
                                          sched.r(n), sample,
                                          bounds.refine_cap)
            if outside is True:
                violations.append(Violation(
                    "top-sound",
                    f"quadruple {quad} admits sample #{idx} without the "
                    f"image landing in the target ball", (quad, idx)))
                if len(violations) >= bounds.max_violations:
                    return Report(tuple(violations))

    # Forward: every certified target-ball hit has an enumerated witness
    # whose source ball contains the sample.
    for idx, sample in enumerate(samples):
        k_cands = _candidate_indices(system.source, sample, bounds.index_cap)
        exact = getattr(sample, "exact_point", None)
        l_cands = [i for _, i in system.target.index_set.items(bounds.index_cap)]
        if exact is not None:
            fx = probe.f_point(exact)
            own = system.target.encode_point(fx)
            if own not in l_cands:
                l_cands.append(own)
        for l in l_cands:
            beta_l = system.target.decode(l)
            for n in range(bounds.n_max + 1):
                hit = _image_outside_ball(system.target, probe, beta_l,
                                          sched.r(n), sample,
                                          bounds.refine_cap)
                if hit is not False:
                    continue  # not a certified target-ball hit
                found = False
                for k in k_cands:
                    for m in range(bounds.m_cap + 1):
                        inside = _sample_in_ball(
                            system.source, system.source.decode(k),
                            sched.r(m), sample, bounds.refine_cap)
                        if inside is not True:
                            continue
                        if system.member_semi((k, m, l, n),
                                              bounds.search_budget):
                            found = True
                            break
                    if found:
                        break
                if not found:
                    violations.append(Violation(
                        "top-complete",
                        f"sample #{idx}: target ball (l={l}, n={n}) is hit "
                        f"but no enumerated witness found within bounds",
                        (idx, l, n)))
                    if len(violations) >= bounds.max_violations:
                        return Report(tuple(violations))
    return Report(tuple(violations),
                  note=f"quads={len(quads)} samples={len(samples)}")


# ---------------------------------------------------------------------------
# Saturation
# ---------------------------------------------------------------------------

class _SaturatedView(MetricSystem):
    """Closure of a system under index equivalence on both sides."""

    def __init__(self, base: ApproxSystem,
                 eq_source: Callable[[int, int], bool],
                 eq_target: Callable[[int, int], bool]):
        self.base = base
        self.eq_source = eq_source
        self.eq_target = eq_target
        src, tgt = base.source, base.target

        def fn(s: int):
            s0, kbar, lbar = tuple_decode(s, 3)
            q = base.enum.stage(s0)
            if q is None:
                return None
            k, m, l, n = q
            if not (src.contains_index(kbar) and tgt.contains_index(lbar)):
                return None
            if eq_source(kbar, k) and eq_target(lbar, l):
                return (kbar, m, lbar, n)
            return None

        super().__init__(src, tgt, base.schedule,
                         REnum(fn, label=f"saturate:{base.name}"),
                         base.probe, f"saturate:{base.name}")

    def search_l(self, k, m, n, budget):
        direct = self.base.search_l(k, m, n, budget)
        if direct is not None:
            return direct
        for _, q in self.base.enum.items(budget):
            if q[1] == m and q[3] == n and self.eq_source(k, q[0]):
                return q[2]
        return None

    def member_semi(self, quad, budget):
        k, m, l, n = quad
        if self.base.member_semi(quad, budget):
            return True
        for _, q in self.base.enum.items(budget):
            if q[1] == m and q[3] == n and self.eq_source(k, q[0]) \
                    and self.eq_target(l, q[2]):
                return True
        return False


def saturate(system: ApproxSystem,
             eq_source: Optional[Callable[[int, int], bool]] = None,
             eq_target: Optional[Callable[[int, int], bool]] = None) -> MetricSystem:
    """Close a system under replacing indices by equivalent ones.

    The default equivalence is the spaces' decoded-point equality; spaces
    without decidable point equality raise when queried.
    """
    return _SaturatedView(system,
                          eq_source or system.source.same_point,
                          eq_target or system.target.same_point)


def is_saturated(system: ApproxSystem,
                 bounds: CheckBounds = CheckBounds(),
                 eq_source: Optional[Callable[[int, int], bool]] = None,
                 eq_target: Optional[Callable[[int, int], bool]] = None) -> Report:
    """Bounded search for saturation failures: an enumerated quadruple plus
    equivalent indices (kbar, lbar) whose substituted quadruple is missing."""
    violations = []
    src, tgt = system.source, system.target
    eq_source = eq_source or src.same_point
    eq_target = eq_target or tgt.same_point
    quads = _dedup_quads(system.enum, bounds.stage_cap)
    k_range = [i for _, i in src.index_set.items(bounds.index_cap)]
    l_range = [i for _, i in tgt.index_set.items(bounds.index_cap)]
    for quad in quads:
        k, m, l, n = quad
        for kbar in k_range:
            if not eq_source(kbar, k):
                continue
            for lbar in l_range:
                if not eq_target(lbar, l):
                    continue
                if (kbar, m, lbar, n) == quad:
                    continue
                if not system.member_semi((kbar, m, lbar, n),
                                          bounds.search_budget):
                    violations.append(Violation(
                        "saturation",
                        f"{quad} enumerated but equivalent ({kbar},{m},"
                        f"{lbar},{n}) not found within bounds",
                        (quad, (kbar, m, lbar, n))))
                    if len(violations) >= bounds.max_violations:
                        return Report(tuple(violations))
    return Report(tuple(violations), note=f"quads={len(quads)}")


class UnsaturatedSystemError(ApproxSysError, RuntimeError):
    def __init__(self, violation: Violation):
        super().__init__(f"system is not saturated: {violation}")
        self.violation = violation


# ---------------------------------------------------------------------------
# Point-level systems: lifting and projection
# ---------------------------------------------------------------------------

class LiftedSystem(MetricSystem):
    """Index-level view of a point-level quadruple set: a quadruple belongs
    iff its decoded form satisfies the point-level predicate."""

    def __init__(self, pred: Callable[[Any, int, Any, int], bool],
                 source: Space, target: Space, schedule: PrecisionSchedule,
                 probe: Optional[Probe] = None, name: str = "lifted"):
        self.pred = pred

        def fn(s: int):
            k, m, l, n = tuple_decode(s, 4)
            if not (source.contains_index(k) and target.contains_index(l)):
                return None
            if pred(source.decode(k), m, target.decode(l), n):
                return (k, m, l, n)
            return None

        def first_stage(quad):
            if not (isinstance(quad, tuple) and len(quad) == 4):
                return None
            k, m, l, n = quad
            if min(quad) < 0:
                return None
            if not (source.contains_index(k) and target.contains_index(l)):
                return None
            if not pred(source.decode(k), m, target.decode(l), n):
                return None
            return tuple_encode(quad)

        super().__init__(source, target, schedule,
                         REnum(fn, first_stage=first_stage, label=name),
                         probe, name)

    def search_l(self, k, m, n, budget):
        if not self.source.contains_index(k):
            return None
        pk = self.source.decode(k)
        for _, l in self.target.index_set.items(budget):
            if self.pred(pk, m, self.target.decode(l), n):
                return l
        return None

    def member_semi(self, quad, budget):
        return self.enum.first_stage(quad) is not None


def lift_point_system(pred: Callable[[Any, int, Any, int], bool],
                      source: Space, target: Space,
                      schedule: PrecisionSchedule,
                      probe: Optional[Probe] = None) -> LiftedSystem:
    return LiftedSystem(pred, source, target, schedule, probe)


def project_system(system: ApproxSystem,
                   bounds: CheckBounds = CheckBounds()) -> REnum:
    """Decode a saturated system to its point-level quadruple set.

    Saturation is verified on bounded ranges first; a found witness aborts
    the projection, since projecting an unsaturated system loses members.
    """
    report = is_saturated(system, bounds)
    if not report.ok:
        raise UnsaturatedSystemError(report.violations[0])
    src, tgt = system.source, system.target
    return renum_map(
        system.enum,
        lambda q: (src.decode(q[0]), q[1], tgt.decode(q[2]), q[3]),
        label=f"project:{system.name}")


def renum_membership(enum: REnum, cap: int) -> Callable[..., bool]:
    """Membership predicate of an enumerator's bounded denoted set, for
    feeding projections back into :func:`lift_point_system`."""
    denoted = enum.denoted(cap)

    def pred(pk, m, pl, n) -> bool:
        return (pk, m, pl, n) in denoted

    return pred
