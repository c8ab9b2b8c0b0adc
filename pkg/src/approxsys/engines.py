"""Effective constructions over enumerable systems: operator application,
name evaluation, flavor transformations, intersection witnesses, the finite
closure pipeline, and system extraction from a recursive operator.

Search strategy note: every mu-search here is realized as a deterministic
bounded dovetail over witnesses (budget-doubling, first fit wins). A literal
linear scan over single Cantor codes of whole witness tuples is equivalent
in denoted output but astronomically infeasible once index codes carry
actual rationals, so the searches consult the systems' bounded query hooks
instead; soundness only ever needs *some* confirmed witness.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Optional, Sequence

from .core import (
    PrecisionSchedule,
    REnum,
    StepCapExceeded,
    find_m_below,
    member_by_stage,
    pair,
    renum_map,
    tuple_decode,
    tuple_encode,
    unpair,
)
from .names import AlphaName, SetName
from .spaces import FiniteInstance, Space, formally_included
from .systems import (
    ApproxSystem,
    MetricSystem,
    Quad,
    TopologicalSystem,
    UVApproxSystem,
)

__all__ = [
    "EnumOperatorSet",
    "enum_apply",
    "apply_topological",
    "evaluate_metric",
    "metric_to_topological",
    "topological_to_metric",
    "intersection_h",
    "hk_closure",
    "i0_renum",
    "build_r",
    "RecursiveOperator",
    "IdentityOperator",
    "ConstantOperator",
    "ExtractedSystem",
    "extract_metric_system",
    "DEFAULT_EVAL_CAP",
]

DEFAULT_EVAL_CAP = 1 << 22


# ---------------------------------------------------------------------------
# Enumeration operators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EnumOperatorSet:
    """An enumeration operator as a r.e. set of (finite index set, output)
    pairs; F(M) collects outputs whose finite support lies inside M.
    Monotonicity in M holds by construction."""

    pairs: REnum

    @classmethod
    def from_pair_relation(cls, relation: REnum) -> "EnumOperatorSet":
        """Operator F(M) = {j | exists i in M with (i, j) related}."""
        return cls(renum_map(relation,
                             lambda ij: (frozenset((ij[0],)), ij[1]),
                             label="op-from-relation"))

    def apply(self, m_enum: REnum) -> REnum:
        def fn(s: int):
            a, b = unpair(s)
            w = self.pairs.stage(a)
            if w is None:
                return None
            d_set, j = w
            if all(member_by_stage(m_enum, i, b) for i in d_set):
                return j
            return None

        return REnum(fn, label="op-apply")


def enum_apply(relation: REnum, m_enum: REnum) -> REnum:
    """Apply a pair relation as an operator: {j | exists i in M, (i,j) in R}.

    Stage pair(a, b) cross-checks the a-th relation stage against the
    b-prefix of M; repetitions are permitted by enumerator semantics.
    """

    def fn(s: int):
        a, b = unpair(s)
        p = relation.stage(a)
        if p is None:
            return None
        i, j = p
        return j if member_by_stage(m_enum, i, b) else None

    return REnum(fn, label="enum-apply")


def apply_topological(system: ApproxSystem, u: SetName,
                      step_cap: int = DEFAULT_EVAL_CAP) -> SetName:
    """Run a topological system on a set-enumeration name.

    The quadruples embed into a pair relation through the core pairing and
    the operator engine does the rest; the output enumerates the target
    base-set indices of the image point.
    """
    pair_rel = renum_map(system.enum,
                         lambda q: (pair(q[0], q[1]), pair(q[2], q[3])),
                         label="pair-embedding")
    m_enum = REnum(u.at, label="setname-range")
    raw = enum_apply(pair_rel, m_enum)
    vals: list[int] = []
    state = {"next": 0}

    def fn(p: int) -> int:
        while len(vals) <= p:
            s = state["next"]
            if s >= step_cap:
                raise StepCapExceeded(f"system application at output {p}",
                                      step_cap)
            state["next"] += 1
            x = raw.stage(s)
            if x is not None:
                vals.append(x)
        return vals[p]

    out = SetName(system.target, system.schedule, fn, witness=None)
    out.raw_enum = raw  # type: ignore[attr-defined]
    return out


# ---------------------------------------------------------------------------
# Metric evaluation
# ---------------------------------------------------------------------------

def evaluate_metric(system: MetricSystem, u: AlphaName,
                    step_cap: int = DEFAULT_EVAL_CAP) -> AlphaName:
    """Evaluate a metric system on a fast-converging name.

    For each precision n the search dovetails radius indices m against the
    system's bounded witness queries with doubling budgets; the first
    confirmed quadruple (u(m), m, l, n) yields the output index l, which is
    sound for any member quadruple. Budget exhaustion raises the diagnostic
    cap error -- legitimate divergence on contract-violating inputs.
    """

    def fn(n: int) -> int:
        budget = 8
        while True:
            limit = min(budget, step_cap)
            for m in range(limit):
                l = system.search_l(u.index_at(m), m, n, limit)
                if l is not None:
                    return l
            if budget >= step_cap:
                raise StepCapExceeded(f"evaluation at precision {n}",
                                      step_cap)
            budget *= 2

    return AlphaName(system.target, system.schedule, fn, witness=None)


# ---------------------------------------------------------------------------
# Flavor transformations
# ---------------------------------------------------------------------------

class _MetricToTopological(TopologicalSystem):
    """Widen target balls: keep (k, m, l', n') whenever some member
    (k, m, l, n) has its target ball formally included in (l', n')."""

    def __init__(self, base: ApproxSystem):
        self.base = base
        src, tgt, sched = base.source, base.target, base.schedule

        def fn(s: int):
            s0, c, st = tuple_decode(s, 3)
            q = base.enum.stage(s0)
            if q is None:
                return None
            k, m, l, n = q
            l2, n2 = unpair(c)
            if not tgt.contains_index(l2):
                return None
            if formally_included(tgt, sched, (l, n), (l2, n2), st):
                return (k, m, l2, n2)
            return None

        super().__init__(src, tgt, sched,
                         REnum(fn, label=f"m2t:{base.name}"),
                         base.probe, f"m2t:{base.name}")

    def search_l(self, k, m, n2, budget):
        sched = self.schedule
        partners = self.base.partners_ln(k, m, budget)
        for l, n in partners:
            if formally_included(self.target, sched, (l, n), (l, n2), budget):
                return l
        for _, l2 in self.target.index_set.items(budget):
            for l, n in partners:
                if formally_included(self.target, sched, (l, n), (l2, n2),
                                     budget):
                    return l2
        return None

    def member_semi(self, quad, budget):
        k, m, l2, n2 = quad
        if not self.target.contains_index(l2):
            return False
        for l, n in self.base.partners_ln(k, m, budget):
            if formally_included(self.target, self.schedule, (l, n),
                                 (l2, n2), budget):
                return True
        return False


class _TopologicalToMetric(MetricSystem):
    """Shrink source balls: keep (k', m', l, n) whenever some member
    (k, m, l, n) has (k', m') formally included in its source ball."""

    def __init__(self, base: ApproxSystem):
        self.base = base
        src, tgt, sched = base.source, base.target, base.schedule

        def fn(s: int):
            s0, c, st = tuple_decode(s, 3)
            q = base.enum.stage(s0)
            if q is None:
                return None
            k, m, l, n = q
            k2, m2 = unpair(c)
            if not src.contains_index(k2):
                return None
            if formally_included(src, sched, (k2, m2), (k, m), st):
                return (k2, m2, l, n)
            return None

        super().__init__(src, tgt, sched,
                         REnum(fn, label=f"t2m:{base.name}"),
                         base.probe, f"t2m:{base.name}")

    def search_l(self, k2, m2, n, budget):
        sched = self.schedule
        # Same center, strictly larger radius: zero distance always wins.
        for m in range(budget):
            if sched.r(m) > sched.r(m2):
                l = self.base.search_l(k2, m, n, budget)
                if l is not None:
                    return l
        for _, q in self.base.enum.items(budget):
            if q[3] == n and formally_included(self.source, sched, (k2, m2),
                                               (q[0], q[1]), budget):
                return q[2]
        return None

    def member_semi(self, quad, budget):
        k2, m2, l, n = quad
        if not self.source.contains_index(k2):
            return False
        sched = self.schedule
        for m in range(budget):
            if sched.r(m) > sched.r(m2) and \
                    self.base.member_semi((k2, m, l, n), budget):
                return True
        for _, q in self.base.enum.items(budget):
            if q[2] == l and q[3] == n and formally_included(
                    self.source, sched, (k2, m2), (q[0], q[1]), budget):
                return True
        return False


def metric_to_topological(system: ApproxSystem) -> TopologicalSystem:
    return _MetricToTopological(system)


def topological_to_metric(system: ApproxSystem) -> MetricSystem:
    return _TopologicalToMetric(system)


# ---------------------------------------------------------------------------
# Ball-intersection witnesses
# ---------------------------------------------------------------------------

def intersection_h(space: Space, schedule: PrecisionSchedule) -> REnum:
    """Enumerate 6-tuples (k1, m1, k2, m2, k, m) whose ball (k, m) is
    formally included in both (k1, m1) and (k2, m2); realizes a computable
    meet witness set for the induced ball base."""

    def fn(s: int):
        k1, m1, k2, m2, k, m, st = tuple_decode(s, 7)
        for idx in (k1, k2, k):
            if not space.contains_index(idx):
                return None
        if formally_included(space, schedule, (k, m), (k1, m1), st) and \
                formally_included(space, schedule, (k, m), (k2, m2), st):
            return (k1, m1, k2, m2, k, m)
        return None

    return REnum(fn, label="intersection-h")


# ---------------------------------------------------------------------------
# Finite closure pipeline
# ---------------------------------------------------------------------------

def hk_closure(h: REnum) -> REnum:
    """Iterated join closure of a triple relation.

    A stage decodes to a derivation: a non-empty list of h-stages chained on
    the middle index, producing tuples (i_1, ..., i_k, i) for every k >= 2.
    """

    def fn(s: int):
        j, code = unpair(s)
        seq = tuple_decode(code, j + 1)
        first = h.stage(seq[0])
        if first is None or len(first) != 3:
            return None
        acc = list(first)
        for idx in seq[1:]:
            step = h.stage(idx)
            if step is None or len(step) != 3 or step[0] != acc[-1]:
                return None
            acc[-1:] = [step[1], step[2]]
        return tuple(acc)

    return REnum(fn, label="hk-closure")


def i0_renum(h: REnum) -> REnum:
    """Base indices i with some (i', i', i) in the triple relation."""

    def fn(s: int):
        t = h.stage(s)
        if t is None or len(t) != 3 or t[0] != t[1]:
            return None
        return t[2]

    return REnum(fn, label="i0")


def build_r(op: EnumOperatorSet, h: REnum,
            inst: FiniteInstance) -> UVApproxSystem:
    """Assemble a relation realizing the operator through the meet closure.

    Pairs come from two branches: base indices from the reflexive part of h
    matched with empty-support outputs, and closure tuples matched with
    outputs whose support lies among the tuple's first components.
    """
    closure = hk_closure(h)
    i0 = i0_renum(h)
    j_count = len(inst.v_tables)

    def fn(s: int):
        branch, rest = s % 2, s // 2
        a, b = unpair(rest)
        w = op.pairs.stage(b)
        if w is None:
            return None
        d_set, j = w
        if not (0 <= j < j_count):
            return None
        if branch == 0:
            if d_set:
                return None
            i = i0.stage(a)
            if i is None:
                return None
            return (i, j)
        seq = closure.stage(a)
        if seq is None:
            return None
        if d_set <= frozenset(seq[:-1]):
            return (seq[-1], j)
        return None

    return UVApproxSystem(inst, REnum(fn, label="build-r"))


# ---------------------------------------------------------------------------
# Recursive operators and system extraction
# ---------------------------------------------------------------------------

class RecursiveOperator:
    """Effort-bounded application of a recursive operator to finite inputs.

    The contract (not enforced): answers are deterministic, stable once
    defined as effort grows, and never change when the finite input is
    extended -- the use principle. A violating operator voids every
    guarantee of the extraction below.
    """

    def apply_finite(self, u_vals: Sequence[int], p: int,
                     effort: int) -> Optional[int]:
        raise NotImplementedError


class IdentityOperator(RecursiveOperator):
    def apply_finite(self, u_vals, p, effort):
        return u_vals[p] if p < len(u_vals) else None


class ConstantOperator(RecursiveOperator):
    def __init__(self, index: int):
        self.index = index

    def apply_finite(self, u_vals, p, effort):
        return self.index


class ExtractedSystem(MetricSystem):
    """The saturated metric system distilled from a recursive operator.

    A stage decodes to a full witness tuple (k, m, l, n, s, p, w, st): the
    radius-floor and precision-halving side conditions on s and p, a finite
    input prefix u° coded by w whose entries approximate alpha(k) to r_t/2,
    a defined operator answer at p within effort st, and that answer landing
    r_n/2-close to beta(l). The search space is exponential in s; this
    construction is deliberately desk-scale.
    """

    def __init__(self, op: RecursiveOperator, source: Space, target: Space,
                 schedule: PrecisionSchedule, probe=None):
        self.op = op

        def fn(stage_code: int):
            parts = tuple_decode(stage_code, 8)
            return self._attempt(*parts)

        super().__init__(source, target, schedule,
                         REnum(fn, label="extracted"), probe, "extracted")

    def _attempt(self, k, m, l, n, ws, wp, wcode, st) -> Optional[Quad]:
        src, tgt, sched = self.source, self.target, self.schedule
        if not (src.contains_index(k) and tgt.contains_index(l)):
            return None
        if min(sched.r(t) for t in range(ws + 1)) < 2 * sched.r(m):
            return None
        if sched.r(wp) > sched.r(n) / 2:
            return None
        u_vals = tuple_decode(wcode, ws + 1)
        for t, v in enumerate(u_vals):
            if not src.contains_index(v):
                return None
            if not src.dist_lt(v, k, sched.r(t) / 2, st):
                return None
        res = self.op.apply_finite(u_vals, wp, st)
        if res is None or not tgt.contains_index(res):
            return None
        if not tgt.dist_lt(res, l, sched.r(n) / 2, st):
            return None
        return (k, m, l, n)

    def _canonical(self, k: int, m: int, n: int,
                   effort: int) -> Optional[tuple[int, int, int, int]]:
        """Constant-prefix witness data (ws, wp, wcode, res) when valid."""
        sched = self.schedule
        wp = find_m_below(sched, sched.r(n) / 2)
        ws = wp
        if min(sched.r(t) for t in range(ws + 1)) < 2 * sched.r(m):
            return None
        u_vals = (k,) * (ws + 1)
        res = self.op.apply_finite(u_vals, wp, effort)
        if res is None or not self.target.contains_index(res):
            return None
        return ws, wp, tuple_encode(u_vals), res

    def witness_stage(self, quad: Quad, stage: int = 0) -> Optional[int]:
        """Stage code under which the canonical witness emits the quadruple."""
        k, m, l, n = quad
        got = self._canonical(k, m, n, stage)
        if got is None:
            return None
        ws, wp, wcode, res = got
        code = tuple_encode((k, m, l, n, ws, wp, wcode, stage))
        if self.enum.stage(code) == quad:
            return code
        return None

    def search_l(self, k, m, n, budget):
        if not self.source.contains_index(k):
            return None
        got = self._canonical(k, m, n, budget)
        if got is None:
            return None
        return got[3]

    def member_semi(self, quad, budget):
        k, m, l, n = quad
        if not self.target.contains_index(l):
            return False
        got = self._canonical(k, m, n, budget)
        if got is None:
            return False
        res = got[3]
        return self.target.dist_lt(res, l, self.schedule.r(n) / 2, budget)


def extract_metric_system(op: RecursiveOperator, source: Space,
                          target: Space, schedule: PrecisionSchedule,
                          probe=None) -> ExtractedSystem:
    return ExtractedSystem(op, source, target, schedule, probe)
