"""Shared test fixtures: the two-point finite instance, deterministic random
finite instances for the closure pipeline, and certified irrational samples
for the halving system.

Random generation uses a local linear congruential generator so fixture
streams are reproducible bit-for-bit regardless of interpreter version.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

from .core import Rat
from .spaces import FiniteInstance
from .systems import check_uv_condition, maximal_uv_system
from .names import ExactWitness, IntervalWitness, sqrt_sample

__all__ = [
    "Lcg",
    "footnote_instance",
    "maximal_meet_triples",
    "meet_condition_holds",
    "instance_is_pipeline_ready",
    "random_instance",
    "sample_instances",
    "halving_samples",
    "HALVING_DYADIC_BAD_SAMPLE",
]


class Lcg:
    """64-bit LCG (Knuth MMIX constants); enough randomness for fixtures."""

    def __init__(self, seed: int):
        self.state = seed & 0xFFFFFFFFFFFFFFFF

    def next_u32(self) -> int:
        self.state = (self.state * 6364136223846793005 + 1442695040888963407) \
            & 0xFFFFFFFFFFFFFFFF
        return self.state >> 32

    def below(self, n: int) -> int:
        if n <= 0:
            raise ValueError("empty range")
        return self.next_u32() % n

    def randint(self, a: int, b: int) -> int:
        return a + self.below(b - a + 1)

    def choice(self, xs):
        return xs[self.below(len(xs))]

    def rat(self, max_num: int = 20, max_den: int = 12) -> Rat:
        num = self.randint(-max_num, max_num)
        den = self.randint(1, max_den)
        return Fraction(num, den)

    def subset(self, xs) -> frozenset:
        mask = self.next_u32()
        return frozenset(x for i, x in enumerate(xs) if mask >> i & 1)


def footnote_instance() -> FiniteInstance:
    """Two-point carrier with bases {0}, {0,1}, {0,1} on both sides and the
    constant-1 function on the full domain."""
    return FiniteInstance(
        x_points=("0", "1"),
        y_points=("0", "1"),
        u_tables=(frozenset({"0"}), frozenset({"0", "1"}),
                  frozenset({"0", "1"})),
        v_tables=(frozenset({"0"}), frozenset({"0", "1"}),
                  frozenset({"0", "1"})),
        domain=frozenset({"0", "1"}),
        f_map={"0": "1", "1": "1"},
    )


def maximal_meet_triples(inst: FiniteInstance) -> list[tuple[int, int, int]]:
    """All (i1, i2, i) with U_i inside the intersection of U_{i1} and U_{i2}."""
    out = []
    for i1 in inst.i_indices:
        for i2 in inst.i_indices:
            meet = inst.u_tables[i1] & inst.u_tables[i2]
            for i in inst.i_indices:
                if inst.u_tables[i] <= meet:
                    out.append((i1, i2, i))
    return out


def meet_condition_holds(inst: FiniteInstance) -> bool:
    """Whether the maximal triple set tiles every pairwise intersection."""
    triples = maximal_meet_triples(inst)
    for i1 in inst.i_indices:
        for i2 in inst.i_indices:
            meet = inst.u_tables[i1] & inst.u_tables[i2]
            union = set()
            for (a, b, i) in triples:
                if (a, b) == (i1, i2):
                    union |= inst.u_tables[i]
            if union != set(meet):
                return False
    return True


def instance_is_pipeline_ready(inst: FiniteInstance) -> bool:
    """The closure pipeline's preconditions: the maximal relation really is
    an approximation system (f continuous for the table topologies) and the
    base meets are tiled."""
    if not check_uv_condition(inst, maximal_uv_system(inst)).ok:
        return False
    return meet_condition_holds(inst)


def _close_under_meet(tables: list[frozenset]) -> list[frozenset]:
    out = list(dict.fromkeys(tables))
    changed = True
    while changed:
        changed = False
        for a in list(out):
            for b in list(out):
                meet = a & b
                if meet not in out:
                    out.append(meet)
                    changed = True
    return out


def random_instance(rng: Lcg, max_points: int = 4,
                    max_tables: int = 6) -> Optional[FiniteInstance]:
    """One attempt at a pipeline-ready random instance; None when the draw
    fails the size caps or the readiness oracle."""
    nx = rng.randint(2, max_points)
    ny = rng.randint(2, max_points)
    xs = tuple(f"x{i}" for i in range(nx))
    ys = tuple(f"y{i}" for i in range(ny))
    u_tables = [frozenset(xs)]
    for _ in range(rng.randint(1, 3)):
        u_tables.append(rng.subset(xs))
    u_tables = _close_under_meet(u_tables)
    if not 1 <= len(u_tables) <= max_tables:
        return None
    v_tables = [frozenset(ys)]
    for _ in range(rng.randint(1, 3)):
        v_tables.append(rng.subset(ys))
    v_tables = v_tables[:max_tables]
    domain = rng.subset(xs) if rng.below(3) == 0 else frozenset(xs)
    f_map = {x: rng.choice(ys) for x in domain}
    try:
        inst = FiniteInstance(xs, ys, tuple(u_tables), tuple(v_tables),
                              domain, f_map)
    except ValueError:
        return None
    if not instance_is_pipeline_ready(inst):
        return None
    return inst


def sample_instances(count: int, seed: int = 20240915,
                     max_attempts: int = 4000) -> list[FiniteInstance]:
    """Deterministic stream of pipeline-ready instances."""
    rng = Lcg(seed)
    out: list[FiniteInstance] = []
    for _ in range(max_attempts):
        inst = random_instance(rng)
        if inst is not None:
            out.append(inst)
            if len(out) == count:
                return out
    raise RuntimeError(f"only {len(out)} instances after {max_attempts} draws")


# ---------------------------------------------------------------------------
# Halving-system samples
# ---------------------------------------------------------------------------

def halving_samples() -> list[IntervalWitness]:
    """Certified positive irrationals for probing the halving system.

    Radicands are picked so each point keeps a comfortable margin from every
    rational p/(q+1) with small q (worst case sqrt(1/2) vs 2/3, gap ~0.040);
    the covering-condition search then finds its radius witness inside the
    default caps. sqrt(3) or sqrt(5) would not do: they hug the quarter grid
    (7/4, 9/4) closer than any in-cap radius.
    """
    return [sqrt_sample(Fraction(c)) for c in (2, Fraction(1, 2),
                                               Fraction(1, 3))]


# sqrt(1/3) ~ 0.577 sits in the window where the dyadic-schedule margin
# overshoots: quadruple ((1,2), m=2, (0,2), n=2) admits it while the halved
# image misses the radius-1/4 target ball.
HALVING_DYADIC_BAD_SAMPLE = Fraction(1, 3)
