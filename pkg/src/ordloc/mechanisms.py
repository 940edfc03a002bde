"""Deterministic facility-placement mechanisms.

All mechanisms see only reported locations and top choices.  Two-facility
mechanisms return ``(y_1, y_2)``; :attr:`MechanismId.FIXED_CENTER` works for
any number of facilities.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple

from .model import HALF, Instance, ModelError, Placement, ZERO


class MechanismId(enum.Enum):
    MIDPOINTS = "midpoints"
    PREFERRED_MIDPOINTS = "preferred-midpoints"
    FIXED_CENTER = "fixed-center"
    EXTREMES = "extremes"
    OPTIMAL_SPLIT = "optimal-split"
    MEDIAN_PER_FACILITY = "median-per-facility"

    @property
    def uses_preferences(self) -> bool:
        return self in (MechanismId.PREFERRED_MIDPOINTS, MechanismId.MEDIAN_PER_FACILITY)

    @property
    def label(self) -> str:
        return _LABELS[self]


_LABELS = {
    MechanismId.MIDPOINTS: "midpoints of the two outer gaps",
    MechanismId.PREFERRED_MIDPOINTS: "midpoint of each preference group",
    MechanismId.FIXED_CENTER: "every facility at 1/2",
    MechanismId.EXTREMES: "leftmost and rightmost agent",
    MechanismId.OPTIMAL_SPLIT: "optimal contiguous split, total distance",
    MechanismId.MEDIAN_PER_FACILITY: "median per preference group",
}


@dataclass(frozen=True)
class BoundaryStats:
    lt: Fraction
    rt: Fraction
    cen: Fraction
    lb: Fraction
    rb: Fraction
    dist: Fraction


def boundary_stats(locations: Sequence[Fraction]) -> BoundaryStats:
    if not locations:
        raise ModelError("boundary_stats needs at least one location")
    lt, rt = min(locations), max(locations)
    cen = (lt + rt) / 2
    lb = max(x for x in locations if x <= cen)
    rb = min(x for x in locations if x >= cen)
    return BoundaryStats(lt, rt, cen, lb, rb, max(lb - lt, rt - rb))


def lower_median(values: Sequence[Fraction]) -> Fraction:
    """Element ``ceil(k/2)`` (1-based) of the sorted values."""
    s = sorted(values)
    return s[(len(s) + 1) // 2 - 1]


def best_split(sorted_xs: Sequence[Fraction]) -> Tuple[int, Fraction]:
    """Best prefix/suffix split of sorted points for total distance to medians.

    Returns ``(i, cost)`` where the prefix is ``sorted_xs[:i]``; ``i`` ranges
    over ``1..n-1`` with ties going to the smallest ``i``.  A single point
    gives ``(1, 0)``.
    """
    n = len(sorted_xs)
    if n == 1:
        return 1, ZERO
    prefix = [ZERO]
    for x in sorted_xs:
        prefix.append(prefix[-1] + x)

    def part_cost(lo: int, hi: int) -> Fraction:
        # points sorted_xs[lo:hi] served from their lower median
        k = hi - lo
        mid = lo + (k + 1) // 2 - 1
        med = sorted_xs[mid]
        below = med * (mid - lo + 1) - (prefix[mid + 1] - prefix[lo])
        above = (prefix[hi] - prefix[mid + 1]) - med * (hi - mid - 1)
        return below + above

    best_i, best = 1, None
    for i in range(1, n):
        c = part_cost(0, i) + part_cost(i, n)
        if best is None or c < best:
            best_i, best = i, c
    return best_i, best


def _require_two(m: int, mech: MechanismId) -> None:
    if m != 2:
        raise ModelError(f"{mech.value} needs exactly two facilities, got m={m}")


def place(mech: MechanismId, xs: Sequence[Fraction], tops: Sequence[int], m: int) -> Placement:
    """Run ``mech`` on raw reports (locations and top choices)."""
    if not xs:
        raise ModelError("no agents reported")
    if mech is MechanismId.FIXED_CENTER:
        return (HALF,) * m
    _require_two(m, mech)
    if mech is MechanismId.EXTREMES:
        return (min(xs), max(xs))
    if mech is MechanismId.MIDPOINTS:
        bs = boundary_stats(xs)
        return ((bs.lt + bs.lb) / 2, (bs.rt + bs.rb) / 2)
    if mech is MechanismId.OPTIMAL_SPLIT:
        s = sorted(xs)
        i, _ = best_split(s)
        if len(s) == 1:
            return (s[0], s[0])
        return (lower_median(s[:i]), lower_median(s[i:]))
    groups: List[List[Fraction]] = [[] for _ in range(m)]
    for x, t in zip(xs, tops):
        groups[t].append(x)
    if mech is MechanismId.PREFERRED_MIDPOINTS:
        return tuple((min(g) + max(g)) / 2 if g else HALF for g in groups)
    if mech is MechanismId.MEDIAN_PER_FACILITY:
        return tuple(lower_median(g) if g else HALF for g in groups)
    raise ValueError(f"unknown mechanism {mech!r}")


def run_mechanism(mech: MechanismId, instance: Instance) -> Placement:
    return place(mech, instance.locations, instance.tops, instance.m)
