"""Exhaustive deviation search for (group) strategyproofness.

A verdict of :attr:`AuditVerdict.violation` ``False`` only says that no
profitable deviation exists inside the enumerated candidate set; it is not a
proof.  Violations carry a complete witness that :func:`revalidate` replays
with exact arithmetic.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from gmpy2 import mpq

from .mechanisms import MechanismId, place
from .model import Agent, Instance, ModelError, ModelKind, Placement, _cost, _utility, to_fraction

GROUP_GUARD = 10**7

Report = Tuple[Fraction, Tuple[int, ...]]


class AuditBudgetError(ModelError):
    pass


class WelfareMode(enum.Enum):
    COST = "cost"
    UTILITY = "utility"


@dataclass(frozen=True)
class DeviationSpace:
    """Which reports an agent may falsify, and the location candidates.

    Location candidates are ``{k/grid}`` plus every true agent location plus
    the endpoints, or exactly ``explicit`` when given (the true location is
    always added so preference-only deviations stay reachable).
    """

    prefs: bool = True
    locations: bool = False
    grid: int = 200
    explicit: Optional[Tuple[Fraction, ...]] = None

    def __post_init__(self):
        if not (self.prefs or self.locations):
            raise ModelError("deviation space is empty: enable prefs and/or locations")
        if self.explicit is None and self.grid < 1:
            raise ModelError("location grid must be >= 1")
        if self.explicit is not None:
            object.__setattr__(self, "explicit", tuple(to_fraction(v) for v in self.explicit))

    def location_candidates(self, instance: Instance) -> List[Fraction]:
        if self.explicit is not None:
            pool = set(self.explicit)
        else:
            pool = {Fraction(k, self.grid) for k in range(self.grid + 1)}
            pool.update(instance.locations)
            pool.update((Fraction(0), Fraction(1)))
        for v in pool:
            if not 0 <= v <= 1:
                raise ModelError(f"location candidate {v} outside [0, 1]")
        return sorted(pool)

    def options(self, instance: Instance, i: int, candidates: Sequence[Fraction]) -> List[Report]:
        """Misreports available to agent ``i`` in enumeration order."""
        agent = instance.agents[i]
        rankings = list(itertools.permutations(range(instance.m))) if self.prefs else [agent.pref]
        xs = sorted(set(candidates) | {agent.x}) if self.locations else [agent.x]
        return [(x, p) for p in rankings for x in xs if (x, p) != (agent.x, agent.pref)]


@dataclass(frozen=True)
class AuditVerdict:
    violation: bool
    examined: int
    mechanism: MechanismId
    mode: WelfareMode
    group: Tuple[int, ...] = ()
    true_reports: Tuple[Report, ...] = ()
    misreports: Tuple[Report, ...] = ()
    before: Tuple[Fraction, ...] = ()
    after: Tuple[Fraction, ...] = ()
    truthful_placement: Placement = ()
    deviated_placement: Placement = ()

    @property
    def outcome(self) -> str:
        return "ViolationFound" if self.violation else "NoViolationFound"


def _welfare(instance: Instance, mode: WelfareMode, num=Fraction):
    kind = instance.kind
    alpha = tuple(num(a) for a in instance.alpha)
    agents = [(num(a.x), a.pref) for a in instance.agents]
    f = _cost if mode is WelfareMode.COST else _utility

    def welfare(i: int, y):
        x, pref = agents[i]
        return f(kind, alpha, x, pref, y)

    return welfare


def _frac(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


def _fracs(values) -> tuple:
    return tuple(_frac(v) for v in values)


def _best_possible(instance: Instance, mode: WelfareMode) -> Fraction:
    if mode is WelfareMode.COST:
        return Fraction(0)
    return Fraction(1) if instance.kind is ModelKind.MULTIPLICATIVE else 1 - instance.alpha[0]


def audit_gsp(
    mechanism: MechanismId,
    instance: Instance,
    space: DeviationSpace,
    mode: WelfareMode,
    max_group_size: int,
    agents: Optional[Iterable[int]] = None,
) -> AuditVerdict:
    """Search coalitions of up to ``max_group_size`` agents for a joint
    misreport that strictly helps every member.

    Coalitions are visited by size, then lexicographically; each member
    enumerates rankings lexicographically and locations ascending.  Agents
    already at their best possible welfare cannot strictly gain and are
    skipped.  ``agents`` restricts which agents may deviate.
    """
    n = instance.n
    if not 1 <= max_group_size <= n:
        raise ModelError(f"max_group_size must be in 1..{n}")
    # mpq keeps the arithmetic exact and is much faster than Fraction here
    xs, tops, m = [mpq(x) for x in instance.locations], list(instance.tops), instance.m
    truthful = place(mechanism, xs, tops, m)
    welfare = _welfare(instance, mode, mpq)
    better = (lambda new, old: new < old) if mode is WelfareMode.COST else (lambda new, old: new > old)
    base = [welfare(i, truthful) for i in range(n)]
    ceiling = _best_possible(instance, mode)
    pool = range(n) if agents is None else sorted(set(agents))
    movable = [i for i in pool if base[i] != ceiling]
    candidates = space.location_candidates(instance) if space.locations else []
    options = {
        i: [(mpq(x), p) for x, p in space.options(instance, i, candidates)] for i in movable
    }

    total = 0
    for size in range(1, max_group_size + 1):
        for group in itertools.combinations(movable, size):
            count = 1
            for i in group:
                count *= len(options[i])
            total += count
            if total > GROUP_GUARD:
                raise AuditBudgetError(f"more than {GROUP_GUARD} joint deviations to enumerate")

    examined = 0
    memo = {}
    for size in range(1, max_group_size + 1):
        for group in itertools.combinations(movable, size):
            for joint in itertools.product(*(options[i] for i in group)):
                examined += 1
                rx, rt = xs[:], tops[:]
                for i, (x, p) in zip(group, joint):
                    rx[i], rt[i] = x, p[0]
                y = place(mechanism, rx, rt, m)
                if y == truthful:
                    continue
                after = []
                for i in group:
                    key = (i, y)
                    w = memo.get(key)
                    if w is None:
                        w = memo[key] = welfare(i, y)
                    if not better(w, base[i]):
                        break
                    after.append(w)
                else:
                    return AuditVerdict(
                        violation=True,
                        examined=examined,
                        mechanism=mechanism,
                        mode=mode,
                        group=group,
                        true_reports=tuple((instance.agents[i].x, instance.agents[i].pref) for i in group),
                        misreports=tuple((_frac(x), p) for x, p in joint),
                        before=_fracs(base[i] for i in group),
                        after=_fracs(after),
                        truthful_placement=_fracs(truthful),
                        deviated_placement=_fracs(y),
                    )
    return AuditVerdict(
        violation=False, examined=examined, mechanism=mechanism, mode=mode, truthful_placement=_fracs(truthful)
    )


def audit_sp(
    mechanism: MechanismId,
    instance: Instance,
    space: DeviationSpace,
    mode: WelfareMode,
    agents: Optional[Iterable[int]] = None,
) -> AuditVerdict:
    """Single-agent deviation search; the first profitable one is returned."""
    return audit_gsp(mechanism, instance, space, mode, 1, agents=agents)


def misreported_instance(instance: Instance, group: Sequence[int], misreports: Sequence[Report]) -> Instance:
    for i, (x, p) in zip(group, misreports):
        instance = instance.with_agent(i, Agent(x, tuple(p)))
    return instance


def revalidate(verdict: AuditVerdict, instance: Instance) -> bool:
    """Replay a violation witness from scratch."""
    if not verdict.violation:
        return True
    reported = misreported_instance(instance, verdict.group, verdict.misreports)
    y = place(verdict.mechanism, list(reported.locations), list(reported.tops), instance.m)
    if y != verdict.deviated_placement:
        return False
    truthful = place(verdict.mechanism, list(instance.locations), list(instance.tops), instance.m)
    welfare = _welfare(instance, verdict.mode)
    for i in verdict.group:
        old, new = welfare(i, truthful), welfare(i, y)
        if verdict.mode is WelfareMode.COST and not new < old:
            return False
        if verdict.mode is WelfareMode.UTILITY and not new > old:
            return False
    return True
