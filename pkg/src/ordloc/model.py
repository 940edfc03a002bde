"""Agents, instances and the cost/utility formulas.

Everything here works on :class:`fractions.Fraction` so that equalities and
strict improvements are decided exactly.  Facility indices are 0-based
internally; the CLI converts to the 1-based labels F1, F2, ...
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Tuple, Union

Number = Union[Fraction, int, str]
Placement = Tuple[Fraction, ...]

INF = math.inf

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)


class ModelError(ValueError):
    """Raised for malformed instances, placements or numeric inputs."""


class ModelKind(enum.Enum):
    MULTIPLICATIVE = "multiplicative"
    ADDITIVE = "additive"


class Objective(enum.Enum):
    MAX_COST = "maxcost"
    TOTAL_COST = "totalcost"
    MIN_UTILITY = "minutility"
    TOTAL_UTILITY = "totalutility"

    @property
    def is_cost(self) -> bool:
        return self in (Objective.MAX_COST, Objective.TOTAL_COST)

    @property
    def is_total(self) -> bool:
        return self in (Objective.TOTAL_COST, Objective.TOTAL_UTILITY)


def to_fraction(value) -> Fraction:
    """Parse ``value`` as an exact rational.

    Accepts Fractions, ints, and strings such as ``"2/5"``, ``"0.4"`` or
    ``"1e-3"``.  Floats are converted through their shortest repr, so ``0.4``
    becomes ``2/5`` rather than the nearest binary double.
    """
    if isinstance(value, bool):
        raise ModelError(f"not a number: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ModelError(f"not a finite number: {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ModelError(f"cannot parse {value!r} as a rational") from exc
    raise ModelError(f"not a number: {value!r}")


def format_fraction(value: Fraction) -> str:
    """Render as ``p/q`` (or ``p`` for integers)."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class Agent:
    """An agent at ``x`` whose k-th favourite facility is ``pref[k]``."""

    x: Fraction
    pref: Tuple[int, ...]

    @property
    def top(self) -> int:
        return self.pref[0]


@dataclass(frozen=True)
class Instance:
    """A profile of agents plus the rank-indexed coefficient vector."""

    alpha: Tuple[Fraction, ...]
    agents: Tuple[Agent, ...]
    kind: ModelKind = ModelKind.MULTIPLICATIVE

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(to_fraction(a) for a in self.alpha))
        object.__setattr__(
            self, "agents", tuple(Agent(to_fraction(a.x), tuple(a.pref)) for a in self.agents)
        )
        m = len(self.alpha)
        if m < 1:
            raise ModelError("alpha must have at least one entry")
        alpha = self.alpha
        if any(a > b for a, b in zip(alpha, alpha[1:])):
            raise ModelError(f"alpha must be nondecreasing, got {_fmt_vec(alpha)}")
        if self.kind is ModelKind.MULTIPLICATIVE:
            if alpha[0] != 1:
                raise ModelError("multiplicative model requires alpha_1 = 1")
        else:
            if alpha[0] != 0 or alpha[-1] > 1:
                raise ModelError("additive model requires 0 = alpha_1 <= ... <= alpha_m <= 1")
        if not self.agents:
            raise ModelError("an instance needs at least one agent")
        expected = set(range(m))
        for i, agent in enumerate(self.agents):
            if not 0 <= agent.x <= 1:
                raise ModelError(f"agent {i}: location {agent.x} outside [0, 1]")
            if len(agent.pref) != m or set(agent.pref) != expected:
                raise ModelError(f"agent {i}: preference {agent.pref} is not a ranking of {m} facilities")

    @classmethod
    def build(
        cls,
        locations: Iterable[Number],
        prefs: Iterable,
        alpha: Sequence[Number],
        kind: ModelKind = ModelKind.MULTIPLICATIVE,
    ) -> "Instance":
        """Convenience constructor.

        ``prefs`` entries may be full rankings or, for brevity, a single top
        choice; the remaining facilities then follow in ascending order.
        """
        alpha = tuple(to_fraction(a) for a in alpha)
        m = len(alpha)
        agents = []
        locations, prefs = list(locations), list(prefs)
        if len(locations) != len(prefs):
            raise ModelError(f"{len(locations)} locations but {len(prefs)} preferences")
        for x, p in zip(locations, prefs):
            agents.append(Agent(to_fraction(x), ranking_from(p, m)))
        return cls(alpha, tuple(agents), kind)

    @property
    def n(self) -> int:
        return len(self.agents)

    @property
    def m(self) -> int:
        return len(self.alpha)

    @property
    def locations(self) -> Tuple[Fraction, ...]:
        return tuple(a.x for a in self.agents)

    @property
    def tops(self) -> Tuple[int, ...]:
        return tuple(a.top for a in self.agents)

    def with_agent(self, i: int, agent: Agent) -> "Instance":
        agents = list(self.agents)
        agents[i] = agent
        return Instance(self.alpha, tuple(agents), self.kind)

    def reflected(self) -> "Instance":
        return Instance(self.alpha, tuple(Agent(1 - a.x, a.pref) for a in self.agents), self.kind)


def ranking_from(pref, m: int) -> Tuple[int, ...]:
    """Normalise a 0-based top choice or full ranking into a ranking tuple."""
    if isinstance(pref, int) and not isinstance(pref, bool):
        if not 0 <= pref < m:
            raise ModelError(f"facility index {pref} out of range for m={m}")
        return (pref,) + tuple(j for j in range(m) if j != pref)
    ranking = tuple(int(j) for j in pref)
    if len(ranking) == 1 and m > 1:
        return ranking_from(ranking[0], m)
    return ranking


def check_placement(instance: Instance, y: Sequence[Number]) -> Placement:
    y = tuple(to_fraction(v) for v in y)
    if len(y) != instance.m:
        raise ModelError(f"placement has {len(y)} coordinates, instance has m={instance.m}")
    for j, v in enumerate(y):
        if not 0 <= v <= 1:
            raise ModelError(f"facility {j + 1} at {v} outside [0, 1]")
    return y


def _fmt_vec(v) -> str:
    return "(" + ", ".join(format_fraction(a) for a in v) + ")"


def _agent(instance: Instance, i: int) -> Agent:
    if not 0 <= i < instance.n:
        raise IndexError(f"agent index {i} out of range for n={instance.n}")
    return instance.agents[i]


def _cost(kind: ModelKind, alpha, x: Fraction, pref, y) -> Fraction:
    if kind is ModelKind.MULTIPLICATIVE:
        return min(a * abs(x - y[j]) for a, j in zip(alpha, pref))
    return min(abs(x - y[j]) + a for a, j in zip(alpha, pref))


def _utility(kind: ModelKind, alpha, x: Fraction, pref, y) -> Fraction:
    if kind is ModelKind.MULTIPLICATIVE:
        return max((1 - abs(x - y[j])) / a for a, j in zip(alpha, pref))
    return max(1 - abs(x - y[j]) - a for a, j in zip(alpha, pref))


def agent_cost(instance: Instance, i: int, y: Sequence[Number]) -> Fraction:
    """Cost of agent ``i``: the best rank-weighted distance to any facility."""
    agent = _agent(instance, i)
    y = check_placement(instance, y)
    return _cost(instance.kind, instance.alpha, agent.x, agent.pref, y)


def agent_utility(instance: Instance, i: int, y: Sequence[Number]) -> Fraction:
    """Utility of agent ``i``: the best rank-discounted closeness to any facility."""
    agent = _agent(instance, i)
    y = check_placement(instance, y)
    return _utility(instance.kind, instance.alpha, agent.x, agent.pref, y)


def serving_facility(instance: Instance, i: int, y: Sequence[Number], objective: Objective) -> int:
    """Lowest facility index attaining agent ``i``'s cost (or utility)."""
    agent = _agent(instance, i)
    y = check_placement(instance, y)
    kind, alpha = instance.kind, instance.alpha
    rank = {j: k for k, j in enumerate(agent.pref)}

    def term(j):
        a, d = alpha[rank[j]], abs(agent.x - y[j])
        if objective.is_cost:
            return a * d if kind is ModelKind.MULTIPLICATIVE else d + a
        return -((1 - d) / a) if kind is ModelKind.MULTIPLICATIVE else -(1 - d - a)

    return min(range(instance.m), key=lambda j: (term(j), j))


def welfare_values(instance: Instance, y: Sequence[Number], cost: bool) -> Tuple[Fraction, ...]:
    y = check_placement(instance, y)
    f = _cost if cost else _utility
    kind, alpha = instance.kind, instance.alpha
    return tuple(f(kind, alpha, a.x, a.pref, y) for a in instance.agents)


def objective_value(instance: Instance, y: Sequence[Number], objective: Objective) -> Fraction:
    values = welfare_values(instance, y, objective.is_cost)
    if objective is Objective.TOTAL_COST or objective is Objective.TOTAL_UTILITY:
        return sum(values, ZERO)
    if objective is Objective.MAX_COST:
        return max(values)
    return min(values)


def nearest_distance(x: Fraction, y: Sequence[Fraction]) -> Fraction:
    return min(abs(x - v) for v in y)


def performance_ratio(mech_value, opt_value, objective: Objective):
    """Mechanism-vs-optimum ratio, oriented so that 1 is best.

    Returns ``math.inf`` when the denominator vanishes but the numerator
    does not, and 1 when both vanish.
    """
    mech_value, opt_value = to_fraction(mech_value), to_fraction(opt_value)
    if mech_value < 0 or opt_value < 0:
        raise ModelError("performance_ratio expects nonnegative values")
    num, den = (mech_value, opt_value) if objective.is_cost else (opt_value, mech_value)
    if den == 0:
        return ONE if num == 0 else INF
    return num / den
