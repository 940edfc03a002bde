"""Instance generators, the catalog of lower-bound profiles, replays and
approximation-ratio sweeps."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from .audit import AuditVerdict, DeviationSpace, WelfareMode, audit_sp
from .mechanisms import MechanismId, place, run_mechanism
from .model import (
    INF,
    Agent,
    Instance,
    ModelError,
    ModelKind,
    Objective,
    Placement,
    agent_cost,
    agent_utility,
    performance_ratio,
    ranking_from,
    to_fraction,
)
from .oracles import OracleConfig, grid_optimum, optimum_bracket, evaluate_candidate

LOCATION_DENOMINATOR = 10**6
DEFAULT_EPSILON = Fraction(1, 1000)


class LocationLaw(enum.Enum):
    UNIFORM = "uniform"
    TWO_CLUSTERS = "two-clusters"
    ENDPOINTS = "endpoints"


class PreferenceLaw(enum.Enum):
    IID_UNIFORM = "iid"
    BLOCKWISE = "blockwise"


@dataclass(frozen=True)
class GeneratorSpec:
    """Recipe for random instances.

    ``n_max`` and ``alpha_max`` turn the agent count and the last coefficient
    into per-trial random draws from ``[n, n_max]`` and
    ``[alpha[-1], alpha_max]`` (the latter on a 1/1000 lattice, m = 2 only).
    """

    n: int
    m: int = 2
    location_law: LocationLaw = LocationLaw.UNIFORM
    gap: Fraction = Fraction(1, 2)
    preference_law: PreferenceLaw = PreferenceLaw.IID_UNIFORM
    alpha: Tuple[Fraction, ...] = (Fraction(1), Fraction(2))
    kind: ModelKind = ModelKind.MULTIPLICATIVE
    seed: int = 0
    n_max: Optional[int] = None
    alpha_max: Optional[Fraction] = None

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(to_fraction(a) for a in self.alpha))
        object.__setattr__(self, "gap", to_fraction(self.gap))
        if self.alpha_max is not None:
            object.__setattr__(self, "alpha_max", to_fraction(self.alpha_max))
        if self.n < 1 or (self.n_max is not None and self.n_max < self.n):
            raise ModelError("agent count must satisfy 1 <= n <= n_max")
        if len(self.alpha) != self.m:
            raise ModelError(f"alpha has {len(self.alpha)} entries for m={self.m}")
        if not 0 <= self.gap < 1:
            raise ModelError("two-cluster gap must lie in [0, 1)")
        if self.seed < 0:
            raise ModelError("seed must be nonnegative")
        if self.alpha_max is not None and (self.m != 2 or self.alpha_max < self.alpha[-1]):
            raise ModelError("alpha_max needs m = 2 and alpha_max >= alpha_2")
        # validates the coefficient vector for the model kind
        Instance(self.alpha, (Agent(Fraction(0), tuple(range(self.m))),), self.kind)


def generate(spec: GeneratorSpec, trial: int = 0) -> Instance:
    """Draw one instance; deterministic in ``(spec.seed, trial)``."""
    rng = np.random.default_rng([spec.seed, trial])
    n = spec.n if spec.n_max is None else int(rng.integers(spec.n, spec.n_max + 1))
    alpha = spec.alpha
    if spec.alpha_max is not None:
        lo, hi = int(alpha[1] * 1000), int(spec.alpha_max * 1000)
        alpha = (alpha[0], Fraction(int(rng.integers(lo, hi + 1)), 1000))
    D = LOCATION_DENOMINATOR
    if spec.location_law is LocationLaw.UNIFORM:
        ks = rng.integers(0, D + 1, size=n)
    elif spec.location_law is LocationLaw.ENDPOINTS:
        ks = rng.integers(0, 2, size=n) * D
    else:
        width = int((1 - spec.gap) / 2 * D)
        ks = rng.integers(0, width + 1, size=n)
        right = rng.integers(0, 2, size=n).astype(bool)
        ks = np.where(right, D - ks, ks)
    xs = [Fraction(int(k), D) for k in ks]
    m = spec.m
    if spec.preference_law is PreferenceLaw.IID_UNIFORM:
        prefs = [tuple(int(j) for j in rng.permutation(m)) for _ in range(n)]
    else:
        order = sorted(range(n), key=lambda i: (xs[i], i))
        prefs = [None] * n
        for j, block in enumerate(np.array_split(np.array(order, dtype=np.int64), m)):
            for i in block:
                prefs[int(i)] = ranking_from(j, m)
    return Instance(alpha, tuple(Agent(x, p) for x, p in zip(xs, prefs)), spec.kind)


# ---------------------------------------------------------------------------
# catalog


@dataclass(frozen=True)
class Reference:
    """A closed-form optimum: ``value`` of ``objective`` attained at ``placement``."""

    instance: Instance
    objective: Objective
    placement: Placement
    value: Fraction
    label: str
    optimal: bool = True


@dataclass(frozen=True)
class MechanismReference:
    mechanism: MechanismId
    objective: Objective
    value: Fraction


@dataclass(frozen=True)
class ProofDeviation:
    """Misreport used in a lower-bound argument, applied to ``instance``."""

    instance: Instance
    agent: int
    misreport: Tuple[Fraction, Tuple[int, ...]]
    mode: WelfareMode
    note: str


@dataclass(frozen=True)
class CatalogEntry:
    key: str
    description: str
    params: Dict[str, Fraction]
    instance: Instance
    references: Tuple[Reference, ...]
    mechanism_refs: Tuple[MechanismReference, ...] = ()
    deviation: Optional[ProofDeviation] = None
    agent_costs: Optional[Tuple[Fraction, ...]] = None


def _two(locations, tops, alpha) -> Instance:
    return Instance.build(locations, tops, (1, alpha))


def _ref(instance, objective, placement, value, label, optimal=True) -> Reference:
    placement = tuple(to_fraction(v) for v in placement)
    return Reference(instance, objective, placement, to_fraction(value), label, optimal)


def _need(cond: bool, key: str, msg: str) -> None:
    if not cond:
        raise ModelError(f"{key}: {msg}")


def _pref_deviation(instance, agent, top, mode, note) -> ProofDeviation:
    a = instance.agents[agent]
    return ProofDeviation(instance, agent, (a.x, ranking_from(top, instance.m)), mode, note)


def _worked_example(alpha, eps, n):
    _need(alpha == 3, "s2", "the worked example is defined for alpha = 3 only")
    inst = _two([0, Fraction(2, 5), 1], [0, 1, 0], alpha)
    y = (Fraction(1, 5), Fraction(4, 5))
    costs = (Fraction(1, 5), Fraction(2, 5), Fraction(3, 5))
    refs = (
        _ref(inst, Objective.MAX_COST, y, Fraction(3, 5), "max cost of the worked placement", False),
        _ref(inst, Objective.TOTAL_COST, y, Fraction(6, 5), "total cost of the worked placement", False),
    )
    return "three agents, placement (1/5, 4/5); costs 1/5, 2/5, 3/5", {"alpha": alpha}, inst, refs, (), None, costs


def _edge_pairs(key, objective):
    def build(alpha, eps, n):
        _need(0 < eps and 2 * alpha * eps < 1, key, "epsilon must satisfy 0 < 2*alpha*epsilon < 1")
        inst = _two([0, eps, 1 - eps, 1], [0, 0, 1, 1], alpha)
        if objective is Objective.MAX_COST:
            ref = _ref(inst, objective, (eps / 2, 1 - eps / 2), eps / 2, "optimal max cost epsilon/2")
            desc = "pairs near both ends; max cost"
        else:
            ref = _ref(inst, objective, (0, 1), 2 * eps, "optimal total cost 2*epsilon")
            desc = "pairs near both ends; total cost"
        dev = _pref_deviation(inst, 1, 1, WelfareMode.COST, "agent 2 reports F2 on top to pull F1 closer")
        return desc, {"alpha": alpha, "epsilon": eps}, inst, (ref,), (), dev, None

    return build


def _t37(alpha, eps, n):
    _need(1 < alpha < 2, "t3.7", "requires 1 < alpha < 2")
    x = 1 - 1 / alpha
    inst = _two([0, 0, x, 1], [0, 0, 0, 1], alpha)
    swapped = _two([0, 0, x, 1], [1, 0, 0, 1], alpha)
    refs = (
        _ref(inst, Objective.MIN_UTILITY, (x / 2, 1), 1 - x / 2, "optimal min utility 1 - x/2"),
        _ref(swapped, Objective.MIN_UTILITY, (0, 1), 1 / alpha, "after agent 1 swaps: optimal min utility 1/alpha"),
    )
    dev = _pref_deviation(inst, 0, 1, WelfareMode.UTILITY, "agent 1 reports F2 on top")
    return "three agents favour F1, one favours F2; min utility", {"alpha": alpha, "x": x}, inst, refs, (), dev, None


def _t39(alpha, eps, n):
    _need(alpha >= 1, "t3.9", "requires alpha >= 1")
    s = 1 / (3 * (alpha + 1))
    xs = [0, s, 2 * s, 3 * s, 1, 1]
    inst = _two(xs, [1, 0, 0, 0, 1, 1], alpha)
    mixed = _two(xs, [1, 0, 0, 1, 1, 1], alpha)
    value = 5 - 2 * s + (1 - 2 * s) / alpha
    refs = (_ref(inst, Objective.TOTAL_UTILITY, (2 * s, 1), value, "optimal total utility 5 - 2s + (1-2s)/alpha"),)
    dev = _pref_deviation(mixed, 3, 0, WelfareMode.UTILITY, "agent 4 reports F1 on top")
    return "staircase of four agents plus two at 1; total utility", {"alpha": alpha, "s": s}, inst, refs, (), dev, None


def _t43(alpha, eps, n):
    n = 4 if n is None else n
    _need(n >= 4 and n % 2 == 0, "t4.3", "requires an even n >= 4")
    _need(0 < eps and 2 * alpha * eps < 1, "t4.3", "epsilon must satisfy 0 < 2*alpha*epsilon < 1")
    xs = [0] + [eps] * (n - 2) + [1]
    tops = [0] * (n // 2) + [1] * (n // 2)
    inst = _two(xs, tops, alpha)
    refs = (_ref(inst, Objective.TOTAL_COST, (eps, 1), eps, "optimal total cost epsilon"),)
    mech = (
        MechanismReference(MechanismId.EXTREMES, Objective.TOTAL_COST, (alpha + 1) * (n - 2) * eps / 2),
        MechanismReference(MechanismId.EXTREMES, Objective.MAX_COST, alpha * eps),
    )
    desc = "three locations, n-2 agents at epsilon; extremes placement"
    return desc, {"alpha": alpha, "epsilon": eps, "n": Fraction(n)}, inst, refs, mech, None, None


def _t46(alpha, eps, n):
    _need(alpha >= 3, "t4.6", "requires alpha >= 3")
    inst = _two([0, Fraction(1, 2), 1], [0, 1, 0], alpha)
    refs = (_ref(inst, Objective.MIN_UTILITY, (Fraction(1, 2), Fraction(1, 2)), Fraction(1, 2), "optimal min utility 1/2"),)
    return "agents at 0, 1/2, 1 with the middle one favouring F2", {"alpha": alpha}, inst, refs, (), None, None


def _t47(alpha, eps, n):
    _need(1 <= alpha < 3, "t4.7", "requires 1 <= alpha < 3")
    inst = _two([0, Fraction(1, 2), 1], [0, 0, 1], alpha)
    refs = (_ref(inst, Objective.MIN_UTILITY, (Fraction(1, 4), 1), Fraction(3, 4), "optimal min utility 3/4"),)
    return "agents at 0, 1/2, 1 with the right one favouring F2", {"alpha": alpha}, inst, refs, (), None, None


def _t48(alpha, eps, n):
    _need(alpha > 1, "t4.8", "requires alpha > 1")
    t = min(1 / (3 * alpha), 1 - 1 / alpha)
    tp = t - eps
    _need(tp > 0, "t4.8", "epsilon must be smaller than t")
    inst = _two([0, tp, 1 - tp, 1], [0, 0, 0, 0], alpha)
    moved = _two([0, tp, 1, 1], [0, 0, 0, 0], alpha)
    refs = (
        _ref(inst, Objective.TOTAL_UTILITY, (0, 1), 2 - tp + (2 - tp) / alpha, "optimal total utility 2 - t' + (2-t')/alpha"),
        _ref(moved, Objective.TOTAL_UTILITY, (1, 0), 2 + (2 - tp) / alpha, "after agent 3 moves to 1: 2 + (2-t')/alpha"),
    )
    a3 = inst.agents[2]
    dev = ProofDeviation(inst, 2, (Fraction(1), a3.pref), WelfareMode.UTILITY, "agent 3 reports location 1")
    params = {"alpha": alpha, "epsilon": eps, "t": t, "t_prime": tp}
    return "symmetric four agents all favouring F1; total utility", params, inst, refs, (), dev, None


def _example1(alpha, eps, n):
    inst = _two([0, 0, 0, 1], [0, 1, 1, 1], alpha)
    refs = (_ref(inst, Objective.TOTAL_COST, (0, 1), 0, "optimal total cost 0"),)
    mech = (MechanismReference(MechanismId.MEDIAN_PER_FACILITY, Objective.TOTAL_COST, Fraction(1)),)
    return "median per preference group is unbounded", {"alpha": alpha}, inst, refs, mech, None, None


_BUILDERS: Dict[str, Tuple[Callable, Fraction]] = {
    "s2": (_worked_example, Fraction(3)),
    "t3.2": (_edge_pairs("t3.2", Objective.MAX_COST), Fraction(3)),
    "t3.5": (_edge_pairs("t3.5", Objective.TOTAL_COST), Fraction(3)),
    "t3.7": (_t37, Fraction(3, 2)),
    "t3.9": (_t39, Fraction(2)),
    "t4.3": (_t43, Fraction(2)),
    "t4.6": (_t46, Fraction(3)),
    "t4.7": (_t47, Fraction(3, 2)),
    "t4.8": (_t48, Fraction(2)),
    "ex1": (_example1, Fraction(2)),
}


def catalog_keys() -> List[str]:
    return list(_BUILDERS)


def build_entry(key: str, alpha=None, epsilon=DEFAULT_EPSILON, n: Optional[int] = None) -> CatalogEntry:
    """Construct one catalog entry; the reference values are checked against
    exact evaluation before the entry is returned."""
    if key not in _BUILDERS:
        raise ModelError(f"unknown catalog id {key!r}; known: {', '.join(_BUILDERS)}")
    builder, default_alpha = _BUILDERS[key]
    alpha = default_alpha if alpha is None else to_fraction(alpha)
    epsilon = to_fraction(epsilon)
    _need(alpha >= 1, key, "alpha must be >= 1")
    desc, params, inst, refs, mech, dev, costs = builder(alpha, epsilon, n)
    for ref in refs:
        got = evaluate_candidate(ref.instance, ref.placement, ref.objective)
        _need(got == ref.value, key, f"closed form {ref.value} disagrees with evaluation {got} ({ref.label})")
    entry = CatalogEntry(key, desc, params, inst, refs, mech, dev, costs)
    return entry


def catalog(alpha=None, epsilon=DEFAULT_EPSILON) -> List[CatalogEntry]:
    """Every entry constructible for the given alpha (entries whose validity
    range excludes it are skipped)."""
    out = []
    for key in _BUILDERS:
        try:
            out.append(build_entry(key, alpha, epsilon))
        except ModelError:
            if alpha is None:
                raise
    return out


# ---------------------------------------------------------------------------
# replay


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str = ""


@dataclass(frozen=True)
class ReplayReport:
    entry: CatalogEntry
    checks: Tuple[Check, ...]
    mechanism: Optional[MechanismId] = None
    deviation_verdict: Optional[AuditVerdict] = None
    narrative_profitable: Optional[bool] = None

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)


def _narrative_gain(mech: MechanismId, dev: ProofDeviation) -> bool:
    inst = dev.instance
    xs, tops = list(inst.locations), list(inst.tops)
    truthful = place(mech, xs, tops, inst.m)
    xs[dev.agent], tops[dev.agent] = dev.misreport[0], dev.misreport[1][0]
    deviated = place(mech, xs, tops, inst.m)
    if dev.mode is WelfareMode.COST:
        return agent_cost(inst, dev.agent, deviated) < agent_cost(inst, dev.agent, truthful)
    return agent_utility(inst, dev.agent, deviated) > agent_utility(inst, dev.agent, truthful)


def replay(entry: CatalogEntry, mechanism: Optional[MechanismId] = None, config: OracleConfig = OracleConfig()) -> ReplayReport:
    """Re-derive an entry's closed forms, bracket them with the grid oracle
    and, given a mechanism, test the entry's misreport against it."""
    checks: List[Check] = []
    for ref in entry.references:
        got = evaluate_candidate(ref.instance, ref.placement, ref.objective)
        checks.append(Check(f"closed form: {ref.label}", got == ref.value, f"evaluated {got}, expected {ref.value}"))
        if not ref.optimal:
            continue
        res = grid_optimum(ref.instance, ref.objective, config)
        if ref.objective.is_cost:
            inside = res.value - res.error_bound <= ref.value <= res.value
        else:
            inside = res.value <= ref.value <= res.value + res.error_bound
        checks.append(
            Check(
                f"grid bracket: {ref.label}",
                inside,
                f"grid value {res.value} +/- {res.error_bound} at step {res.step}",
            )
        )
    if entry.agent_costs is not None:
        ref = entry.references[0]
        costs = tuple(agent_cost(ref.instance, i, ref.placement) for i in range(ref.instance.n))
        checks.append(Check("per-agent costs", costs == entry.agent_costs, f"got {costs}"))
    verdict = narrative = None
    if mechanism is not None:
        y = run_mechanism(mechanism, entry.instance)
        for mref in entry.mechanism_refs:
            if mref.mechanism is mechanism:
                got = evaluate_candidate(entry.instance, y, mref.objective)
                checks.append(Check(f"{mechanism.value} {mref.objective.value}", got == mref.value, f"got {got}, expected {mref.value}"))
        dev = entry.deviation
        if dev is not None:
            x_new, pref_new = dev.misreport
            a = dev.instance.agents[dev.agent]
            if x_new == a.x:
                space = DeviationSpace(prefs=True, locations=False)
            else:
                space = DeviationSpace(prefs=False, locations=True, explicit=(x_new,))
            verdict = audit_sp(mechanism, dev.instance, space, dev.mode, agents=[dev.agent])
            narrative = _narrative_gain(mechanism, dev)
    return ReplayReport(entry, tuple(checks), mechanism, verdict, narrative)


# ---------------------------------------------------------------------------
# ratio sweeps


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    instance: Instance
    placement: Placement
    value: Fraction
    opt_lo: Fraction
    opt_hi: Fraction
    ratio_lo: object
    ratio_hi: object
    source: str


def ratio_bracket(value: Fraction, opt_lo: Fraction, opt_hi: Fraction, objective: Objective):
    if objective.is_cost:
        return performance_ratio(value, opt_hi, objective), performance_ratio(value, opt_lo, objective)
    return performance_ratio(value, opt_lo, objective), performance_ratio(value, opt_hi, objective)


def evaluate_trial(mechanism: MechanismId, objective: Objective, instance: Instance, config: OracleConfig, trial: int = 0) -> TrialRecord:
    y = run_mechanism(mechanism, instance)
    value = evaluate_candidate(instance, y, objective)
    br = optimum_bracket(instance, objective, config)
    lo, hi = ratio_bracket(value, br.lo, br.hi, objective)
    return TrialRecord(trial, instance, y, value, br.lo, br.hi, lo, hi, br.source)


@dataclass(frozen=True)
class RatioReport:
    mechanism: MechanismId
    objective: Objective
    trials: int
    worst: TrialRecord
    mean_midpoint: object
    records: Tuple[TrialRecord, ...] = field(repr=False, default=())

    @property
    def worst_bracket(self):
        return (self.worst.ratio_lo, self.worst.ratio_hi)


def _worse(a: TrialRecord, b: TrialRecord) -> bool:
    return (a.ratio_hi, a.ratio_lo) > (b.ratio_hi, b.ratio_lo)


def estimate_ratio(
    mechanism: MechanismId,
    objective: Objective,
    spec: GeneratorSpec,
    trials: int,
    config: OracleConfig = OracleConfig(),
) -> RatioReport:
    if trials < 1:
        raise ModelError("trials must be >= 1")
    records = []
    worst = None
    for t in range(trials):
        rec = evaluate_trial(mechanism, objective, generate(spec, t), config, t)
        records.append(rec)
        if worst is None or _worse(rec, worst):
            worst = rec
    mids = [(r.ratio_lo + r.ratio_hi) / 2 for r in records]
    mean = INF if any(m == INF for m in mids) else sum(mids) / len(mids)
    return RatioReport(mechanism, objective, trials, worst, mean, tuple(records))


@dataclass(frozen=True)
class BoundCheck:
    passed: bool
    bound: Fraction
    worst: TrialRecord
    violations: Tuple[TrialRecord, ...]
    certified: bool


def verify_upper_bound(
    mechanism: MechanismId,
    objective: Objective,
    bound,
    spec: GeneratorSpec,
    trials: int,
    config: OracleConfig = OracleConfig(),
) -> BoundCheck:
    """Check a claimed approximation bound on random instances.

    A trial fails only when its whole ratio bracket lies above ``bound``
    (``ratio_hi > bound`` plus the bracket width coming from the oracle
    certificate).  ``certified`` additionally reports whether every upper
    end stays within the bound.
    """
    bound = to_fraction(bound)
    report = estimate_ratio(mechanism, objective, spec, trials, config)
    violations = tuple(r for r in report.records if r.ratio_lo > bound)
    certified = all(r.ratio_hi <= bound for r in report.records)
    return BoundCheck(not violations, bound, report.worst, violations, certified)
