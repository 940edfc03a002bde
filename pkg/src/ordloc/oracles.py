"""Optimal-value baselines.

``exact_optimum_gamma1`` solves the preference-free two-facility problem
exactly by contiguous splits.  ``grid_optimum`` handles any coefficient
vector by exhaustive search over the lattice ``{0, 1/G, ..., 1}^m`` followed
by local refinement, and returns a certified error bound.

Grid evaluation is exact: every location, grid point and coefficient is
scaled to a common integer denominator so that objective values become
integers (int64 when they fit, Python ints otherwise; coordinates follow
the same rule).  The only error
source is the discretisation itself.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .mechanisms import best_split, lower_median
from .model import (
    Instance,
    ModelError,
    ModelKind,
    Objective,
    ONE,
    Placement,
    ZERO,
    objective_value,
)

log = logging.getLogger(__name__)

GRID_GUARD = 10**8
_INT64_HEADROOM = 2**62
_CHUNK = 1 << 22


class OracleBudgetError(ModelError):
    """Raised when a grid search would exceed its enumeration guard."""


@dataclass(frozen=True)
class OracleConfig:
    grid_cells: int = 1000
    refine_rounds: int = 2
    refine_factor: int = 10
    # fine points per refinement round; past this, refinement stops early
    refine_budget: int = 2_000_000

    def __post_init__(self):
        if self.grid_cells < 1:
            raise ModelError("grid_cells must be >= 1")
        if self.refine_rounds < 0:
            raise ModelError("refine_rounds must be >= 0")
        if self.refine_factor < 2:
            raise ModelError("refine_factor must be >= 2")

    @property
    def final_step(self) -> Fraction:
        return Fraction(1, self.grid_cells * self.refine_factor**self.refine_rounds)


@dataclass(frozen=True)
class OracleResult:
    """Best placement found, its exact value and a bound on the gap to OPT.

    For cost objectives ``value - error_bound <= OPT <= value``; for utility
    objectives ``value <= OPT <= value + error_bound``.
    """

    placement: Placement
    value: Fraction
    error_bound: Fraction
    exact: bool
    step: Optional[Fraction] = None
    rounds: int = 0
    evaluated: int = 0
    bounds: Tuple[Fraction, ...] = field(default=(), repr=False)


def evaluate_candidate(instance: Instance, y: Sequence, objective: Objective) -> Fraction:
    """Exact objective value of a given placement."""
    return objective_value(instance, y, objective)


# ---------------------------------------------------------------------------
# exact two-facility optimum without preferences


def exact_optimum_gamma1(locations: Sequence, objective: Objective) -> OracleResult:
    """Exact optimum of the two-facility game in which every agent uses its
    nearest facility (all coefficients equal to 1)."""
    if not locations:
        raise ModelError("exact_optimum_gamma1 needs at least one location")
    s = sorted(Fraction(x) for x in locations)
    n = len(s)
    if objective.is_total:
        i, cost = best_split(s)
        y = (s[0], s[0]) if n == 1 else (lower_median(s[:i]), lower_median(s[i:]))
        value = cost if objective is Objective.TOTAL_COST else n - cost
    else:
        if n == 1:
            y, cost = (s[0], s[0]), ZERO
        else:
            best_i, cost = 1, None
            for i in range(1, n):
                c = max(s[i - 1] - s[0], s[-1] - s[i]) / 2
                if cost is None or c < cost:
                    best_i, cost = i, c
            y = ((s[0] + s[best_i - 1]) / 2, (s[best_i] + s[-1]) / 2)
        value = cost if objective is Objective.MAX_COST else ONE - cost
    return OracleResult(placement=y, value=value, error_bound=ZERO, exact=True)


def is_gamma1(instance: Instance) -> bool:
    """True when every agent is indifferent between the two facilities."""
    if instance.m != 2:
        return False
    neutral = 1 if instance.kind is ModelKind.MULTIPLICATIVE else 0
    return all(a == neutral for a in instance.alpha)


# ---------------------------------------------------------------------------
# certified grid search


def _lcm(values) -> int:
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out


class _ScaledProblem:
    """Integer form of an objective, to be minimised.

    Each agent's loss against facility ``j`` is ``a * |X - Y_j| + b`` with
    ``a >= 0``; the agent's loss is the minimum over facilities, and the
    objective aggregates agents by max or sum.  Utilities are negated.
    """

    def __init__(self, instance: Instance, objective: Objective, finest_cells: int):
        self.instance = instance
        self.objective = objective
        self.m = instance.m
        self.n = instance.n
        self.use_sum = objective.is_total
        self.sign = 1 if objective.is_cost else -1
        mult = instance.kind is ModelKind.MULTIPLICATIVE
        slopes, offsets = [], []
        for a in instance.alpha:
            if objective.is_cost:
                s, t = (a, ZERO) if mult else (ONE, a)
            else:
                s, t = (1 / a, -1 / a) if mult else (ONE, a - 1)
            slopes.append(s)
            offsets.append(t)
        self.lipschitz = max(slopes)
        # D is even and a multiple of every grid denominator, so half-cells are integral
        self.D = _lcm([x.denominator for x in instance.locations] + [2 * finest_cells])
        self.S = _lcm([v.denominator for v in slopes + offsets])
        self.scale = self.S * self.D
        self.slopes = [int(s * self.S) for s in slopes]
        self.offsets = [int(t * self.S * self.D) for t in offsets]
        bound = self.n * (max(self.slopes) * self.D + max(abs(t) for t in self.offsets)) * 4
        self.dtype = np.int64 if bound < _INT64_HEADROOM else object
        self.X = [int(x * self.D) for x in instance.locations]
        # per agent, per facility: (slope, offset) of that facility's rank
        self.coef = []
        for agent in instance.agents:
            rank = {j: k for k, j in enumerate(agent.pref)}
            self.coef.append([(self.slopes[rank[j]], self.offsets[rank[j]]) for j in range(self.m)])

    def to_value(self, loss) -> Fraction:
        return Fraction(int(loss) * self.sign, self.scale)

    def bound_scaled(self, cells: int) -> int:
        """Twice the scaled Lipschitz certificate for grid step 1/cells."""
        per_agent = max(self.slopes) * (self.D // cells)
        return per_agent * (self.n if self.use_sum else 1)

    def certificate(self, cells: int) -> Fraction:
        return self.lipschitz * Fraction(1, 2 * cells) * (self.n if self.use_sum else 1)

    def _aggregate(self, acc, agent_loss):
        if acc is None:
            return agent_loss
        return acc + agent_loss if self.use_sum else np.maximum(acc, agent_loss)

    def eval_points(self, P: np.ndarray, halfwidth: int = 0):
        """Objective loss at points ``P`` (shape ``(N, m)``, scaled coords).

        With ``halfwidth > 0`` returns instead a lower bound of the loss over
        the box of that half-width around each point.
        """
        acc = None
        for X, coef in zip(self.X, self.coef):
            best = None
            for j, (a, b) in enumerate(coef):
                d = np.abs(P[:, j] - X)
                if halfwidth:
                    d = np.maximum(d - halfwidth, 0)
                term = a * d + b
                best = term if best is None else np.minimum(best, term)
            acc = self._aggregate(acc, best)
        return acc

    def eval_product(self, axes: List[np.ndarray]):
        """Objective loss on the product grid ``axes[0] x ... x axes[m-1]``."""
        m = self.m
        acc = None
        for X, coef in zip(self.X, self.coef):
            best = None
            for j, (a, b) in enumerate(coef):
                term = a * np.abs(axes[j] - X) + b
                shape = [1] * m
                shape[j] = term.shape[0]
                term = term.reshape(shape)
                best = term if best is None else np.minimum(best, term)
            best = np.broadcast_to(best, tuple(len(ax) for ax in axes))
            acc = self._aggregate(acc, best)
        return acc


def _lattice(cells: int, step: int, dtype) -> np.ndarray:
    return np.arange(cells + 1, dtype=np.int64).astype(dtype) * step


def _first_min(values) -> int:
    if values.dtype == object:
        best = min(values)
        return int(next(i for i, v in enumerate(values) if v == best))
    return int(np.argmin(values))


def _unique_rows(P: np.ndarray, top: int) -> np.ndarray:
    """Distinct rows of ``P`` (entries in ``0..top``) in lexicographic order."""
    if P.dtype == object:
        rows = sorted(set(map(tuple, P)))
        return np.array(rows, dtype=object).reshape(len(rows), P.shape[1])
    base = top + 1
    if base ** P.shape[1] >= 2**63:
        return np.unique(P, axis=0)
    # one integer key per row is far faster than np.unique(axis=0)
    key = np.zeros(P.shape[0], dtype=np.int64)
    for j in range(P.shape[1]):
        key = key * base + P[:, j]
    key = np.unique(key)
    out = np.empty((key.size, P.shape[1]), dtype=np.int64)
    for j in range(P.shape[1] - 1, -1, -1):
        key, out[:, j] = np.divmod(key, base)
    return out


def grid_optimum(instance: Instance, objective: Objective, config: OracleConfig = OracleConfig()) -> OracleResult:
    """Certified grid search for any coefficient vector and model kind.

    Round 0 evaluates every point of ``{0, 1/G, ..., 1}^m``.  Each refinement
    round re-grids, at step ``delta / refine_factor``, the cells whose exact
    box lower bound is below the incumbent minus the final certificate; an
    optimum in any other cell already satisfies the final bound.
    The reported bound is the Lipschitz certificate of the final step.
    """
    G, f, m = config.grid_cells, config.refine_factor, instance.m
    if G**m > GRID_GUARD:
        raise OracleBudgetError(f"grid of {G}^{m} points exceeds the guard of {GRID_GUARD}")
    finest = G * f**config.refine_rounds
    prob = _ScaledProblem(instance, objective, finest)
    dtype = prob.dtype

    # round 0: full product grid, chunked along the first axis
    step = prob.D // G
    axis = _lattice(G, step, dtype)
    rows = max(1, _CHUNK // (G + 1) ** (m - 1))
    keep = (G + 1) ** m <= 4 * _CHUNK

    def chunks():
        for start in range(0, G + 1, rows):
            axes = [axis[start:start + rows]] + [axis] * (m - 1)
            yield start, np.ascontiguousarray(prob.eval_product(axes)).reshape(-1)

    best_val, best_idx = None, None
    evaluated = 0
    stored = []
    for start, vals in chunks():
        evaluated += vals.size
        k = _first_min(vals)
        if best_val is None or vals[k] < best_val:
            best_val = vals[k]
            best_idx = (start * (G + 1) ** (m - 1) + k)
        if keep:
            stored.append((start, vals))

    # survivors of round 0: points whose cell may still hold an optimum
    cells = G
    slack = prob.bound_scaled(cells)
    survivors = []
    for start, vals in (stored if keep else chunks()):
        flat = np.nonzero(2 * vals <= 2 * best_val + slack)[0] + start * (G + 1) ** (m - 1)
        survivors.append(np.stack(np.unravel_index(flat, (G + 1,) * m), axis=1))
    del stored
    pts = np.concatenate(survivors).astype(dtype) * step
    best_point = np.array(np.unravel_index(best_idx, (G + 1,) * m), dtype=np.int64).astype(dtype) * step
    bounds = [prob.certificate(cells)]
    rounds = 0
    final_slack = prob.bound_scaled(finest)

    for _ in range(config.refine_rounds):
        half = prob.D // (2 * cells)
        lower = prob.eval_points(pts, halfwidth=half)
        # a cell with lower >= best - final_slack cannot hide an optimum that
        # would break the final certificate, so only cheaper cells are refined
        pts = pts[2 * lower < 2 * best_val - final_slack]
        new_cells = cells * f
        new_step = prob.D // new_cells
        h = (f + 1) // 2
        offsets = np.arange(-h, h + 1, dtype=np.int64).astype(dtype) * new_step
        n_off = offsets.size**m
        if pts.shape[0] * n_off > config.refine_budget:
            log.info("refinement stopped after %d rounds: %d live cells", rounds, pts.shape[0])
            break
        grids = np.stack(np.meshgrid(*([offsets] * m), indexing="ij"), axis=-1).reshape(-1, m)
        cand = (pts[:, None, :] + grids[None, :, :]).reshape(-1, m)
        cand = cand[np.all((cand >= 0) & (cand <= prob.D), axis=1)]
        cand = _unique_rows(np.concatenate([cand, best_point[None, :]]), prob.D)
        vals = prob.eval_points(cand)
        evaluated += vals.size
        k = _first_min(vals)
        if vals[k] <= best_val:
            # lexicographic tie-break within the finer lattice
            best_val, best_point = vals[k], cand[k]
        cells = new_cells
        slack = prob.bound_scaled(cells)
        pts = cand[2 * vals <= 2 * best_val + slack]
        bounds.append(prob.certificate(cells))
        rounds += 1

    placement = tuple(Fraction(int(v), prob.D) for v in best_point)
    value = prob.to_value(best_val)
    return OracleResult(
        placement=placement,
        value=value,
        error_bound=bounds[-1],
        exact=False,
        step=Fraction(1, cells),
        rounds=rounds,
        evaluated=evaluated,
        bounds=tuple(bounds),
    )


# ---------------------------------------------------------------------------
# brackets on OPT


@dataclass(frozen=True)
class OptBracket:
    lo: Fraction
    hi: Fraction
    source: str
    result: OracleResult


def optimum_bracket(instance: Instance, objective: Objective, config: OracleConfig = OracleConfig()) -> OptBracket:
    """Interval guaranteed to contain the optimum value.

    Uses the exact split oracle when agents are indifferent between
    facilities.  Otherwise combines the grid certificate with two facts that
    hold for any coefficients: OPT lies in ``[0, n]`` (or ``[0, 1]`` for the
    bottleneck objectives) on the relevant side, and with two facilities a
    cost optimum is at least, and a utility optimum at most, the
    preference-free optimum.
    """
    if is_gamma1(instance):
        res = exact_optimum_gamma1(instance.locations, objective)
        return OptBracket(res.value, res.value, "exact", res)
    res = grid_optimum(instance, objective, config)
    if objective.is_cost:
        lo, hi = max(res.value - res.error_bound, ZERO), res.value
        if instance.m == 2:
            lo = max(lo, exact_optimum_gamma1(instance.locations, objective).value)
    else:
        cap = Fraction(instance.n) if objective.is_total else ONE
        lo, hi = res.value, min(res.value + res.error_bound, cap)
        if instance.m == 2:
            hi = min(hi, exact_optimum_gamma1(instance.locations, objective).value)
    return OptBracket(lo, hi, "grid", res)
