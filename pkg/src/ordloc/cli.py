"""Command-line front end.

Exit codes: 0 success, 1 a replay check failed, 2 usage or input error,
3 an audit found a violation, 4 a sweep broke its ``--verify-bound``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

from .audit import AuditVerdict, DeviationSpace, WelfareMode, audit_gsp, revalidate
from .experiments import (
    DEFAULT_EPSILON,
    GeneratorSpec,
    LocationLaw,
    PreferenceLaw,
    build_entry,
    catalog,
    evaluate_trial,
    generate,
    replay,
)
from .mechanisms import MechanismId, run_mechanism
from .model import (
    Agent,
    Instance,
    ModelError,
    ModelKind,
    Objective,
    check_placement,
    format_fraction,
    objective_value,
    to_fraction,
    welfare_values,
)
from .oracles import OracleConfig, optimum_bracket

CSV_COLUMNS = (
    "command",
    "mechanism",
    "objective",
    "alpha",
    "n",
    "seed",
    "value_lo",
    "value_hi",
    "opt_lo",
    "opt_hi",
    "ratio_lo",
    "ratio_hi",
    "verdict",
)

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE, EXIT_VIOLATION, EXIT_BOUND = 0, 1, 2, 3, 4
SEED_ENV = "ORDLOC_SEED"


class InputError(ModelError):
    """Malformed command-line or file input."""


# ---------------------------------------------------------------------------
# rendering


def fmt(value) -> str:
    """Exact rendering used in files: ``p/q``, or ``inf``."""
    if value is None:
        return ""
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    return format_fraction(to_fraction(value))


def show(value) -> str:
    """Exact plus decimal rendering for the terminal."""
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    q = to_fraction(value)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{format_fraction(q)} (~{float(q):.6g})"


def fmt_vec(values) -> str:
    return ",".join(fmt(v) for v in values)


def parse_vector(text: str) -> List[Fraction]:
    try:
        return [to_fraction(v) for v in text.split(",") if v.strip()]
    except ModelError as exc:
        raise InputError(f"bad number list {text!r}: {exc}") from exc


# ---------------------------------------------------------------------------
# instance files


def parse_instance(doc: Any, source: str = "<instance>") -> Instance:
    """Build an Instance from the JSON document layout; 1-based preferences."""
    if not isinstance(doc, dict):
        raise InputError(f"{source}: top level must be an object")
    try:
        kind = ModelKind(doc.get("model", "multiplicative"))
    except ValueError:
        raise InputError(f"{source}: field 'model' must be 'multiplicative' or 'additive'") from None
    alpha = doc.get("alpha")
    if not isinstance(alpha, list) or not alpha:
        raise InputError(f"{source}: field 'alpha' must be a non-empty list")
    try:
        alpha = [to_fraction(a) for a in alpha]
    except ModelError as exc:
        raise InputError(f"{source}: field 'alpha': {exc}") from None
    agents = doc.get("agents")
    if not isinstance(agents, list) or not agents:
        raise InputError(f"{source}: field 'agents' must be a non-empty list")
    parsed = []
    for k, a in enumerate(agents):
        where = f"{source}: agents[{k}]"
        if not isinstance(a, dict) or "x" not in a or "pref" not in a:
            raise InputError(f"{where}: needs keys 'x' and 'pref'")
        try:
            x = to_fraction(a["x"])
        except ModelError as exc:
            raise InputError(f"{where}.x: {exc}") from None
        pref = a["pref"]
        if not isinstance(pref, list) or not all(isinstance(j, int) and not isinstance(j, bool) for j in pref):
            raise InputError(f"{where}.pref: must be a list of 1-based facility indices")
        parsed.append(Agent(x, tuple(j - 1 for j in pref)))
    try:
        return Instance(tuple(alpha), tuple(parsed), kind)
    except ModelError as exc:
        raise InputError(f"{source}: {exc}") from None


def dump_instance(instance: Instance) -> Dict[str, Any]:
    return {
        "model": instance.kind.value,
        "alpha": [fmt(a) for a in instance.alpha],
        "agents": [{"x": fmt(a.x), "pref": [j + 1 for j in a.pref]} for a in instance.agents],
    }


def load_instance(path: str) -> Instance:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return parse_instance(doc, path)


# ---------------------------------------------------------------------------
# reports


@dataclass
class RunReport:
    command: List[str]
    config: Dict[str, Any]
    results: List[Dict[str, Any]] = field(default_factory=list)
    rows: List[Dict[str, str]] = field(default_factory=list)
    anchors: List[str] = field(default_factory=list)
    wall_clock: float = 0.0

    def row(self, **values) -> None:
        unknown = set(values) - set(CSV_COLUMNS)
        if unknown:
            raise KeyError(f"unknown CSV columns {sorted(unknown)}")
        self.rows.append({c: str(values.get(c, "")) for c in CSV_COLUMNS})

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(self.rows)
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "command": self.command,
            "config": self.config,
            "anchors": self.anchors,
            "results": self.results,
            "rows": self.rows,
            "wall_clock_seconds": round(self.wall_clock, 6),
        }
        return json.dumps(doc, indent=2) + "\n"


def _alpha_text(instance_or_alpha) -> str:
    alpha = instance_or_alpha.alpha if isinstance(instance_or_alpha, Instance) else instance_or_alpha
    return ";".join(fmt(a) for a in alpha)


def _oracle_config(args) -> OracleConfig:
    return OracleConfig(
        grid_cells=args.grid, refine_rounds=args.rounds, refine_factor=args.factor, refine_budget=args.budget
    )


def _config(args) -> Dict[str, Any]:
    out = {
        "G": args.grid,
        "R": args.rounds,
        "refine_factor": args.factor,
        "refine_budget": args.budget,
        "epsilon": fmt(args.epsilon),
        "seed": args.seed,
    }
    for key in ("mech", "objective", "space", "mode", "group_size", "loc_grid", "trials", "catalog", "id"):
        value = getattr(args, key, None)
        if value is not None:
            out[key] = value if isinstance(value, (int, str)) else fmt(value)
    return out


def _resolve_instance(args) -> Instance:
    if getattr(args, "instance", None):
        return load_instance(args.instance)
    if getattr(args, "catalog", None):
        return build_entry(args.catalog, args.alpha, args.epsilon, args.n).instance
    raise InputError("give --instance FILE or --catalog ID")


def _print_instance(instance: Instance, out) -> None:
    print(f"instance: model={instance.kind.value} alpha=({fmt_vec(instance.alpha)}) n={instance.n}", file=out)
    for i, a in enumerate(instance.agents):
        ranking = ">".join(f"F{j + 1}" for j in a.pref)
        print(f"  agent {i + 1}: x={show(a.x)} pref {ranking}", file=out)


def _print_verdict(verdict: AuditVerdict, out) -> None:
    print(f"outcome: {verdict.outcome} after {verdict.examined} deviations", file=out)
    print(f"truthful placement: ({fmt_vec(verdict.truthful_placement)})", file=out)
    if not verdict.violation:
        return
    print(f"deviated placement: ({fmt_vec(verdict.deviated_placement)})", file=out)
    for k, i in enumerate(verdict.group):
        (tx, tp), (mx, mp) = verdict.true_reports[k], verdict.misreports[k]
        true_rank = ">".join(f"F{j + 1}" for j in tp)
        mis_rank = ">".join(f"F{j + 1}" for j in mp)
        print(
            f"  agent {i + 1}: true (x={fmt(tx)}, {true_rank}) reports (x={fmt(mx)}, {mis_rank}); "
            f"welfare {show(verdict.before[k])} -> {show(verdict.after[k])}",
            file=out,
        )


def _verdict_result(verdict: AuditVerdict) -> Dict[str, Any]:
    doc = {
        "outcome": verdict.outcome,
        "examined": verdict.examined,
        "truthful_placement": [fmt(v) for v in verdict.truthful_placement],
    }
    if verdict.violation:
        doc.update(
            group=[i + 1 for i in verdict.group],
            true_reports=[{"x": fmt(x), "pref": [j + 1 for j in p]} for x, p in verdict.true_reports],
            misreports=[{"x": fmt(x), "pref": [j + 1 for j in p]} for x, p in verdict.misreports],
            before=[fmt(v) for v in verdict.before],
            after=[fmt(v) for v in verdict.after],
            deviated_placement=[fmt(v) for v in verdict.deviated_placement],
        )
    return doc


# ---------------------------------------------------------------------------
# commands


def cmd_eval(args, report: RunReport, out) -> int:
    instance = _resolve_instance(args)
    objective = Objective(args.objective)
    y = check_placement(instance, parse_vector(args.placement))
    _print_instance(instance, out)
    values = welfare_values(instance, y, objective.is_cost)
    label = "cost" if objective.is_cost else "utility"
    print(f"placement: ({fmt_vec(y)})", file=out)
    for i, v in enumerate(values):
        print(f"  agent {i + 1} {label}: {show(v)}", file=out)
    value = objective_value(instance, y, objective)
    print(f"{objective.value}: {show(value)}", file=out)
    report.results.append(
        {"placement": [fmt(v) for v in y], label: [fmt(v) for v in values], "objective": objective.value, "value": fmt(value)}
    )
    report.row(command="eval", objective=objective.value, alpha=_alpha_text(instance), n=instance.n, value_lo=fmt(value), value_hi=fmt(value))
    return EXIT_OK


def cmd_run(args, report: RunReport, out) -> int:
    instance = _resolve_instance(args)
    mech = MechanismId(args.mech)
    y = run_mechanism(mech, instance)
    _print_instance(instance, out)
    print(f"mechanism: {mech.value} ({mech.label})", file=out)
    print(f"placement: {fmt_vec(y)}", file=out)
    objectives = [Objective(args.objective)] if args.objective else list(Objective)
    values = {}
    for obj in objectives:
        v = objective_value(instance, y, obj)
        values[obj.value] = fmt(v)
        print(f"  {obj.value}: {show(v)}", file=out)
        report.row(command="run", mechanism=mech.value, objective=obj.value, alpha=_alpha_text(instance), n=instance.n, value_lo=fmt(v), value_hi=fmt(v))
    report.results.append({"mechanism": mech.value, "placement": [fmt(v) for v in y], "values": values})
    return EXIT_OK


def cmd_opt(args, report: RunReport, out) -> int:
    instance = _resolve_instance(args)
    objective = Objective(args.objective)
    br = optimum_bracket(instance, objective, _oracle_config(args))
    res = br.result
    _print_instance(instance, out)
    print(f"{objective.value} optimum in [{show(br.lo)}, {show(br.hi)}] ({br.source})", file=out)
    print(f"best placement found: ({fmt_vec(res.placement)}) value {show(res.value)}", file=out)
    if not res.exact:
        print(f"certificate {show(res.error_bound)} at step {fmt(res.step)} after {res.rounds} refinement rounds", file=out)
    report.results.append(
        {
            "objective": objective.value,
            "opt_lo": fmt(br.lo),
            "opt_hi": fmt(br.hi),
            "source": br.source,
            "placement": [fmt(v) for v in res.placement],
            "value": fmt(res.value),
            "certificate": fmt(res.error_bound),
            "step": fmt(res.step),
            "rounds": res.rounds,
        }
    )
    report.row(command="opt", objective=objective.value, alpha=_alpha_text(instance), n=instance.n, opt_lo=fmt(br.lo), opt_hi=fmt(br.hi), verdict=br.source)
    return EXIT_OK


def _space(args) -> DeviationSpace:
    prefs = args.space in ("prefs", "both")
    locations = args.space in ("locations", "both")
    explicit = tuple(parse_vector(args.locations)) if args.locations else None
    return DeviationSpace(prefs=prefs, locations=locations, grid=args.loc_grid, explicit=explicit)


def cmd_audit(args, report: RunReport, out) -> int:
    instance = _resolve_instance(args)
    mech = MechanismId(args.mech)
    mode = WelfareMode(args.mode)
    verdict = audit_gsp(mech, instance, _space(args), mode, args.group_size)
    _print_instance(instance, out)
    print(f"mechanism: {mech.value}; space {args.space}; mode {mode.value}; group size <= {args.group_size}", file=out)
    _print_verdict(verdict, out)
    if verdict.violation:
        ok = revalidate(verdict, instance)
        print(f"witness re-validated exactly: {'yes' if ok else 'NO'}", file=out)
    report.results.append(_verdict_result(verdict))
    report.row(command="audit", mechanism=mech.value, objective=mode.value, alpha=_alpha_text(instance), n=instance.n, verdict=verdict.outcome)
    return EXIT_VIOLATION if verdict.violation else EXIT_OK


def _spec(args) -> GeneratorSpec:
    alpha = parse_vector(args.alpha_vec)
    return GeneratorSpec(
        n=args.agents,
        m=len(alpha),
        location_law=LocationLaw(args.law),
        gap=args.gap,
        preference_law=PreferenceLaw(args.pref_law),
        alpha=tuple(alpha),
        kind=ModelKind(args.model),
        seed=args.seed,
        n_max=args.agents_max,
        alpha_max=args.alpha_max,
    )


def cmd_sweep(args, report: RunReport, out) -> int:
    mech, objective = MechanismId(args.mech), Objective(args.objective)
    spec = _spec(args)
    if args.trials < 1:
        raise InputError("--trials must be >= 1")
    config = _oracle_config(args)
    bound = args.verify_bound
    worst = None
    violated = []
    for t in range(args.trials):
        rec = evaluate_trial(mech, objective, generate(spec, t), config, t)
        verdict = ""
        if bound is not None:
            verdict = "violation" if rec.ratio_lo > bound else "ok"
            if verdict == "violation":
                violated.append(rec)
        if worst is None or (rec.ratio_hi, rec.ratio_lo) > (worst.ratio_hi, worst.ratio_lo):
            worst = rec
        report.row(
            command="sweep",
            mechanism=mech.value,
            objective=objective.value,
            alpha=_alpha_text(rec.instance),
            n=rec.instance.n,
            seed=f"{spec.seed}:{t}",
            value_lo=fmt(rec.value),
            value_hi=fmt(rec.value),
            opt_lo=fmt(rec.opt_lo),
            opt_hi=fmt(rec.opt_hi),
            ratio_lo=fmt(rec.ratio_lo),
            ratio_hi=fmt(rec.ratio_hi),
            verdict=verdict,
        )
        report.results.append(
            {"trial": t, "instance": dump_instance(rec.instance), "placement": [fmt(v) for v in rec.placement], "value": fmt(rec.value),
             "opt": [fmt(rec.opt_lo), fmt(rec.opt_hi)], "ratio": [fmt(rec.ratio_lo), fmt(rec.ratio_hi)], "source": rec.source}
        )
    print(f"sweep: {mech.value} / {objective.value}, {args.trials} trials, seed {spec.seed}", file=out)
    print(f"worst ratio bracket [{show(worst.ratio_lo)}, {show(worst.ratio_hi)}] at trial {worst.trial} (n={worst.instance.n})", file=out)
    if bound is not None:
        if violated:
            print(f"bound {show(bound)} VIOLATED on {len(violated)} trials; first counterexample trial {violated[0].trial}:", file=out)
            _print_instance(violated[0].instance, out)
            return EXIT_BOUND
        print(f"bound {show(bound)} holds on every trial", file=out)
    return EXIT_OK


def cmd_replay(args, report: RunReport, out) -> int:
    entry = build_entry(args.id, args.alpha, args.epsilon, args.n)
    mech = MechanismId(args.mech) if args.mech else None
    rep = replay(entry, mech, _oracle_config(args))
    params = ", ".join(f"{k}={fmt(v)}" for k, v in entry.params.items())
    print(f"replay {entry.key}: {entry.description} ({params})", file=out)
    report.anchors.append(entry.key)
    _print_instance(entry.instance, out)
    for ref in entry.references:
        print(f"reference {ref.objective.value} {show(ref.value)} at ({fmt_vec(ref.placement)}): {ref.label}", file=out)
        report.row(
            command="replay",
            mechanism=mech.value if mech else "",
            objective=ref.objective.value,
            alpha=_alpha_text(ref.instance),
            n=ref.instance.n,
            value_lo=fmt(ref.value),
            value_hi=fmt(ref.value),
            verdict="reference",
        )
    for check in rep.checks:
        print(f"  [{'ok' if check.ok else 'FAIL'}] {check.name}: {check.detail}", file=out)
    status = EXIT_OK if rep.ok else EXIT_CHECK_FAILED
    result = {"id": entry.key, "params": {k: fmt(v) for k, v in entry.params.items()},
              "checks": [{"name": c.name, "ok": c.ok, "detail": c.detail} for c in rep.checks]}
    if rep.deviation_verdict is not None:
        dev = entry.deviation
        print(f"proof deviation: {dev.note}", file=out)
        print(f"  that exact misreport is profitable under {mech.value}: {'yes' if rep.narrative_profitable else 'no'}", file=out)
        _print_verdict(rep.deviation_verdict, out)
        result["deviation"] = _verdict_result(rep.deviation_verdict)
        result["narrative_profitable"] = rep.narrative_profitable
        report.row(
            command="replay",
            mechanism=mech.value,
            objective=dev.mode.value,
            alpha=_alpha_text(dev.instance),
            n=dev.instance.n,
            verdict=rep.deviation_verdict.outcome,
        )
        if rep.deviation_verdict.violation and status == EXIT_OK:
            status = EXIT_VIOLATION
    elif mech is not None and entry.deviation is None:
        print("this entry has no proof deviation to test", file=out)
    report.results.append(result)
    return status


def cmd_catalog(args, report: RunReport, out) -> int:
    entries = catalog(args.alpha, args.epsilon)
    for entry in entries:
        params = ", ".join(f"{k}={fmt(v)}" for k, v in entry.params.items())
        print(f"{entry.key}: {entry.description} ({params})", file=out)
        for ref in entry.references:
            print(f"    {ref.objective.value} = {show(ref.value)} at ({fmt_vec(ref.placement)})", file=out)
            report.row(command="catalog", objective=ref.objective.value, alpha=_alpha_text(ref.instance), n=ref.instance.n,
                       value_lo=fmt(ref.value), value_hi=fmt(ref.value), verdict=entry.key)
        report.results.append({"id": entry.key, "params": {k: fmt(v) for k, v in entry.params.items()},
                               "instance": dump_instance(entry.instance)})
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def _fraction_arg(text: str) -> Fraction:
    try:
        return to_fraction(text)
    except ModelError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--csv", metavar="PATH", help="write result rows as CSV")
    common.add_argument("--json", metavar="PATH", help="write a structured report")
    common.add_argument("--seed", type=int, default=0, help=f"random seed (env {SEED_ENV} overrides)")
    common.add_argument("--epsilon", type=_fraction_arg, default=DEFAULT_EPSILON, help="epsilon for catalog profiles")
    oracle = common.add_argument_group("grid oracle")
    oracle.add_argument("--grid", type=int, default=1000, help="initial grid cells per axis (G)")
    oracle.add_argument("--rounds", type=int, default=2, help="refinement rounds (R)")
    oracle.add_argument("--factor", type=int, default=10, help="refinement factor per round")
    oracle.add_argument("--budget", type=int, default=OracleConfig().refine_budget, help="fine points per refinement round")

    source = argparse.ArgumentParser(add_help=False)
    source.add_argument("--instance", metavar="FILE", help="instance file (JSON)")
    source.add_argument("--catalog", metavar="ID", help="use a catalog profile instead of a file")
    source.add_argument("--alpha", type=_fraction_arg, help="alpha for --catalog")
    source.add_argument("--n", type=int, help="agent count for catalog profiles that take one")

    mechs = [m.value for m in MechanismId]
    objs = [o.value for o in Objective]
    parser = _Parser(prog="ordloc", description="Facility location with ordinal preferences: mechanisms, optima, audits.")
    sub = parser.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", parents=[common, source], help="evaluate a placement")
    p.add_argument("--placement", required=True, help="comma-separated facility locations")
    p.add_argument("--objective", choices=objs, default="maxcost")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("run", parents=[common, source], help="run a mechanism")
    p.add_argument("--mech", choices=mechs, required=True)
    p.add_argument("--objective", choices=objs)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("opt", parents=[common, source], help="bracket the optimum")
    p.add_argument("--objective", choices=objs, required=True)
    p.set_defaults(func=cmd_opt)

    p = sub.add_parser("audit", parents=[common, source], help="search for profitable misreports")
    p.add_argument("--mech", choices=mechs, required=True)
    p.add_argument("--space", choices=["prefs", "locations", "both"], default="prefs")
    p.add_argument("--mode", choices=[w.value for w in WelfareMode], default="utility")
    p.add_argument("--group-size", type=int, default=1)
    p.add_argument("--loc-grid", type=int, default=200, help="location candidates k/G' for location misreports")
    p.add_argument("--locations", help="explicit comma-separated location candidates")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("sweep", parents=[common], help="ratio brackets on random instances")
    p.add_argument("--mech", choices=mechs, required=True)
    p.add_argument("--objective", choices=objs, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--agents", type=int, default=5, help="agent count (minimum when --agents-max is set)")
    p.add_argument("--agents-max", type=int)
    p.add_argument("--alpha-vec", default="1,2", help="coefficient vector, e.g. 1,2")
    p.add_argument("--alpha-max", type=_fraction_arg, help="draw the last coefficient up to this value")
    p.add_argument("--model", choices=[k.value for k in ModelKind], default="multiplicative")
    p.add_argument("--law", choices=[l.value for l in LocationLaw], default="uniform")
    p.add_argument("--gap", type=_fraction_arg, default=Fraction(1, 2))
    p.add_argument("--pref-law", choices=[l.value for l in PreferenceLaw], default="iid")
    p.add_argument("--verify-bound", type=_fraction_arg, help="exit 4 if some trial certainly exceeds this ratio")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("replay", parents=[common], help="replay a catalog profile")
    p.add_argument("--id", required=True)
    p.add_argument("--alpha", type=_fraction_arg)
    p.add_argument("--n", type=int)
    p.add_argument("--mech", choices=mechs)
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("catalog", parents=[common], help="list catalog profiles")
    p.add_argument("--alpha", type=_fraction_arg)
    p.set_defaults(func=cmd_catalog)
    return parser


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = sys.stdout if out is None else out
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    env_seed = os.environ.get(SEED_ENV)
    if env_seed is not None:
        try:
            args.seed = int(env_seed)
        except ValueError:
            print(f"ordloc: error: {SEED_ENV}={env_seed!r} is not an integer", file=sys.stderr)
            return EXIT_USAGE
    report = RunReport(command=["ordloc"] + argv, config=_config(args))
    print("config: " + " ".join(f"{k}={v}" for k, v in report.config.items()), file=out)
    start = time.perf_counter()
    try:
        status = args.func(args, report, out)
    except ModelError as exc:
        print(f"ordloc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report.wall_clock = time.perf_counter() - start
    print(f"wall-clock: {report.wall_clock:.3f}s", file=out)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(report.to_csv())
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(report.to_json())
    return status


if __name__ == "__main__":
    sys.exit(main())
