"""``defect-tuning`` command line: run, report, validate-data."""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from ..dataset import DataError, check_counts, expected_triple_counts, load_triples
from ..learners import Learner
from ..metrics import Goal
from .reports import RECORDS_FILE, emit_reports, read_records, write_records
from .runner import ExperimentPlan, run_plan


def _csv(kind):
    def parse(text: str):
        items = [s.strip() for s in text.split(",") if s.strip()]
        if not items:
            raise argparse.ArgumentTypeError("empty list")
        try:
            return tuple(kind(s) for s in items)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from exc
    return parse


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="defect-tuning", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="tuned and untuned runs over every release triple")
    run.add_argument("--manifest", required=True, help="manifest file or directory of *.manifest files")
    run.add_argument("--learners", type=_csv(Learner.parse), default=_csv(Learner.parse)("where,cart,rf,lr"))
    run.add_argument("--goals", type=_csv(Goal.parse), default=_csv(Goal.parse)("prec,f"))
    run.add_argument("--np", dest="nps", type=_csv(int), default=(10,), help="population size(s), comma separated")
    run.add_argument("--life", type=int, default=5)
    run.add_argument("--f", type=float, default=0.75)
    run.add_argument("--cr", type=float, default=0.3)
    run.add_argument("--seed", type=_u64, default=0)
    run.add_argument("--repeats", type=int, default=1)
    run.add_argument("--triples", type=_csv(str), default=None, help="restrict to these triple names")
    run.add_argument("--jobs", type=int, default=1, help="worker processes")
    run.add_argument("--out", required=True)
    run.add_argument("--quiet", action="store_true")

    rep = sub.add_parser("report", help="rebuild reports from a records file")
    rep.add_argument("--in", dest="src", required=True, help="run directory or records.jsonl")
    rep.add_argument("--out", default=None, help="defaults to the run directory")

    val = sub.add_parser("validate-data", help="check release counts against the published ones")
    val.add_argument("--manifest", required=True)
    return p


def cmd_run(args) -> int:
    plan = ExperimentPlan(triples=args.triples, learners=args.learners, goals=args.goals,
                          repeats=args.repeats, seed=args.seed, nps=args.nps, life=args.life,
                          f=args.f, cr=args.cr)
    triples = load_triples(args.manifest)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()

    def progress(rec, done, total):
        if not args.quiet:
            goal = rec.goal or "-"
            print(f"[{done}/{total}] {rec.triple} {rec.learner} {rec.mode} {goal} "
                  f"evals={rec.evaluations} {rec.seconds:.2f}s", file=sys.stderr)

    records = run_plan(plan, triples, jobs=args.jobs, progress=progress)
    write_records(records, out / RECORDS_FILE)
    (out / "plan.json").write_text(json.dumps({
        "triples": list(plan.triples) if plan.triples else None,
        "learners": [l.value for l in plan.learners], "goals": [g.value for g in plan.goals],
        "repeats": plan.repeats, "seed": plan.seed, "nps": list(plan.nps), "life": plan.life,
        "f": plan.f, "cr": plan.cr}, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    emit_reports(records, out)
    print(f"{len(records)} records in {time.perf_counter() - t0:.1f}s -> {out}")
    return 0


def cmd_report(args) -> int:
    src = Path(args.src)
    records = read_records(src)
    out = Path(args.out) if args.out else (src if src.is_dir() else src.parent)
    paths = emit_reports(records, out)
    print(f"{len(paths)} report files -> {out}")
    return 0


def cmd_validate(args) -> int:
    rows = check_counts(load_triples(args.manifest))
    bad = 0
    print(f"{'triple':<12} {'role':<6} {'observed':>10} {'expected':>10}")
    for name, role, obs, exp in rows:
        mark = "" if exp == obs else ("  <- no published counts" if exp is None else "  <- MISMATCH")
        bad += exp is not None and exp != obs
        fmt = lambda c: "-" if c is None else f"{c[0]}/{c[1]}"
        print(f"{name:<12} {role:<6} {fmt(obs):>10} {fmt(exp):>10}{mark}")
    missing = sorted(set(expected_triple_counts()) - {r[0] for r in rows})
    for name in missing:
        print(f"missing triple: {name}", file=sys.stderr)
    if bad or missing:
        print(f"validate-data: {bad} mismatched release(s), {len(missing)} missing triple(s)", file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"run": cmd_run, "report": cmd_report, "validate-data": cmd_validate}[args.command]
    try:
        return handler(args)
    except (DataError, ValueError, OSError) as exc:
        print(f"defect-tuning {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
