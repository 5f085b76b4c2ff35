"""Report files derived from run records.

Machine-readable tables are CSV with full-precision fractions; each has a
Markdown twin with rounded percentages and the best cell of each row in
bold.  When a plan was repeated, cells hold the median over repeats.
"""

from __future__ import annotations

import csv
import json
import re
import statistics
from collections import defaultdict
from pathlib import Path
from typing import Iterable, Sequence

from ..metrics import Goal
from ..stats import SampleSeries, delta_series, ks_different
from .runner import TUNED, UNTUNED, RunRecord

TABLE_LEARNERS = ("where", "cart", "rf")
RECORDS_FILE = "records.jsonl"


def write_records(records: Sequence[RunRecord], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for r in records:
            fh.write(json.dumps(r.to_dict(), sort_keys=True) + "\n")


def read_records(path: str | Path) -> list[RunRecord]:
    path = Path(path)
    if path.is_dir():
        path = path / RECORDS_FILE
    with path.open(encoding="utf-8") as fh:
        return [RunRecord.from_dict(json.loads(line)) for line in fh if line.strip()]


def _project(triple: str) -> str:
    return re.sub(r"V\d+$", "", triple)


class Index:
    """Median lookups over records keyed by (triple, learner, goal, mode, np)."""

    def __init__(self, records: Sequence[RunRecord]):
        if not records:
            raise ValueError("no run records to report")
        self.records = list(records)
        self.triples = list(dict.fromkeys(r.triple for r in records))
        per_project = defaultdict(int)
        for t in self.triples:
            per_project[_project(t)] += 1
        self.display = {t: (t[:-2] if per_project[_project(t)] == 1 and t.endswith("V0") else t)
                        for t in self.triples}
        self.learners = [l for l in TABLE_LEARNERS if any(r.learner == l for r in records)]
        self.goals = list(dict.fromkeys(r.goal for r in records if r.goal is not None))
        self.nps = sorted({r.np for r in records if r.np is not None})
        self.base_np = 10 if 10 in self.nps else (self.nps[0] if self.nps else None)
        self._groups: dict[tuple, list[RunRecord]] = defaultdict(list)
        for r in records:
            self._groups[(r.triple, r.learner, r.goal, r.mode, r.np)].append(r)

    def group(self, triple, learner, goal, mode, np_=None) -> list[RunRecord]:
        if mode == UNTUNED:
            return self._groups.get((triple, learner, None, UNTUNED, None), [])
        return self._groups.get((triple, learner, goal, TUNED, np_ or self.base_np), [])

    def median(self, attr, triple, learner, goal, mode, np_=None, measure=None):
        rs = self.group(triple, learner, goal, mode, np_)
        if not rs:
            return None
        vals = [r.scores[measure] if measure else getattr(r, attr) for r in rs]
        return statistics.median(vals)

    def test_score(self, triple, learner, goal, mode, np_=None):
        return self.median(None, triple, learner, goal, mode, np_, measure=goal)


def median_deltas(records: Sequence[RunRecord], learners: Sequence[str] = TABLE_LEARNERS,
                  goals: Sequence[str] = ("prec", "f")) -> dict[tuple[str, str], float]:
    """Median over triples of (median tuned - median untuned) test score, per (learner, goal).

    Triples missing either side are left out; a pair with no triple maps to NaN.
    """
    index = Index(records)
    out = {}
    for l in learners:
        for g in goals:
            deltas = []
            for t in index.triples:
                a, b = index.test_score(t, l, g, TUNED), index.test_score(t, l, g, UNTUNED)
                if a is not None and b is not None:
                    deltas.append(a - b)
            out[(l, g)] = statistics.median(deltas) if deltas else float("nan")
    return out


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v) for v in row])
    return path


def _write_md(path: Path, header: Sequence[str], rows: Iterable[Sequence[str]], title: str) -> Path:
    lines = [f"# {title}", "", "| " + " | ".join(header) + " |",
             "|" + "|".join("---" for _ in header) + "|"]
    lines += ["| " + " | ".join(row) + " |" for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _pct(v) -> str:
    return "-" if v is None else f"{round(100 * v)}"


def score_table(index: Index, goal: str) -> tuple[list[str], list[list]]:
    """Rows of (triple, <learner>_default, <learner>_tuned, ..., best)."""
    cols = [f"{l}_{m}" for l in index.learners for m in ("default", "tuned")]
    rows = []
    for t in index.triples:
        vals = []
        for l in index.learners:
            vals.append(index.test_score(t, l, goal, UNTUNED))
            vals.append(index.test_score(t, l, goal, TUNED))
        present = [v for v in vals if v is not None]
        pick = max if Goal.parse(goal).maximize else min
        top = pick(present) if present else None
        best = ";".join(c for c, v in zip(cols, vals) if v is not None and v == top)
        rows.append([index.display[t], *vals, best])
    return ["dataset", *cols, "best"], rows


def load_table(path: str | Path) -> dict[str, dict[str, float | str | None]]:
    """Parse a CSV report back into ``{row key: {column: value}}``."""
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        out = {}
        for row in reader:
            parsed = {}
            for h, cell in zip(header[1:], row[1:]):
                if cell == "":
                    parsed[h] = None
                else:
                    try:
                        parsed[h] = float(cell)
                    except ValueError:
                        parsed[h] = cell
            out[row[0]] = parsed
    return out


def emit_reports(records: Sequence[RunRecord], out_dir: str | Path) -> list[Path]:
    """Write every report derived from ``records`` into ``out_dir``."""
    index = Index(records)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    titles = {"prec": "Precision", "f": "F-measure", "pd": "Recall", "pf": "False alarms"}

    for goal in index.goals:
        header, rows = score_table(index, goal)
        written.append(_write_csv(out / f"{goal}.csv", header, rows))
        md_rows = []
        for row in rows:
            best = set(row[-1].split(";"))
            md_rows.append([row[0]] + [f"**{_pct(v)}**" if c in best else _pct(v)
                                       for c, v in zip(header[1:-1], row[1:-1])])
        written.append(_write_md(out / f"{goal}.md", header[:-1], md_rows,
                                 f"{titles.get(goal, goal)} on the test release (best in bold)"))

    # tuned - untuned per learner, sorted ascending
    delta_rows = []
    for goal in index.goals:
        for l in index.learners:
            pairs = [(t, index.test_score(t, l, goal, TUNED), index.test_score(t, l, goal, UNTUNED))
                     for t in index.triples]
            pairs = [(t, a, b) for t, a, b in pairs if a is not None and b is not None]
            if not pairs:
                continue
            keys = tuple(index.display[t] for t, _, _ in pairs)
            tuned = SampleSeries(f"{l}-tuned", [a for _, a, _ in pairs], keys)
            untuned = SampleSeries(f"{l}-untuned", [b for _, _, b in pairs], keys)
            deltas = delta_series(tuned, untuned)
            by_delta = sorted(((a - b), k) for k, (_, a, b) in zip(keys, pairs))
            for rank, (d, (_, k)) in enumerate(zip(deltas, by_delta)):
                delta_rows.append([goal, l, rank, k, d])
    written.append(_write_csv(out / "deltas.csv", ["goal", "learner", "rank", "dataset", "delta"], delta_rows))

    if "where" in index.learners:
        header = ["dataset"] + [f"{g}_{m}" for g in index.goals for m in ("tuned", "untuned")]
        rows = []
        for t in index.triples:
            row = [index.display[t]]
            for g in index.goals:
                for mode in (TUNED, UNTUNED):
                    rs = index.group(t, "where", g, mode)
                    row.append(" ".join(rs[0].features) if rs and rs[0].features else ("None" if rs else ""))
            rows.append(row)
        written.append(_write_csv(out / "features.csv", header, rows))
        written.append(_write_md(out / "features.md", header, [[c or "-" for c in r] for r in rows],
                                 "Attributes used by WHERE, tuned vs untuned"))

    cols = [(l, g) for l in index.learners for g in index.goals]
    if cols:
        header = ["dataset"] + [f"{l}_{g}" for l, g in cols]
        rows = [[index.display[t]] + [index.median("evaluations", t, l, g, TUNED) for l, g in cols]
                for t in index.triples]
        written.append(_write_csv(out / "evaluations.csv", header, rows))
        written.append(_write_md(out / "evaluations.md", header,
                                 [[r[0]] + ["-" if v is None else f"{v:g}" for v in r[1:]] for r in rows],
                                 "Evaluations used by tuning"))

    header = ["dataset"] + [f"tuned_{l}_{g}" for l, g in cols] + [f"naive_{l}" for l in index.learners]
    rows = []
    for t in index.triples:
        row = [index.display[t]] + [index.median("seconds", t, l, g, TUNED) for l, g in cols]
        row += [index.median("seconds", t, l, None, UNTUNED) for l in index.learners]
        rows.append(row)
    written.append(_write_csv(out / "runtime.csv", header, rows))
    written.append(_write_md(out / "runtime.md", header,
                             [[r[0]] + ["-" if v is None else f"{v:.2f}" for v in r[1:]] for r in rows],
                             "Runtime in seconds"))

    written.append(_write_csv(out / "ks.csv", ["comparison", "goal", "n", "m", "statistic", "threshold", "different"],
                              _ks_rows(index)))
    if "lr" in {r.learner for r in records}:
        written.append(_write_csv(out / "lr_vs_rf.csv", *_lr_rows(index)))
    if len(index.nps) > 1:
        d_rows, k_rows = _np_rows(index)
        written.append(_write_csv(out / "np_deltas.csv", ["goal", "learner", "np", "rank", "dataset", "delta"], d_rows))
        written.append(_write_csv(out / "np_ks.csv", ["goal", "learner_a", "learner_b", "statistic",
                                                      "threshold", "different"], k_rows))

    tuning_rows = []
    for r in records:
        if r.mode == TUNED:
            for name, value in r.config.items():
                tuning_rows.append([index.display[r.triple], r.learner, r.goal, r.np, r.repeat, name,
                                    "" if value is None else value])
    written.append(_write_csv(out / "tunings.csv", ["dataset", "learner", "goal", "np", "repeat", "param", "value"],
                              tuning_rows))
    return written


def _series(index: Index, learner: str, goal: str, mode: str, np_=None) -> SampleSeries | None:
    vals = [index.test_score(t, learner, goal, mode, np_) for t in index.triples]
    if any(v is None for v in vals):
        return None
    return SampleSeries(f"{learner}-{mode}", vals, tuple(index.triples))


def _ks_rows(index: Index) -> list[list]:
    rows = []
    for goal in index.goals:
        for mode in (TUNED, UNTUNED):
            a, b = _series(index, "cart", goal, mode), _series(index, "rf", goal, mode)
            if a is None or b is None:
                continue
            d, t, diff = ks_different(a, b)
            rows.append([f"cart_{mode}_vs_rf_{mode}", goal, len(a.values), len(b.values), d, t,
                         "different" if diff else "not different"])
    return rows


def _lr_rows(index: Index):
    header = ["dataset"]
    for g in index.goals:
        header += [f"lr_{g}", f"rf_default_{g}", f"rf_tuned_{g}"]
    rows = []
    for t in index.triples:
        row = [index.display[t]]
        for g in index.goals:
            row += [index.test_score(t, "lr", g, UNTUNED), index.test_score(t, "rf", g, UNTUNED),
                    index.test_score(t, "rf", g, TUNED)]
        rows.append(row)
    return header, rows


def _np_rows(index: Index):
    base = index.base_np
    d_rows, k_rows = [], []
    for goal in index.goals:
        per_learner = {}
        for l in index.learners:
            for np_ in index.nps:
                if np_ == base:
                    continue
                pairs = [(index.display[t], index.test_score(t, l, goal, TUNED, np_),
                          index.test_score(t, l, goal, TUNED, base)) for t in index.triples]
                pairs = [(k, a, b) for k, a, b in pairs if a is not None and b is not None]
                if not pairs:
                    continue
                deltas = sorted((a - b, k) for k, a, b in pairs)
                per_learner.setdefault(l, []).extend(d for d, _ in deltas)
                for rank, (d, k) in enumerate(deltas):
                    d_rows.append([goal, l, np_, rank, k, d])
        names = sorted(per_learner)
        for i, a in enumerate(names):
            for b in names[i + 1:]:
                d, t, diff = ks_different(per_learner[a], per_learner[b])
                k_rows.append([goal, a, b, d, t, "different" if diff else "not different"])
    return d_rows, k_rows
