"""PROMISE-format release ingestion and release-triple construction.

A release CSV carries identifier columns (project, version, class name), the
20 object-oriented metrics listed in :data:`ATTRIBUTES` and a defect count
column (``bug`` in the public PROMISE files).  Releases of one project are
ordered by a manifest file that lists one CSV path per line, oldest first.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

# Sorted by name; this order is also the tie-break order for tree splits.
ATTRIBUTES: tuple[str, ...] = (
    "amc", "avg_cc", "ca", "cam", "cbm", "cbo", "ce", "dam", "dit", "ic",
    "lcom", "lcom3", "loc", "max_cc", "mfa", "moa", "noc", "npm", "rfc", "wmc",
)
N_ATTRIBUTES = len(ATTRIBUTES)
DEFECT_THRESHOLD = 1

# Release sizes as (defective, total) per project, oldest release first.
PUBLISHED_RELEASES: dict[str, list[tuple[int, int]]] = {
    "ant": [(20, 125), (40, 178), (32, 293), (92, 351), (166, 745)],
    "camel": [(13, 339), (216, 608), (145, 872), (188, 965)],
    "ivy": [(63, 111), (16, 241), (40, 352)],
    "jedit": [(90, 272), (75, 306), (79, 312), (48, 367), (11, 492)],
    "log4j": [(34, 135), (37, 109), (189, 205)],
    "lucene": [(91, 195), (144, 247), (203, 340)],
    "poi": [(141, 237), (37, 314), (248, 385), (281, 442)],
    "synapse": [(16, 157), (60, 222), (86, 256)],
    "velocity": [(147, 196), (142, 214), (78, 229)],
    "xerces": [(77, 162), (71, 440), (69, 453), (437, 588)],
}


class DataError(ValueError):
    """Base class for problems with input data files."""


class SchemaError(DataError):
    """A required column cannot be resolved from the CSV header."""


class ParseError(DataError):
    """A cell could not be parsed; the message names the row and column."""


@dataclass(frozen=True)
class Schema:
    """Maps the metric and defect-count fields to CSV header names.

    Header matching is case-insensitive and ignores surrounding whitespace.
    Columns that are neither metrics nor the defect column are kept as
    identifiers for reporting.
    """

    metric_columns: Mapping[str, str] = field(
        default_factory=lambda: {a: a for a in ATTRIBUTES})
    defect_column: str = "bug"
    defect_aliases: tuple[str, ...] = ("bugs", "defects", "defect")

    def resolve(self, header: Sequence[str], path: Path | str = "<csv>") -> tuple[list[int], int]:
        norm = [h.strip().lower() for h in header]
        positions = []
        for attr in ATTRIBUTES:
            name = self.metric_columns.get(attr, attr).strip().lower()
            if name not in norm:
                raise SchemaError(f"{path}: missing metric column {name!r} (attribute {attr})")
            positions.append(norm.index(name))
        for name in (self.defect_column, *self.defect_aliases):
            if name.strip().lower() in norm:
                return positions, norm.index(name.strip().lower())
        raise SchemaError(f"{path}: missing defect-count column {self.defect_column!r}")


DEFAULT_SCHEMA = Schema()


@dataclass(frozen=True)
class Instance:
    """One class/module: its metric vector, defect count and identifiers."""

    values: tuple[float, ...]
    defect_count: int
    identifiers: tuple[str, ...] = ()
    threshold: int = DEFECT_THRESHOLD

    def __post_init__(self):
        if len(self.values) != N_ATTRIBUTES:
            raise DataError(f"expected {N_ATTRIBUTES} metric values, got {len(self.values)}")
        if not all(math.isfinite(v) for v in self.values):
            raise DataError("metric values must be finite")
        if self.defect_count < 0:
            raise DataError("defect_count must be non-negative")

    @classmethod
    def from_metrics(cls, metrics: Mapping[str, float], defect_count: int, **kw) -> Instance:
        missing = [a for a in ATTRIBUTES if a not in metrics]
        if missing:
            raise DataError(f"missing metrics: {', '.join(missing)}")
        return cls(tuple(float(metrics[a]) for a in ATTRIBUTES), int(defect_count), **kw)

    @property
    def metrics(self) -> dict[str, float]:
        return dict(zip(ATTRIBUTES, self.values))

    @property
    def label(self) -> bool:
        return self.defect_count >= self.threshold


@dataclass(frozen=True)
class Release:
    project: str
    version_index: int
    instances: tuple[Instance, ...]
    source: str = ""

    def __post_init__(self):
        if not self.instances:
            raise DataError(f"release {self.project}[{self.version_index}] has no instances")
        if self.version_index < 0:
            raise DataError("version_index must be non-negative")
        object.__setattr__(self, "instances", tuple(self.instances))

    def __len__(self) -> int:
        return len(self.instances)

    @cached_property
    def X(self) -> np.ndarray:
        x = np.array([inst.values for inst in self.instances], dtype=np.float64)
        x.flags.writeable = False
        return x

    @cached_property
    def counts(self) -> np.ndarray:
        c = np.array([inst.defect_count for inst in self.instances], dtype=np.float64)
        c.flags.writeable = False
        return c

    @cached_property
    def labels(self) -> np.ndarray:
        y = np.array([inst.label for inst in self.instances], dtype=bool)
        y.flags.writeable = False
        return y

    @property
    def n_defective(self) -> int:
        return int(self.labels.sum())


@dataclass(frozen=True)
class ExperimentTriple:
    name: str
    train: Release
    tune: Release
    test: Release

    def __post_init__(self):
        a, b, c = self.train.version_index, self.tune.version_index, self.test.version_index
        if not (b == a + 1 and c == b + 1):
            raise DataError(f"{self.name}: releases are not consecutive ({a}, {b}, {c})")


def _parse_float(cell: str, path, row: int, column: str) -> float:
    text = cell.strip()
    if not text:
        raise ParseError(f"{path}: row {row}, column {column!r}: missing value")
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"{path}: row {row}, column {column!r}: cannot parse {cell!r}") from None
    if not math.isfinite(value):
        raise ParseError(f"{path}: row {row}, column {column!r}: non-finite value {cell!r}")
    return value


def load_release(path: str | Path, schema: Schema = DEFAULT_SCHEMA, *, project: str | None = None,
                 version_index: int = 0, threshold: int = DEFECT_THRESHOLD) -> Release:
    """Read one release CSV.

    Real-valued defect counts are floored.  Rows with a missing or
    unparsable cell raise :class:`ParseError`; rows are numbered from 1
    counting the header as row 1.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DataError(f"{path}: empty file")
        metric_pos, defect_pos = schema.resolve(header, path)
        used = set(metric_pos) | {defect_pos}
        ident_pos = [i for i in range(len(header)) if i not in used]
        instances = []
        for rowno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) < len(header):
                raise ParseError(f"{path}: row {rowno}: expected {len(header)} cells, got {len(row)}")
            values = tuple(_parse_float(row[p], path, rowno, header[p].strip()) for p in metric_pos)
            count = _parse_float(row[defect_pos], path, rowno, header[defect_pos].strip())
            if count < 0:
                raise ParseError(f"{path}: row {rowno}, column {header[defect_pos].strip()!r}: negative defect count")
            instances.append(Instance(values, int(math.floor(count)),
                                      tuple(row[i].strip() for i in ident_pos), threshold))
    if not instances:
        raise DataError(f"{path}: no data rows")
    return Release(project or path.stem, version_index, tuple(instances), str(path))


def write_release(release: Release, path: str | Path) -> None:
    """Write a release in the default PROMISE column layout."""
    path = Path(path)
    n_ident = max((len(i.identifiers) for i in release.instances), default=0)
    ident_header = ["name", "version", "name"][:n_ident] + [f"id{k}" for k in range(3, n_ident)]
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow([*ident_header, *ATTRIBUTES, "bug"])
        for inst in release.instances:
            ident = list(inst.identifiers) + [""] * (n_ident - len(inst.identifiers))
            w.writerow([*ident, *(repr(v) for v in inst.values), inst.defect_count])


def read_manifest(path: str | Path) -> list[Path]:
    """Release paths listed in a manifest, resolved relative to its directory."""
    path = Path(path)
    entries = []
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            p = Path(line)
            entries.append(p if p.is_absolute() else path.parent / p)
    if not entries:
        raise DataError(f"{path}: manifest lists no releases")
    return entries


def load_project(manifest: str | Path, schema: Schema = DEFAULT_SCHEMA, project: str | None = None,
                 threshold: int = DEFECT_THRESHOLD) -> list[Release]:
    manifest = Path(manifest)
    project = project or manifest.stem
    return [load_release(p, schema, project=project, version_index=k, threshold=threshold)
            for k, p in enumerate(read_manifest(manifest))]


def find_manifests(location: str | Path) -> list[Path]:
    """A single manifest file, or every ``*.manifest`` file in a directory."""
    location = Path(location)
    if location.is_file():
        return [location]
    if not location.is_dir():
        raise DataError(f"{location}: no such manifest file or directory")
    found = sorted(location.glob("*.manifest"))
    if not found:
        raise DataError(f"{location}: no *.manifest files")
    return found


def build_triples(releases: Sequence[Release]) -> list[ExperimentTriple]:
    """Sliding windows of three consecutive releases, named ``<project>V<k>``."""
    if not releases:
        raise DataError("no releases given")
    project = releases[0].project
    if any(r.project != project for r in releases):
        raise DataError("releases belong to more than one project")
    if len(releases) < 3:
        raise DataError(f"project {project!r} has {len(releases)} release(s); at least 3 are needed")
    ordered = list(releases)
    if [r.version_index for r in ordered] != sorted(r.version_index for r in ordered):
        raise DataError(f"project {project!r}: releases are not sorted by version")
    return [ExperimentTriple(f"{project}V{k}", *ordered[k:k + 3]) for k in range(len(ordered) - 2)]


def merge_releases(a: Release, b: Release) -> Release:
    if a.project != b.project:
        raise DataError(f"cannot merge releases of {a.project!r} and {b.project!r}")
    return Release(a.project, a.version_index, a.instances + b.instances, f"{a.source}+{b.source}")


def load_triples(location: str | Path, schema: Schema = DEFAULT_SCHEMA) -> list[ExperimentTriple]:
    triples = []
    for manifest in find_manifests(location):
        triples.extend(build_triples(load_project(manifest, schema)))
    return triples


def display_name(triple_name: str, project_triples: int) -> str:
    """Table name: projects with a single triple drop the ``V0`` suffix (``ivyV0`` -> ``ivy``)."""
    if project_triples == 1 and triple_name.endswith("V0"):
        return triple_name[:-2]
    return triple_name


def expected_triple_counts() -> dict[str, tuple[tuple[int, int], tuple[int, int], tuple[int, int]]]:
    """The (defective, total) counts of train/tune/test for each published triple."""
    out = {}
    for project, rel in PUBLISHED_RELEASES.items():
        for k in range(len(rel) - 2):
            out[f"{project}V{k}"] = (rel[k], rel[k + 1], rel[k + 2])
    return out


def check_counts(triples: Iterable[ExperimentTriple]) -> list[tuple[str, str, tuple[int, int], tuple[int, int] | None]]:
    """Compare observed counts against the published ones.

    Returns ``(triple, role, observed, expected)`` rows; ``expected`` is None
    for triples that have no published counterpart.
    """
    expected = expected_triple_counts()
    rows = []
    for t in triples:
        exp = expected.get(t.name)
        for k, (role, rel) in enumerate((("train", t.train), ("tune", t.tune), ("test", t.test))):
            rows.append((t.name, role, (rel.n_defective, len(rel)), exp[k] if exp else None))
    return rows
