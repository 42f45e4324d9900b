"""Benchmark runs: dataset resolution, repeated runs, aggregation and report formats."""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .data import Dataset, LabelColumn, Partition, load_csv
from .engine import AmsosResult, AmsosTrace, amsos
from .errors import MissingReferenceError, SpecValidationError
from .kmeans import lloyd
from .metrics import HIGHER_IS_BETTER, REPORT_COLUMNS, REPORT_HEADERS, MetricReport, full_report
from .seeding import METHODS, make_seeds
from .synthetic import BUILTIN_IDS, builtin_mixture, generate

ALGORITHMS = ("amsos", "kmeans")
OUTPUTS = ("json", "csv", "markdown")
FORMAT_VERSION = 1


def derive_seed(seed: int, run: int) -> int:
    """Seed of run ``run``: first 8 bytes of sha256(b"<seed>:<run>"), big-endian, as a 63-bit int."""
    digest = hashlib.sha256(f"{seed}:{run}".encode("ascii")).digest()
    return int.from_bytes(digest[:8], "big") >> 1


@dataclass(frozen=True)
class RunSpec:
    dataset: str
    algorithm: str = "amsos"
    init: str = "spss"
    k: int | None = None
    seed: int = 0
    repeats: int = 1
    output: str = "json"
    label_col: LabelColumn = "last"
    zscore: bool = False

    def validate(self) -> "RunSpec":
        if not self.dataset:
            raise SpecValidationError("a dataset id or CSV path is required")
        if self.algorithm not in ALGORITHMS:
            raise SpecValidationError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if self.init not in METHODS:
            raise SpecValidationError(f"init must be one of {METHODS}, got {self.init!r}")
        if self.output not in OUTPUTS:
            raise SpecValidationError(f"output must be one of {OUTPUTS}, got {self.output!r}")
        if self.repeats < 1:
            raise SpecValidationError("repeats must be at least 1")
        if self.algorithm == "amsos":
            if self.k is not None:
                raise SpecValidationError("AMSOS chooses k itself; do not pass --k")
            if self.init != "spss":
                raise SpecValidationError("AMSOS always seeds with spss")
        else:
            if self.k is None:
                raise SpecValidationError("k-means baselines need --k")
            if self.k < 2:
                raise SpecValidationError("k must be at least 2")
        return self

    @property
    def label(self) -> str:
        return "amsos" if self.algorithm == "amsos" else f"kmeans+{self.init}"


@dataclass(frozen=True)
class RunRow:
    run: int
    seed: int
    k_in: int
    k_out: int
    metrics: MetricReport


@dataclass(frozen=True)
class CentroidRow:
    obtained_index: int | None
    obtained: tuple[float, ...] | None
    reference_index: int | None
    reference: tuple[float, ...] | None

    @property
    def paired(self) -> bool:
        return self.obtained is not None and self.reference is not None

    @property
    def deviation(self) -> tuple[float, ...] | None:
        if not self.paired:
            return None
        return tuple(abs(a - b) for a, b in zip(self.obtained, self.reference))

    @property
    def max_deviation(self) -> float | None:
        dev = self.deviation
        return None if dev is None else max(dev)


@dataclass(frozen=True)
class CentroidTable:
    rows: tuple[CentroidRow, ...]

    @property
    def complete(self) -> bool:
        return all(r.paired for r in self.rows)

    @property
    def max_deviation(self) -> float | None:
        devs = [r.max_deviation for r in self.rows if r.paired]
        return max(devs) if devs else None

    def to_markdown(self) -> str:
        lines = ["| Reference centroid | Obtained centroid | Max abs deviation |", "|---|---|---|"]
        for r in self.rows:
            ref = _vec(r.reference) if r.reference is not None else "(unpaired)"
            got = _vec(r.obtained) if r.obtained is not None else "(unpaired)"
            dev = f"{r.max_deviation:.4f}" if r.paired else "-"
            lines.append(f"| {ref} | {got} | {dev} |")
        return "\n".join(lines) + "\n"


def _vec(values, digits: int = 4) -> str:
    return " ".join(f"{v:.{digits}f}" for v in values)


def centroid_table(result, reference_means) -> CentroidTable:
    """Pair obtained centroids with reference means.

    Pairs are formed greedily, closest first, each reference used at most
    once. ``result`` may be an AMSOS result, a partition or a raw array of
    centroids. Centroids or references left over are reported as unpaired rows.
    """
    if isinstance(result, AmsosResult):
        result = result.partition
    if isinstance(result, Partition):
        result = result.centroids
    centroids = np.asarray(result, dtype=np.float64)
    refs = np.asarray(reference_means, dtype=np.float64)
    dist = np.linalg.norm(centroids[:, None, :] - refs[None, :, :], axis=2)
    pairs = sorted(((dist[i, j], i, j) for i in range(len(centroids)) for j in range(len(refs))))
    used_c, used_r, matched = set(), set(), {}
    for _, i, j in pairs:
        if i not in used_c and j not in used_r:
            used_c.add(i)
            used_r.add(j)
            matched[j] = i
    rows = [
        CentroidRow(i, tuple(map(float, centroids[i])), j, tuple(map(float, refs[j])))
        for j, i in sorted(matched.items())
    ]
    rows += [CentroidRow(i, tuple(map(float, centroids[i])), None, None) for i in range(len(centroids)) if i not in used_c]
    rows += [CentroidRow(None, None, j, tuple(map(float, refs[j]))) for j in range(len(refs)) if j not in used_r]
    return CentroidTable(tuple(rows))


@dataclass(frozen=True)
class BenchReport:
    spec: RunSpec
    dataset_name: str
    m: int
    n: int
    runs: tuple[RunRow, ...]
    centroids: CentroidTable | None = None
    repeats_identical: bool | None = None
    trace: AmsosTrace | None = field(default=None, compare=False, repr=False)

    @property
    def aggregate(self) -> dict[str, dict[str, float]]:
        """Mean, best and worst of each metric over all runs."""
        out = {}
        for name in REPORT_COLUMNS:
            values = [getattr(r.metrics, name) for r in self.runs]
            best, worst = (max, min) if HIGHER_IS_BETTER[name] else (min, max)
            out[name] = {"mean": float(np.mean(values)), "best": best(values), "worst": worst(values)}
        return out

    # -- JSON ---------------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "spec": asdict(self.spec),
            "dataset": {"name": self.dataset_name, "m": self.m, "n": self.n},
            "runs": [
                {"run": r.run, "seed": r.seed, "k_in": r.k_in, "k_out": r.k_out, "metrics": r.metrics.to_dict()}
                for r in self.runs
            ],
            "aggregate": self.aggregate,
            "repeats_identical": self.repeats_identical,
            "centroids": None
            if self.centroids is None
            else [
                {
                    "obtained_index": r.obtained_index,
                    "obtained": None if r.obtained is None else list(r.obtained),
                    "reference_index": r.reference_index,
                    "reference": None if r.reference is None else list(r.reference),
                    "max_deviation": r.max_deviation,
                }
                for r in self.centroids.rows
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "BenchReport":
        raw = json.loads(text)
        runs = tuple(
            RunRow(r["run"], r["seed"], r["k_in"], r["k_out"], MetricReport.from_dict(r["metrics"])) for r in raw["runs"]
        )
        centroids = None
        if raw["centroids"] is not None:
            centroids = CentroidTable(
                tuple(
                    CentroidRow(
                        c["obtained_index"],
                        None if c["obtained"] is None else tuple(c["obtained"]),
                        c["reference_index"],
                        None if c["reference"] is None else tuple(c["reference"]),
                    )
                    for c in raw["centroids"]
                )
            )
        d = raw["dataset"]
        return cls(RunSpec(**raw["spec"]), d["name"], d["m"], d["n"], runs, centroids, raw["repeats_identical"])

    # -- CSV ----------------------------------------------------------------
    # Layout: "#" metadata lines carrying the run settings and dataset as JSON, the
    # per-run metric table (plus mean/best/worst rows, which are derived and
    # skipped on reading), a blank line, then the centroid table if any.

    _RUN_HEADER = ("run", "seed", "ip_k", "op_k", *REPORT_HEADERS)
    _CENTROID_HEADER = ("obtained_index", "obtained", "reference_index", "reference", "max_deviation")

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(f"# spec: {json.dumps(asdict(self.spec))}\n")
        meta = {"name": self.dataset_name, "m": self.m, "n": self.n, "repeats_identical": self.repeats_identical}
        out.write(f"# dataset: {json.dumps(meta)}\n")
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(self._RUN_HEADER)
        for r in self.runs:
            writer.writerow([r.run, r.seed, r.k_in, r.k_out, *(repr(float(getattr(r.metrics, c))) for c in REPORT_COLUMNS)])
        agg = self.aggregate
        for stat in ("mean", "best", "worst"):
            writer.writerow([stat, "", "", "", *(repr(float(agg[c][stat])) for c in REPORT_COLUMNS)])
        if self.centroids is not None:
            out.write("\n")
            writer.writerow(self._CENTROID_HEADER)
            for c in self.centroids.rows:
                writer.writerow(
                    [
                        "" if c.obtained_index is None else c.obtained_index,
                        "" if c.obtained is None else " ".join(repr(v) for v in c.obtained),
                        "" if c.reference_index is None else c.reference_index,
                        "" if c.reference is None else " ".join(repr(v) for v in c.reference),
                        "" if c.max_deviation is None else repr(c.max_deviation),
                    ]
                )
        return out.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "BenchReport":
        lines = text.splitlines()
        spec = RunSpec(**json.loads(lines[0].split(": ", 1)[1]))
        meta = json.loads(lines[1].split(": ", 1)[1])
        body = "\n".join(lines[2:])
        sections = body.split("\n\n")
        runs = []
        for row in list(csv.DictReader(io.StringIO(sections[0]))):
            if row["run"] in ("mean", "best", "worst"):
                continue
            metrics = {c: float(row[h]) for c, h in zip(REPORT_COLUMNS, REPORT_HEADERS)}
            metrics["k"] = int(row["op_k"])
            runs.append(RunRow(int(row["run"]), int(row["seed"]), int(row["ip_k"]), int(row["op_k"]), MetricReport.from_dict(metrics)))
        centroids = None
        if len(sections) > 1 and sections[1].strip():

            def vec(cell):
                return tuple(float(v) for v in cell.split()) if cell else None

            def idx(cell):
                return int(cell) if cell else None

            centroids = CentroidTable(
                tuple(
                    CentroidRow(idx(r["obtained_index"]), vec(r["obtained"]), idx(r["reference_index"]), vec(r["reference"]))
                    for r in csv.DictReader(io.StringIO(sections[1]))
                )
            )
        return cls(spec, meta["name"], meta["m"], meta["n"], tuple(runs), centroids, meta["repeats_identical"])

    # -- Markdown -----------------------------------------------------------

    def to_markdown(self) -> str:
        header = ("Dataset", "Algorithm", "i/p k", "o/p k", *REPORT_HEADERS)
        lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
        for r in self.runs:
            cells = [f"{self.dataset_name} #{r.run}", self.spec.label, str(r.k_in), str(r.k_out)]
            cells += [f"{getattr(r.metrics, c):.3f}" for c in REPORT_COLUMNS]
            lines.append("| " + " | ".join(cells) + " |")
        agg = self.aggregate
        for stat in ("mean", "best", "worst"):
            cells = [self.dataset_name, f"{self.spec.label} ({stat})", "", ""]
            cells += [f"{agg[c][stat]:.3f}" for c in REPORT_COLUMNS]
            lines.append("| " + " | ".join(cells) + " |")
        text = "\n".join(lines) + "\n"
        if self.repeats_identical is not None:
            text += f"\nRepeats identical: {'yes' if self.repeats_identical else 'NO'}\n"
        if self.centroids is not None:
            text += "\n" + self.centroids.to_markdown()
        return text

    def render(self, output: str | None = None) -> str:
        output = output or self.spec.output
        if output == "json":
            return self.to_json()
        if output == "csv":
            return self.to_csv()
        if output == "markdown":
            return self.to_markdown()
        raise SpecValidationError(f"unknown output format {output!r}")


def load_dataset(spec: RunSpec) -> tuple[Dataset, np.ndarray | None]:
    """Resolve the dataset of a run and the reference means for the centroid table.

    Builtin mixtures are generated from the master seed, so every repeat sees
    the same data. For CSV files the class means serve as references.
    """
    if spec.dataset in BUILTIN_IDS:
        mixture = builtin_mixture(spec.dataset)
        data = generate(mixture, spec.seed)
        refs = mixture.means
    else:
        data = load_csv(Path(spec.dataset), spec.label_col)
        refs = None
        if data.labels is not None:
            refs = np.array([data.points[data.labels == c].mean(axis=0) for c in range(data.n_classes)])
    if spec.zscore:
        data = data.zscore()
        if refs is not None:
            refs = np.array([data.points[data.labels == c].mean(axis=0) for c in range(data.n_classes)])
    return data, refs


def run(spec: RunSpec) -> BenchReport:
    """Execute ``spec.repeats`` runs and collect their metric reports.

    Run ``r`` draws its randomness from ``derive_seed(spec.seed, r)``. AMSOS
    uses no randomness; its repeats are compared and must be identical.
    """
    spec.validate()
    data, refs = load_dataset(spec)
    if data.labels is None:
        raise MissingReferenceError(f"{spec.dataset} has no labels; external indices cannot be computed")

    rows, partitions, traces = [], [], []
    for r in range(spec.repeats):
        seed = derive_seed(spec.seed, r)
        if spec.algorithm == "amsos":
            result = amsos(data)
            partition, k_in = result.partition, result.kmax
            traces.append(result.trace)
        else:
            seeds = make_seeds(spec.init, data, spec.k, np.random.default_rng(seed))
            partition, k_in = lloyd(data, seeds).partition, spec.k
        partitions.append(partition)
        rows.append(RunRow(r, seed, k_in, partition.k, full_report(data, partition, data.labels)))

    identical = None
    if spec.algorithm == "amsos":
        identical = all(p == partitions[0] for p in partitions) and all(t == traces[0] for t in traces)
        if not identical:
            raise RuntimeError("AMSOS produced different results on identical input")

    table = centroid_table(partitions[0], refs) if refs is not None else None
    return BenchReport(
        spec,
        data.name,
        data.m,
        data.n,
        tuple(rows),
        table,
        identical,
        traces[0] if traces else None,
    )
