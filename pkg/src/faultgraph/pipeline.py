"""Pipeline orchestration and report-bundle writers.

Every emitted file is plain tab-separated text with a fixed header row,
sorted rows, and floats rendered with %.12g, so reruns on identical inputs
produce byte-identical bundles. Statistical non-results (too small a tail,
zero variance, an empty family) are recorded as status rows rather than
aborting the run: on small systems they are expected outcomes, not faults.
"""

import logging
import re
from dataclasses import dataclass
from pathlib import Path

from .bugs import BugLedger, build_bug_ledger, load_issue_registry, parse_commit_log
from .config import PipelineConfig, ReleaseConfig
from .errors import (
    ConfigError,
    DegenerateInput,
    DegenerateTable,
    EmptyFamily,
    FaultgraphError,
    InputError,
    InsufficientTail,
)
from .evolution import (
    FAMILY_NAMES,
    ReleaseSnapshot,
    classify_cus,
    family_significance,
    family_stats,
    fractional_changes,
)
from .facts import CUFacts, dump_facts_file, load_facts_file
from .graphs import ClassGraph, CUGraph, build_class_graph, build_cu_graph
from .javaparse import parse_corpus_dir
from .metrics import METRIC_NAMES, ClassMetrics, MetricVector, compute_metrics, metric_value
from .resolve import ClassId, ResolvedCorpus, resolve_type_references
from .tailstats import CONTINUOUS, DISCRETE, ccdf, fit_power_law_tail, pearson

log = logging.getLogger(__name__)

DISTRIBUTIONS = METRIC_NAMES + ("bugs_per_cu", "cus_per_bug")

STAGE_SOURCE = "source_facts"
STAGE_GRAPH = "metrics_graph"
STAGE_BUGS = "bug_mapping"
STAGE_STATS = "tail_stats"
STAGE_EVOLUTION = "evolution"


class StageFailure(FaultgraphError):
    """An error bound to the pipeline stage it occurred in."""

    def __init__(self, stage: str, error: Exception):
        self.stage = stage
        self.error = error
        super().__init__(f"stage {stage}: {error}")

    @property
    def is_input_error(self) -> bool:
        return isinstance(self.error, InputError)


def _fmt(x: float) -> str:
    return "%.12g" % x


def _safe_tag(tag: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]", "_", tag)


def write_table(path: Path, header: list[str], rows: list[list]) -> None:
    lines = ["\t".join(header)]
    for row in rows:
        lines.append("\t".join(str(cell) for cell in row))
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8", newline="\n")


# --------------------------------------------------------------------------
# Release assembly
# --------------------------------------------------------------------------


@dataclass
class ReleaseData:
    tag: str
    facts: list[CUFacts]
    corpus: ResolvedCorpus
    class_graph: ClassGraph
    cu_graph: CUGraph
    per_class: dict[ClassId, ClassMetrics]
    per_cu: dict[str, MetricVector]
    ledger: BugLedger | None = None
    dropped_links: int = 0

    @property
    def snapshot(self) -> ReleaseSnapshot:
        assert self.ledger is not None, "snapshot needs a ledger"
        return ReleaseSnapshot(release=self.tag, metrics=self.per_cu, ledger=self.ledger)


def load_release_facts(rc: ReleaseConfig) -> list[CUFacts]:
    """Strict facts loading: any parse failure aborts."""
    if rc.facts is not None:
        facts = load_facts_file(rc.facts)
    else:
        facts, failures = parse_corpus_dir(rc.corpus)
        if failures:
            listing = "; ".join(f"{p}: {e}" for p, e in failures)
            raise InputError(f"release {rc.tag!r}: {len(failures)} file(s) failed to parse: {listing}")
    if not facts:
        raise InputError(f"release {rc.tag!r}: no compilation units found")
    return facts


def build_release(cfg: PipelineConfig, rc: ReleaseConfig, with_bugs: bool = False) -> ReleaseData:
    try:
        facts = load_release_facts(rc)
        corpus = resolve_type_references(facts)
    except InputError as exc:
        raise StageFailure(STAGE_SOURCE, exc) from exc
    try:
        cg = build_class_graph(corpus)
        cug = build_cu_graph(cg, corpus)
        per_class, per_cu = compute_metrics(corpus, cg, cug)
    except FaultgraphError as exc:
        raise StageFailure(STAGE_GRAPH, exc) from exc
    data = ReleaseData(
        tag=rc.tag,
        facts=facts,
        corpus=corpus,
        class_graph=cg,
        cu_graph=cug,
        per_class=per_class,
        per_cu=per_cu,
    )
    if with_bugs:
        attach_ledger(cfg, data)
    return data


def attach_ledger(cfg: PipelineConfig, data: ReleaseData) -> None:
    try:
        if cfg.commit_log is None:
            raise ConfigError("config has no commit_log (required to map bugs)")
        if cfg.issue_registry is None:
            raise ConfigError("config has no issue_registry (required to map bugs)")
        commits = parse_commit_log(cfg.commit_log)
        registry = load_issue_registry(cfg.issue_registry)
        window = cfg.window_of(data.tag)
        full = build_bug_ledger(commits, registry, cfg.filter_config, window, data.tag)
        known = set(data.per_cu)
        ledger = full.restricted_to(known)
        data.dropped_links = len(full.links) - len(ledger.links)
        if data.dropped_links:
            log.warning(
                "release %s: dropped %d issue links to files outside the corpus",
                data.tag, data.dropped_links,
            )
        data.ledger = ledger
    except InputError as exc:
        raise StageFailure(STAGE_BUGS, exc) from exc


# --------------------------------------------------------------------------
# Per-release writers
# --------------------------------------------------------------------------


def write_facts(data: ReleaseData, out: Path) -> Path:
    path = out / f"facts-{_safe_tag(data.tag)}.jsonl"
    dump_facts_file(sorted(data.facts, key=lambda cu: cu.path), path)
    return path


def write_graphs(data: ReleaseData, out: Path) -> list[Path]:
    tag = _safe_tag(data.tag)
    class_rows = sorted(
        [src[0], src[1], tgt[0], tgt[1], kind] for src, tgt, kind in data.class_graph.edges
    )
    p1 = out / f"class-graph-{tag}.tsv"
    write_table(p1, ["source_path", "source_class", "target_path", "target_class", "kind"], class_rows)
    cu_rows = sorted([s, t, k, w] for (s, t, k), w in data.cu_graph.weights.items())
    p2 = out / f"cu-graph-{tag}.tsv"
    write_table(p2, ["source", "target", "kind", "weight"], cu_rows)
    return [p1, p2]


def write_metrics(data: ReleaseData, out: Path) -> list[Path]:
    tag = _safe_tag(data.tag)
    class_rows = [
        [cid[0], cid[1], m.wmc, m.cbo, m.rfc, m.lcom, m.loc]
        for cid, m in sorted(data.per_class.items())
    ]
    p1 = out / f"class-metrics-{tag}.tsv"
    write_table(p1, ["path", "class", "wmc", "cbo", "rfc", "lcom", "loc"], class_rows)
    cu_rows = [
        [path, *(metric_value(v, name) for name in METRIC_NAMES)]
        for path, v in sorted(data.per_cu.items())
    ]
    p2 = out / f"metrics-{tag}.tsv"
    write_table(p2, ["path", *METRIC_NAMES], cu_rows)
    return [p1, p2]


def write_bugs(data: ReleaseData, out: Path) -> list[Path]:
    assert data.ledger is not None
    tag = _safe_tag(data.tag)
    p1 = out / f"bugs-per-cu-{tag}.tsv"
    write_table(
        p1,
        ["path", "bugs"],
        [[path, data.ledger.count(path)] for path in sorted(data.per_cu)],
    )
    p2 = out / f"cus-per-bug-{tag}.tsv"
    write_table(
        p2,
        ["issue_id", "cus"],
        [[i, n] for i, n in sorted(data.ledger.cus_per_bug.items())],
    )
    return [p1, p2]


def distribution_samples(data: ReleaseData, name: str) -> list[float]:
    if name == "bugs_per_cu":
        assert data.ledger is not None
        return [float(data.ledger.count(p)) for p in sorted(data.per_cu)]
    if name == "cus_per_bug":
        assert data.ledger is not None
        return [float(n) for _, n in sorted(data.ledger.cus_per_bug.items())]
    return [float(metric_value(v, name)) for _, v in sorted(data.per_cu.items())]


def _selected_distributions(only: str | None) -> tuple[str, ...]:
    if only is None:
        return DISTRIBUTIONS
    if only not in DISTRIBUTIONS:
        raise ConfigError(f"unknown distribution {only!r}; expected one of {', '.join(DISTRIBUTIONS)}")
    return (only,)


def write_ccdfs(data: ReleaseData, out: Path, only: str | None = None) -> list[Path]:
    tag = _safe_tag(data.tag)
    paths = []
    for name in _selected_distributions(only):
        samples = distribution_samples(data, name)
        rows: list[list] = []
        if samples:
            curve = ccdf(samples)
            rows = [[_fmt(x), _fmt(p)] for x, p in curve.points]
        path = out / f"ccdf-{tag}-{name}.tsv"
        write_table(path, ["x", "p"], rows)
        paths.append(path)
    return paths


def write_tail_fits(data: ReleaseData, out: Path, only: str | None = None) -> Path:
    rows = []
    for name in _selected_distributions(only):
        # count distributions are discrete; only the LOC scale is continuous
        mode = CONTINUOUS if name == "cu_loc" else DISCRETE
        positive = [s for s in distribution_samples(data, name) if s > 0]
        if not positive:
            rows.append([name, mode, "empty", "", "", "", ""])
            continue
        try:
            fit = fit_power_law_tail(positive, mode=mode)
            rows.append(
                [name, mode, "ok", _fmt(fit.gamma), _fmt(fit.x_min), _fmt(fit.ks), fit.n_tail]
            )
        except InsufficientTail:
            rows.append([name, mode, "insufficient-tail", "", "", "", len(positive)])
    path = out / f"tailfit-{_safe_tag(data.tag)}.tsv"
    write_table(path, ["distribution", "mode", "status", "gamma", "x_min", "ks", "n_tail"], rows)
    return path


def write_correlations(data: ReleaseData, out: Path) -> Path:
    assert data.ledger is not None
    paths = sorted(data.per_cu)
    bugs = [data.ledger.count(p) for p in paths]
    rows = []
    for name in METRIC_NAMES:
        xs = [metric_value(data.per_cu[p], name) for p in paths]
        try:
            r = pearson(xs, bugs)
            rows.append([name, len(paths), _fmt(r), "ok"])
        except DegenerateInput:
            rows.append([name, len(paths), "", "degenerate"])
    path = out / f"correlation-{_safe_tag(data.tag)}.tsv"
    write_table(path, ["metric", "n", "r", "status"], rows)
    return path


# --------------------------------------------------------------------------
# Per-pair writers
# --------------------------------------------------------------------------


def write_evolution(prev: ReleaseData, nxt: ReleaseData, out: Path) -> list[Path]:
    pair = f"{_safe_tag(prev.tag)}-{_safe_tag(nxt.tag)}"
    prev_snap, next_snap = prev.snapshot, nxt.snapshot
    family_rows, chi_rows, delta_rows = [], [], []
    for metric in METRIC_NAMES:
        partition = classify_cus(prev_snap, next_snap, metric)
        for family_name in FAMILY_NAMES:
            members = partition.family(family_name)
            if not members:
                family_rows.append([metric, family_name, 0, "", "", ""])
                continue
            stats = family_stats(members, next_snap.ledger)
            infected = sum(1 for p in members if next_snap.ledger.count(p) >= 1)
            family_rows.append(
                [
                    metric,
                    family_name,
                    stats.n,
                    infected,
                    _fmt(stats.infection_probability),
                    _fmt(stats.mean_bugs_infected) if stats.mean_bugs_infected is not None else "",
                ]
            )
        try:
            res = family_significance(partition, next_snap.ledger)
            chi_rows.append([metric, _fmt(res.chi2), res.dof, _fmt(res.p_value), "ok"])
        except EmptyFamily:
            chi_rows.append([metric, "", "", "", "empty-family"])
        except DegenerateTable:
            chi_rows.append([metric, "", "", "", "degenerate"])
        changes, bug_counts = fractional_changes(partition, prev_snap, next_snap, metric)
        n_used = len(changes)
        n_excluded = len(partition.updated) - n_used
        try:
            r = pearson(changes, bug_counts) if n_used >= 3 else None
            if r is None:
                delta_rows.append([metric, n_used, n_excluded, "", "too-few-updated"])
            else:
                delta_rows.append([metric, n_used, n_excluded, _fmt(r), "ok"])
        except DegenerateInput:
            delta_rows.append([metric, n_used, n_excluded, "", "degenerate"])
    p1 = out / f"evolution-{pair}.tsv"
    write_table(
        p1,
        ["metric", "family", "n", "infected", "infection_probability", "mean_bugs_infected"],
        family_rows,
    )
    p2 = out / f"significance-{pair}.tsv"
    write_table(p2, ["metric", "chi2", "dof", "p_value", "status"], chi_rows)
    p3 = out / f"delta-correlation-{pair}.tsv"
    write_table(p3, ["metric", "n_used", "n_excluded", "r", "status"], delta_rows)
    return [p1, p2, p3]


# --------------------------------------------------------------------------
# Commands
# --------------------------------------------------------------------------


def _select_releases(cfg: PipelineConfig, release: str | None) -> list[ReleaseConfig]:
    if release is None:
        return list(cfg.releases)
    return [cfg.release(release)]


def cmd_extract(cfg: PipelineConfig, out_dir: Path, release: str | None = None):
    """Parse corpora into facts files. Failed files are reported and skipped;
    returns (written paths, failures) so the CLI can exit nonzero."""
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    failures: list[tuple[str, str, Exception]] = []
    for rc in _select_releases(cfg, release):
        if rc.facts is not None:
            try:
                facts = load_facts_file(rc.facts)
            except InputError as exc:
                raise StageFailure(STAGE_SOURCE, exc) from exc
        else:
            facts, failed = parse_corpus_dir(rc.corpus)
            failures.extend((rc.tag, path, err) for path, err in failed)
        if not facts:
            raise StageFailure(
                STAGE_SOURCE, InputError(f"release {rc.tag!r}: no compilation units found")
            )
        path = out_dir / f"facts-{_safe_tag(rc.tag)}.jsonl"
        dump_facts_file(sorted(facts, key=lambda cu: cu.path), path)
        written.append(path)
    return written, failures


def cmd_analyze(cfg: PipelineConfig, out_dir: Path, release: str | None = None) -> list[Path]:
    """The full battery: facts, graphs, metrics, bugs, distributions, fits,
    correlations per release; families, significance, delta correlations per
    release pair."""
    out_dir.mkdir(parents=True, exist_ok=True)
    emitted: list[Path] = []
    releases = _select_releases(cfg, release)
    data_by_tag: dict[str, ReleaseData] = {}
    for rc in releases:
        data = build_release(cfg, rc, with_bugs=True)
        data_by_tag[rc.tag] = data
        emitted.append(write_facts(data, out_dir))
        emitted.extend(write_graphs(data, out_dir))
        emitted.extend(write_metrics(data, out_dir))
        emitted.extend(write_bugs(data, out_dir))
        try:
            emitted.extend(write_ccdfs(data, out_dir))
            emitted.append(write_tail_fits(data, out_dir))
            emitted.append(write_correlations(data, out_dir))
        except FaultgraphError as exc:
            raise StageFailure(STAGE_STATS, exc) from exc
    if release is None:
        for a, b in cfg.release_pairs:
            try:
                emitted.extend(write_evolution(data_by_tag[a], data_by_tag[b], out_dir))
            except FaultgraphError as exc:
                raise StageFailure(STAGE_EVOLUTION, exc) from exc
    return emitted
