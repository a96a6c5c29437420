"""Cross-release analysis: CU families, infection statistics, significance.

Between consecutive releases and for a chosen metric, every CU present in
both snapshots is *updated* (metric changed) or *unchanged*; CUs only in the
later release are *added*; CUs only in the earlier one are *deleted* and
excluded from the statistics. CU identity across releases is the file path,
so renames count as delete plus add.
"""

from dataclasses import dataclass

from .bugs import BugLedger
from .errors import DegenerateInput, EmptyFamily
from .metrics import MetricVector, metric_value
from .tailstats import ChiSquareResult, chi_square_independence, pearson

FAMILY_NAMES = ("updated", "unchanged", "added")


@dataclass(frozen=True)
class ReleaseSnapshot:
    release: str
    metrics: dict[str, MetricVector]  # CU path -> metric vector
    ledger: BugLedger

    def __post_init__(self):
        if self.ledger.release != self.release:
            raise ValueError(
                f"ledger is for release {self.ledger.release!r}, snapshot is {self.release!r}"
            )
        stray = [p for p, n in self.ledger.bugs_per_cu.items() if n > 0 and p not in self.metrics]
        if stray:
            raise ValueError(
                f"ledger references CUs missing from the snapshot: {sorted(stray)[:5]}"
            )


@dataclass(frozen=True)
class FamilyPartition:
    metric: str
    updated: frozenset[str]
    unchanged: frozenset[str]
    added: frozenset[str]
    deleted: frozenset[str]

    def __post_init__(self):
        assert not (self.updated & self.unchanged)
        assert not ((self.updated | self.unchanged) & self.added)
        assert not ((self.updated | self.unchanged | self.added) & self.deleted)

    def family(self, name: str) -> frozenset[str]:
        if name not in FAMILY_NAMES:
            raise EmptyFamily(f"unknown family {name!r}")
        return getattr(self, name)


@dataclass(frozen=True)
class FamilyStats:
    infection_probability: float
    mean_bugs_infected: float | None  # undefined when nothing is infected
    n: int


def classify_cus(prev: ReleaseSnapshot, next_: ReleaseSnapshot, metric: str) -> FamilyPartition:
    """Partition CUs into updated/unchanged/added/deleted for one metric."""
    prev_paths = set(prev.metrics)
    next_paths = set(next_.metrics)
    common = prev_paths & next_paths
    updated = {
        p for p in common
        if metric_value(prev.metrics[p], metric) != metric_value(next_.metrics[p], metric)
    }
    return FamilyPartition(
        metric=metric,
        updated=frozenset(updated),
        unchanged=frozenset(common - updated),
        added=frozenset(next_paths - prev_paths),
        deleted=frozenset(prev_paths - next_paths),
    )


def family_stats(family, ledger: BugLedger) -> FamilyStats:
    members = sorted(family)
    if not members:
        raise EmptyFamily("family has no members")
    infected = [p for p in members if ledger.count(p) >= 1]
    probability = len(infected) / len(members)
    mean = sum(ledger.count(p) for p in infected) / len(infected) if infected else None
    return FamilyStats(infection_probability=probability, mean_bugs_infected=mean, n=len(members))


def delta_metric_correlation(
    partition: FamilyPartition,
    prev: ReleaseSnapshot,
    next_: ReleaseSnapshot,
    metric: str,
) -> float:
    """Pearson correlation between the fractional metric change of updated CUs
    and their bug count in the later release; members with a zero previous
    value are excluded (undefined ratio)."""
    changes, bug_counts = fractional_changes(partition, prev, next_, metric)
    if len(changes) < 3:
        raise DegenerateInput(
            f"only {len(changes)} updated CUs with a nonzero previous {metric}"
        )
    return pearson(changes, bug_counts)


def fractional_changes(
    partition: FamilyPartition,
    prev: ReleaseSnapshot,
    next_: ReleaseSnapshot,
    metric: str,
) -> tuple[list[float], list[int]]:
    """(fractional changes, later-release bug counts) over usable updated CUs,
    sorted by path. The excluded count is len(partition.updated) minus the
    returned length."""
    changes: list[float] = []
    bug_counts: list[int] = []
    for path in sorted(partition.updated):
        before = metric_value(prev.metrics[path], metric)
        if before == 0:
            continue
        after = metric_value(next_.metrics[path], metric)
        changes.append((after - before) / before)
        bug_counts.append(next_.ledger.count(path))
    return changes, bug_counts


def family_significance(partition: FamilyPartition, ledger: BugLedger) -> ChiSquareResult:
    """Chi-square independence test on the 3x2 (family x infected) table."""
    table = []
    for name in FAMILY_NAMES:
        members = partition.family(name)
        if not members:
            raise EmptyFamily(f"family {name!r} is empty")
        infected = sum(1 for p in members if ledger.count(p) >= 1)
        table.append([infected, len(members) - infected])
    return chi_square_independence(table)
