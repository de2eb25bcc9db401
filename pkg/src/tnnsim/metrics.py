"""Run analysis: spike-time histograms, winner purity, cycle savings.

Purity is standard clustering purity over winner groups: presentations are
grouped by their winning (column, neuron), each group votes its majority
label, and purity is the fraction of presentations covered by those
majorities. Presentations with no winner join no group and score zero,
which keeps a silent network from looking pure.

Cycle savings compares the gamma period against what actually happened:

* realized savings use the cycle lengths the controller delivered,
* potential savings use the last column spike time itself, the bound an
  ideal zero-delay controller would reach.

A cycle in which some monitored column never fired could not have ended
early, so its last-spike time counts as the full period.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Optional, Sequence, TextIO

from .gamma import GammaTrace
from .network import RunSummary


@dataclass(frozen=True)
class SpikeHistogram:
    """Winner spike-time counts over one run; index t holds time t."""

    counts: tuple[int, ...]
    inf_count: int

    @property
    def total(self) -> int:
        return sum(self.counts) + self.inf_count

    def mode_fraction(self) -> tuple[Optional[int], float]:
        """The busiest finite time and its share of all presentations."""
        if self.total == 0 or not self.counts:
            return None, 0.0
        best = max(range(len(self.counts)), key=lambda t: self.counts[t])
        if self.counts[best] == 0:
            return None, 0.0
        return best, self.counts[best] / self.total


def spike_histogram(summary: RunSummary) -> SpikeHistogram:
    """Count network winner times over all presentations."""
    period = summary.trace.period
    counts = [0] * period
    inf_count = 0
    for win in summary.winners:
        if win is None:
            inf_count += 1
        else:
            counts[win.time] += 1
    return SpikeHistogram(counts=tuple(counts), inf_count=inf_count)


@dataclass(frozen=True)
class GroupStat:
    column: int
    neuron: int
    size: int
    majority_label: int
    majority_count: int


@dataclass(frozen=True)
class PurityReport:
    purity: float
    groups: tuple[GroupStat, ...]
    unassigned: int

    def __post_init__(self):
        if not 0.0 <= self.purity <= 1.0:
            raise ValueError(f"purity {self.purity} outside [0, 1]")


def purity(summary: RunSummary, labels: Sequence[int]) -> PurityReport:
    """Clustering purity of winner groups against the true labels.

    ``labels`` covers one dataset pass; multi-epoch summaries tile it.
    """
    n = len(summary.winners)
    labs = list(labels)
    if len(labs) * summary.epochs == n:
        labs = labs * summary.epochs
    if len(labs) != n:
        raise ValueError(
            f"{n} presentations but {len(labels)} labels (epochs={summary.epochs})"
        )
    by_group: dict[tuple[int, int], Counter] = defaultdict(Counter)
    unassigned = 0
    for win, lab in zip(summary.winners, labs):
        if win is None:
            unassigned += 1
        else:
            by_group[(win.column, win.neuron)][lab] += 1
    stats = []
    covered = 0
    for (col, neuron), votes in sorted(by_group.items()):
        label, count = max(votes.items(), key=lambda kv: (kv[1], -kv[0]))
        covered += count
        stats.append(
            GroupStat(
                column=col,
                neuron=neuron,
                size=sum(votes.values()),
                majority_label=label,
                majority_count=count,
            )
        )
    frac = covered / n if n else 0.0
    return PurityReport(purity=frac, groups=tuple(stats), unassigned=unassigned)


def cycle_savings(trace: GammaTrace, period: int) -> tuple[float, float]:
    """(realized, potential) fractional savings against the fixed period.

    Realized uses delivered cycle lengths; potential uses last-spike times,
    charging cycles with silent columns the whole period.
    """
    if len(trace) == 0:
        raise ValueError("trace is empty")
    lengths = trace.lengths()
    last_spikes = []
    for rec in trace.records:
        if len(rec.winners) == trace.column_count:
            last_spikes.append(max(t for _, t in rec.winners))
        else:
            last_spikes.append(period)
    realized = 1.0 - (sum(lengths) / len(lengths)) / period
    potential = 1.0 - (sum(last_spikes) / len(last_spikes)) / period
    return realized, potential


def write_histogram_csv(hist: SpikeHistogram, stream: TextIO) -> None:
    stream.write("spike_time,count\n")
    for t, c in enumerate(hist.counts):
        stream.write(f"{t},{c}\n")
    stream.write(f"inf,{hist.inf_count}\n")
    stream.write(f"total,{hist.total}\n")


def histogram_markdown(hist: SpikeHistogram) -> str:
    lines = ["| spike time | occurrences |", "| --- | --- |"]
    for t, c in enumerate(hist.counts):
        lines.append(f"| {t} | {c} |")
    lines.append(f"| inf | {hist.inf_count} |")
    lines.append(f"| total | {hist.total} |")
    return "\n".join(lines) + "\n"


def write_purity_csv(report: PurityReport, stream: TextIO) -> None:
    stream.write("column,neuron,size,majority_label,majority_count\n")
    for g in report.groups:
        stream.write(
            f"{g.column},{g.neuron},{g.size},{g.majority_label},{g.majority_count}\n"
        )
    stream.write(f"unassigned,,{report.unassigned},,\n")
    stream.write(f"purity,,,,{report.purity!r}\n")


def purity_markdown(report: PurityReport) -> str:
    lines = [
        "| column | neuron | size | majority label | majority count |",
        "| --- | --- | --- | --- | --- |",
    ]
    for g in report.groups:
        lines.append(
            f"| {g.column} | {g.neuron} | {g.size} | {g.majority_label} | {g.majority_count} |"
        )
    lines.append(f"| unassigned | | {report.unassigned} | | |")
    lines.append("")
    lines.append(f"purity: {report.purity:.4f}")
    return "\n".join(lines) + "\n"


def write_savings_csv(realized: float, potential: float, stream: TextIO) -> None:
    stream.write("metric,fraction\n")
    stream.write(f"realized_savings,{realized!r}\n")
    stream.write(f"potential_savings,{potential!r}\n")
