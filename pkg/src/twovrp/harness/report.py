"""Benchmark comparison against published baselines (PC and PC+manual)."""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable

ALL = object()  # summary over every row, regardless of group

CSV_COLUMNS = ("instance", "baseline_pc", "baseline_manual", "ours", "time_s", "delta_pc_percent")


@dataclass(frozen=True)
class Baseline:
    pc: int | None = None
    manual: int | None = None
    m: int | None = None  # number of both-period nodes, used for grouping


@dataclass(frozen=True)
class ReportRow:
    instance: str
    ours: int
    time_s: float | None = None
    baseline_pc: int | None = None
    baseline_manual: int | None = None
    m: int | None = None

    @property
    def delta_pc(self) -> float | None:
        return percent_delta(self.ours, self.baseline_pc)

    @property
    def delta_manual(self) -> float | None:
        return percent_delta(self.ours, self.baseline_manual)


@dataclass(frozen=True)
class Summary:
    mean: float
    best: float
    worst: float
    improved: int
    count: int


def percent_delta(ours, baseline) -> float | None:
    if baseline is None:
        return None
    return (ours - baseline) / baseline * 100.0


def fmt_percent(x: float | None) -> str:
    if x is None:
        return "-"
    if x == 0:
        return "0.00%"
    return f"{x:+.2f}%"


def summarize(deltas: Iterable[float | None]) -> Summary | None:
    vals = [d for d in deltas if d is not None]
    if not vals:
        return None
    return Summary(sum(vals) / len(vals), min(vals), max(vals), sum(d < 0 for d in vals), len(vals))


def natural_key(name: str):
    return [int(t) if t.isdigit() else t for t in re.split(r"(\d+)", name)]


@dataclass
class BenchmarkReport:
    rows: list[ReportRow]
    label: str = "ours"

    def summary(self, column: str = "pc", m=ALL) -> Summary | None:
        """Statistics of ``column`` ("pc" or "manual") over one group, or all rows."""
        rows = self.rows if m is ALL else [r for r in self.rows if r.m == m]
        return summarize(r.delta_pc if column == "pc" else r.delta_manual for r in rows)

    def groups(self) -> list[int | None]:
        ms = sorted({r.m for r in self.rows if r.m is not None})
        return ms + ([None] if any(r.m is None for r in self.rows) else [])

    def to_csv(self, include_time: bool = True) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            d = r.delta_pc
            w.writerow([
                r.instance,
                "" if r.baseline_pc is None else r.baseline_pc,
                "" if r.baseline_manual is None else r.baseline_manual,
                r.ours,
                f"{r.time_s:.2f}" if include_time and r.time_s is not None else "",
                "" if d is None else ("0.00" if d == 0 else f"{d:.2f}"),
            ])
        return buf.getvalue()

    def to_text(self, include_time: bool = True, n_total: int | None = 48) -> str:
        return appendix_text({self.label: self}, include_time, n_total)


def _group_title(m, n_total):
    if m is None:
        return "Other instances"
    of = f" out of {n_total}" if n_total else ""
    return f"Results for instances with {m}{of} nodes visited in two periods"


def appendix_text(reports: dict[str, BenchmarkReport], include_time: bool = True, n_total: int | None = 48) -> str:
    """Appendix layout: one table per group, then the four summary statistics."""
    labels = list(reports)
    first = reports[labels[0]]
    by_label = {lab: {r.instance: r for r in rep.rows} for lab, rep in reports.items()}
    head = ["Instance", "PC", "PC+manual"]
    for lab in labels:
        if include_time:
            head.append(f"{lab} time (sec)")
        head.append(f"{lab} length")
    out = []
    for m in first.groups():
        rows = [r for r in first.rows if r.m == m]
        table = [head]
        for r in rows:
            line = [r.instance, _opt(r.baseline_pc), _opt(r.baseline_manual)]
            for lab in labels:
                rr = by_label[lab].get(r.instance)
                if include_time:
                    line.append("-" if rr is None or rr.time_s is None else f"{rr.time_s:.0f}")
                line.append("-" if rr is None else str(rr.ours))
            table.append(line)
        out.append(_group_title(m, n_total))
        out.append(_render(table))
        summ = [["Settings", *[f"{lab} {col}" for lab in labels for col in ("PC", "PC+manual")]]]
        stats = [reports[lab].summary(col, m) for lab in labels for col in ("pc", "manual")]
        summ.append(["Mean %", *[fmt_percent(s.mean if s else None) for s in stats]])
        summ.append(["Best %", *[fmt_percent(s.best if s else None) for s in stats]])
        summ.append(["Worst %", *[fmt_percent(s.worst if s else None) for s in stats]])
        summ.append(["Improved #", *[f"{s.improved}/{s.count}" if s else "-" for s in stats]])
        out.append(_render(summ))
    return "\n".join(out)


def _opt(v) -> str:
    return "-" if v is None else str(v)


def _render(table: list[list[str]]) -> str:
    widths = [max(len(row[k]) for row in table) for k in range(len(table[0]))]
    lines = []
    for n, row in enumerate(table):
        lines.append("  ".join(c.ljust(w) if k == 0 else c.rjust(w) for k, (c, w) in enumerate(zip(row, widths))).rstrip())
        if n == 0:
            lines.append("-" * len(lines[0]))
    return "\n".join(lines) + "\n"


def compare_report(results, baselines: dict[str, Baseline], label: str = "ours") -> BenchmarkReport:
    """``results``: iterable of (instance, cost[, time_s[, m]]) tuples or dicts with those keys."""
    rows = []
    for item in results:
        if isinstance(item, dict):
            name, ours = item["instance"], item["ours"]
            t, m = item.get("time_s"), item.get("m")
        else:
            name, ours, t, m = (tuple(item) + (None, None))[:4]
        b = baselines.get(name, Baseline())
        rows.append(ReportRow(name, int(ours), None if t is None else float(t), b.pc, b.manual,
                              b.m if b.m is not None else m))
    return BenchmarkReport(rows, label)


def _int_or_none(s: str | None):
    return int(s) if s not in (None, "") else None


def parse_baselines(text: str) -> dict[str, Baseline]:
    out = {}
    for row in csv.DictReader(io.StringIO(text)):
        out[row["instance"]] = Baseline(
            _int_or_none(row.get("baseline_pc")), _int_or_none(row.get("baseline_manual")), _int_or_none(row.get("m")),
        )
    return out


def load_baselines(path=None) -> dict[str, Baseline]:
    """Read a baseline CSV; without a path, the packaged published values."""
    if path is None:
        text = resources.files("twovrp").joinpath("data/baselines.csv").read_text()
    else:
        text = Path(path).read_text()
    return parse_baselines(text)


def read_results(path) -> list[dict]:
    """Rows with at least ``instance`` and ``ours`` columns (``time_s`` and ``m`` optional)."""
    out = []
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            t = row.get("time_s")
            out.append({"instance": row["instance"], "ours": int(row["ours"]),
                        "time_s": float(t) if t else None, "m": _int_or_none(row.get("m"))})
    return out
