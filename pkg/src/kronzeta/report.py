"""Machine-readable reports and their renderings.

A Report is a flat list of check records plus summary counts.  Emission is
deterministic: sorted keys, sorted records, no timestamps.  Wall times are
kept in memory but only written when explicitly requested, so a fixed seed
yields byte-identical files.  Alongside the delimited output the emitter
renders a small matplotlib figure per suite when the records carry
plottable payloads.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import IoError

SCHEMA_VERSION = 1


@dataclass
class CheckRecord:
    check_id: str
    params: dict
    status: str  # "pass" | "fail" | "info"
    detail: dict = field(default_factory=dict)
    wall_time: float = 0.0

    def to_json(self, include_timings: bool) -> dict:
        doc = {
            "id": self.check_id,
            "params": self.params,
            "status": self.status,
            "detail": self.detail,
        }
        if include_timings:
            doc["wall_time_s"] = round(self.wall_time, 6)
        return doc


@dataclass
class Report:
    suite: str
    config: dict
    records: list = field(default_factory=list)

    def add(self, record: CheckRecord):
        self.records.append(record)

    @property
    def failures(self) -> list:
        return [r for r in self.records if r.status == "fail"]

    @property
    def passed(self) -> bool:
        return not self.failures

    def summary(self) -> dict:
        counts = {"pass": 0, "fail": 0, "info": 0}
        for r in self.records:
            counts[r.status] = counts.get(r.status, 0) + 1
        return counts

    def to_json(self, include_timings: bool = False) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "suite": self.suite,
            "config": self.config,
            "summary": self.summary(),
            "records": [r.to_json(include_timings) for r in self.records],
        }


def report_from_json(doc: dict) -> Report:
    report = Report(suite=doc["suite"], config=doc["config"])
    for rec in doc["records"]:
        report.add(
            CheckRecord(
                check_id=rec["id"],
                params=rec["params"],
                status=rec["status"],
                detail=rec["detail"],
                wall_time=rec.get("wall_time_s", 0.0),
            )
        )
    return report


def _json_text(report: Report, include_timings: bool) -> str:
    return json.dumps(report.to_json(include_timings), sort_keys=True, indent=2) + "\n"


def _csv_text(report: Report, include_timings: bool) -> str:
    buf = io.StringIO()
    fields = ["id", "status", "params", "detail"]
    if include_timings:
        fields.append("wall_time_s")
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for r in report.records:
        row = {
            "id": r.check_id,
            "status": r.status,
            "params": json.dumps(r.params, sort_keys=True),
            "detail": json.dumps(r.detail, sort_keys=True),
        }
        if include_timings:
            row["wall_time_s"] = round(r.wall_time, 6)
        writer.writerow(row)
    return buf.getvalue()


def _markdown_text(report: Report, include_timings: bool) -> str:
    lines = [f"# Suite `{report.suite}`", ""]
    counts = report.summary()
    lines.append(
        f"{counts.get('pass', 0)} passed, {counts.get('fail', 0)} failed, "
        f"{counts.get('info', 0)} informational."
    )
    lines.append("")
    lines.append("| check | status | detail |")
    lines.append("|---|---|---|")
    for r in report.records:
        detail = json.dumps(r.detail, sort_keys=True)
        if len(detail) > 120:
            detail = detail[:117] + "..."
        params = json.dumps(r.params, sort_keys=True)
        lines.append(f"| `{r.check_id}` {params} | {r.status} | `{detail}` |")
    lines.append("")
    return "\n".join(lines)


def ledger_csv_text(ledger) -> str:
    """One row per torus cell of a TorusSummandLedger."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        [
            "exps",
            "mu_numerator",
            "mu_denominator",
            "spherical",
            "degree",
            "contribution",
            "partial_sum",
        ]
    )
    for row in ledger.rows:
        writer.writerow(
            [
                " ".join(str(e) for e in row.exps),
                row.mu.numerator,
                row.mu.denominator,
                str(row.spherical),
                row.degree,
                str(row.contribution),
                str(row.partial_sum),
            ]
        )
    return buf.getvalue()


def orbit_csv_text(table) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["orbit_id", "size", "rank", "contains_epsilon_r"])
    for row in table.orbits:
        writer.writerow(
            [
                row.orbit_id,
                row.size,
                row.rank,
                " ".join(str(r) for r in row.epsilon_ranks),
            ]
        )
    return buf.getvalue()


def orbit_json(table) -> dict:
    return {
        "m": table.m,
        "n": table.n,
        "q": table.q,
        "points": table.points,
        "orbits": [
            {
                "orbit_id": row.orbit_id,
                "size": row.size,
                "rank": row.rank,
                "contains_epsilon_r": list(row.epsilon_ranks),
            }
            for row in table.orbits
        ],
    }


# ---------------------------------------------------------------------------
# Figures
# ---------------------------------------------------------------------------


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def plot_orbit_table(table, path: Path) -> Path:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ranks = [row.rank for row in table.orbits]
    sizes = [row.size for row in table.orbits]
    ax.bar(range(len(sizes)), sizes, color="#3b6ea5")
    ax.set_xticks(range(len(sizes)))
    ax.set_xticklabels([f"rank {r}" for r in ranks])
    ax.set_ylabel("projective points")
    ax.set_title(f"orbits of GL_{table.m} x GL_{table.n} over F_{table.q}")
    for i, s in enumerate(sizes):
        ax.text(i, s, str(s), ha="center", va="bottom", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_series_comparison(series_pairs, labels, path: Path, title: str) -> Path:
    """Overlay float views of exact series (markers) and their closed forms
    (lines); exact agreement shows as markers sitting on the lines."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5.5, 3.4))
    for (lhs, rhs), label in zip(series_pairs, labels):
        degrees = list(range(lhs.order + 1))
        ax.plot(
            degrees,
            [float(c) for c in rhs.coeffs],
            lw=1.0,
            alpha=0.7,
            label=f"{label} closed form",
        )
        ax.plot(
            degrees,
            [float(c) for c in lhs.coeffs],
            "o",
            ms=3.5,
            label=f"{label} torus sum",
        )
    ax.set_xlabel("degree in X")
    ax.set_ylabel("coefficient (float view)")
    ax.set_title(title)
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_residuals(values, path: Path, title: str, ylabel: str) -> Path:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5.5, 3.2))
    ax.semilogy(range(len(values)), [max(v, 1e-18) for v in values], ".", ms=4)
    ax.set_xlabel("sample")
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


# ---------------------------------------------------------------------------
# Emission
# ---------------------------------------------------------------------------

_FORMATS = {
    "json": (".json", _json_text),
    "csv": (".csv", _csv_text),
    "markdown": (".md", _markdown_text),
}


def emit(
    report: Report,
    fmt: str,
    out: Path,
    include_timings: bool = False,
    figures: Optional[list] = None,
) -> list:
    """Write the report in the requested format; returns written paths.

    `out` is the stem; the format extension is appended.  Figure callbacks
    (path -> path) render PNGs next to the delimited output.
    """
    if fmt not in _FORMATS:
        raise IoError(f"unknown format {fmt!r}; expected one of {sorted(_FORMATS)}")
    ext, renderer = _FORMATS[fmt]
    out = Path(out)
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        target = out.with_suffix(ext)
        target.write_text(renderer(report, include_timings))
        written = [target]
        for i, fig_fn in enumerate(figures or []):
            fig_path = out.with_suffix("") if out.suffix else out
            fig_path = fig_path.parent / f"{fig_path.name}_{i}.png"
            written.append(fig_fn(fig_path))
        return written
    except OSError as exc:
        raise IoError(str(exc)) from exc
