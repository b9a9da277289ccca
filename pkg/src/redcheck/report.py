"""Reports: schema-stable JSON, a text mirror, and corpus summaries with figures."""
from __future__ import annotations

import csv
import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable

from . import __version__
from .decide import FAILS, HOLDS, UNSUPPORTED, Verdict, check_program
from .lang import parse_program
from .oracle import SearchBounds, oracle_commutative

SCHEMA = 1


@dataclass
class Report:
    target: str
    property: str
    verdict: str
    evidence: dict = field(default_factory=dict)
    parts: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    oracle_crosscheck: dict | None = None
    timings: dict = field(default_factory=dict)
    explain: list = field(default_factory=list)
    version: str = __version__
    schema: int = SCHEMA

    @staticmethod
    def from_verdict(target: str, v: Verdict, **kw) -> "Report":
        return Report(target, v.property, v.answer, v.evidence, [p.to_json() for p in v.parts], list(v.notes), **kw)

    def to_json(self) -> dict:
        return asdict(self)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    @staticmethod
    def from_json(d: dict) -> "Report":
        return Report(**d)

    @staticmethod
    def loads(text: str) -> "Report":
        return Report.from_json(json.loads(text))

    def to_text(self) -> str:
        lines = [f"{self.target}: {self.property} {self.verdict}"]
        for key in sorted(self.evidence):
            lines.append(f"  {key}: {self.evidence[key]}")
        for p in self.parts:
            _part_lines(p, lines, "  ")
        for n in self.notes:
            lines.append(f"  note: {n}")
        if self.oracle_crosscheck is not None:
            oc = self.oracle_crosscheck
            if oc.get("found"):
                lines.append(f"  oracle witness: {json.dumps(oc['witness'], sort_keys=True)}")
            else:
                lines.append(f"  oracle: {oc.get('status', 'none within bounds')}")
        if self.explain:
            lines.append("  explain:")
            lines.extend("    " + e for e in self.explain)
        if self.timings:
            lines.append("  time: " + ", ".join(f"{k}={v:.3f}s" for k, v in sorted(self.timings.items())))
        return "\n".join(lines)


def _part_lines(p: dict, lines: list, indent: str) -> None:
    label = p["evidence"].get("phase") or p["evidence"].get("component") or p["evidence"].get("variant")
    why = p["evidence"].get("reason") if p["answer"] == UNSUPPORTED else None
    lines.append(f"{indent}part {label}: {p['answer']}" + (f" ({why})" if why else ""))
    for q in p.get("parts", []):
        _part_lines(q, lines, indent + "  ")


def check_file(
    path: Path, bounds: SearchBounds | None = None, oracle: bool = False, jobs: int = 1, explain: bool = False
) -> Report:
    """Commutativity of one reducer file, with an oracle witness when it fails."""
    p = parse_program(Path(path).read_text())
    lines: list | None = [] if explain else None
    t0 = time.perf_counter()
    v = check_program(p, jobs, lines)
    t1 = time.perf_counter()
    rep = Report.from_verdict(Path(path).name, v, timings={"decide": t1 - t0}, explain=lines or [])
    if oracle or v.answer == FAILS:
        res = oracle_commutative(p, bounds or SearchBounds())
        rep.oracle_crosscheck = res.to_json()
        rep.timings["oracle"] = time.perf_counter() - t1
    return rep


TSV_FIELDS = ("target", "verdict", "decide_s", "oracle_s", "oracle_found", "witness_len")


def write_tsv(reports: Iterable[Report], path: Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(TSV_FIELDS)
        for r in reports:
            oc = r.oracle_crosscheck or {}
            wit = oc.get("witness") or {}
            w.writerow(
                [
                    r.target,
                    r.verdict,
                    f"{r.timings.get('decide', 0.0):.4f}",
                    f"{r.timings.get('oracle', 0.0):.4f}",
                    "" if not oc else str(bool(oc.get("found"))).lower(),
                    len(wit.get("word", [])) if wit else "",
                ]
            )


def read_tsv(path: Path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh, delimiter="\t"))


def render_figures(reports: list[Report], outdir: Path) -> list[Path]:
    """Verdict counts and decision time per program, as PNG files."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    labels = (HOLDS, FAILS, UNSUPPORTED)
    counts = [sum(r.verdict == a for r in reports) for a in labels]
    fig, ax = plt.subplots(figsize=(4.5, 3))
    ax.bar(labels, counts, color=("#4c9a2a", "#c0392b", "#7f8c8d"))
    ax.set_ylabel("programs")
    ax.set_title("commutativity verdicts")
    fig.tight_layout()
    path = outdir / "verdicts.png"
    fig.savefig(path, dpi=100)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(6, 0.35 * max(len(reports), 3) + 1))
    names = [r.target for r in reports]
    ax.barh(names, [r.timings.get("decide", 0.0) for r in reports], label="decide")
    if any("oracle" in r.timings for r in reports):
        ax.barh(
            names,
            [r.timings.get("oracle", 0.0) for r in reports],
            left=[r.timings.get("decide", 0.0) for r in reports],
            label="oracle",
        )
    ax.set_xlabel("seconds")
    ax.legend(loc="lower right")
    ax.invert_yaxis()
    fig.tight_layout()
    path = outdir / "timings.png"
    fig.savefig(path, dpi=100)
    plt.close(fig)
    written.append(path)
    return written


def corpus_report(paths: Iterable[Path], outdir: Path, bounds=None, oracle: bool = False, jobs: int = 1):
    """Check every file, then write reports.json, summary.tsv and the figures into outdir."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    reports = [check_file(p, bounds, oracle, jobs) for p in sorted(map(Path, paths))]
    (outdir / "reports.json").write_text(json.dumps([r.to_json() for r in reports], indent=2, sort_keys=True))
    write_tsv(reports, outdir / "summary.tsv")
    figures = render_figures(reports, outdir)
    return reports, [outdir / "reports.json", outdir / "summary.tsv", *figures]
