"""redcheck command line.

Exit codes: 0 the property holds, 3 it fails, 1 input or usage error,
2 the input is outside the supported fragment.
"""
from __future__ import annotations

import sys
import time
from pathlib import Path

import click

from . import __version__
from .decide import FAILS, HOLDS, UNSUPPORTED, Verdict, check_equivalence, nonzero_any
from .lang import LangError, Linear, interpret, parse_program
from .oracle import SearchBounds, oracle_commutative, oracle_equivalent, oracle_nonzero
from .report import Report, check_file, corpus_report
from .snt import SntSyntaxError, format_snt, parse_snt, run as run_snt
from .transforms import Unsupported, component_programs, program_to_snt

EXIT = {HOLDS: 0, FAILS: 3, UNSUPPORTED: 2}


class InputError(click.ClickException):
    exit_code = 1


def _load(path: str):
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as e:
        raise InputError(str(e))
    try:
        if p.suffix == ".snt":
            return parse_snt(text)
        return parse_program(text)
    except (LangError, SntSyntaxError) as e:
        raise InputError(f"{p.name}: {e}")


def _bounds(text: str | None) -> SearchBounds:
    if not text:
        return SearchBounds()
    try:
        return SearchBounds.parse(text)
    except ValueError as e:
        raise InputError(f"--bounds: {e}")


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError:
        raise InputError(f"not a comma-separated list of integers: {text!r}")


def _emit(rep: Report, as_json: bool) -> None:
    click.echo(rep.dumps() if as_json else rep.to_text())
    sys.exit(EXIT.get(rep.verdict, 1))


def _as_snts(obj) -> list[tuple[str, object]]:
    """Linear-return machines for a program (one per component) or the machine itself."""
    if hasattr(obj, "transitions"):
        return [("ret", obj)]
    if obj.has_init:
        raise Unsupported("multipass", "equivalence of programs with init is not supported")
    return [(label, program_to_snt(q)) for label, q in component_programs(obj)]


common = [
    click.option("--json", "as_json", is_flag=True, help="Print the JSON report instead of text."),
    click.option("--jobs", default=1, show_default=True, help="Worker processes for per-variant analysis."),
    click.option("--explain", is_flag=True, help="Include summaries and abstraction sets in the report."),
    click.option("--oracle", "use_oracle", is_flag=True, help="Cross-check with the bounded oracle."),
    click.option("--bounds", default=None, help="Oracle bounds, e.g. len=4,lo=-2,hi=2,rho=3."),
]


def with_common(f):
    for opt in reversed(common):
        f = opt(f)
    return f


@click.group()
@click.version_option(__version__, prog_name="redcheck")
def main():
    """Decide commutativity of reducer programs."""


@main.command()
@click.argument("file", type=click.Path(dir_okay=False))
@with_common
def check(file, as_json, jobs, explain, use_oracle, bounds):
    """Is the reducer in FILE commutative?"""
    _load(file)
    b = _bounds(bounds)
    rep = check_file(Path(file), b, use_oracle, jobs, explain)
    _emit(rep, as_json)


@main.command()
@click.argument("first", type=click.Path(dir_okay=False))
@click.argument("second", type=click.Path(dir_okay=False))
@with_common
def eq(first, second, as_json, jobs, explain, use_oracle, bounds):
    """Are two programs or machines equivalent?"""
    a, b = _load(first), _load(second)
    target = f"{Path(first).name} vs {Path(second).name}"
    lines: list | None = [] if explain else None
    t0 = time.perf_counter()
    try:
        ca, cb = _as_snts(a), _as_snts(b)
    except Unsupported as e:
        _emit(Report(target, "equivalent", UNSUPPORTED, {"constraint": e.constraint, "reason": e.message}), as_json)
    if len(ca) != len(cb) or _ret_shape(a) != _ret_shape(b):
        v = Verdict("equivalent", UNSUPPORTED, {"reason": "return values have different shapes"})
    else:
        parts = []
        for (la, sa), (_, sb) in zip(ca, cb):
            pv = check_equivalence(sa, sb, jobs, lines)
            pv.evidence = {**pv.evidence, "component": la}
            parts.append(pv)
        if len(parts) == 1:
            v = parts[0]
        else:
            answers = {p.answer for p in parts}
            ans = UNSUPPORTED if UNSUPPORTED in answers else FAILS if FAILS in answers else HOLDS
            v = Verdict("equivalent", ans, {}, parts)
    rep = Report.from_verdict(target, v, timings={"decide": time.perf_counter() - t0}, explain=lines or [])
    if use_oracle or v.answer == FAILS:
        t1 = time.perf_counter()
        rep.oracle_crosscheck = oracle_equivalent(a, b, _bounds(bounds)).to_json()
        rep.timings["oracle"] = time.perf_counter() - t1
    _emit(rep, as_json)


def _ret_shape(obj):
    if hasattr(obj, "transitions"):
        return "linear"
    return "linear" if isinstance(obj.ret, Linear) else (obj.ret.fn, len(obj.ret.args))


@main.command()
@click.argument("file", type=click.Path(dir_okay=False))
@with_common
def nonzero(file, as_json, jobs, explain, use_oracle, bounds):
    """Does the machine in FILE ever produce a defined non-zero output?"""
    s = _load(file)
    try:
        (_, s), = _as_snts(s)
    except (Unsupported, ValueError) as e:
        raise InputError(f"nonzero expects a machine or a linear-return program: {e}")
    lines: list | None = [] if explain else None
    t0 = time.perf_counter()
    v = nonzero_any(s, jobs, lines, all_variants=True)
    rep = Report.from_verdict(Path(file).name, v, timings={"decide": time.perf_counter() - t0}, explain=lines or [])
    if use_oracle:
        t1 = time.perf_counter()
        rep.oracle_crosscheck = oracle_nonzero(s, _bounds(bounds)).to_json()
        rep.timings["oracle"] = time.perf_counter() - t1
    _emit(rep, as_json)


@main.command()
@click.argument("file", type=click.Path(dir_okay=False))
@click.option("--word", default="", help="Comma-separated input values.")
@click.option("--init", "init", default="", help="Initial values, e.g. x=0,y=1.")
def run(file, word, init):
    """Print the output on one word, or BOTTOM."""
    obj = _load(file)
    rho = {}
    for part in filter(None, init.replace(" ", "").split(",")):
        name, _, val = part.partition("=")
        try:
            rho[name] = int(val)
        except ValueError:
            raise InputError(f"bad --init entry {part!r}")
    w = _ints(word)
    out = run_snt(obj, w, rho) if hasattr(obj, "transitions") else interpret(obj, w, rho)
    if out is None:
        click.echo("BOTTOM")
    elif isinstance(out, tuple):
        click.echo("(" + ", ".join(map(str, out)) + ")")
    else:
        click.echo(str(out))


@main.command()
@click.argument("file", type=click.Path(dir_okay=False))
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None)
def translate(file, output):
    """Compile a reducer to a .snt machine."""
    p = _load(file)
    if hasattr(p, "transitions"):
        raise InputError("translate expects a .red program")
    try:
        s = program_to_snt(p)
    except Unsupported as e:
        click.echo(f"unsupported ({e.constraint}): {e.message}", err=True)
        sys.exit(2)
    except ValueError as e:
        click.echo(f"unsupported: {e}", err=True)
        sys.exit(2)
    text = format_snt(s) + "\n"
    if output:
        Path(output).write_text(text)
    else:
        click.echo(text, nl=False)


@main.command()
@click.argument("file", type=click.Path(dir_okay=False))
@click.argument("other", type=click.Path(dir_okay=False), required=False)
@click.option(
    "--property", "prop", type=click.Choice(["commutative", "equivalent", "nonzero"]), default="commutative"
)
@click.option("--bounds", default=None)
def oracle(file, other, prop, bounds):
    """Bounded brute-force witness search; prints JSON."""
    import json

    b = _bounds(bounds)
    a = _load(file)
    if prop == "equivalent":
        if other is None:
            raise InputError("equivalent needs a second file")
        res = oracle_equivalent(a, _load(other), b)
    elif prop == "nonzero":
        res = oracle_nonzero(a, b)
    else:
        res = oracle_commutative(a, b)
    click.echo(json.dumps(res.to_json(), indent=2, sort_keys=True))
    sys.exit(3 if res.found else 0)


@main.command()
@click.argument("paths", nargs=-1, type=click.Path(exists=True))
@click.option("--out", "outdir", type=click.Path(file_okay=False), default="redcheck-report", show_default=True)
@click.option("--oracle", "use_oracle", is_flag=True)
@click.option("--bounds", default=None)
@click.option("--jobs", default=1, show_default=True)
def report(paths, outdir, use_oracle, bounds, jobs):
    """Check many reducers; write reports.json, summary.tsv and PNG figures."""
    from . import corpus_path

    files = []
    for p in paths or (str(corpus_path()),):
        p = Path(p)
        files.extend(sorted(p.glob("*.red")) if p.is_dir() else [p])
    for f in files:
        _load(str(f))
    reports, written = corpus_report(files, Path(outdir), _bounds(bounds), use_oracle, jobs)
    for r in reports:
        click.echo(f"{r.target}\t{r.verdict}\t{r.timings.get('decide', 0.0):.3f}")
    for w in written:
        click.echo(f"wrote {w}", err=True)


if __name__ == "__main__":
    main()
