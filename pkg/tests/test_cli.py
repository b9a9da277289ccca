import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from redcheck import __version__, corpus_path
from redcheck.cli import main
from redcheck.report import TSV_FIELDS, Report, read_tsv

FIXTURES = Path(__file__).parent / "fixtures"


def cli(*args):
    return CliRunner().invoke(main, [str(a) for a in args])


def test_version():
    r = cli("--version")
    assert r.exit_code == 0 and __version__ in r.output


@pytest.mark.parametrize("name,code,verdict", [("max", 0, "HOLDS"), ("first", 3, "FAILS"), ("sd", 2, "UNSUPPORTED")])
def test_check_exit_codes(name, code, verdict):
    r = cli("check", corpus_path(f"{name}.red"))
    assert r.exit_code == code
    assert verdict in r.output.splitlines()[0]


def test_check_first_shows_witness():
    r = cli("check", corpus_path("first.red"))
    assert "oracle witness" in r.output


def test_check_json_round_trip():
    r = cli("check", "--json", corpus_path("avg.red"))
    rep = Report.loads(r.output)
    assert rep.verdict == "HOLDS" and rep.schema == 1 and rep.version == __version__
    assert json.loads(rep.dumps()) == json.loads(r.output)
    assert len(rep.parts) == 2


def test_check_explain():
    r = cli("check", "--explain", corpus_path("max.red"))
    assert r.exit_code == 0 and "explain:" in r.output and "step1" in r.output


def test_check_with_oracle_flag():
    r = cli("check", "--json", "--oracle", "--bounds", "len=3,lo=-1,hi=1", corpus_path("sum.red"))
    rep = Report.loads(r.output)
    assert rep.oracle_crosscheck["status"] == "none within bounds"


def test_malformed_file(tmp_path):
    bad = tmp_path / "bad.red"
    bad.write_text("reducer bad { y := ; }")
    assert cli("check", bad).exit_code == 1
    assert cli("check", tmp_path / "missing.red").exit_code == 1
    assert cli("check", "--bounds", "nope=1", corpus_path("max.red")).exit_code == 1


@pytest.mark.parametrize("a,b,code", [("sum", "sum_copy", 0), ("sum", "cnt", 3)])
def test_eq(a, b, code):
    assert cli("eq", corpus_path(f"{a}.red"), corpus_path(f"{b}.red")).exit_code == code


def test_eq_malformed(tmp_path):
    bad = tmp_path / "bad.snt"
    bad.write_text("snt {")
    assert cli("eq", bad, corpus_path("sum.red")).exit_code == 1


def test_nonzero():
    r = cli("nonzero", "--json", corpus_path("smax.snt"))
    assert r.exit_code == 0
    rep = Report.loads(r.output)
    assert rep.evidence["step"] == 3 and len(rep.parts) == 1
    assert cli("nonzero", corpus_path("zero.snt")).exit_code == 3


def test_nonzero_reports_each_variant():
    rep = Report.loads(cli("nonzero", "--json", FIXTURES / "range.snt").output)
    assert len(rep.parts) == rep.evidence["variants"] == 3


@pytest.mark.parametrize(
    "name,word,out", [("max", "3,1,5", "5"), ("sum", "1,2,3", "6"), ("max", "", "BOTTOM"), ("avg", "2,4", "(6, 2)")]
)
def test_run(name, word, out):
    r = cli("run", corpus_path(f"{name}.red"), "--word", word)
    assert r.exit_code == 0 and r.output.strip() == out


def test_run_machine_with_init():
    r = cli("run", corpus_path("smax.snt"), "--word", "5,2", "--init", "x1=0")
    assert r.output.strip() == "-5"
    assert cli("run", corpus_path("max.red"), "--word", "1,x").exit_code == 1


def test_translate_golden(tmp_path):
    out = tmp_path / "max.snt"
    assert cli("translate", corpus_path("max.red"), "-o", out).exit_code == 0
    assert out.read_text() == (FIXTURES / "max.snt").read_text()
    again = cli("translate", corpus_path("max.red"))
    assert again.output == out.read_text()


def test_translate_errors(tmp_path):
    bad = tmp_path / "bad.red"
    bad.write_text("reducer bad { loop { loop { next; } } ret y; }")
    assert cli("translate", bad).exit_code == 1
    assert cli("translate", corpus_path("mad.red")).exit_code == 2


def test_oracle_command():
    r = cli("oracle", corpus_path("first.red"))
    assert r.exit_code == 3 and json.loads(r.output)["witness"]["word"] == [-3, -2]
    r = cli("oracle", "--property", "equivalent", "--bounds", "len=1,lo=5,hi=5", corpus_path("sum.red"), corpus_path("cnt.red"))
    assert json.loads(r.output)["witness"]["outputs"] == [None, 0]
    assert cli("oracle", "--property", "equivalent", corpus_path("sum.red")).exit_code == 1


def test_report_writes_figures_and_tsv(tmp_path):
    files = [corpus_path(f"{n}.red") for n in ("max", "first", "sd")]
    r = cli("report", *files, "--out", tmp_path)
    assert r.exit_code == 0
    for name in ("reports.json", "summary.tsv", "verdicts.png", "timings.png"):
        assert (tmp_path / name).stat().st_size > 0
    assert (tmp_path / "verdicts.png").read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    rows = read_tsv(tmp_path / "summary.tsv")
    assert tuple(rows[0]) == TSV_FIELDS
    assert {row["target"]: row["verdict"] for row in rows} == {"first.red": "FAILS", "max.red": "HOLDS", "sd.red": "UNSUPPORTED"}
    reports = [Report.from_json(d) for d in json.loads((tmp_path / "reports.json").read_text())]
    assert [x.target for x in reports] == ["first.red", "max.red", "sd.red"]
