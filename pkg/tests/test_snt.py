import itertools

import pytest
from hypothesis import given, settings, strategies as st

from helpers import snt, translated
from redcheck.lang import Cmp
from redcheck.snt import (
    SntSyntaxError,
    TotalPreorder,
    classify,
    eval_atom,
    format_snt,
    guard_sat,
    parse_snt,
    run,
    validate,
)

SYMS = ("a", "b", "c", "d")


@pytest.mark.parametrize(
    "atoms,ok",
    [
        ([Cmp("<", "a", "b"), Cmp("<", "b", "c"), Cmp("<", "c", "a")], False),
        ([Cmp("=", "a", "b"), Cmp("<", "b", "c")], True),
        ([Cmp("<", "a", "b"), Cmp("=", "a", "b")], False),
        ([], True),
    ],
)
def test_guard_sat_examples(atoms, ok):
    assert guard_sat(atoms) is ok


atom_st = st.builds(Cmp, st.sampled_from("<=>"), st.sampled_from(SYMS), st.sampled_from(SYMS))


@settings(max_examples=300, deadline=None)
@given(st.lists(atom_st, max_size=6))
def test_guard_sat_matches_brute_force(atoms):
    # four symbols: ranks 0..3 realize every total preorder
    brute = any(
        all(eval_atom(a, dict(zip(SYMS, vals))) for a in atoms) for vals in itertools.product(range(4), repeat=4)
    )
    assert guard_sat(atoms) == brute


@pytest.mark.parametrize("n,count", [(0, 1), (1, 1), (2, 3), (3, 13), (4, 75)])
def test_total_preorder_counts(n, count):
    assert len(TotalPreorder.all([f"x{i}" for i in range(n)])) == count


def test_preorder_parse_and_rel():
    o = TotalPreorder.parse("x1 = x3 < x2", ("x1", "x2", "x3"))
    assert o.rel("x1", "x3") == "=" and o.rel("x2", "x1") == ">"
    assert TotalPreorder.parse(str(o), ("x1", "x2", "x3")) == o
    assert o.class_count == 2


def test_round_trip_corpus():
    for s in (snt("smax"), snt("zero"), translated("max"), translated("summax")):
        t = parse_snt(format_snt(s))
        assert format_snt(t) == format_snt(s)


def test_syntax_error():
    with pytest.raises(SntSyntaxError):
        parse_snt("snt bad { control x; init q0; q0 -> }")


def test_run_max():
    s = translated("max")
    assert run(s, (3, 1, 5)) == 5
    assert run(s, (7,)) == 7


def test_run_smax_handle_then_cycles():
    s = snt("smax")
    # rising step: every data coefficient cancels in y1 - 2*y2 + y3
    assert run(s, (1, 4)) == 0
    # falling step: output is minus the first value
    assert run(s, (5, 2)) == -5
    assert run(s, (3, 3)) is None


def test_validate_clean_on_goldens():
    assert validate(snt("smax")) == []
    assert validate(translated("max")) == []


BAD_MONO = """
snt bad {
  control x;
  data y;
  init q0;
  q0 -> q1 [] { x := cur; };
  q1 -> q1 [cur > x] { x := cur; };
  q1 -> q1 [cur < x] { x := cur; };
  q1 -> q2 [end] { };
  output q2 = x;
}
"""

BAD_COPY = """
snt bad {
  control x;
  data y;
  init q0;
  q0 -> q1 [] { x := cur; y := cur; };
  q1 -> q1 [] { y := 2*y; };
  q1 -> q2 [end] { };
  output q2 = y;
}
"""

BAD_DET = """
snt bad {
  control x;
  data y;
  init q0;
  q0 -> q1 [] { x := cur; };
  q1 -> q1 [cur > x] { x := cur; };
  q1 -> q1 [cur = x] { };
  q1 -> q1 [cur < x] { };
  q1 -> q2 [cur < x] { };
  q1 -> q3 [end] { };
  output q3 = x;
}
"""


@pytest.mark.parametrize("text,constraint", [(BAD_MONO, "monotone"), (BAD_COPY, "copyless"), (BAD_DET, "deterministic")])
def test_validate_violations(text, constraint):
    found = validate(parse_snt(text))
    assert constraint in {v.constraint for v in found}
    assert all(v.where for v in found)


def test_classify_max_one_lasso():
    (ml,) = classify(translated("max"))
    assert ml.r == 1
    assert len(ml.handles[0]) == 1
    assert len(ml.bundles[0]) == 3


DAG = """
snt dag {
  control x;
  data y;
  init q0;
  q0 -> q1 [] { x := cur; y := cur; };
  q1 -> q2 [end] { };
  output q2 = y;
}
"""

CHAIN = """
snt chain {
  control x;
  data y;
  init q0;
  q0 -> q1 [] { x := cur; y := cur; };
  q1 -> q1 [cur > x] { x := cur; y += cur; };
  q1 -> q1 [cur < x] { y += cur; };
  q1 -> q2 [cur = x] { };
  q2 -> q2 [cur > x] { x := cur; };
  q2 -> q2 [cur < x] { };
  q2 -> q3 [end] { };
  output q3 = y;
}
"""


def test_classify_dag_has_empty_bundles():
    mls = classify(parse_snt(DAG))
    assert mls and all(not b for ml in mls for b in ml.bundles)


def test_classify_two_junctions():
    s = parse_snt(CHAIN)
    assert validate(s) == []
    (ml,) = classify(s)
    assert ml.r == 2
    assert ml.junctions == ("q1", "q2") or list(ml.junctions) == ["q1", "q2"]


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(-4, 4), max_size=6), st.integers(-4, 4))
def test_run_is_deterministic(w, x0):
    s = parse_snt(CHAIN)
    assert run(s, w, {"x": x0, "y": 0}) == run(s, w, {"x": x0, "y": 0})
