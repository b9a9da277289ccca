import pytest
from hypothesis import given, settings, strategies as st

from helpers import red, snt, translated
from redcheck.decide import (
    FAILS,
    HOLDS,
    UNSUPPORTED,
    Verdict,
    abs_apply,
    abs_cycle_rules,
    abs_of,
    check_commutativity,
    check_equivalence,
    check_program,
    compute_abstraction,
    format_abs,
    nonzero_any,
    nonzero_output,
    prepare,
    restructure,
    step1,
    step2,
    u_domains,
)
from redcheck.lang import parse_program
from redcheck.oracle import SearchBounds, oracle_commutative, oracle_equivalent, oracle_nonzero
from redcheck.randgen import mutate, random_lasso, random_program
from redcheck.snt import classify, parse_snt
from redcheck.symbolic import drop_counter_terms, mark
from redcheck.transforms import build_rotate_snt, normalize, product, restrict_min_length

SMALL = SearchBounds(max_len=4, values=tuple(range(-3, 4)))


def lassos(s):
    out = []
    for v in normalize(s):
        for ml in classify(v):
            ld = prepare(v, ml, v.order_map)
            if ld is not None:
                out.append(ld)
    return out


def machine(body: str):
    return parse_snt("snt m { control x; data y; init q0; " + body + " }")


def test_verdict_json_round_trip():
    v = check_program(red("avg"))
    assert Verdict.from_json(v.to_json()).to_json() == v.to_json()


def test_step1_fires_on_handle_output():
    s = machine("q0 -> q1 [] { x := cur; y := cur; }; q1 -> q1 [] { }; q1 -> q2 [end] { }; output q2 = y;")
    ld, *_ = lassos(s)
    fired, _, expr = step1(ld)
    assert fired and str(expr) == "1*d[1]"


def test_step1_silent_on_zero_output():
    s = machine("q0 -> q1 [] { x := cur; y := cur; }; q1 -> q1 [] { }; q1 -> q2 [end] { }; output q2 = y - y;")
    ld, *_ = lassos(s)
    assert not step1(ld)[0]
    assert nonzero_any(s).answer == FAILS


def test_step2_counter_constant():
    s = machine("q0 -> q1 [] { x := cur; y := 0; }; q1 -> q1 [] { y += 1; }; q1 -> q2 [end] { }; output q2 = y;")
    ld, *_ = lassos(s)
    assert not step1(ld)[0]
    hit = step2(ld)
    assert hit["condition"] == "constant" and hit["mu"] == 1


def test_smax_nonzero_via_step3():
    v = nonzero_any(snt("smax"), all_variants=True)
    assert v.answer == HOLDS
    assert v.evidence["step"] == 3
    assert v.evidence["path"] == ["H1", "C1.1"]
    assert v.evidence["value"] == -1
    # one control variable: a single initial order, so one variant
    assert len(v.parts) == 1


def test_zero_machine():
    assert nonzero_any(snt("zero")).answer == FAILS


def test_self_product_is_zero():
    m = translated("max")
    assert nonzero_any(product(m, m)).answer == FAILS


def test_non_normalized_direct_call_unsupported():
    assert nonzero_output(translated("range")).answer == UNSUPPORTED


@pytest.mark.parametrize(
    "a,b,answer",
    [("max", "max", HOLDS), ("sum", "sum_copy", HOLDS), ("sum", "cnt", FAILS), ("first", "last", FAILS)],
)
def test_equivalence(a, b, answer):
    assert check_equivalence(translated(a), translated(b)).answer == answer


def test_sum_equivalent_to_its_rotation():
    b = restrict_min_length(translated("sum"), 2)
    assert check_equivalence(b, build_rotate_snt(b)).answer == HOLDS


@pytest.mark.parametrize(
    "name,answer",
    [
        ("max", HOLDS), ("min", HOLDS), ("sum", HOLDS), ("cnt", HOLDS), ("sum_copy", HOLDS), ("summax", HOLDS),
        ("first", FAILS), ("last", FAILS), ("id", FAILS), ("cntmax", FAILS), ("mad2", FAILS),
    ],
)
def test_commutativity_of_translations(name, answer):
    assert check_commutativity(translated(name)).answer == answer


def test_program_verdicts():
    assert check_program(red("avg")).answer == HOLDS
    assert check_program(red("sd")).answer == UNSUPPORTED
    mad = check_program(red("mad"))
    assert mad.answer == HOLDS and mad.notes


def test_failing_phase_is_inconclusive():
    src = "reducer p { s := cur; next; loop { s += cur; next; } a := s; init; f := cur; next; loop { next; } ret f + a; }"
    v = check_program(parse_program(src))
    assert v.answer == UNSUPPORTED
    assert "inconclusive" in v.evidence["reason"]
    assert [p.answer for p in v.parts] == [HOLDS, FAILS]


def test_explain_lines():
    lines = []
    nonzero_output(normalize(snt("smax"))[0], lines)
    assert any(ln.startswith("step1 ") for ln in lines)
    assert sum(ln.startswith("step2 C") and "=> mu" in ln for ln in lines) >= 6


def test_restructure_splits_other_atoms():
    ld = lassos(snt("smax"))[0]
    final, _ = compute_abstraction(ld)
    xi, delta = restructure(final, 1)
    assert (2, (1, 2, 3)) in delta
    assert xi


def test_format_abs():
    assert format_abs(frozenset({(0, (0, 0)), (1, (1, 2))})) == "{(0, (0, 0)), (1, (1, 2))}"


def corpus_lassos():
    out = lassos(snt("smax"))
    for seed in range(20):
        out += lassos(random_lasso(seed, 1 + seed % 2, 1 + seed % 3, 1 + seed % 3, 1 + (seed // 3) % 2))
    return out


def test_cycle_rules_agree_with_direct_route():
    """The case-by-case update and the summary-based update give the same sets."""
    checked = 0
    for ld in corpus_lassos():
        k = ld.handles[0].k
        frontier = {abs_of(ld.handles[0])}
        seen = set(frontier)
        while frontier:
            nxt = set()
            for lam in frontier:
                for c in ld.bundles[0]:
                    a = abs_cycle_rules(lam, c)
                    b = abs_apply(lam, drop_counter_terms(mark(c)))
                    assert a == b, (format_abs(lam), format_abs(a), format_abs(b))
                    checked += 1
                    if b not in seen:
                        seen.add(b)
                        nxt.add(b)
            frontier = nxt
        assert all(len(v) == ld.handles[0].l for lam in seen for _, v in lam)
        assert all(0 <= t <= k + 1 for lam in seen for t, _ in lam)
    assert checked >= 100


def test_u_domains_cover_reached_sets():
    for ld in corpus_lassos():
        U = u_domains(ld)
        final, _ = compute_abstraction(ld, check=True)
        for lam in final:
            assert all(v in U[-1] for _, vec in lam for v in vec)


@pytest.mark.parametrize("seed", range(20, 34))
def test_random_lasso_agrees_with_oracle(seed):
    s = random_lasso(seed, 1 + seed % 2, 1 + seed % 3, 1 + seed % 3, 1 + seed % 2)
    v = nonzero_any(s)
    res = oracle_nonzero(s, SMALL)
    if res.found:
        assert v.answer == HOLDS
    if v.answer == FAILS:
        assert not res.found


@pytest.mark.parametrize("seed", range(6))
def test_mutated_copy_equivalence_agrees(seed):
    s = random_lasso(seed, 1, 2, 2, 1)
    m = mutate(s, seed)
    v = check_equivalence(s, m)
    res = oracle_equivalent(s, m, SMALL)
    if res.found:
        assert v.answer == FAILS
    if v.answer == HOLDS:
        assert not res.found


@settings(max_examples=12, deadline=None)
@given(st.integers(0, 10_000))
def test_random_program_agrees_with_oracle(seed):
    p = random_program(seed)
    v = check_program(p)
    res = oracle_commutative(p, SearchBounds(max_len=4, values=tuple(range(-2, 3))))
    if res.found:
        assert v.answer == FAILS
    if v.answer == HOLDS:
        assert not res.found
