import itertools

import pytest
from hypothesis import given, settings, strategies as st

from helpers import LINEAR, red, translated
from redcheck.lang import Uninterpreted, interpret, parse_program
from redcheck.oracle import SearchBounds, oracle_nonzero
from redcheck.snt import TotalPreorder, classify, eval_atom, parse_snt, run, trace, validate
from redcheck.transforms import (
    NotMonotone,
    Unsupported,
    build_rotate_snt,
    build_swap_snt,
    check_multipass,
    component_programs,
    normalize,
    product,
    program_to_snt,
    restrict_min_length,
    slice_program,
)

WORDS = [w for n in range(6) for w in itertools.product(range(-2, 3), repeat=n)]


def rhos(p):
    return [{v: 0 for v in p.variables}, {v: i % 3 - 1 for i, v in enumerate(p.variables)}, {v: 2 for v in p.variables}]


@pytest.mark.parametrize("name", LINEAR)
def test_translation_fidelity(name):
    p, s = red(name), translated(name)
    for rho in rhos(p):
        for w in WORDS:
            assert run(s, w, rho) == interpret(p, w, rho), (w, rho)


def test_max_shape():
    s = translated("max")
    (ml,) = classify(s)
    assert len(ml.handles[0]) == 1 and len(ml.bundles[0]) == 3 and ml.end.end
    assert validate(s) == []


def test_straight_line_program():
    s = program_to_snt(parse_program("reducer id { y := cur; next; loop { next; } ret y; }"))
    loops = [t for t in s.transitions if t.is_loop]
    assert len(loops) == 1 and not loops[0].data and not loops[0].ctrl
    assert len([q for q in s.states if s.loops_at(q) or s.out_of(q)]) == 2


def test_translation_rejects_nonlinear():
    with pytest.raises(Unsupported):
        program_to_snt(parse_program("reducer sq { s := cur; next; loop { s += cur * cur; next; } ret s; }"))


def base(name):
    return restrict_min_length(translated(name), 2)


def test_swap_examples():
    assert run(build_swap_snt(base("sum")), (1, 2, 3)) == 6
    assert run(build_swap_snt(base("first")), (1, 2)) == 2
    assert run(base("first"), (1, 2)) == 1
    assert run(build_swap_snt(base("sum")), (4,)) is None and run(base("sum"), (4,)) is None


def test_rotate_examples():
    assert run(build_rotate_snt(base("first")), (1, 2, 3)) == 2
    for w in WORDS:
        if len(w) >= 2:
            assert run(build_rotate_snt(base("sum")), w) == run(base("sum"), w)
            assert run(build_rotate_snt(base("max")), w) == run(base("max"), w)


@pytest.mark.parametrize("name", ["max", "sum", "first", "last", "summax", "cntmax", "range", "mad2"])
@settings(max_examples=40, deadline=None)
@given(w=st.lists(st.integers(-3, 3), min_size=2, max_size=6), r=st.integers(-2, 2))
def test_swap_and_rotate_identities(name, w, r):
    b = base(name)
    rho = {v: r for v in b.variables}
    sw = build_swap_snt(b)
    ro = build_rotate_snt(b)
    rho_sw = {v: r for v in sw.variables}
    rho_ro = {v: r for v in ro.variables}
    assert run(sw, w, rho_sw) == run(b, [w[1], w[0]] + w[2:], rho)
    assert run(ro, w, rho_ro) == run(b, w[1:] + w[:1], rho)


@pytest.mark.parametrize("a,b", [("sum", "cnt"), ("max", "min"), ("first", "last"), ("summax", "sum")])
def test_product_output_is_difference(a, b):
    s1, s2 = translated(a), translated(b)
    prod = product(s1, s2)
    assert validate(prod) == []
    for w in WORDS:
        o1, o2, o = run(s1, w), run(s2, w), run(prod, w)
        if o1 is None and o2 is None:
            assert o is None
        elif o1 is None or o2 is None:
            assert o == 1
        else:
            assert o == o1 - o2


def test_product_sum_cnt_single_value():
    assert run(product(translated("sum"), translated("cnt")), (5,)) == 5


def test_product_self_has_no_nonzero():
    m = translated("max")
    res = oracle_nonzero(product(m, m), SearchBounds(max_len=4))
    assert not res.found


def test_normalize_max_is_single():
    (v,) = normalize(translated("max"))
    assert validate(v) == []


def test_normalize_two_controls_at_most_three():
    vs = normalize(translated("range"))
    assert 1 <= len(vs) <= 3
    assert len({v.order_map[v.init] for v in vs}) == len(vs)


def test_normalize_rejects_non_monotone():
    text = """
    snt bad {
      control x; data y; init q0;
      q0 -> q1 [] { x := cur; };
      q1 -> q1 [cur > x] { x := cur; };
      q1 -> q1 [cur < x] { x := cur; };
      q1 -> q2 [end] { };
      output q2 = x;
    }
    """
    with pytest.raises(NotMonotone):
        normalize(parse_snt(text))


def _respects(order: TotalPreorder, env) -> bool:
    return all(eval_atom(a, env) for a in order.atoms())


def test_normalized_product_state_domination():
    """Every reached state's order annotation holds of the concrete control values."""
    m = base("max")
    prod = product(m, build_swap_snt(m))
    for v in normalize(prod):
        om = v.order_map
        init = om[v.init]
        rng_vals = range(-2, 3)
        for vals in itertools.product(rng_vals, repeat=len(v.control)):
            rho = dict(zip(v.control, vals))
            if not _respects(init, rho):
                continue
            rho = v.expand_valuation({**rho, **{y: 0 for y in v.data}})
            for w in WORDS[:400]:
                steps = trace(v, w, rho)
                if steps is None:
                    continue
                for t, env in steps:
                    if t.dst in om:
                        assert _respects(om[t.dst], env), (t.dst, env)
            break


def test_multipass_mad():
    sp = check_multipass(red("mad"))
    assert set(sp.crossing) == {"avg", "cnt"}
    assert isinstance(sp.phase1.ret, Uninterpreted)
    assert "avg" in sp.phase2.control_vars
    assert not sp.phase2.has_init


def test_multipass_without_crossing():
    src = "reducer p { t := cur; next; loop { next; } s := 0; init; loop { s += cur; next; } ret s; }"
    sp = check_multipass(parse_program(src))
    assert sp.crossing == () and sp.phase1 is None


def test_avg_components():
    labels = [lbl for lbl, _ in component_programs(red("avg"))]
    assert len(labels) == 2 and "sum" in labels[0] and "cnt" in labels[1]


@pytest.mark.parametrize("name", LINEAR + ("avg",))
def test_slice_preserves_output(name):
    p = red(name)
    q = slice_program(p)
    for rho in rhos(p):
        rq = {v: rho[v] for v in q.variables}
        for w in WORDS[:800]:
            assert interpret(q, w, rq) == interpret(p, w, rho)


@pytest.mark.parametrize(
    "src",
    [
        "reducer p { y := cur; next; z := 1; next; loop { next; } ret y; }",
        "reducer p { y := cur; next; y += cur; next; loop { next; } ret y; }",
        "reducer p { c := 0; next; c += 2; next; loop { c += 1; next; } ret c; }",
        "reducer p { m := cur; next; if (cur > m) { m := cur; } next; loop { next; } ret m; }",
    ],
)
def test_translation_fidelity_short_words(src):
    p = parse_program(src)
    s = program_to_snt(p)
    assert validate(s) == []
    for w in WORDS[:156]:
        assert run(s, w) == interpret(p, w), w
