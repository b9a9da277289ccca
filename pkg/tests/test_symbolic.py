import itertools

import pytest
from hypothesis import given, settings, strategies as st

from helpers import snt, translated
from redcheck.decide import prepare
from redcheck.randgen import random_lasso
from redcheck.snt import TotalPreorder, classify, parse_snt, trace
from redcheck.symbolic import (
    CC,
    CompositionError,
    InitCtrl,
    InitData,
    compose,
    compose_all,
    cycle_power,
    drop_counter_terms,
    identity,
    instantiate,
    mark,
    same,
    scheme_counter_coeffs,
    summarize_path,
)
from redcheck.transforms import normalize

ONE_X = TotalPreorder((("x1",),))
ONE_PLAIN = TotalPreorder((("x",),))


def smax_parts():
    s = snt("smax")
    h, c1, c2 = s.transitions[0], s.transitions[1], s.transitions[2]
    return s, summarize_path(s, [h], ONE_X), summarize_path(s, [c1], ONE_X), summarize_path(s, [c2], ONE_X)


def test_handle_summary():
    _, h, _, _ = smax_parts()
    d = h.fresh[0]
    assert h.r == 1
    assert h.I_tr == [0]
    for v in h.vals:
        assert v.as_dict() == {d: CC(1)} and not v.const


def test_identity_record():
    s = snt("smax")
    e = identity(s, ONE_X)
    assert e.I_pe == [0] and e.lam == [1, 1, 1]
    assert all(not c for c in e.eps)
    assert e.r == 0


def test_c2_record():
    _, _, _, c2 = smax_parts()
    assert c2.lam == [1, 1, 1]
    assert [a[0].c0 for a in c2.alpha] == [1, 3, 5]
    assert [b[0].c0 for b in c2.beta] == [3, 2, 1]
    assert c2.I_tr == [0]


EQ_PATH = """
snt eqp {
  control x;
  data y;
  init q0;
  q0 -> q1 [cur = x] { y := cur; };
  q1 -> q2 [] { x := cur; y += cur; };
  q2 -> q3 [cur = x] { y += cur; };
  q3 -> q4 [end] { };
  output q4 = y;
}
"""


def test_equality_classes():
    s = parse_snt(EQ_PATH)
    theta = summarize_path(s, list(s.transitions[:3]), ONE_PLAIN)
    # first read equals the initial x; the last two reads share one fresh class
    assert theta.reads[0] == InitCtrl(0)
    assert theta.reads[1] == theta.reads[2]
    assert theta.r == 1
    assert theta.I_tr == [0]


def test_cycle_power_c1():
    _, _, c1, _ = smax_parts()
    p = cycle_power(c1)
    assert p.vals[0].coef(InitCtrl(0)) == CC(0, 4)
    assert p.vals[1].coef(InitCtrl(0)) == CC(0, 2)
    assert p.vals[0].coef(InitData(0)) == CC(1)
    assert p.vals[2].coef(InitData(2)) == CC(0)


def test_cycle_power_c2_bands():
    _, _, _, c2 = smax_parts()
    y3 = cycle_power(c2).vals[2]
    assert y3.coef(InitData(2)) == CC(1) and y3.coef(InitCtrl(0)) == CC(5)
    # earlier iterations carry 1 for their read plus 5 for the x1 they leave behind
    bands = sorted((a.band, c.c0) for a, c in y3.terms if a.kind == 2)
    assert [c for _, c in bands] == [6, 6, 1]


def test_drop_counter_terms():
    _, h, c1, c2 = smax_parts()
    d1 = drop_counter_terms(mark(c1))
    assert d1.vals[0].coef(InitCtrl(0)) == CC(0)
    assert same(drop_counter_terms(mark(c2)), c2)
    assert same(drop_counter_terms(h), h)


def test_compose_identity_and_mismatch():
    s, h, c1, _ = smax_parts()
    assert same(compose(identity(s, ONE_X), c1), c1)
    assert same(compose(c1, identity(s, ONE_X)), c1)
    m = translated("range")
    (v0, *_) = normalize(m)
    om = v0.order_map
    loops = [t for t in v0.transitions if t.is_loop]
    a = summarize_path(v0, [loops[0]], om[loops[0].src])
    other = [o for o in TotalPreorder.all(v0.control) if o != a.end][0]
    with pytest.raises(CompositionError):
        compose(a, identity(v0, other))


@pytest.mark.parametrize("ell", [2, 3, 4])
def test_compose_c1_twice_is_power(ell):
    _, _, c1, c2 = smax_parts()
    for c in (c1, c2):
        assert same(instantiate(cycle_power(c), ell), compose_all([c] * ell))


def lasso_cycles():
    out = []
    for seed in range(12):
        s = random_lasso(seed, 1 + seed % 2, 2, 3, 1)
        for v in normalize(s):
            for ml in classify(v):
                ld = prepare(v, ml, v.order_map)
                if ld is not None and len(ld.bundles[0]) >= 2:
                    out.append(ld.bundles[0])
    _, _, c1, c2 = smax_parts()
    return [[c1, c2]] + out


@pytest.mark.parametrize("ell", [2, 3, 4])
def test_scheme_coefficients_match_composition(ell):
    checked = 0
    for cycles in lasso_cycles():
        n = len(cycles)
        for first in range(n):
            rest = [i for i in range(n) if i != first]
            for m in range(len(rest) + 1):
                for tail in itertools.permutations(rest, m):
                    scheme = (first,) + tail
                    try:
                        theta = compose_all([cycles[first]] * ell + [cycles[i] for i in tail])
                    except CompositionError:
                        continue
                    coeffs, consts = scheme_counter_coeffs(cycles, scheme)
                    reps = cycles[first].class_reps
                    for j in range(theta.l):
                        assert consts[j].at(ell) == theta.vals[j].const.c0
                        for cls, rep in enumerate(reps):
                            assert coeffs[(j, cls)].at(ell) == theta.vals[j].coef(InitCtrl(rep)).c0
                    checked += 1
    assert checked >= 10


@settings(max_examples=80, deadline=None)
@given(
    st.lists(st.integers(-4, 4), max_size=6),
    st.integers(-4, 4),
    st.tuples(st.integers(-4, 4), st.integers(-4, 4), st.integers(-4, 4)),
)
def test_summary_matches_run(w, x0, ys):
    s = snt("smax")
    rho = {"x1": x0, "y1": ys[0], "y2": ys[1], "y3": ys[2]}
    steps = trace(s, w, rho)
    if steps is None:
        return
    theta = summarize_path(s, [t for t, _ in steps], ONE_X)
    env = theta.eval_env(rho, w)
    for v in s.variables:
        assert theta.value(v).evaluate(env) == steps[-1][1][v]


def _env_from_reads(theta, rho, w):
    env = {InitCtrl(j): rho[x] for j, x in enumerate(theta.control)}
    env.update({InitData(j): rho[y] for j, y in enumerate(theta.data)})
    for a, d in zip(theta.reads, w):
        if a.kind == 2:
            env[a] = d
    return env


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-4, 4), min_size=1, max_size=6), st.integers(-4, 4))
def test_compose_matches_run(w, x0):
    """Composing per-transition summaries along a run equals the run."""
    s = snt("smax")
    rho = {"x1": x0, "y1": 1, "y2": -1, "y3": 2}
    steps = trace(s, w, rho)
    if steps is None:
        return
    parts = [summarize_path(s, [t], ONE_X) for t, _ in steps]
    theta = compose_all(parts)
    env = _env_from_reads(theta, rho, w)
    for v in s.variables:
        assert theta.value(v).evaluate(env) == steps[-1][1][v]
