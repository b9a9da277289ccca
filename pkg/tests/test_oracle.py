import pytest

from helpers import red, snt, translated
from redcheck.oracle import SearchBounds, oracle_commutative, oracle_equivalent, oracle_nonzero, valuations, words
from redcheck.snt import run
from redcheck.transforms import build_swap_snt, product, restrict_min_length


def test_bounds_parse():
    b = SearchBounds.parse("len=4,lo=-2,hi=2,rho=3,seed=7")
    assert b.max_len == 4 and b.values == (-2, -1, 0, 1, 2) and b.rho_samples == 3 and b.seed == 7
    with pytest.raises(ValueError):
        SearchBounds.parse("depth=3")


def test_words_graded_order():
    ws = list(words(SearchBounds(max_len=2, values=(0, 1))))
    assert ws == [(), (0,), (1,), (0, 0), (0, 1), (1, 0), (1, 1)]


def test_valuations_zero_first_and_links():
    vals = valuations(["a", "b", "c"], SearchBounds(rho_samples=4), [("a", "c")])
    assert vals[0] == {"a": 0, "b": 0, "c": 0}
    assert len(vals) == 4
    assert all(v["a"] == v["c"] for v in vals)
    assert vals == valuations(["a", "b", "c"], SearchBounds(rho_samples=4), [("a", "c")])


def test_first_witness_small_values():
    res = oracle_commutative(red("first"), SearchBounds(max_len=3, values=(1, 2)))
    w = res.witness
    assert w.word == (1, 2) and w.permuted == (2, 1) and w.outputs == (1, 2)


def test_first_witness_default_bounds_frozen():
    res = oracle_commutative(red("first"))
    assert res.to_json()["witness"] == {
        "kind": "commutative",
        "word": [-3, -2],
        "rho0": {"f": 0},
        "outputs": [-3, -2],
        "permuted": [-2, -3],
    }


def test_last_witness_length_two():
    assert len(oracle_commutative(red("last")).witness.word) == 2


def test_sum_none_within_bounds():
    res = oracle_commutative(red("sum"), SearchBounds(max_len=4))
    assert not res.found
    assert res.to_json()["status"] == "none within bounds"
    assert res.runs > 0


def test_deterministic():
    a = oracle_commutative(red("cntmax")).to_json()
    b = oracle_commutative(red("cntmax")).to_json()
    assert a == b


def test_sum_vs_cnt_witnesses():
    s, c = translated("sum"), translated("cnt")
    # cnt never reads cur before its loop, so on the empty word it returns 0 while sum is bottom
    res = oracle_equivalent(s, c, SearchBounds(max_len=2, values=(5,)))
    assert res.witness.word == () and res.witness.outputs == (None, 0)
    assert run(s, (5,)) == 5 and run(c, (5,)) == 0


def test_equivalent_identical_and_swap():
    s = translated("sum")
    b = SearchBounds(max_len=4)
    assert not oracle_equivalent(s, s, b).found
    base = restrict_min_length(s, 2)
    assert not oracle_equivalent(base, build_swap_snt(base), b).found


def test_smax_nonzero_follows_falling_step():
    w = oracle_nonzero(snt("smax"), SearchBounds(max_len=3)).witness
    # handle then the falling cycle: output is minus the first value
    assert len(w.word) == 2 and w.word[1] < w.word[0]
    assert w.outputs == (-w.word[0],)


def test_nonzero_none():
    b = SearchBounds(max_len=3)
    assert not oracle_nonzero(snt("zero"), b).found
    m = translated("max")
    assert not oracle_nonzero(product(m, m), b).found


def test_program_and_machine_agree():
    p = red("max")
    a = oracle_commutative(p, SearchBounds(max_len=3))
    b = oracle_commutative(translated("max"), SearchBounds(max_len=3))
    assert not a.found and not b.found


def test_rejects_unknown_target():
    with pytest.raises(TypeError):
        oracle_nonzero("not a machine")
