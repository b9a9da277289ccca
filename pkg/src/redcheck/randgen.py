"""Seeded random machines and programs for differential testing."""
from __future__ import annotations

import itertools
import random

from .lang import CUR, Cmp, ReducerProgram, parse_program
from .linear import Lin
from .snt import Snt, make_transition

OPS = ("<", "=", ">")


def _lin(rng: random.Random, names, lo=-2, hi=2, const=True) -> Lin:
    terms = {v: rng.randint(lo, hi) for v in names}
    return Lin.of(terms, rng.randint(lo, hi) if const else 0)


def _bundle(rng: random.Random, control, dirs, n_loops, data):
    """Self-loops on distinct cur positions, each respecting the tracking directions."""
    positions = list(itertools.product(OPS, repeat=len(control)))
    rng.shuffle(positions)
    out = []
    for pos in positions[:n_loops]:
        guard = tuple(Cmp(op, CUR, x) for op, x in zip(pos, control))
        ctrl = {}
        for op, x in zip(pos, control):
            if (dirs[x] == "up" and op == ">") or (dirs[x] == "down" and op == "<"):
                ctrl[x] = CUR
        upd = {}
        for y in data:
            e = _lin(rng, list(control) + [CUR])
            upd[y] = e + Lin.var(y) if rng.random() < 0.7 else e
        out.append((guard, ctrl, upd))
    return out, positions[n_loops:]


def random_lasso(seed: int, k: int = 1, l: int = 2, cycles: int = 2, junctions: int = 1) -> Snt:
    """A generalized lasso: handle, then per junction a bundle of self-loops, then the end."""
    rng = random.Random(seed)
    control = tuple(f"x{i + 1}" for i in range(k))
    data = tuple(f"y{j + 1}" for j in range(l))
    dirs = {x: rng.choice(("up", "down", "frozen")) for x in control}
    trans = []
    # one handle letter per control variable, so their order is not fixed
    hstates = [f"h{i}" for i in range(k)] + ["j1"]
    hstates[0] = "q0"
    for i, x in enumerate(control):
        upd = {y: _lin(rng, [CUR]) for y in data} if i == 0 else {y: Lin.var(y) + _lin(rng, [CUR], const=False) for y in data}
        trans.append(make_transition(hstates[i], hstates[i + 1], (), False, {x: CUR}, upd))
    per = max(1, cycles // junctions)
    for i in range(junctions):
        q = f"j{i + 1}"
        n = per if i < junctions - 1 else cycles - per * (junctions - 1)
        loops, free = _bundle(rng, control, dirs, max(n, 0), data)
        for guard, ctrl, upd in loops:
            trans.append(make_transition(q, q, guard, False, ctrl, upd))
        if i < junctions - 1:
            pos = free[0]
            guard = tuple(Cmp(op, CUR, x) for op, x in zip(pos, control))
            upd = {y: Lin.var(y) + _lin(rng, [CUR], const=False) for y in data}
            trans.append(make_transition(q, f"j{i + 2}", guard, False, {}, upd))
    last = f"j{junctions}"
    trans.append(make_transition(last, "qf", (), True, {}, {}))
    out = _lin(rng, control + data, const=True)
    states = tuple(hstates[:-1]) + tuple(f"j{i + 1}" for i in range(junctions)) + ("qf",)
    return Snt(f"rand{seed}", states, control, data, "q0", tuple(trans), (("qf", out),))


_TEMPLATE = """reducer {name} {{
  m := cur;
  {init}
  next;
  loop {{
    if (cur {op} m) {{ m := cur; {upd_a} }} else {{ {upd_b} }}
    next;
  }}
  ret {ret};
}}
"""


def random_program(seed: int) -> ReducerProgram:
    """A max- or min-tracking reducer with random accumulator updates (often not commutative)."""
    rng = random.Random(seed)
    nacc = rng.randint(1, 2)
    accs = [f"s{i + 1}" for i in range(nacc)]

    def term(names):
        parts = []
        for v in names:
            c = rng.choice((0, 0, 1, 1, -1, 2))
            if c:
                parts.append(f"{c} * {v}" if c != 1 else v)
        return " + ".join(parts) or "0"

    init, upd_a, upd_b = [], [], []
    for a in accs:
        if rng.random() < 0.5:
            # order-independent accumulator: the same multiple of cur everywhere
            c = rng.choice((1, 2, -1))
            init.append(f"{a} := {c} * cur;")
            upd_a.append(f"{a} += {c} * cur;")
            upd_b.append(f"{a} += {c} * cur;")
        else:
            init.append(f"{a} := {term(['cur'])};")
            upd_a.append(f"{a} += {term(['m', 'cur'])};")
            upd_b.append(f"{a} += {term(['m', 'cur'])};")
    init, upd_a, upd_b = " ".join(init), " ".join(upd_a), " ".join(upd_b)
    ret = " + ".join([term(["m"])] + accs)
    text = _TEMPLATE.format(
        name=f"rp{seed}", init=init, op=rng.choice((">", "<")), upd_a=upd_a, upd_b=upd_b, ret=ret
    )
    return parse_program(text)


def mutate(s: Snt, seed: int) -> Snt:
    """Copy of s with one data-update coefficient or output coefficient changed by +-1."""
    rng = random.Random(seed)
    spots = [(i, y) for i, t in enumerate(s.transitions) for y, _ in t.data]
    trans = list(s.transitions)
    if spots and rng.random() < 0.8:
        i, y = rng.choice(spots)
        t = trans[i]
        rhs = t.data_map[y]
        names = sorted(rhs.variables() | {CUR} | set(s.control)) if not t.end else sorted(rhs.variables() | set(s.control))
        v = rng.choice(names)
        new = rhs + Lin.var(v, rng.choice((-1, 1)))
        trans[i] = make_transition(t.src, t.dst, t.guard, t.end, t.ctrl_map, {**t.data_map, y: new})
        return Snt(s.name + "_m", s.states, s.control, s.data, s.init, tuple(trans), s.output)
    q, out = s.output[0]
    v = rng.choice(list(s.control + s.data))
    return Snt(s.name + "_m", s.states, s.control, s.data, s.init, s.transitions, ((q, out + Lin.var(v, rng.choice((-1, 1)))),))
