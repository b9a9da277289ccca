"""Constructions on reducers and SNTs: translation, permutation simulators, product, normalization."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from . import lang
from .lang import (
    CUR,
    Assume,
    BridgeAssign,
    Cmp,
    CtrlAssign,
    DataAdd,
    DataAssign,
    IfThenElse,
    Init,
    Linear,
    Loop,
    Next,
    ReducerProgram,
    Uninterpreted,
    Var,
    enumerate_exec_paths,
    expr_vars,
    negate_atom,
    to_lin,
)
from .linear import Lin
from .snt import (
    Snt,
    TotalPreorder,
    Transition,
    entails,
    guard_sat,
    make_transition,
    renumber,
    rename_vars,
    split_update,
    validate,
)


class Unsupported(Exception):
    """Input outside the decidable fragment (non-linear, non-copyless, non-monotone...)."""

    def __init__(self, constraint: str, message: str):
        super().__init__(f"{constraint}: {message}")
        self.constraint = constraint
        self.message = message


class NotMonotone(Unsupported):
    def __init__(self, violations):
        self.violations = violations
        super().__init__("monotone", "; ".join(str(v) for v in violations))


# -- program to SNT ------------------------------------------------------------------


def _subst_atom(a: Cmp, sym: dict[str, str]) -> Cmp | bool:
    left, right = sym.get(a.left, a.left), sym.get(a.right, a.right)
    if left == right:
        return a.op == "="
    return Cmp(a.op, left, right)


def _exec_path(p: ReducerProgram, path: Sequence, reads_cur: bool):
    """Symbolic effect of a straight-line path: (guard, ctrl map, data map) or None if infeasible.

    With reads_cur False, any use of cur makes the path unusable (returns None).
    """
    control = set(p.control_vars)
    sym = {x: x for x in p.control_vars}
    data: dict[str, Lin] = {}
    guard: list[Cmp] = []
    for st in path:
        used = set()
        if isinstance(st, Assume):
            used = {st.atom.left, st.atom.right}
        elif isinstance(st, (DataAssign, DataAdd, BridgeAssign)):
            used = expr_vars(st.expr)
        elif isinstance(st, CtrlAssign):
            used = {st.source}
        if CUR in used and not reads_cur:
            return None
        if isinstance(st, Assume):
            a = _subst_atom(st.atom, sym)
            if a is False:
                return None
            if a is not True and a not in guard:
                guard.append(a)
        elif isinstance(st, CtrlAssign):
            sym[st.target] = sym.get(st.source, st.source)
        elif isinstance(st, (DataAssign, DataAdd, BridgeAssign)):
            e = to_lin(st.expr)
            if e is None:
                raise Unsupported("linear", f"non-linear update of {st.target} (line {st.line})")
            env = {x: Lin.var(sym[x]) for x in control}
            env[st.target] = data.get(st.target, Lin.var(st.target))
            rhs = e.subst(env)
            if isinstance(st, DataAdd):
                rhs = env[st.target] + rhs
            if st.target in control:
                raise Unsupported("sort", f"control variable {st.target} assigned arithmetic")
            data[st.target] = rhs
        else:
            raise TypeError(st)
    if not guard_sat(guard):
        return None
    ctrl = {x: v for x, v in sym.items() if v != x}
    for y, rhs in data.items():
        lam, e = split_update(y, rhs)
        if lam not in (0, 1):
            raise Unsupported("copyless", f"update of {y} scales it by {lam}")
        if e.variables() - control - {CUR}:
            raise Unsupported("copyless", f"update of {y} reads another data variable")
    data = {y: rhs for y, rhs in data.items() if rhs != Lin.var(y)}
    return guard, ctrl, data


def _paths(stmts: Sequence) -> list[tuple]:
    return enumerate_exec_paths(list(stmts))


def program_to_snt(p: ReducerProgram) -> Snt:
    """Translate a single-pass reducer into an equivalent SNT."""
    if p.has_init:
        raise ValueError("multi-pass programs are split by check_multipass first")
    if not isinstance(p.ret, Linear):
        raise ValueError("uninterpreted returns are checked componentwise")
    out = to_lin(p.ret.expr)
    if out is None:
        raise Unsupported("linear", "non-linear return expression")

    segments: list[list] = [[]]
    loop: Loop | None = None
    for it in p.body:
        if isinstance(it, Next):
            segments.append([])
        elif isinstance(it, Loop):
            loop = it
        else:
            segments[-1].append(it)
    assert loop is not None
    pre_loop = segments[-1]
    steps = segments[:-1]

    trans: list[Transition] = []
    names = [f"L{i}" for i in range(len(steps))]
    head = "H"
    sink = "S"
    entry = "P" if pre_loop else head

    def emit(src, dst, paths, end=False):
        for path in paths:
            res = _exec_path(p, path, reads_cur=not end)
            if res is None:
                continue
            g, c, d = res
            trans.append(make_transition(src, dst, g, end, c, d))

    chain = names + [entry]
    for i, seg in enumerate(steps):
        emit(chain[i], chain[i + 1], _paths(seg))
        # the end marker here: cur is bottom for the rest of the pre-loop code
        rest = [()]
        for later in steps[i:] + [pre_loop]:
            rest = [a + b for a in rest for b in _paths(later)]
        emit(chain[i], sink, rest, end=True)
    body_paths = _paths(loop.body)
    if pre_loop:
        pre_paths = _paths(pre_loop)
        emit(entry, head, [a + b for a in pre_paths for b in body_paths])
        emit(entry, sink, pre_paths, end=True)
    emit(head, head, body_paths)
    trans.append(make_transition(head, sink, (), True))
    states = tuple(chain + ([head] if pre_loop else []) + [sink])
    s = Snt(p.name, states, p.control_vars, p.data_vars, chain[0], tuple(trans), ((sink, out),))
    return renumber(s)


# -- length restriction and permutation simulators ------------------------------------


def restrict_min_length(s: Snt, n: int = 2) -> Snt:
    """Same outputs on words of length >= n, bottom on shorter words."""
    if n <= 0:
        return s
    copy = lambda q, i: f"{q}#{i}"
    trans = list(s.transitions)
    states = list(s.states)
    for i in range(n):
        for q in s.states:
            states.append(copy(q, i))
            for t in s.out_of(q):
                if t.end:
                    continue
                dst = copy(t.dst, i + 1) if i + 1 < n else t.dst
                trans.append(replace(t, src=copy(q, i), dst=dst))
    return renumber(replace(s, states=tuple(states), init=copy(s.init, 0), transitions=tuple(trans), orders=()))


def _fresh_name(s: Snt, base: str = "x'") -> str:
    name = base
    while name in s.variables:
        name += "'"
    return name


def _sub_sym(v: str, mapping: dict[str, str]) -> str:
    return mapping.get(v, v)


def _sub_guard(g: Iterable[Cmp], mapping: dict[str, str]) -> list[Cmp] | None:
    out = []
    for a in g:
        b = _subst_atom(a, mapping)
        if b is False:
            return None
        if b is not True and b not in out:
            out.append(b)
    return out


def _compose_eta(t1: Transition, t2: Transition, cur_to: str | None, s: Snt, cur_first: bool):
    """Effects of t2 after t1 as one assignment.

    cur_to renames cur inside t2 (swap) or inside the whole result (rotate, cur_first=False).
    """
    c1, d1 = t1.ctrl_map, t1.data_map
    c2, d2 = t2.ctrl_map, t2.data_map
    ctrl: dict[str, str] = {}
    data: dict[str, Lin] = {}
    if cur_first:
        # swap: t2 reads the stored value, t1 the current one
        sym2 = {x: c1.get(x, x) for x in s.control}
        if cur_to:
            sym2[CUR] = cur_to
        for x in set(c1) | set(c2):
            ctrl[x] = sym2.get(c2[x], c2[x]) if x in c2 else c1[x]
        lin_env = {x: Lin.var(v) for x, v in sym2.items()}
        for y in set(d1) | set(d2):
            if y in d2:
                env = dict(lin_env)
                env[y] = d1.get(y, Lin.var(y))
                data[y] = d2[y].subst(env)
            else:
                data[y] = d1[y]
    else:
        # rotate: both steps read the stored value
        sym1 = {CUR: cur_to} if cur_to else {}
        for x in set(c1) | set(c2):
            if x in c2:
                v = c2[x]
                v = c1.get(v, v) if v != CUR else v
            else:
                v = c1[x]
            ctrl[x] = sym1.get(v, v)
        for y in set(d1) | set(d2):
            if y in d2:
                env = {x: Lin.var(c1.get(x, x)) for x in s.control}
                env[y] = d1.get(y, Lin.var(y))
                e = d2[y].subst(env)
            else:
                e = d1[y]
            data[y] = e.rename(sym1)
    ctrl = {x: v for x, v in ctrl.items() if v != x}
    return ctrl, data


def build_swap_snt(s: Snt) -> Snt:
    """Machine reading d1 d2 d3... and behaving like s on d2 d1 d3..."""
    xp = _fresh_name(s)
    q0p, q1p = "sw0", "sw1"
    while q0p in s.states or q1p in s.states:
        q0p, q1p = q0p + "_", q1p + "_"
    trans = list(s.transitions)
    trans.append(make_transition(q0p, q1p, (), False, {xp: CUR}, {}))
    for t1 in s.out_of(s.init):
        if t1.end:
            continue
        for t2 in s.out_of(t1.dst):
            if t2.end:
                continue
            mapping = {x: t1.ctrl_map.get(x, x) for x in s.control}
            mapping[CUR] = xp
            g2 = _sub_guard(t2.guard, mapping)
            if g2 is None:
                continue
            guard = list(t1.guard) + [a for a in g2 if a not in t1.guard]
            if not guard_sat(guard):
                continue
            ctrl, data = _compose_eta(t1, t2, xp, s, cur_first=True)
            trans.append(make_transition(q1p, t2.dst, guard, False, ctrl, data))
    return replace(
        s,
        name=s.name + "_swap",
        states=(q0p, q1p) + s.states,
        control=s.control + (xp,),
        init=q0p,
        transitions=tuple(trans),
        orders=(),
    )


def build_rotate_snt(s: Snt) -> Snt:
    """Machine reading d1 d2 ... dn and behaving like s on d2 ... dn d1."""
    xp = _fresh_name(s)
    q0p = "rot0"
    while q0p in s.states:
        q0p += "_"
    trans = [t for t in s.transitions if not t.end]
    trans.insert(0, make_transition(q0p, s.init, (), False, {xp: CUR}, {}))
    for t1 in s.transitions:
        if t1.end:
            continue
        for t2 in s.out_of(t1.dst):
            if not t2.end:
                continue
            g1 = _sub_guard(t1.guard, {CUR: xp})
            mapping = {x: t1.ctrl_map.get(x, x) for x in s.control}
            g2 = _sub_guard(t2.guard, mapping)
            g2 = None if g2 is None else _sub_guard(g2, {CUR: xp})
            if g1 is None or g2 is None:
                continue
            guard = g1 + [a for a in g2 if a not in g1]
            if not guard_sat(guard):
                continue
            ctrl, data = _compose_eta(t1, t2, xp, s, cur_first=False)
            trans.append(make_transition(t1.src, t2.dst, guard, True, ctrl, data))
    return replace(
        s,
        name=s.name + "_rot",
        states=(q0p,) + s.states,
        control=s.control + (xp,),
        init=q0p,
        transitions=tuple(trans),
        orders=(),
    )


# -- product ------------------------------------------------------------------------


def complement(guards: Sequence[Sequence[Cmp]]) -> list[list[Cmp]]:
    """Disjoint satisfiable conjunctions covering exactly the complement of the union of guards."""
    cells: list[list[Cmp]] = [[]]
    for g in guards:
        nxt: list[list[Cmp]] = []
        for c in cells:
            if not guard_sat(c + list(g)):
                nxt.append(c)
                continue
            if all(entails(c, a) for a in g):
                continue
            for i, a in enumerate(g):
                for alt in negate_atom(a):
                    cand = c + list(g[:i]) + [alt]
                    if guard_sat(cand):
                        nxt.append(_dedup(cand))
        cells = nxt
    return cells


def _dedup(atoms: Iterable[Cmp]) -> list[Cmp]:
    out: list[Cmp] = []
    for a in atoms:
        if a not in out:
            out.append(a)
    return out


def complete(s: Snt) -> Snt:
    """Make every configuration step somewhere: missing moves go to a trap without output."""
    trap, trap_end = "trap", "trap_end"
    while trap in s.states or trap_end in s.states:
        trap, trap_end = trap + "_", trap_end + "_"
    extra: list[Transition] = []
    finals = {t.dst for t in s.transitions if t.end}
    for q in s.states:
        outs = s.out_of(q)
        if not outs and q in finals:
            continue  # nothing is read after the end marker
        for end in (False, True):
            gs = [t.guard for t in outs if t.end == end]
            for cell in complement(gs):
                extra.append(make_transition(q, trap, cell, end) if not end else make_transition(q, trap_end, cell, True))
    if not extra:
        return s
    extra.append(make_transition(trap, trap, (), False))
    extra.append(make_transition(trap, trap_end, (), True))
    return replace(s, states=s.states + (trap, trap_end), transitions=s.transitions + tuple(extra))


def product(s1: Snt, s2: Snt) -> Snt:
    """Machine whose output is O1 - O2 (1 when exactly one side is defined)."""
    r1 = {v: f"{v}@1" for v in s1.variables}
    r2 = {v: f"{v}@2" for v in s2.variables}
    a, b = rename_vars(complete(s1), r1), rename_vars(complete(s2), r2)
    links = [tuple(g) for g in a.links] + [tuple(g) for g in b.links]
    for v in s1.variables:
        if v in s2.variables and ((v in s1.control) == (v in s2.control)):
            links.append((r1[v], r2[v]))
    links = _merge_groups(links, a.variables + b.variables)
    o1, o2 = a.output_map, b.output_map
    start = (a.init, b.init)
    seen = {start}
    work = deque([start])
    trans: list[Transition] = []
    outputs: dict = {}
    while work:
        q1, q2 = work.popleft()
        if q1 in o1 and q2 in o2:
            outputs[(q1, q2)] = o1[q1] - o2[q2]
        elif q1 in o1 or q2 in o2:
            outputs[(q1, q2)] = Lin.constant(1)
        for t1 in a.out_of(q1):
            for t2 in b.out_of(q2):
                if t1.end != t2.end:
                    continue
                g = _dedup(list(t1.guard) + list(t2.guard))
                if not guard_sat(g):
                    continue
                dst = (t1.dst, t2.dst)
                trans.append(
                    make_transition(
                        (q1, q2), dst, g, t1.end, {**t1.ctrl_map, **t2.ctrl_map}, {**t1.data_map, **t2.data_map}
                    )
                )
                if dst not in seen:
                    seen.add(dst)
                    work.append(dst)
    name = {q: f"{q[0]}.{q[1]}" for q in seen}
    trans = [replace(t, src=name[t.src], dst=name[t.dst]) for t in trans]
    order = [q for q in sorted(seen, key=lambda q: (a.states.index(q[0]), b.states.index(q[1])))]
    out = Snt(
        f"{s1.name}_vs_{s2.name}",
        tuple(name[q] for q in order),
        a.control + b.control,
        a.data + b.data,
        name[start],
        tuple(trans),
        tuple((name[q], e) for q, e in outputs.items()),
        tuple(links),
    )
    return renumber(out)


def _merge_groups(groups: Sequence[Sequence[str]], order: Sequence[str]) -> list[tuple[str, ...]]:
    parent = {v: v for g in groups for v in g}

    def find(v):
        while parent[v] != v:
            v = parent[v]
        return v

    for g in groups:
        for v in g[1:]:
            ra, rb = find(g[0]), find(v)
            if ra != rb:
                parent[rb] = ra
    buckets: dict[str, list[str]] = {}
    for v in parent:
        buckets.setdefault(find(v), []).append(v)
    out = [tuple(sorted(m, key=order.index)) for m in buckets.values() if len(m) > 1]
    return sorted(out, key=lambda g: order.index(g[0]))


# -- normalization ---------------------------------------------------------------------


def positions(order: TotalPreorder, control: Sequence[str]):
    """Every position of cur relative to the classes of order: (rank value, guard atoms)."""
    m = order.class_count
    out = []
    for p in range(2 * m + 1):
        atoms = []
        for x in control:
            v = 2 * order.rank(x) + 1
            atoms.append(Cmp("<" if p < v else ">" if p > v else "=", CUR, x))
        out.append((p, atoms))
    return out


def initial_orders(s: Snt) -> list[TotalPreorder]:
    """Initial control orders compatible with the linked initial values."""
    groups = [set(g) for g in s.links]
    out = []
    for o in TotalPreorder.all(s.control):
        if all(len({o.rank(v) for v in g if v in s.control}) <= 1 for g in groups):
            out.append(o)
    return out


def normalize(s: Snt) -> list[Snt]:
    """One path-feasible, state-dominating, end-guard-free machine per initial control order."""
    bad = [v for v in validate(s) if v.constraint in ("monotone", "generalized-flat")]
    if bad:
        raise NotMonotone(bad)
    control = s.control
    results = []
    for idx, o0 in enumerate(initial_orders(s)):
        start = (s.init, o0)
        names = {start: "n0"}
        work = deque([start])
        trans: list[Transition] = []
        while work:
            q, o = work.popleft()
            phi = o.atoms(control)
            for t in s.out_of(q):
                if t.end:
                    if not guard_sat(phi + list(t.guard)):
                        continue
                    cm = t.ctrl_map
                    ranks = {x: o.rank(cm.get(x, x)) for x in control}
                    cases = [((), ranks)]
                else:
                    cases = []
                    for p, pos in positions(o, control):
                        if not guard_sat(phi + pos + list(t.guard)):
                            continue
                        cm = t.ctrl_map
                        val = lambda v: p if v == CUR else 2 * o.rank(v) + 1
                        cases.append((tuple(pos), {x: val(cm.get(x, x)) for x in control}))
                for guard, ranks in cases:
                    o2 = TotalPreorder.from_ranks(ranks, control)
                    dst = (t.dst, o2)
                    if dst not in names:
                        names[dst] = f"n{len(names)}"
                        work.append(dst)
                    trans.append(
                        make_transition(names[(q, o)], names[dst], guard, t.end, t.ctrl_map, t.data_map)
                    )
        om = s.output_map
        out = Snt(
            f"{s.name}_n{idx}",
            tuple(names.values()),
            s.control,
            s.data,
            "n0",
            tuple(trans),
            tuple((names[k], om[k[0]]) for k in names if k[0] in om),
            s.links,
            tuple((names[k], k[1]) for k in names),
        )
        results.append(renumber(out))
    return results


# -- multi-pass programs -------------------------------------------------------------------


@dataclass(frozen=True)
class MultipassSplit:
    phase1: ReducerProgram | None
    phase2: ReducerProgram
    crossing: tuple[str, ...]


def _stmt_reads(st) -> set[str]:
    if isinstance(st, (DataAssign, BridgeAssign)):
        return expr_vars(st.expr)
    if isinstance(st, DataAdd):
        return expr_vars(st.expr) | {st.target}
    if isinstance(st, CtrlAssign):
        return {st.source}
    if isinstance(st, IfThenElse):
        out = {v for a in st.guard for v in (a.left, a.right)}
        for s2 in st.then + tuple(st.orelse or ()):
            out |= _stmt_reads(s2)
        return out
    if isinstance(st, Loop):
        out = set()
        for s2 in st.body:
            out |= _stmt_reads(s2)
        return out
    return set()


def _stmt_writes(st) -> set[str]:
    if isinstance(st, (DataAssign, BridgeAssign, DataAdd, CtrlAssign)):
        return {st.target}
    if isinstance(st, IfThenElse):
        out = set()
        for s2 in st.then + tuple(st.orelse or ()):
            out |= _stmt_writes(s2)
        return out
    if isinstance(st, Loop):
        out = set()
        for s2 in st.body:
            out |= _stmt_writes(s2)
        return out
    return set()


def _ret_reads(ret) -> set[str]:
    if isinstance(ret, Linear):
        return expr_vars(ret.expr)
    out = set()
    for a in ret.args:
        out |= expr_vars(a)
    return out


def check_multipass(p: ReducerProgram) -> MultipassSplit:
    """Split p1; init; p2 into a phase-1 program returning what p2 needs and a phase-2 program."""
    cut = [i for i, it in enumerate(p.body) if isinstance(it, Init)]
    if len(cut) != 1:
        raise lang.InitError("exactly one 'init' is required")
    first, second = p.body[: cut[0]], p.body[cut[0] + 1 :]
    bridges = [it for it in first if isinstance(it, BridgeAssign)]
    pass1 = [it for it in first if not isinstance(it, BridgeAssign)]
    written1: set[str] = set()
    for it in pass1:
        written1 |= _stmt_writes(it)

    # bridges fed by phase 1 stay there; constant ones move to the start of phase 2
    crossing_bridges: dict[str, BridgeAssign] = {}
    moved: list[BridgeAssign] = []
    for b in bridges:
        reads = expr_vars(b.expr)
        if CUR in reads:
            raise lang.InitError("cur is undefined between passes", b.line)
        if reads & (written1 | set(crossing_bridges)):
            crossing_bridges[b.target] = b
        else:
            moved.append(b)

    reads2 = _ret_reads(p.ret)
    writes2: set[str] = {b.target for b in moved}
    for it in second:
        reads2 |= _stmt_reads(it)
        writes2 |= _stmt_writes(it)
    crossing = [v for v in p.variables if v in reads2 and (v in written1 or v in crossing_bridges)]
    crossing = [v for v in crossing if v not in {b.target for b in moved}]
    for v in crossing:
        if v in p.control_vars and v in written1:
            raise lang.InitError(f"crossing variable {v} has control sort in the first pass")

    def deps(v: str, seen=()) -> set[str]:
        if v in crossing_bridges and v not in seen:
            out = set()
            for u in expr_vars(crossing_bridges[v].expr):
                out |= deps(u, seen + (v,))
            return out
        return {v} if v in written1 else set()

    needed: set[str] = set()
    for v in crossing:
        needed |= deps(v)
    phase1 = None
    if needed:
        args = tuple(Var(v) for v in p.variables if v in needed)
        used = needed | set().union(*(_stmt_reads(i) | _stmt_writes(i) for i in pass1))
        used.discard(CUR)
        phase1 = ReducerProgram(
            p.name + "_phase1",
            tuple(v for v in p.control_vars if v in used),
            tuple(v for v in p.data_vars if v in used),
            tuple(pass1),
            Uninterpreted("tuple", args),
        )
    readonly = [v for v in crossing if v not in writes2]
    body2 = []
    for b in moved:
        if b.target in p.control_vars:
            if not isinstance(b.expr, Var):
                raise lang.InitError(f"{b.target} is compared in the second pass but computed arithmetically")
            body2.append(CtrlAssign(b.target, b.expr.name, b.line))
        else:
            body2.append(DataAssign(b.target, b.expr, b.line))
    body2.extend(second)
    used2 = (reads2 | writes2) - {CUR}
    ctrl2 = tuple(v for v in p.variables if v in used2 and (v in p.control_vars or v in readonly))
    data2 = tuple(v for v in p.variables if v in used2 and v not in ctrl2)
    phase2 = ReducerProgram(p.name + "_phase2", ctrl2, data2, tuple(body2), p.ret)
    return MultipassSplit(phase1, phase2, tuple(crossing))


def component_programs(p: ReducerProgram) -> list[tuple[str, ReducerProgram]]:
    """One linear-return program per argument of an uninterpreted return."""
    if isinstance(p.ret, Linear):
        return [("ret", p)]
    out = []
    for i, arg in enumerate(p.ret.args):
        label = lang.format_expr(arg)
        out.append((f"{p.ret.fn}[{i}]={label}", replace(p, name=f"{p.name}_{i}", ret=Linear(arg))))
    return out


def _may_fail(e) -> bool:
    if isinstance(e, lang.Bin):
        return e.op == "/" or _may_fail(e.left) or _may_fail(e.right)
    if isinstance(e, lang.Neg):
        return _may_fail(e.arg)
    return isinstance(e, lang.Call)


def slice_program(p: ReducerProgram) -> ReducerProgram:
    """Drop assignments and declarations the return value cannot depend on.

    Assumptions and bridge assignments that may divide by zero stay, since
    they decide whether the output is defined.
    """
    ret = p.ret.expr if isinstance(p.ret, Linear) else None
    keep = lang.expr_vars(ret) if ret is not None else set().union(*map(lang.expr_vars, p.ret.args))

    def sources(st):
        if isinstance(st, lang.CtrlAssign):
            return {st.source}
        return lang.expr_vars(st.expr)

    def needed(st) -> bool:
        if isinstance(st, lang.Assume):
            return True
        if isinstance(st, BridgeAssign) and _may_fail(st.expr):
            return True
        return st.target in keep

    def scan(items, guard_vars) -> bool:
        grew = False
        for st in items:
            if isinstance(st, Loop):
                grew |= scan(st.body, guard_vars)
            elif isinstance(st, IfThenElse):
                g = guard_vars | {v for a in st.guard for v in (a.left, a.right)}
                grew |= scan(st.then, g)
                grew |= scan(st.orelse or (), g)
            elif isinstance(st, lang.Assume):
                new = {st.atom.left, st.atom.right} | guard_vars
                grew |= not new <= keep
                keep.update(new)
            elif isinstance(st, (DataAssign, DataAdd, CtrlAssign, BridgeAssign)) and needed(st):
                new = sources(st) | guard_vars | {st.target}
                grew |= not new <= keep
                keep.update(new)
        return grew

    while scan(p.body, set()):
        pass
    keep.discard(CUR)

    def rebuild(items):
        out = []
        for st in items:
            if isinstance(st, Loop):
                out.append(replace(st, body=tuple(rebuild(st.body))))
            elif isinstance(st, IfThenElse):
                then, orelse = rebuild(st.then), rebuild(st.orelse or ())
                if then or orelse:
                    out.append(replace(st, then=tuple(then), orelse=tuple(orelse) if st.orelse is not None else None))
            elif isinstance(st, (DataAssign, DataAdd, CtrlAssign, BridgeAssign)):
                if needed(st):
                    out.append(st)
            else:
                out.append(st)
        return out

    body = tuple(rebuild(p.body))
    if body == p.body and set(p.variables) <= keep:
        return p
    return replace(
        p,
        control_vars=tuple(v for v in p.control_vars if v in keep),
        data_vars=tuple(v for v in p.data_vars if v in keep),
        body=body,
    )
