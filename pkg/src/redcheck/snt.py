"""Streaming numerical transducers: model, runs, validation, classification, text format."""
from __future__ import annotations

import functools
import itertools
import re
from dataclasses import dataclass, replace
from graphlib import CycleError, TopologicalSorter
from typing import Hashable, Iterable, Mapping, Sequence

import networkx as nx
from networkx.utils import UnionFind

from .lang import CUR, Cmp
from .linear import Lin

END = "end"


# -- guards -------------------------------------------------------------------


def guard_sat(atoms: Iterable[Cmp]) -> bool:
    """Satisfiability of a conjunction of =,<,> atoms over the integers.

    Merge = atoms with union-find, then the strict atoms must form an acyclic
    graph over the merged classes (any finite DAG has an integer embedding).
    """
    return _sat(frozenset(atoms))


@functools.lru_cache(maxsize=1 << 16)
def _sat(atoms: frozenset) -> bool:
    uf = UnionFind()
    for a in atoms:
        uf[a.left], uf[a.right]
        if a.op == "=":
            uf.union(a.left, a.right)
    graph: dict[Hashable, set] = {}
    for a in atoms:
        if a.op == "=":
            continue
        lo, hi = (a.left, a.right) if a.op == "<" else (a.right, a.left)
        lo, hi = uf[lo], uf[hi]
        if lo == hi:
            return False
        graph.setdefault(hi, set()).add(lo)
    try:
        tuple(TopologicalSorter(graph).static_order())
    except CycleError:
        return False
    return True


def entails(premise: Sequence[Cmp], atom: Cmp) -> bool:
    """premise |= atom, by refuting the two other relations."""
    others = [r for r in ("<", "=", ">") if r != atom.op]
    return all(not guard_sat(list(premise) + [Cmp(r, atom.left, atom.right)]) for r in others)


def relation(premise: Sequence[Cmp], a, b) -> str | None:
    """The relation between a and b forced by premise, if any."""
    if a == b:
        return "="
    for r in ("<", "=", ">"):
        if entails(premise, Cmp(r, a, b)):
            return r
    return None


def eval_atom(a: Cmp, env: Mapping[str, int]) -> bool:
    lv, rv = env[a.left], env[a.right]
    return lv < rv if a.op == "<" else lv > rv if a.op == ">" else lv == rv


# -- total preorders ----------------------------------------------------------


@dataclass(frozen=True)
class TotalPreorder:
    """Ordered partition of a set of variables; blocks listed from smallest value up."""

    blocks: tuple[tuple[str, ...], ...]

    @staticmethod
    def from_ranks(ranks: Mapping[str, int], order: Sequence[str]) -> "TotalPreorder":
        levels = sorted(set(ranks.values()))
        return TotalPreorder(
            tuple(tuple(v for v in order if ranks[v] == lv) for lv in levels)
        )

    @staticmethod
    def all(order: Sequence[str]) -> list["TotalPreorder"]:
        """Every total preorder on order (Fubini many), in a fixed enumeration order."""
        n = len(order)
        if n == 0:
            return [TotalPreorder(())]
        out: list[TotalPreorder] = []
        for m in range(1, n + 1):
            for ranks in itertools.product(range(m), repeat=n):
                if len(set(ranks)) == m:
                    out.append(TotalPreorder.from_ranks(dict(zip(order, ranks)), order))
        return out

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(v for b in self.blocks for v in b)

    def rank(self, x: str) -> int:
        for i, b in enumerate(self.blocks):
            if x in b:
                return i
        raise KeyError(x)

    def rel(self, a: str, b: str) -> str:
        ra, rb = self.rank(a), self.rank(b)
        return "<" if ra < rb else ">" if ra > rb else "="

    def le(self, a: str, b: str) -> bool:
        return self.rank(a) <= self.rank(b)

    def rep(self, x: str) -> str:
        return self.blocks[self.rank(x)][0]

    @property
    def class_count(self) -> int:
        return len(self.blocks)

    def atoms(self, order: Sequence[str] | None = None) -> list[Cmp]:
        """The conjunction phi of pairwise relations, i < j in the given order."""
        order = list(order or self.variables)
        return [Cmp(self.rel(a, b), a, b) for a, b in itertools.combinations(order, 2)]

    def __str__(self) -> str:
        return " < ".join(" = ".join(b) for b in self.blocks) if self.blocks else "true"

    @staticmethod
    def parse(text: str, order: Sequence[str]) -> "TotalPreorder":
        text = text.strip()
        if text in ("", "true"):
            return TotalPreorder(())
        blocks = []
        for chunk in text.split("<"):
            names = {n.strip() for n in chunk.split("=")}
            blocks.append(tuple(v for v in order if v in names))
        return TotalPreorder(tuple(blocks))


# -- model ----------------------------------------------------------------------


@dataclass(frozen=True)
class Transition:
    src: str
    dst: str
    guard: tuple[Cmp, ...] = ()
    end: bool = False
    ctrl: tuple[tuple[str, str], ...] = ()  # x -> symbol of X plus cur
    data: tuple[tuple[str, Lin], ...] = ()  # y -> full right-hand side

    @property
    def ctrl_map(self) -> dict[str, str]:
        return dict(self.ctrl)

    @property
    def data_map(self) -> dict[str, Lin]:
        return dict(self.data)

    @property
    def is_loop(self) -> bool:
        return self.src == self.dst and not self.end

    def label(self) -> str:
        g = " & ".join(str(a) for a in self.guard)
        if self.end:
            g = "end" + (" & " + g if g else "")
        eff = "; ".join(
            [f"{x} := {v}" for x, v in self.ctrl]
            + [_format_update(y, e) for y, e in self.data]
        )
        return f"{self.src} -> {self.dst} [{g}] {{{eff}}}"


def make_transition(src, dst, guard=(), end=False, ctrl=None, data=None) -> Transition:
    ctrl = ctrl or {}
    data = data or {}
    return Transition(
        src,
        dst,
        tuple(guard),
        end,
        tuple(sorted(ctrl.items())),
        tuple(sorted(data.items())),
    )


def split_update(y: str, rhs: Lin) -> tuple[int, Lin]:
    """(lambda, e) with rhs = lambda*y + e."""
    lam = rhs.coef(y)
    return lam, rhs - Lin.var(y, lam)


def _format_update(y: str, rhs: Lin) -> str:
    lam, e = split_update(y, rhs)
    if lam == 1:
        return f"{y} += {e}"
    return f"{y} := {rhs}"


@dataclass(frozen=True)
class Snt:
    name: str
    states: tuple[str, ...]
    control: tuple[str, ...]
    data: tuple[str, ...]
    init: str
    transitions: tuple[Transition, ...]
    output: tuple[tuple[str, Lin], ...] = ()
    # groups of variables whose initial values coincide (set by product)
    links: tuple[tuple[str, ...], ...] = ()
    # optional per-state order annotation (set by normalize)
    orders: tuple[tuple[str, TotalPreorder], ...] = ()

    @property
    def output_map(self) -> dict[str, Lin]:
        return dict(self.output)

    @property
    def order_map(self) -> dict[str, TotalPreorder]:
        return dict(self.orders)

    @property
    def variables(self) -> tuple[str, ...]:
        return self.control + self.data

    def out_of(self, q: str) -> list[Transition]:
        return [t for t in self.transitions if t.src == q]

    def loops_at(self, q: str) -> list[Transition]:
        return [t for t in self.transitions if t.src == q and t.is_loop]

    def link_rep(self) -> dict[str, str]:
        rep = {v: v for v in self.variables}
        for group in self.links:
            head = min(group, key=self.variables.index)
            for v in group:
                rep[v] = head
        return rep

    def expand_valuation(self, base: Mapping[str, int]) -> dict[str, int]:
        """Valuation of all variables from values of the link representatives."""
        rep = self.link_rep()
        return {v: base.get(rep[v], base.get(v, 0)) for v in self.variables}


# -- runs -------------------------------------------------------------------------


def step(s: Snt, q: str, env: Mapping[str, int], d: int | None):
    """The enabled transition and successor valuation, or None when stuck."""
    for t in s.out_of(q):
        if t.end != (d is None):
            continue
        local = dict(env)
        if d is not None:
            local[CUR] = d
        if all(eval_atom(a, local) for a in t.guard):
            new = dict(env)
            for x, src in t.ctrl:
                new[x] = local[src]
            for y, rhs in t.data:
                new[y] = rhs.evaluate(local)
            return t, new
    return None


def trace(s: Snt, w: Sequence[int], rho0: Mapping[str, int] | None = None):
    """List of (transition, valuation after it), ending with the end-marker step; None if stuck."""
    env = {v: 0 for v in s.variables}
    if rho0:
        env.update({k: v for k, v in rho0.items() if k in env})
    q = s.init
    out = []
    for d in list(w) + [None]:
        nxt = step(s, q, env, d)
        if nxt is None:
            return None
        t, env = nxt
        q = t.dst
        out.append((t, env))
    return out


def run(s: Snt, w: Sequence[int], rho0: Mapping[str, int] | None = None):
    """Output of s on w followed by the end marker, or None for bottom."""
    steps = trace(s, w, rho0)
    if steps is None:
        return None
    t, env = steps[-1]
    out = s.output_map.get(t.dst)
    return None if out is None else out.evaluate(env)


# -- validation ---------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    constraint: str
    where: str
    message: str

    def __str__(self) -> str:
        return f"[{self.constraint}] {self.where}: {self.message}"


def transition_graph(s: Snt) -> nx.MultiDiGraph:
    g = nx.MultiDiGraph()
    g.add_nodes_from(s.states)
    for i, t in enumerate(s.transitions):
        if not t.end:
            g.add_edge(t.src, t.dst, key=i)
    return g


def _frozen_in(loops: Sequence[Transition], x: str) -> bool:
    return all(x not in t.ctrl_map for t in loops)


def validate(s: Snt) -> list[Violation]:
    """Structural checks: deterministic, generalized flat, copyless, monotone."""
    out: list[Violation] = []
    X, Y = set(s.control), set(s.data)
    sinks = {q for q in s.states if not s.out_of(q)}
    for t in s.transitions:
        syms = {a.left for a in t.guard} | {a.right for a in t.guard}
        if not syms <= X | {CUR}:
            out.append(Violation("syntax", t.label(), "guard mentions a non-control symbol"))
        for x, src in t.ctrl:
            if x not in X or src not in X | {CUR}:
                out.append(Violation("syntax", t.label(), f"bad control assignment {x} := {src}"))
        if t.end:
            if CUR in syms or any(src == CUR for _, src in t.ctrl) or any(
                CUR in e.variables() for _, e in t.data
            ):
                out.append(Violation("end-marker", t.label(), "cur used on an end transition"))
            if t.dst not in sinks:
                out.append(Violation("end-marker", t.label(), "end transition must enter a sink"))
        for y, rhs in t.data:
            if y not in Y:
                out.append(Violation("syntax", t.label(), f"{y} is not a data variable"))
                continue
            lam, e = split_update(y, rhs)
            stray = e.variables() - X - {CUR}
            if lam not in (0, 1) or stray:
                out.append(
                    Violation(
                        "copyless",
                        t.label(),
                        f"update of {y} must be e or {y} + e with e over control variables and cur",
                    )
                )

    for q in s.states:
        ts = s.out_of(q)
        for a, b in itertools.combinations(ts, 2):
            if a.end == b.end and guard_sat(a.guard + b.guard):
                out.append(
                    Violation("deterministic", q, f"overlapping guards: {a.label()} / {b.label()}")
                )

    g = transition_graph(s)
    for comp in nx.strongly_connected_components(g):
        if len(comp) > 1:
            out.append(
                Violation(
                    "generalized-flat",
                    ",".join(sorted(comp)),
                    "strongly connected component is not a single state",
                )
            )
    for q in s.states:
        loops = s.loops_at(q)
        if not loops:
            continue
        for t in loops:
            if any(CUR not in (a.left, a.right) for a in t.guard):
                out.append(
                    Violation("monotone", t.label(), "self-loop guard must compare cur with variables")
                )
            for x, src in t.ctrl:
                if src != CUR:
                    out.append(Violation("monotone", t.label(), f"self-loop copies {src} into {x}"))
        for x in s.control:
            # variables frozen throughout the bundle keep their value; nothing to check
            if _frozen_in(loops, x):
                continue
            rels = []
            for t in loops:
                r = {a.op if a.left == CUR else FLIP[a.op] for a in t.guard if {a.left, a.right} == {CUR, x}}
                if not r:
                    out.append(
                        Violation("monotone", t.label(), f"self-loop does not compare cur with {x}")
                    )
                rels.append((t, r))
            for op in (">", "<"):
                assigning = [x in t.ctrl_map for t, r in rels if op in r]
                if assigning and any(assigning) and not all(assigning):
                    out.append(
                        Violation(
                            "monotone",
                            q,
                            f"only some self-loops with cur {op} {x} assign {x}",
                        )
                    )
            up = any(">" in r and x in t.ctrl_map for t, r in rels)
            down = any("<" in r and x in t.ctrl_map for t, r in rels)
            if up and down:
                out.append(Violation("monotone", q, f"{x} tracks both the maximum and the minimum"))
    return out


FLIP = {"<": ">", ">": "<", "=": "="}


# -- multi-lassos ----------------------------------------------------------------------


@dataclass(frozen=True)
class MultiLasso:
    """H1 B1 H2 B2 ... Hr Br followed by an end transition out of the last junction.

    handles[i] leads into junctions[i]; bundles[i] are the self-loops there
    (possibly none, for the last junction or for loop-free machines).
    """

    handles: tuple[tuple[Transition, ...], ...]
    bundles: tuple[tuple[Transition, ...], ...]
    junctions: tuple[str, ...]
    end: Transition

    @property
    def r(self) -> int:
        return len(self.junctions)

    def describe(self) -> str:
        parts = []
        for i, (h, b) in enumerate(zip(self.handles, self.bundles)):
            hs = " ".join(f"{t.src}->{t.dst}" + (f"[{' & '.join(map(str, t.guard))}]" if t.guard else "") for t in h) or "()"
            parts.append(f"H{i + 1}[{hs}] B{i + 1}@{self.junctions[i]}({len(b)} loops)")
        parts.append(f"end {self.end.src}->{self.end.dst}")
        return " ".join(parts)


class StructureError(Exception):
    pass


def classify(s: Snt) -> list[MultiLasso]:
    """All multi-lassos of a generalized-flat SNT, one per loop-free path to an end transition."""
    g = transition_graph(s)
    for comp in nx.strongly_connected_components(g):
        if len(comp) > 1:
            raise StructureError(f"not generalized flat: {sorted(comp)}")
    forward: dict[str, list[Transition]] = {q: [] for q in s.states}
    for t in s.transitions:
        if not t.end and not t.is_loop:
            forward[t.src].append(t)
    out: list[MultiLasso] = []

    def build(path: list[Transition], last: str) -> None:
        for e in s.out_of(last):
            if not e.end:
                continue
            visited = [s.init] + [t.dst for t in path]
            handles, bundles, junctions = [], [], []
            cur: list[Transition] = []
            for i, q in enumerate(visited):
                if i > 0:
                    cur.append(path[i - 1])
                loops = s.loops_at(q)
                if loops or i == len(visited) - 1:
                    handles.append(tuple(cur))
                    bundles.append(tuple(loops))
                    junctions.append(q)
                    cur = []
            out.append(MultiLasso(tuple(handles), tuple(bundles), tuple(junctions), e))
        for t in forward[last]:
            path.append(t)
            build(path, t.dst)
            path.pop()

    build([], s.init)
    return out


# -- text format --------------------------------------------------------------------------

_SNT_TOKEN = re.compile(
    r"(?P<ws>[ \t\r\n]+|//[^\n]*)"
    r"|(?P<num>\d+)"
    r"|(?P<id>[A-Za-z_][A-Za-z0-9_@'.#]*)"
    r"|(?P<op>->|:=|\+=|==|&&|[{}\[\]();,:+\-*<>=&])"
)


class SntSyntaxError(Exception):
    pass


class _SntParser:
    def __init__(self, text: str):
        self.toks: list[tuple[str, str, int]] = []
        pos, line = 0, 1
        while pos < len(text):
            m = _SNT_TOKEN.match(text, pos)
            if not m:
                raise SntSyntaxError(f"line {line}: unexpected character {text[pos]!r}")
            if m.lastgroup != "ws":
                self.toks.append((m.lastgroup, m.group(), line))
            line += m.group().count("\n")
            pos = m.end()
        self.toks.append(("eof", "", line))
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def fail(self, expected: str):
        kind, text, line = self.tok
        return SntSyntaxError(f"line {line}: expected {expected}, found {text or 'end of input'!r}")

    def accept(self, text: str) -> bool:
        if self.tok[1] == text and self.tok[0] != "eof":
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> None:
        if not self.accept(text):
            raise self.fail(repr(text))

    def ident(self) -> str:
        kind, text, _ = self.tok
        if kind != "id":
            raise self.fail("identifier")
        self.i += 1
        return text

    def names(self) -> list[str]:
        out: list[str] = []
        if self.tok[0] == "id":
            out.append(self.ident())
            while self.accept(","):
                out.append(self.ident())
        self.expect(";")
        return out

    def lin(self) -> Lin:
        total = self.term()
        while self.tok[1] in ("+", "-"):
            sign = 1 if self.tok[1] == "+" else -1
            self.i += 1
            total = total + self.term().scale(sign)
        return total

    def term(self) -> Lin:
        value = self.factor()
        while self.accept("*"):
            other = self.factor()
            if not value.terms:
                value = other.scale(value.const)
            elif not other.terms:
                value = value.scale(other.const)
            else:
                raise self.fail("a constant factor")
        return value

    def factor(self) -> Lin:
        if self.accept("-"):
            return -self.factor()
        if self.accept("("):
            v = self.lin()
            self.expect(")")
            return v
        kind, text, _ = self.tok
        if kind == "num":
            self.i += 1
            return Lin.constant(int(text))
        return Lin.var(self.ident())

    def atom(self) -> Cmp:
        left = self.ident()
        if self.accept("<"):
            op = "<"
        elif self.accept(">"):
            op = ">"
        elif self.accept("=") or self.accept("=="):
            op = "="
        else:
            raise self.fail("'<', '>' or '='")
        return Cmp(op, left, self.ident())

    def parse(self) -> Snt:
        self.expect("snt")
        name = self.ident()
        self.expect("{")
        control: list[str] = []
        data: list[str] = []
        states: list[str] = []
        init = None
        transitions: list[Transition] = []
        output: dict[str, Lin] = {}
        links: list[tuple[str, ...]] = []
        orders: list[tuple[str, str]] = []
        while not self.accept("}"):
            kind, text, line = self.tok
            if self.accept("control"):
                control = self.names()
            elif self.accept("data"):
                data = self.names()
            elif self.accept("states"):
                states = self.names()
            elif self.accept("init"):
                init = self.ident()
                self.expect(";")
            elif self.accept("link"):
                group = [self.ident()]
                while self.accept("="):
                    group.append(self.ident())
                self.expect(";")
                links.append(tuple(group))
            elif self.accept("order"):
                q = self.ident()
                self.expect(":")
                parts = []
                while not self.accept(";"):
                    parts.append(self.tok[1])
                    self.i += 1
                orders.append((q, " ".join(parts)))
            elif self.accept("output"):
                q = self.ident()
                self.expect("=")
                output[q] = self.lin()
                self.expect(";")
            elif kind == "id":
                src = self.ident()
                self.expect("->")
                dst = self.ident()
                self.expect("[")
                guard: list[Cmp] = []
                end = False
                if not self.accept("]"):
                    while True:
                        if self.accept("end"):
                            end = True
                        elif self.accept("true"):
                            pass
                        else:
                            guard.append(self.atom())
                        if self.accept("]"):
                            break
                        if not (self.accept("&") or self.accept("&&")):
                            raise self.fail("'&' or ']'")
                self.expect("{")
                ctrl: dict[str, str] = {}
                upd: dict[str, Lin] = {}
                while not self.accept("}"):
                    target = self.ident()
                    if self.accept("+="):
                        upd[target] = Lin.var(target) + self.lin()
                    else:
                        self.expect(":=")
                        rhs = self.lin()
                        if target in control:
                            if len(rhs.terms) != 1 or rhs.const or rhs.terms[0][1] != 1:
                                raise SntSyntaxError(
                                    f"line {line}: control variable {target} must be assigned a variable"
                                )
                            ctrl[target] = rhs.terms[0][0]
                        else:
                            upd[target] = rhs
                    self.expect(";")
                self.accept(";")
                transitions.append(make_transition(src, dst, guard, end, ctrl, upd))
            else:
                raise self.fail("a declaration or transition")
        if self.tok[0] != "eof":
            raise self.fail("end of input")
        if init is None:
            raise SntSyntaxError("missing 'init' declaration")
        seen = list(states)
        for q in [init] + [q for t in transitions for q in (t.src, t.dst)] + list(output):
            if q not in seen:
                seen.append(q)
        return Snt(
            name,
            tuple(seen),
            tuple(control),
            tuple(data),
            init,
            tuple(transitions),
            tuple(output.items()),
            tuple(links),
            tuple((q, TotalPreorder.parse(o, control)) for q, o in orders),
        )


def parse_snt(text: str) -> Snt:
    return _SntParser(text).parse()


def format_snt(s: Snt) -> str:
    lines = [f"snt {s.name} {{"]
    lines.append(f"  control {', '.join(s.control)};" if s.control else "  control;")
    lines.append(f"  data {', '.join(s.data)};" if s.data else "  data;")
    lines.append(f"  states {', '.join(s.states)};")
    lines.append(f"  init {s.init};")
    for group in s.links:
        lines.append(f"  link {' = '.join(group)};")
    for q, o in s.orders:
        lines.append(f"  order {q} : {o};")
    for t in s.transitions:
        g = [str(a) for a in t.guard]
        if t.end:
            g.insert(0, "end")
        eff = " ".join(
            [f"{x} := {v};" for x, v in t.ctrl] + [_format_update(y, e) + ";" for y, e in t.data]
        )
        lines.append(f"  {t.src} -> {t.dst} [{' & '.join(g)}] {{ {eff} }};".replace("{  }", "{ }"))
    for q, e in s.output:
        lines.append(f"  output {q} = {e};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def renumber(s: Snt, prefix: str = "q") -> Snt:
    """Rename states q0, q1, ... in breadth-first order from init, dropping unreachable ones."""
    order = [s.init]
    seen = {s.init}
    i = 0
    while i < len(order):
        for t in s.out_of(order[i]):
            if t.dst not in seen:
                seen.add(t.dst)
                order.append(t.dst)
        i += 1
    names = {q: f"{prefix}{n}" for n, q in enumerate(order)}
    trans = tuple(
        replace(t, src=names[t.src], dst=names[t.dst]) for t in s.transitions if t.src in seen
    )
    return replace(
        s,
        states=tuple(names[q] for q in order),
        init=names[s.init],
        transitions=trans,
        output=tuple((names[q], e) for q, e in s.output if q in seen),
        orders=tuple((names[q], o) for q, o in s.orders if q in seen),
    )


def rename_vars(s: Snt, mapping: Mapping[str, str]) -> Snt:
    def sym(v: str) -> str:
        return mapping.get(v, v)

    trans = tuple(
        replace(
            t,
            guard=tuple(Cmp(a.op, sym(a.left), sym(a.right)) for a in t.guard),
            ctrl=tuple(sorted((sym(x), sym(v)) for x, v in t.ctrl)),
            data=tuple(sorted((sym(y), e.rename(mapping)) for y, e in t.data)),
        )
        for t in s.transitions
    )
    return replace(
        s,
        control=tuple(sym(x) for x in s.control),
        data=tuple(sym(y) for y in s.data),
        transitions=trans,
        output=tuple((q, e.rename(mapping)) for q, e in s.output),
        links=tuple(tuple(sym(v) for v in g) for g in s.links),
        orders=tuple(
            (q, TotalPreorder(tuple(tuple(sym(v) for v in b) for b in o.blocks)))
            for q, o in s.orders
        ),
    )


def post_order(order: TotalPreorder, t: Transition, control: Sequence[str]) -> TotalPreorder | None:
    """Order between control variables after t, when the guard pins it down."""
    premise = order.atoms(control) + list(t.guard)
    if not guard_sat(premise):
        return None
    cmap = t.ctrl_map
    post = {x: cmap.get(x, x) for x in control}
    ranks: dict[str, int] = {}
    # rank by counting strictly smaller post-values
    rel: dict[tuple[str, str], str] = {}
    for a, b in itertools.combinations(control, 2):
        r = relation(premise, post[a], post[b])
        if r is None:
            return None
        rel[(a, b)] = r
        rel[(b, a)] = FLIP[r]
    for a in control:
        below = {min((c for c in control if c == b or rel[(c, b)] == "="), key=control.index)
                 for b in control if b != a and rel[(b, a)] == "<"}
        ranks[a] = len(below)
    distinct = sorted(set(ranks.values()))
    return TotalPreorder.from_ranks({a: distinct.index(ranks[a]) for a in control}, control)


def state_orders(s: Snt, init_order: TotalPreorder | None = None) -> dict[str, TotalPreorder] | None:
    """Per-state control-variable order if every path agrees (state domination); else None."""
    if s.orders:
        return s.order_map
    if init_order is None:
        if len(s.control) > 1:
            return None
        init_order = TotalPreorder((tuple(s.control),) if s.control else ())
    seen = {s.init: init_order}
    work = [s.init]
    while work:
        q = work.pop()
        for t in s.out_of(q):
            nxt = post_order(seen[q], t, s.control)
            if nxt is None:
                return None
            if t.dst in seen:
                if seen[t.dst] != nxt:
                    return None
            else:
                seen[t.dst] = nxt
                work.append(t.dst)
    return seen
