"""Reducer DSL: lexer, parser, AST and reference interpreter.

Concrete syntax::

    reducer max {
      max := cur; next;
      loop { if (cur > max) { max := cur; } next; }
      ret max;
    }

Control variables are the ones that appear in guards (or are declared with
``control``); every other variable is a data variable. ``init;`` resets the
iterator to the head of the word for a second pass.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from .linear import Lin

CUR = "cur"
RELATIONS = ("<", "=", ">")
FLIP = {"<": ">", ">": "<", "=": "="}


class LangError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line, self.col = line, col
        where = f"{line}:{col}: " if line else ""
        super().__init__(where + message)


class ParseError(LangError):
    pass


class SortError(LangError):
    pass


class NestedLoopError(LangError):
    pass


class InitError(LangError):
    pass


# -- expressions ------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Bin:
    op: str  # one of + - * /
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Call:
    fn: str
    args: tuple["Expr", ...]


Expr = Union[Num, Var, Bin, Neg, Call]


def expr_vars(e: Expr) -> set[str]:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Bin):
        return expr_vars(e.left) | expr_vars(e.right)
    if isinstance(e, Neg):
        return expr_vars(e.arg)
    if isinstance(e, Call):
        return set().union(*(expr_vars(a) for a in e.args)) if e.args else set()
    return set()


def to_lin(e: Expr) -> Lin | None:
    """Linear form of e, or None when e multiplies two non-constants or divides."""
    if isinstance(e, Num):
        return Lin.constant(e.value)
    if isinstance(e, Var):
        return Lin.var(e.name)
    if isinstance(e, Neg):
        inner = to_lin(e.arg)
        return None if inner is None else -inner
    if isinstance(e, Bin):
        a, b = to_lin(e.left), to_lin(e.right)
        if a is None or b is None:
            return None
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            if not a.terms:
                return b.scale(a.const)
            if not b.terms:
                return a.scale(b.const)
        return None
    return None


def format_expr(e: Expr, prec: int = 0) -> str:
    if isinstance(e, Num):
        return str(e.value) if e.value >= 0 else f"({e.value})"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        return "-" + format_expr(e.arg, 3)
    if isinstance(e, Call):
        return f"{e.fn}({', '.join(format_expr(a) for a in e.args)})"
    p = 1 if e.op in "+-" else 2
    text = f"{format_expr(e.left, p)} {e.op} {format_expr(e.right, p + 1)}"
    return f"({text})" if p < prec else text


# -- guards and statements --------------------------------------------------


@dataclass(frozen=True)
class Cmp:
    """Order atom between two symbols of X plus cur."""

    op: str
    left: str
    right: str

    def __str__(self) -> str:
        return f"{self.left} {self.op} {self.right}"


def negate_atom(a: Cmp) -> tuple[Cmp, Cmp]:
    """The two positive atoms covering not(a), equality first."""
    if a.op == "<":
        return Cmp("=", a.left, a.right), Cmp(">", a.left, a.right)
    if a.op == ">":
        return Cmp("=", a.left, a.right), Cmp("<", a.left, a.right)
    return Cmp("<", a.left, a.right), Cmp(">", a.left, a.right)


@dataclass(frozen=True)
class DataAssign:
    target: str
    expr: Expr
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class DataAdd:
    target: str
    expr: Expr
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class CtrlAssign:
    target: str
    source: str  # a control variable or cur
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class IfThenElse:
    guard: tuple[Cmp, ...]
    then: tuple["Stmt", ...]
    orelse: tuple["Stmt", ...] | None = None
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Assume:
    atom: Cmp


@dataclass(frozen=True)
class BridgeAssign:
    """Assignment between the first loop and ``init``; any arithmetic allowed."""

    target: str
    expr: Expr
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Next:
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Loop:
    body: tuple["Stmt", ...]
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Init:
    line: int = field(default=0, compare=False)


Stmt = Union[DataAssign, DataAdd, CtrlAssign, IfThenElse, Assume, BridgeAssign]
Item = Union[DataAssign, DataAdd, CtrlAssign, IfThenElse, BridgeAssign, Next, Loop, Init]


@dataclass(frozen=True)
class Linear:
    expr: Expr


@dataclass(frozen=True)
class Uninterpreted:
    fn: str
    args: tuple[Expr, ...]


ReturnExpr = Union[Linear, Uninterpreted]


@dataclass(frozen=True)
class ReducerProgram:
    name: str
    control_vars: tuple[str, ...]
    data_vars: tuple[str, ...]
    body: tuple[Item, ...]
    ret: ReturnExpr

    @property
    def has_init(self) -> bool:
        return any(isinstance(i, Init) for i in self.body)

    @property
    def variables(self) -> tuple[str, ...]:
        return self.control_vars + self.data_vars


# -- lexer ------------------------------------------------------------------

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r\n]+|//[^\n]*)"
    r"|(?P<num>\d+)"
    r"|(?P<id>[A-Za-z_][A-Za-z0-9_']*)"
    r"|(?P<op>:=|\+=|==|&&|[{}();,+\-*/<>=&])"
)
KEYWORDS = {"reducer", "control", "data", "next", "loop", "init", "ret", "if", "else", "true"}


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _lex(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        chunk = m.group()
        if kind != "ws":
            if kind == "id" and chunk in KEYWORDS:
                kind = "kw"
            toks.append(_Tok(kind, chunk, line, pos - line_start + 1))
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


# -- parser -----------------------------------------------------------------


@dataclass
class _RawAssign:
    target: str
    op: str  # ':=' or '+='
    expr: Expr
    line: int
    col: int


class _Parser:
    def __init__(self, text: str):
        self.toks = _lex(text)
        self.i = 0
        self.guard_vars: set[str] = set()
        self.loop_depth = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, expected: str) -> ParseError:
        t = self.tok
        found = t.text or "end of input"
        return ParseError(f"expected {expected}, found {found!r}", t.line, t.col)

    def accept(self, text: str) -> bool:
        if self.tok.text == text and self.tok.kind in ("op", "kw"):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> _Tok:
        t = self.tok
        if not self.accept(text):
            raise self.error(repr(text))
        return t

    def ident(self) -> str:
        t = self.tok
        if t.kind != "id":
            raise self.error("identifier")
        self.i += 1
        return t.text

    # program level

    def program(self):
        name = "main"
        wrapped = False
        if self.accept("reducer"):
            name = self.ident()
            self.expect("{")
            wrapped = True
        decl_ctrl: list[str] = []
        decl_data: list[str] = []
        while self.tok.text in ("control", "data") and self.tok.kind == "kw":
            bucket = decl_ctrl if self.tok.text == "control" else decl_data
            self.i += 1
            bucket.append(self.ident())
            while self.accept(","):
                bucket.append(self.ident())
            self.expect(";")
        items: list = []
        ret = None
        while True:
            t = self.tok
            if t.kind == "eof" or (wrapped and t.text == "}"):
                break
            if self.accept("ret"):
                ret = (self.expr(), t.line, t.col)
                self.expect(";")
                break
            items.append(self.item())
        if wrapped:
            self.expect("}")
        if self.tok.kind != "eof":
            raise self.error("end of input")
        if ret is None:
            raise ParseError("program has no 'ret' statement", self.tok.line, self.tok.col)
        return name, decl_ctrl, decl_data, items, ret

    def item(self):
        t = self.tok
        if self.accept("next"):
            self.expect(";")
            return Next(t.line)
        if self.accept("init"):
            self.expect(";")
            return ("init", t.line, t.col)
        if self.accept("loop"):
            if self.loop_depth:
                raise NestedLoopError("loop nested inside a loop body", t.line, t.col)
            self.loop_depth += 1
            self.expect("{")
            body: list = []
            while True:
                u = self.tok
                if u.text == "loop" and u.kind == "kw":
                    raise NestedLoopError("loop nested inside a loop body", u.line, u.col)
                if self.accept("next"):
                    self.expect(";")
                    break
                if u.text == "}" or u.kind == "eof":
                    raise self.error("'next;' at the end of the loop body")
                body.append(self.stmt())
            self.expect("}")
            self.loop_depth -= 1
            return ("loop", body, t.line)
        return self.stmt()

    def stmt(self):
        t = self.tok
        if self.accept("if"):
            self.expect("(")
            guard = self.guard()
            self.expect(")")
            then = self.block()
            orelse = None
            if self.accept("else"):
                orelse = self.block()
            return ("if", guard, then, orelse, t.line)
        if t.kind == "kw" and t.text in ("next", "loop", "init", "ret"):
            raise ParseError(f"'{t.text}' is not allowed here", t.line, t.col)
        target = self.ident()
        op_tok = self.tok
        if not (self.accept(":=") or self.accept("+=")):
            raise self.error("':=' or '+='")
        e = self.expr()
        self.expect(";")
        return _RawAssign(target, op_tok.text, e, t.line, t.col)

    def block(self) -> list:
        self.expect("{")
        out = []
        while not self.accept("}"):
            if self.tok.kind == "eof":
                raise self.error("'}'")
            out.append(self.stmt())
        return out

    def guard(self) -> tuple[Cmp, ...]:
        atoms: list[Cmp] = []
        if self.accept("true"):
            return ()
        while True:
            left = self.operand()
            if self.accept("<"):
                op = "<"
            elif self.accept(">"):
                op = ">"
            elif self.accept("==") or self.accept("="):
                op = "="
            else:
                raise self.error("comparison '<', '>' or '=='")
            right = self.operand()
            atoms.append(Cmp(op, left, right))
            if not (self.accept("&&") or self.accept("&")):
                return tuple(atoms)

    def operand(self) -> str:
        name = self.ident()
        if name != CUR:
            self.guard_vars.add(name)
        return name

    # expressions: sum of products with unary minus

    def expr(self) -> Expr:
        left = self.term()
        while self.tok.text in ("+", "-") and self.tok.kind == "op":
            op = self.tok.text
            self.i += 1
            left = Bin(op, left, self.term())
        return left

    def term(self) -> Expr:
        left = self.unary()
        while self.tok.text in ("*", "/") and self.tok.kind == "op":
            op = self.tok.text
            self.i += 1
            left = Bin(op, left, self.unary())
        return left

    def unary(self) -> Expr:
        if self.accept("-"):
            inner = self.unary()
            if isinstance(inner, Num):
                return Num(-inner.value)
            return Neg(inner)
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return Num(int(t.text))
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == "id":
            self.i += 1
            if self.accept("("):
                args: list[Expr] = []
                if not self.accept(")"):
                    args.append(self.expr())
                    while self.accept(","):
                        args.append(self.expr())
                    self.expect(")")
                return Call(t.text, tuple(args))
            return Var(t.text)
        raise self.error("expression")


def parse_program(text: str) -> ReducerProgram:
    """Parse .red source into a sort-resolved ReducerProgram."""
    ps = _Parser(text)
    name, decl_ctrl, decl_data, raw_items, (ret_expr, rline, rcol) = ps.program()

    both = set(decl_ctrl) & set(decl_data)
    if both:
        raise SortError(f"variable declared both control and data: {sorted(both)[0]}")

    inits = [it for it in raw_items if isinstance(it, tuple) and it[0] == "init"]
    if len(inits) > 1:
        raise InitError("at most one 'init' is allowed", inits[1][1], inits[1][2])

    # statements sitting between the first loop and init may use any arithmetic
    bridge_ids: set[int] = set()
    if inits:
        seen_loop = False
        for it in raw_items:
            if isinstance(it, tuple) and it[0] == "loop":
                seen_loop = True
            elif isinstance(it, tuple) and it[0] == "init":
                break
            elif seen_loop:
                bridge_ids.add(id(it))

    def walk(stmts: Iterable) -> Iterable[_RawAssign]:
        for s in stmts:
            if isinstance(s, _RawAssign):
                yield s
            elif isinstance(s, tuple) and s[0] == "if":
                yield from walk(s[2])
                yield from walk(s[3] or [])
            elif isinstance(s, tuple) and s[0] == "loop":
                yield from walk(s[1])

    assigns = list(walk(raw_items))
    control = set(decl_ctrl) | (ps.guard_vars - set(decl_data))
    for v in ps.guard_vars & set(decl_data):
        raise SortError(f"data variable {v!r} used in a guard")
    # values computed between passes are read-only afterwards: treat them as control
    after_init: list = []
    if inits:
        idx = next(i for i, it in enumerate(raw_items) if isinstance(it, tuple) and it[0] == "init")
        after_init = list(walk(raw_items[idx + 1 :]))
    later_targets = {a.target for a in after_init}
    for a in assigns:
        if id(a) in bridge_ids and a.target not in decl_data and a.target not in later_targets:
            control.add(a.target)
    changed = True
    while changed:
        changed = False
        for a in assigns:
            if (
                a.op == ":="
                and isinstance(a.expr, Var)
                and a.expr.name in control
                and a.target not in control
                and a.target not in decl_data
                and id(a) not in bridge_ids
            ):
                control.add(a.target)
                changed = True

    order: list[str] = []

    def note(v: str) -> None:
        if v != CUR and v not in order:
            order.append(v)

    for v in decl_ctrl + decl_data:
        note(v)
    for a in assigns:
        note(a.target)
        for v in sorted(expr_vars(a.expr)):
            note(v)
    for v in sorted(ps.guard_vars):
        note(v)
    for v in sorted(expr_vars(ret_expr)):
        note(v)

    def convert_assign(a: _RawAssign, bridge: bool):
        if a.target == CUR:
            raise SortError("cannot assign to cur", a.line, a.col)
        if bridge:
            if a.op != ":=":
                raise SortError("only ':=' is allowed before init", a.line, a.col)
            return BridgeAssign(a.target, a.expr, a.line)
        if a.target in control:
            if a.op != ":=" or not isinstance(a.expr, Var) or (
                a.expr.name != CUR and a.expr.name not in control
            ):
                raise SortError(
                    f"control variable {a.target!r} assigned an arithmetic expression",
                    a.line,
                    a.col,
                )
            return CtrlAssign(a.target, a.expr.name, a.line)
        bad = [v for v in expr_vars(a.expr) if v not in (CUR, a.target) and v not in control]
        if bad:
            raise SortError(
                f"data variable {sorted(bad)[0]!r} read in an update of {a.target!r}",
                a.line,
                a.col,
            )
        cls = DataAssign if a.op == ":=" else DataAdd
        return cls(a.target, a.expr, a.line)

    def convert(s, bridge: bool = False):
        if isinstance(s, _RawAssign):
            return convert_assign(s, bridge)
        kind = s[0]
        if kind == "if":
            _, guard, then, orelse, line = s
            if bridge:
                raise ParseError("conditionals are not allowed before init", line)
            return IfThenElse(
                guard,
                tuple(convert(x) for x in then),
                None if orelse is None else tuple(convert(x) for x in orelse),
                line,
            )
        if kind == "loop":
            return Loop(tuple(convert(x) for x in s[1]), s[2])
        if kind == "init":
            return Init(s[1])
        raise AssertionError(kind)

    body = tuple(
        s if isinstance(s, Next) else convert(s, id(s) in bridge_ids) for s in raw_items
    )

    if isinstance(ret_expr, Call):
        ret: ReturnExpr = Uninterpreted(ret_expr.fn, ret_expr.args)
    elif isinstance(ret_expr, Bin) and ret_expr.op == "/":
        ret = Uninterpreted("div", (ret_expr.left, ret_expr.right))
    else:
        ret = Linear(ret_expr)
    if isinstance(ret, Uninterpreted) and not ret.args:
        raise ParseError("uninterpreted return needs at least one argument", rline, rcol)
    if CUR in expr_vars(ret_expr):
        raise SortError("cur may not appear in the return expression", rline, rcol)

    _check_shape(body, rline)
    ctrl = tuple(v for v in order if v in control)
    data = tuple(v for v in order if v not in control)
    return ReducerProgram(name, ctrl, data, body, ret)


def _check_shape(body: Sequence[Item], line: int) -> None:
    segments: list[list[Item]] = [[]]
    for it in body:
        if isinstance(it, Init):
            segments.append([])
        else:
            segments[-1].append(it)
    for idx, seg in enumerate(segments):
        loops = [i for i, it in enumerate(seg) if isinstance(it, Loop)]
        if len(loops) != 1:
            what = "no loop" if not loops else "more than one loop"
            raise ParseError(f"pass {idx + 1} has {what}; exactly one is required", line)
        tail = seg[loops[0] + 1 :]
        last = idx == len(segments) - 1
        if last and tail:
            raise ParseError("only 'ret' may follow the final loop", line)
        if not last and any(not isinstance(t, BridgeAssign) for t in tail):
            raise ParseError("only assignments may appear between a loop and init", line)


# -- pretty printer ---------------------------------------------------------


def format_program(p: ReducerProgram) -> str:
    lines = [f"reducer {p.name} {{"]
    if p.control_vars:
        lines.append(f"  control {', '.join(p.control_vars)};")
    if p.data_vars:
        lines.append(f"  data {', '.join(p.data_vars)};")

    def stmt(s, ind: str) -> None:
        if isinstance(s, (DataAssign, BridgeAssign)):
            lines.append(f"{ind}{s.target} := {format_expr(s.expr)};")
        elif isinstance(s, DataAdd):
            lines.append(f"{ind}{s.target} += {format_expr(s.expr)};")
        elif isinstance(s, CtrlAssign):
            lines.append(f"{ind}{s.target} := {s.source};")
        elif isinstance(s, IfThenElse):
            g = " && ".join(str(a).replace(" = ", " == ") for a in s.guard) or "true"
            lines.append(f"{ind}if ({g}) {{")
            for x in s.then:
                stmt(x, ind + "  ")
            if s.orelse is not None:
                lines.append(f"{ind}}} else {{")
                for x in s.orelse:
                    stmt(x, ind + "  ")
            lines.append(f"{ind}}}")
        elif isinstance(s, Next):
            lines.append(f"{ind}next;")
        elif isinstance(s, Init):
            lines.append(f"{ind}init;")
        elif isinstance(s, Loop):
            lines.append(f"{ind}loop {{")
            for x in s.body:
                stmt(x, ind + "  ")
            lines.append(f"{ind}  next;")
            lines.append(f"{ind}}}")
        else:
            raise TypeError(s)

    for it in p.body:
        stmt(it, "  ")
    if isinstance(p.ret, Linear):
        lines.append(f"  ret {format_expr(p.ret.expr)};")
    else:
        lines.append(f"  ret {format_expr(Call(p.ret.fn, p.ret.args))};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- interpreter ------------------------------------------------------------


class _Stuck(Exception):
    pass


def _value(v):
    if isinstance(v, Fraction) and v.denominator == 1:
        return int(v)
    return v


def eval_expr(e: Expr, env: Mapping[str, object], cur):
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        if e.name == CUR:
            if cur is None:
                raise _Stuck()
            return cur
        return env[e.name]
    if isinstance(e, Neg):
        return -eval_expr(e.arg, env, cur)
    if isinstance(e, Bin):
        a = eval_expr(e.left, env, cur)
        b = eval_expr(e.right, env, cur)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if b == 0:
            raise _Stuck()
        return _value(Fraction(a) / Fraction(b))
    raise _Stuck()


def _holds(a: Cmp, env, cur) -> bool:
    lv = eval_expr(Var(a.left), env, cur)
    rv = eval_expr(Var(a.right), env, cur)
    return lv < rv if a.op == "<" else lv > rv if a.op == ">" else lv == rv


def _exec(stmts: Iterable[Stmt], env: dict, cur) -> None:
    for s in stmts:
        if isinstance(s, (DataAssign, BridgeAssign)):
            env[s.target] = _value(eval_expr(s.expr, env, cur))
        elif isinstance(s, DataAdd):
            env[s.target] = _value(env[s.target] + eval_expr(s.expr, env, cur))
        elif isinstance(s, CtrlAssign):
            env[s.target] = eval_expr(Var(s.source), env, cur)
        elif isinstance(s, IfThenElse):
            if all(_holds(a, env, cur) for a in s.guard):
                _exec(s.then, env, cur)
            elif s.orelse is not None:
                _exec(s.orelse, env, cur)
        elif isinstance(s, Assume):
            if not _holds(s.atom, env, cur):
                raise _Stuck()
        else:
            raise TypeError(s)


def interpret(p: ReducerProgram, w: Sequence[int], rho0: Mapping[str, int] | None = None):
    """Run p on w. Returns an integer, a tuple for uninterpreted returns, or None for bottom."""
    env: dict = {v: 0 for v in p.variables}
    if rho0:
        env.update(rho0)
    word = list(w)
    state = {"idx": 0}

    def head():
        return word[state["idx"]] if state["idx"] < len(word) else None

    cur = head()
    try:
        for it in p.body:
            if isinstance(it, Next):
                # past the end cur stays bottom; only reading it aborts
                state["idx"] = min(state["idx"] + 1, len(word))
                cur = head()
            elif isinstance(it, Loop):
                while cur is not None:
                    _exec(it.body, env, cur)
                    state["idx"] += 1
                    cur = head()
            elif isinstance(it, Init):
                state["idx"] = 0
                cur = head()
            else:
                _exec([it], env, cur)
        if isinstance(p.ret, Linear):
            return eval_expr(p.ret.expr, env, None)
        return tuple(eval_expr(a, env, None) for a in p.ret.args)
    except _Stuck:
        return None


def run_straight_line(stmts: Sequence[Stmt], env: Mapping[str, int], cur):
    """Execute a straight-line path (Assume atoms act as guards). None if an assume fails."""
    local = dict(env)
    try:
        _exec(stmts, local, cur)
    except _Stuck:
        return None
    return local


# -- execution paths ---------------------------------------------------------


def enumerate_exec_paths(stmts: Sequence[Stmt]) -> list[tuple[Stmt, ...]]:
    """Straight-line programs, one per maximal control-flow path of a loop-free block."""
    paths: list[tuple[Stmt, ...]] = [()]
    for s in stmts:
        if isinstance(s, IfThenElse):
            branches: list[tuple[Stmt, ...]] = []
            for tail in enumerate_exec_paths(s.then):
                branches.append(tuple(Assume(a) for a in s.guard) + tail)
            rest = tuple(s.orelse or ())
            else_tails = enumerate_exec_paths(rest)
            for i, atom in enumerate(s.guard):
                prefix = tuple(Assume(a) for a in s.guard[:i])
                for alt in negate_atom(atom):
                    for tail in else_tails:
                        branches.append(prefix + (Assume(alt),) + tail)
            paths = [p + b for p in paths for b in branches]
        elif isinstance(s, (Loop, Next, Init)):
            raise ValueError("execution paths are defined for loop-free blocks only")
        else:
            paths = [p + (s,) for p in paths]
    return paths
