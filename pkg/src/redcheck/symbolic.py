"""Symbolic path summaries over atoms, with coefficients affine in one cycle counter l.

Atoms are the initial value of a control-variable class, the initial value of a
data variable, or a fresh input value. Fresh atoms carry a time key (a tuple of
ints, lexicographic order = time order). Composition prefixes keys with 0/1 so
that keys stay ordered; ``canonical`` renumbers them for comparisons.

Cycle powers keep unboundedly many fresh atoms as three bands per fresh class:
iterations 1..l-2 (EARLY), iteration l-1 (PENULT) and iteration l (LAST).
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .lang import CUR, Cmp
from .linear import Lin
from .snt import Snt, TotalPreorder, Transition, guard_sat, post_order

CTRL, DATA, FRESH = 0, 1, 2
EARLY, PENULT, LAST = 1, 2, 3
BAND_NAMES = {EARLY: "<l-1", PENULT: "l-1", LAST: "l"}


class CounterError(ArithmeticError):
    """Product of two counter-bearing coefficients (needs a second counter)."""


class InfeasiblePath(ValueError):
    pass


class CompositionError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Atom:
    kind: int
    key: tuple
    band: int = 0

    def __str__(self) -> str:
        if self.kind == CTRL:
            return f"X{self.key[0] + 1}"
        if self.kind == DATA:
            return f"Y{self.key[0] + 1}"
        if self.band:
            pre = ".".join(map(str, self.key[:-2]))
            return f"d[{pre + ':' if pre else ''}{BAND_NAMES[self.band]},{self.key[-1]}]"
        return "d[" + ".".join(map(str, self.key)) + "]"


def InitCtrl(j: int) -> Atom:
    return Atom(CTRL, (j,))


def InitData(j: int) -> Atom:
    return Atom(DATA, (j,))


def Fresh(*key: int, band: int = 0) -> Atom:
    return Atom(FRESH, tuple(key), band)


@dataclass(frozen=True)
class CC:
    """c0 + c1*l."""

    c0: int = 0
    c1: int = 0

    def __add__(self, other: "CC") -> "CC":
        return CC(self.c0 + other.c0, self.c1 + other.c1)

    def __neg__(self) -> "CC":
        return CC(-self.c0, -self.c1)

    def __mul__(self, other) -> "CC":
        if isinstance(other, int):
            return CC(self.c0 * other, self.c1 * other)
        if self.c1 and other.c1:
            raise CounterError("two counter-bearing factors")
        return CC(self.c0 * other.c0, self.c0 * other.c1 + self.c1 * other.c0)

    __rmul__ = __mul__

    def __bool__(self) -> bool:
        return bool(self.c0 or self.c1)

    def at(self, ell: int) -> int:
        return self.c0 + self.c1 * ell

    def __str__(self) -> str:
        if not self.c1:
            return str(self.c0)
        lpart = "l" if self.c1 == 1 else f"{self.c1}l"
        return lpart if not self.c0 else f"({self.c0}+{lpart})"


ZERO = CC()
ONE = CC(1)


@dataclass(frozen=True)
class LinExpr:
    terms: tuple[tuple[Atom, CC], ...] = ()
    const: CC = ZERO

    @staticmethod
    def of(mapping: Mapping[Atom, CC], const: CC = ZERO) -> "LinExpr":
        return LinExpr(tuple(sorted((a, c) for a, c in mapping.items() if c)), const)

    @staticmethod
    def atom(a: Atom, coef: CC = ONE) -> "LinExpr":
        return LinExpr.of({a: coef})

    @staticmethod
    def constant(c: int | CC) -> "LinExpr":
        return LinExpr((), c if isinstance(c, CC) else CC(c))

    def as_dict(self) -> dict[Atom, CC]:
        return dict(self.terms)

    def coef(self, a: Atom) -> CC:
        for b, c in self.terms:
            if b == a:
                return c
        return ZERO

    def atoms(self) -> list[Atom]:
        return [a for a, _ in self.terms]

    def __add__(self, other: "LinExpr") -> "LinExpr":
        d = self.as_dict()
        for a, c in other.terms:
            d[a] = d.get(a, ZERO) + c
        return LinExpr.of(d, self.const + other.const)

    def scale(self, k) -> "LinExpr":
        return LinExpr.of({a: c * k for a, c in self.terms}, self.const * k)

    def subst(self, mapping: Mapping[Atom, "LinExpr"]) -> "LinExpr":
        out = LinExpr.constant(self.const)
        for a, c in self.terms:
            out = out + (mapping[a].scale(c) if a in mapping else LinExpr.atom(a, c))
        return out

    def drop_counter(self) -> "LinExpr":
        return LinExpr.of({a: CC(c.c0) for a, c in self.terms}, CC(self.const.c0))

    @property
    def has_counter(self) -> bool:
        return bool(self.const.c1) or any(c.c1 for _, c in self.terms)

    def is_zero(self) -> bool:
        return not self.terms and not self.const

    def evaluate(self, env: Mapping[Atom, int], ell: int = 0) -> int:
        return self.const.at(ell) + sum(c.at(ell) * env[a] for a, c in self.terms)

    def __str__(self) -> str:
        parts = [f"{c}*{a}" for a, c in self.terms]
        if self.const or not parts:
            parts.append(str(self.const))
        return " + ".join(parts)


# -- summaries --------------------------------------------------------------------


@dataclass(frozen=True)
class PathSummary:
    """Symbolic valuation after a path, from a start state with a fixed control order.

    ctrl[j] is the atom held by control variable j; vals[j] the value of data
    variable j. The persistent/transient record view is derived from these.
    """

    control: tuple[str, ...]
    data: tuple[str, ...]
    start: TotalPreorder
    end: TotalPreorder | None
    ctrl: tuple[Atom, ...]
    vals: tuple[LinExpr, ...]
    fresh: tuple[Atom, ...]
    reads: tuple[Atom, ...] | None = None
    data_atom: tuple[int, ...] | None = None  # index used for the initial value of y_j
    counter: bool = False
    length: int = 0

    # record view

    @cached_property
    def k(self) -> int:
        return len(self.control)

    @cached_property
    def l(self) -> int:
        return len(self.data)

    @cached_property
    def class_reps(self) -> list[int]:
        """Representative index of each start class, classes numbered by representative."""
        return sorted(self.control.index(b[0]) for b in self.start.blocks)

    def class_of(self, j: int) -> int:
        rep = self.control.index(self.start.rep(self.control[j]))
        return self.class_reps.index(rep)

    @cached_property
    def I_pe(self) -> list[int]:
        return [j for j, a in enumerate(self.ctrl) if a.kind == CTRL]

    @cached_property
    def I_tr(self) -> list[int]:
        return [j for j, a in enumerate(self.ctrl) if a.kind == FRESH]

    @cached_property
    def pi_pe(self) -> dict[int, int]:
        reps = self.class_reps
        return {j: reps.index(self.ctrl[j].key[0]) for j in self.I_pe}

    @cached_property
    def pi_tr(self) -> dict[int, int]:
        return {j: self.fresh.index(self.ctrl[j]) for j in self.I_tr}

    @cached_property
    def r(self) -> int:
        return len(self.fresh)

    def _ydata(self, j: int) -> int:
        return self.data_atom[j] if self.data_atom else j

    @cached_property
    def eps(self) -> list[CC]:
        return [v.const for v in self.vals]

    @cached_property
    def lam(self) -> list[int]:
        out = []
        for j, v in enumerate(self.vals):
            c = v.coef(InitData(self._ydata(j)))
            assert not c.c1 and c.c0 in (0, 1), "lambda must be 0 or 1"
            out.append(c.c0)
        return out

    @cached_property
    def alpha(self) -> list[list[CC]]:
        reps = self.class_reps
        return [[v.coef(InitCtrl(r)) for r in reps] for v in self.vals]

    @cached_property
    def beta(self) -> list[list[CC]]:
        return [[v.coef(f) for f in self.fresh] for v in self.vals]

    def eval_env(self, rho0: Mapping[str, int], w: Sequence[int]) -> dict[Atom, int]:
        env: dict[Atom, int] = {}
        for j, x in enumerate(self.control):
            env[InitCtrl(j)] = rho0.get(x, 0)
        for j, y in enumerate(self.data):
            env[InitData(j)] = rho0.get(y, 0)
        for f in self.fresh:
            env[f] = w[f.key[0] - 1]
        return env

    def value(self, name: str) -> LinExpr:
        if name in self.control:
            return LinExpr.atom(self.ctrl[self.control.index(name)])
        return self.vals[self.data.index(name)]

    def dump(self) -> str:
        lines = [f"start: {self.start}"]
        for x, a in zip(self.control, self.ctrl):
            lines.append(f"{x} <- {a}")
        for y, v in zip(self.data, self.vals):
            lines.append(f"{y} = {v}")
        return "\n".join(lines)


def _start_for(s: Snt, q: str, start: TotalPreorder | None) -> TotalPreorder:
    if start is not None:
        return start
    om = s.order_map
    if q in om:
        return om[q]
    if len(s.control) <= 1:
        return TotalPreorder((tuple(s.control),) if s.control else ())
    raise ValueError(f"no control order known at {q}")


def _order_atoms(order: TotalPreorder, sym) -> list[Cmp]:
    out = []
    for lo, hi in zip(order.blocks, order.blocks[1:]):
        out.append(Cmp("<", sym(lo[0]), sym(hi[0])))
    return out


def path_equiv_relation(
    s: Snt, path: Sequence[Transition], start: TotalPreorder | None = None
) -> list[tuple[int, ...]]:
    """Classes of positions (k+i) and control indices (1..k) that must hold equal values."""
    classes, _ = _equalities(s, path, _start_for(s, path[0].src if path else s.init, start))
    k = len(s.control)
    out = []
    for members in classes.values():
        idx = sorted(
            (m[1] + 1 if m[0] == "x" else k + m[1]) for m in members
        )
        out.append(tuple(idx))
    return sorted(out)


def _equalities(s: Snt, path: Sequence[Transition], start: TotalPreorder):
    """Union-find over value sources ('x', j) and ('p', i); raises InfeasiblePath."""
    control = s.control
    src = {x: ("x", control.index(start.rep(x))) for x in control}
    atoms: list[Cmp] = _order_atoms(start, lambda v: ("x", control.index(v)))
    parent: dict = {}

    def find(a):
        parent.setdefault(a, a)
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for j in {src[x] for x in control}:
        find(j)
    pos = 0
    for i, t in enumerate(path):
        local = dict(src)
        if not t.end:
            pos += 1
            local[CUR] = ("p", pos)
            find(local[CUR])
        for a in t.guard:
            la, ra = local[a.left], local[a.right]
            atoms.append(Cmp(a.op, la, ra))
            if a.op == "=":
                parent[find(la)] = find(ra)
        if not guard_sat(atoms):
            raise InfeasiblePath(f"step {i + 1} ({t.label()}) contradicts the path so far")
        for x, v in t.ctrl:
            src[x] = local[v]
    groups: dict = {}
    for a in list(parent):
        groups.setdefault(find(a), set()).add(a)
    return groups, find


def summarize_path(
    s: Snt,
    path: Sequence[Transition],
    start: TotalPreorder | None = None,
    data_atom: Sequence[int] | None = None,
) -> PathSummary:
    """Summary of a feasible path from a state whose control order is start."""
    q = path[0].src if path else s.init
    start = _start_for(s, q, start)
    control, data = s.control, s.data
    groups, find = _equalities(s, path, start)
    atom_of: dict = {}
    for root, members in groups.items():
        inits = sorted(m[1] for m in members if m[0] == "x")
        if inits:
            atom_of[root] = InitCtrl(inits[0])
        else:
            atom_of[root] = Fresh(min(m[1] for m in members))
    fresh = tuple(sorted({a for a in atom_of.values() if a.kind == FRESH}))

    ctrl = {x: atom_of[find(("x", control.index(start.rep(x))))] for x in control}
    ydata = list(data_atom) if data_atom is not None else list(range(len(data)))
    vals = {y: LinExpr.atom(InitData(ydata[j])) for j, y in enumerate(data)}
    reads: list[Atom] = []
    pos = 0
    for t in path:
        env = {x: LinExpr.atom(a) for x, a in ctrl.items()}
        env.update(vals)
        if not t.end:
            pos += 1
            cur = atom_of[find(("p", pos))]
            reads.append(cur)
            env[CUR] = LinExpr.atom(cur)
        new_vals = dict(vals)
        for y, rhs in t.data:
            new_vals[y] = _lin_to_expr(rhs, env)
        for x, v in t.ctrl:
            ctrl[x] = env[v].terms[0][0]
        vals = new_vals
    end = start
    om = s.order_map
    for t in path:
        end = om[t.dst] if t.dst in om else post_order(end, t, control) if end else None
    return PathSummary(
        control,
        data,
        start,
        end,
        tuple(ctrl[x] for x in control),
        tuple(vals[y] for y in data),
        fresh,
        tuple(reads),
        tuple(ydata) if data_atom is not None else None,
        False,
        pos,
    )


def _lin_to_expr(rhs: Lin, env: Mapping[str, LinExpr]) -> LinExpr:
    out = LinExpr.constant(rhs.const)
    for v, c in rhs.terms:
        out = out + env[v].scale(c)
    return out


def identity(s: Snt, start: TotalPreorder | None = None) -> PathSummary:
    return summarize_path(s, [], start)


def _prefix(a: Atom, p: int) -> Atom:
    return Atom(FRESH, (p,) + a.key, a.band) if a.kind == FRESH else a


def _check_junction(s1: PathSummary, s2: PathSummary) -> None:
    if s1.control != s2.control or s1.data != s2.data:
        raise CompositionError("summaries over different variables")
    if s1.end is not None and s1.end != s2.start:
        raise CompositionError(f"junction order mismatch: {s1.end} vs {s2.start}")


def compose(s1: PathSummary, s2: PathSummary) -> PathSummary:
    """Summary of P1 P2 by substituting P1's images into P2's summary."""
    _check_junction(s1, s2)
    k = s1.k
    ctrl1 = [_prefix(a, 0) for a in s1.ctrl]
    vals1 = [LinExpr.of({_prefix(a, 0): c for a, c in v.terms}, v.const) for v in s1.vals]
    mapping: dict[Atom, LinExpr] = {}
    for j in range(k):
        mapping[InitCtrl(j)] = LinExpr.atom(ctrl1[j])
    for j in range(s1.l):
        mapping[InitData(j)] = vals1[j]
    for f in s2.fresh:
        mapping[f] = LinExpr.atom(_prefix(f, 1))
    ctrl = tuple(mapping[a].terms[0][0] for a in s2.ctrl)
    vals = tuple(v.subst(mapping) for v in s2.vals)
    reads = None
    if s1.reads is not None and s2.reads is not None:
        reads = tuple(_prefix(a, 0) for a in s1.reads) + tuple(
            mapping[a].terms[0][0] for a in s2.reads
        )
    return PathSummary(
        s1.control,
        s1.data,
        s1.start,
        s2.end,
        ctrl,
        vals,
        tuple(_prefix(f, 0) for f in s1.fresh) + tuple(_prefix(f, 1) for f in s2.fresh),
        reads,
        s1.data_atom,
        s1.counter or s2.counter,
        s1.length + s2.length,
    )


def compose_record(s1: PathSummary, s2: PathSummary) -> PathSummary:
    """The same composition, assembled group by group from the record fields."""
    _check_junction(s1, s2)
    k, l = s1.k, s1.l
    reps1, reps2 = s1.class_reps, s2.class_reps
    pe1, tr1 = s1.pi_pe, s1.pi_tr
    lam1, lam2 = s1.lam, s2.lam
    a1, a2, b1, b2 = s1.alpha, s2.alpha, s1.beta, s2.beta
    f1 = [_prefix(f, 0) for f in s1.fresh]
    f2 = [_prefix(f, 1) for f in s2.fresh]
    # which start-2 classes are represented by variables persistent (resp. transient) after P1
    vals = []
    for j in range(l):
        d: dict[Atom, CC] = {}

        def add(atom: Atom, c: CC) -> None:
            d[atom] = d.get(atom, ZERO) + c

        const = s2.eps[j] + s1.eps[j] * lam2[j]
        if lam2[j] and lam1[j]:
            add(InitData(s1._ydata(j)), ONE)
        for c, rep in enumerate(reps1):
            add(InitCtrl(rep), a1[j][c] * lam2[j])
        for f, atom in enumerate(f1):
            add(atom, b1[j][f] * lam2[j])
        for c2, rep2 in enumerate(reps2):
            coef = a2[j][c2]
            if rep2 in pe1:
                add(InitCtrl(reps1[pe1[rep2]]), coef)
            else:
                add(f1[tr1[rep2]], coef)
        for f, atom in enumerate(f2):
            add(atom, b2[j][f])
        vals.append(LinExpr.of(d, const))
    ctrl = []
    pe2, tr2 = s2.pi_pe, s2.pi_tr
    for j in range(k):
        if j in pe2:
            rep2 = reps2[pe2[j]]
            ctrl.append(InitCtrl(reps1[pe1[rep2]]) if rep2 in pe1 else f1[tr1[rep2]])
        else:
            ctrl.append(f2[tr2[j]])
    return PathSummary(
        s1.control,
        s1.data,
        s1.start,
        s2.end,
        tuple(ctrl),
        tuple(vals),
        tuple(f1 + f2),
        None,
        s1.data_atom,
        s1.counter or s2.counter,
        s1.length + s2.length,
    )


def compose_all(items: Iterable[PathSummary]) -> PathSummary:
    items = list(items)
    out = items[0]
    for s in items[1:]:
        out = compose(out, s)
    return out


def canonical(s: PathSummary) -> PathSummary:
    """Renumber fresh atoms 1, 2, ... in time order; drop bookkeeping fields."""
    ren = {f: Atom(FRESH, (i + 1,), f.band) for i, f in enumerate(sorted(s.fresh))}
    vals = tuple(LinExpr.of({ren.get(a, a): c for a, c in v.terms}, v.const) for v in s.vals)
    return PathSummary(
        s.control,
        s.data,
        s.start,
        None,
        tuple(ren.get(a, a) for a in s.ctrl),
        vals,
        tuple(ren[f] for f in sorted(s.fresh)),
        None,
        s.data_atom,
        s.counter,
        0,
    )


def same(s1: PathSummary, s2: PathSummary) -> bool:
    a, b = canonical(s1), canonical(s2)
    return (a.ctrl, a.vals, a.fresh, a.start) == (b.ctrl, b.vals, b.fresh, b.start)


# -- cycles -------------------------------------------------------------------------


def _check_cycle(c: PathSummary) -> None:
    if c.counter or c.length != 1 or (c.end is not None and c.end != c.start):
        raise ValueError("expected the summary of one traversal of a self-loop")
    for j, cls in c.pi_pe.items():
        if cls != c.class_of(j):
            raise ValueError("persistent control variable changes class inside a self-loop")


def _geom(lam: int) -> CC:
    """1 + lam + ... + lam^(l-1) for l >= 2."""
    return CC(0, 1) if lam == 1 else ONE


def _band(f: Atom, b: int) -> Atom:
    return Atom(FRESH, (b,) + f.key, b)


def cycle_power(c: PathSummary) -> PathSummary:
    """Summary of C^l for symbolic l >= 2, fresh atoms folded into bands."""
    _check_cycle(c)
    k, l = c.k, c.l
    reps = c.class_reps
    pe, tr = c.pi_pe, c.pi_tr
    pe_classes = set(pe.values())
    lam, a, b = c.lam, c.alpha, c.beta
    vals = []
    for j in range(l):
        d: dict[Atom, CC] = {}

        def add(atom: Atom, v: CC) -> None:
            d[atom] = d.get(atom, ZERO) + v

        const = _geom(lam[j]) * c.eps[j]
        if lam[j]:
            add(InitData(c._ydata(j)), ONE)
        for cls, rep in enumerate(reps):
            if cls in pe_classes:
                add(InitCtrl(rep), _geom(lam[j]) * a[j][cls])
            elif lam[j]:
                add(InitCtrl(rep), a[j][cls])
        for fi, f in enumerate(c.fresh):
            held = [cls for cls, rep in enumerate(reps) if tr.get(rep) == fi]
            carry = sum((a[j][cls] for cls in held), ZERO)
            inner = b[j][fi] * lam[j] + carry
            if lam[j]:
                add(_band(f, EARLY), inner)
            add(_band(f, PENULT), inner)
            add(_band(f, LAST), b[j][fi])
        vals.append(LinExpr.of(d, const))
    ctrl = tuple(
        InitCtrl(reps[pe[j]]) if j in pe else _band(c.fresh[tr[j]], LAST) for j in range(k)
    )
    fresh = tuple(_band(f, bb) for bb in (EARLY, PENULT, LAST) for f in c.fresh)
    return PathSummary(
        c.control, c.data, c.start, c.start, ctrl, tuple(vals), tuple(sorted(fresh)),
        None, c.data_atom, True, 0,
    )


def instantiate(s: PathSummary, ell: int) -> PathSummary:
    """Evaluate the counter at ell and expand bands into concrete iterations."""
    assert ell >= 2

    def expand(a: Atom) -> list[Atom]:
        if a.kind != FRESH or not a.band:
            return [a]
        pre, j = a.key[:-2], a.key[-1]
        iters = {EARLY: range(1, ell - 1), PENULT: [ell - 1], LAST: [ell]}[a.band]
        return [Atom(FRESH, pre + (it, j)) for it in iters]

    vals = []
    for v in s.vals:
        d: dict[Atom, CC] = {}
        for a, c in v.terms:
            for e in expand(a):
                d[e] = d.get(e, ZERO) + CC(c.at(ell))
        vals.append(LinExpr.of(d, CC(v.const.at(ell))))
    ctrl = tuple(expand(a)[0] for a in s.ctrl)
    fresh = tuple(sorted(e for f in s.fresh for e in expand(f)))
    return replace(s, ctrl=ctrl, vals=tuple(vals), fresh=fresh, counter=False, reads=None)


def mark(c: PathSummary) -> PathSummary:
    """One traversal with the terms that scale with the iteration count tagged by l.

    For lambda = 1 these are the constant and the coefficients of classes that stay
    persistent; dropping them afterwards gives the counter-free part.
    """
    _check_cycle(c)
    pe_classes = set(c.pi_pe.values())
    reps = c.class_reps
    vals = []
    for j, v in enumerate(c.vals):
        if not c.lam[j]:
            vals.append(v)
            continue
        d = v.as_dict()
        for cls in pe_classes:
            atom = InitCtrl(reps[cls])
            if atom in d:
                d[atom] = CC(0, d[atom].c0)
        vals.append(LinExpr.of(d, CC(0, v.const.c0)))
    return replace(c, vals=tuple(vals), counter=True)


def drop_counter_terms(s: PathSummary) -> PathSummary:
    return replace(s, vals=tuple(v.drop_counter() for v in s.vals), counter=False)


def output_expr(s: PathSummary, out: Lin) -> LinExpr:
    """An output expression over the variables, evaluated at the summary."""
    return _lin_to_expr(out, {v: s.value(v) for v in s.control + s.data})


# -- cycle schemes -------------------------------------------------------------------


def scheme_counter_coeffs(
    cycles: Sequence[PathSummary], scheme: Sequence[int], ell: int | None = None
) -> tuple[dict[tuple[int, int], CC], dict[int, CC]]:
    """Closed-form coefficients for C_{i1}^l C_{i2} ... C_{it}.

    Returns ({(j, class): coef of the class's initial value in y_j}, {j: constant}),
    coefficients as c0 + c1*l (symbolic l >= 2), or plain ints when ell is given.
    """
    cs = [cycles[i] for i in scheme]
    first = cs[0]
    reps = first.class_reps
    t = len(cs)
    lam = [c.lam for c in cs]

    def geom(s: int, j: int):
        if s > 0:
            return ONE
        if ell is None:
            return _geom(lam[0][j])
        return CC(sum(lam[0][j] ** p for p in range(ell)))

    def power(s: int, j: int, extra: int = 0):
        # lam_s ^ (l_s - extra) with l_1 = l
        if s > 0:
            return ONE if (1 - extra == 0 or lam[s][j]) else ZERO
        if ell is None:
            return ONE if lam[0][j] else ZERO
        return CC(lam[0][j] ** (ell - extra))

    def tail(s: int, j: int) -> CC:
        out = ONE
        for s2 in range(s + 1, t):
            out = out * power(s2, j)
        return out

    coeffs: dict[tuple[int, int], CC] = {}
    consts: dict[int, CC] = {}
    for j in range(first.l):
        consts[j] = sum((geom(s, j) * cs[s].eps[j] * tail(s, j) for s in range(t)), ZERO)
        for cls in range(len(reps)):
            rj = 0
            while rj < t and cls in set(cs[rj].pi_pe.values()):
                rj += 1
            total = ZERO
            for s in range(rj):
                total = total + geom(s, j) * cs[s].alpha[j][cls] * tail(s, j)
            if rj < t:
                total = total + power(rj, j, 1) * cs[rj].alpha[j][cls] * tail(rj, j)
            coeffs[(j, cls)] = total
    if ell is not None:
        return ({key: CC(v.at(ell)) for key, v in coeffs.items()}, {j: CC(v.at(ell)) for j, v in consts.items()})
    return coeffs, consts
