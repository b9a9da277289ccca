"""Non-zero output decision on normalized SNTs, and the equivalence/commutativity pipeline."""
from __future__ import annotations

import itertools
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from .lang import Linear, ReducerProgram
from .linear import Lin
from .snt import MultiLasso, Snt, classify, state_orders, validate
from .symbolic import (
    InitData,
    PathSummary,
    canonical,
    compose_all,
    drop_counter_terms,
    identity,
    mark,
    output_expr,
    summarize_path,
)
from .transforms import (
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

HOLDS, FAILS, UNSUPPORTED = "HOLDS", "FAILS", "UNSUPPORTED"


class UBoundViolation(AssertionError):
    pass


EXPLAIN_SETS = 40  # abstraction sets listed per lasso in explain output

# every violation ever raised in this process, so test harnesses can audit a whole session
U_VIOLATIONS: list[str] = []


@dataclass
class Verdict:
    property: str
    answer: str
    evidence: dict = field(default_factory=dict)
    parts: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        out = {"property": self.property, "answer": self.answer, "evidence": self.evidence}
        if self.parts:
            out["parts"] = [p.to_json() for p in self.parts]
        if self.notes:
            out["notes"] = list(self.notes)
        return out

    @staticmethod
    def from_json(d: dict) -> "Verdict":
        return Verdict(
            d["property"],
            d["answer"],
            d.get("evidence", {}),
            [Verdict.from_json(p) for p in d.get("parts", [])],
            list(d.get("notes", [])),
        )


# -- abstraction sets ---------------------------------------------------------------------


def _vec(expr_list, atom) -> tuple[int, ...]:
    return tuple(v.coef(atom).c0 for v in expr_list)


def abs_of(theta: PathSummary) -> frozenset:
    """Coefficient tuples of a counter-free summary: constant, per control variable, others."""
    k = theta.k
    out = {(0, tuple(v.const.c0 for v in theta.vals))}
    held = set()
    for j, a in enumerate(theta.ctrl):
        held.add(a)
        out.add((j + 1, _vec(theta.vals, a)))
    atoms = {a for v in theta.vals for a in v.atoms()} - held
    for a in atoms:
        vec = _vec(theta.vals, a)
        if any(vec):
            out.add((k + 1, vec))
    return frozenset(out)


def abs_apply(lam: frozenset, t: PathSummary) -> frozenset:
    """Abstraction after extending the path by a counter-free step summary t."""
    k, l = t.k, t.l
    byctrl = {tag: vec for tag, vec in lam if 1 <= tag <= k}
    const = next(vec for tag, vec in lam if tag == 0)
    lm, eps, alpha, beta = t.lam, t.eps, t.alpha, t.beta
    reps = t.class_reps
    pe, tr = t.pi_pe, t.pi_tr
    out = {(0, tuple(eps[j].c0 + lm[j] * const[j] for j in range(l)))}
    for c, rep in enumerate(reps):
        old = byctrl[rep + 1]
        new = tuple(lm[j] * old[j] + alpha[j][c].c0 for j in range(l))
        holders = [j for j, cc in pe.items() if cc == c]
        if holders:
            out.update((j + 1, new) for j in holders)
        elif any(new):
            out.add((k + 1, new))
    for tag, vec in lam:
        if tag == k + 1:
            new = tuple(lm[j] * vec[j] for j in range(l))
            if any(new):
                out.add((k + 1, new))
    for f in range(t.r):
        vec = tuple(beta[j][f].c0 for j in range(l))
        holders = [j for j, ff in tr.items() if ff == f]
        if holders:
            out.update((j + 1, vec) for j in holders)
        elif any(vec):
            out.add((k + 1, vec))
    return frozenset(out)


def _abs_step(cache: dict | None, lam: frozenset, t: PathSummary) -> frozenset:
    if cache is None:
        return abs_apply(lam, t)
    key = ("abs", lam, id(t))
    hit = cache.get(key)
    if hit is None:
        hit = cache[key] = abs_apply(lam, t)
    return hit


def _counter_free(cache: dict | None, c: PathSummary) -> PathSummary:
    if cache is None:
        return drop_counter_terms(mark(c))
    key = ("free", id(c))
    if key not in cache:
        cache[key] = (c, drop_counter_terms(mark(c)))
    return cache[key][1]


def abs_cycle_rules(lam: frozenset, c: PathSummary) -> frozenset:
    """The cycle update written case by case on lambda (persistent / transient / fresh)."""
    k, l = c.k, c.l
    lm, eps, alpha, beta = c.lam, c.eps, c.alpha, c.beta
    pe, tr = c.pi_pe, c.pi_tr
    out = set()
    for tag, vec in lam:
        if tag == 0:
            out.add((0, tuple(vec[j] if lm[j] else eps[j].c0 for j in range(l))))
        elif tag <= k:
            j1 = tag - 1
            cls = c.class_of(j1)
            if j1 in pe:
                out.add((tag, tuple(vec[j] if lm[j] else alpha[j][cls].c0 for j in range(l))))
            elif cls in pe.values():
                # an equal variable keeps the value
                out.add((tag, tuple(beta[j][tr[j1]].c0 for j in range(l))))
            else:
                # the old value leaves the control variables; its class representative's alpha
                new = tuple(vec[j] + alpha[j][cls].c0 if lm[j] else alpha[j][cls].c0 for j in range(l))
                if any(new):
                    out.add((k + 1, new))
                out.add((tag, tuple(beta[j][tr[j1]].c0 for j in range(l))))
        else:
            new = tuple(vec[j] if lm[j] else 0 for j in range(l))
            if any(new):
                out.add((k + 1, new))
    held = set(tr.values())
    for f in range(c.r):
        if f not in held:
            vec = tuple(beta[j][f].c0 for j in range(l))
            if any(vec):
                out.add((k + 1, vec))
    return frozenset(out)


def format_abs(lam: frozenset) -> str:
    return "{" + ", ".join(f"({t}, ({', '.join(map(str, v))}))" for t, v in sorted(lam)) + "}"


# -- lasso analysis ------------------------------------------------------------------------


def end_output(s: Snt, ml: MultiLasso) -> Lin | None:
    """Output at the last junction: the sink output with the end assignment substituted."""
    out = s.output_map.get(ml.end.dst)
    if out is None:
        return None
    env = {x: Lin.var(v) for x, v in ml.end.ctrl}
    env.update(dict(ml.end.data))
    return out.subst(env)


@dataclass
class LassoData:
    snt: Snt
    ml: MultiLasso
    handles: list[PathSummary]
    bundles: list[list[PathSummary]]
    out: Lin
    orders: dict


def _data_links(s: Snt) -> tuple[int, ...] | None:
    if not s.links:
        return None
    rep = s.link_rep()
    return tuple(s.data.index(rep[y]) if rep[y] in s.data else j for j, y in enumerate(s.data))


def prepare(s: Snt, ml: MultiLasso, orders: dict, cache: dict | None = None) -> LassoData | None:
    out = end_output(s, ml)
    if out is None:
        return None
    cache = {} if cache is None else cache

    def summ(path, start, links=None):
        key = ("summary", tuple(path), start, links)
        if key not in cache:
            cache[key] = summarize_path(s, path, start, links)
        return cache[key]

    links = _data_links(s)
    handles = []
    for i, h in enumerate(ml.handles):
        start = orders[h[0].src] if h else orders[ml.junctions[i]]
        handles.append(summ(h, start, links if i == 0 else None))
    bundles = [[summ([c], orders[q]) for c in b] for q, b in zip(ml.junctions, ml.bundles)]
    return LassoData(s, ml, handles, bundles, out, orders)


def pullback_b(ld: LassoData, stage: int) -> list[int]:
    """Data-variable coefficients of the output seen from junction `stage` (0-based)."""
    later = ld.handles[stage + 1 :]
    theta = compose_all(later) if later else identity(ld.snt, ld.orders[ld.ml.junctions[stage]])
    expr = output_expr(theta, ld.out)
    return [expr.coef(InitData(j)).c0 for j in range(theta.l)]


def step1(ld: LassoData):
    theta = compose_all(ld.handles)
    expr = output_expr(theta, ld.out)
    return (not expr.is_zero()), theta, expr


def _tail_lams(cycles: Sequence[PathSummary], l: int):
    """Achievable products of lambda vectors over sets of distinct tail cycles, with one witness each."""
    seen = {(tuple([1] * l)): ()}
    for i, c in enumerate(cycles):
        for vec, idx in list(seen.items()):
            new = tuple(a * b for a, b in zip(vec, c.lam))
            if new not in seen:
                seen[new] = idx + (i,)
    return seen


def step2_terms(b: Sequence[int], c1: PathSummary, tail: Sequence[int]):
    """Counter coefficient (mu) of the output for C^l C_tail..., per persistent class and for the constant."""
    l = c1.l
    pe_classes = sorted(set(c1.pi_pe.values()))
    mus = {}
    for cls in pe_classes:
        mus[cls] = sum(b[j] * tail[j] * c1.alpha[j][cls].c0 for j in range(l) if c1.lam[j])
    mu0 = sum(b[j] * tail[j] * c1.eps[j].c0 for j in range(l) if c1.lam[j])
    return mus, mu0


def ordered_schemes(n: int, first: int) -> list[tuple[int, ...]]:
    """first followed by mutually distinct tails whose head differs from first."""
    out = []
    others = list(range(n))
    for t in range(0, n + 1):
        for tail in itertools.permutations(others, t):
            if tail and tail[0] == first:
                continue
            out.append((first,) + tail)
    return out


def step2(ld: LassoData, explain: list | None = None):
    r = ld.ml.r
    for stage in range(r):
        b = pullback_b(ld, stage)
        own = ld.bundles[stage]
        pool = [c for bb in ld.bundles[stage:] for c in bb]
        names = [f"C{st + 1}.{i + 1}" for st in range(stage, r) for i in range(len(ld.bundles[st]))]
        for i1, c1 in enumerate(own):
            others = [c for j, c in enumerate(pool) if j != i1]
            other_names = [n for j, n in enumerate(names) if j != i1]
            for vec, idx in _tail_lams(others, c1.l).items():
                mus, mu0 = step2_terms(b, c1, vec)
                scheme = f"{names[i1]}^l1" + "".join(" " + other_names[i] for i in idx)
                if explain is not None:
                    explain.append(f"step2 {scheme}: mu0={mu0} " + " ".join(f"mu[class {c + 1}]={m}" for c, m in mus.items()))
                if mu0:
                    return {"stage": stage + 1, "scheme": scheme, "condition": "constant", "mu": mu0}
                for cls, m in mus.items():
                    if m:
                        return {"stage": stage + 1, "scheme": scheme, "condition": f"class {cls + 1}", "mu": m}
    return None


def explain_step2_single(ld: LassoData) -> list[str]:
    """Term-by-term Step II sums over every ordered scheme of a single lasso."""
    lines = []
    b = pullback_b(ld, 0)
    cyc = ld.bundles[0]
    for i1 in range(len(cyc)):
        for sch in ordered_schemes(len(cyc), i1):
            c1 = cyc[sch[0]]
            tail = [1] * c1.l
            for i in sch[1:]:
                tail = [a * bb for a, bb in zip(tail, cyc[i].lam)]
            name = f"C{sch[0] + 1}^l1" + "".join(f" C{i + 1}" for i in sch[1:])
            for cls in sorted(set(c1.pi_pe.values())):
                terms = []
                for j in range(c1.l):
                    factors = [f"({b[j]})" if b[j] < 0 else str(b[j])]
                    if len(sch) > 1:
                        factors.append(str(tail[j]))
                    factors.append("l1" if c1.lam[j] else "1")
                    factors.append(str(c1.alpha[j][cls].c0))
                    terms.append("*".join(factors))
                mus, _ = step2_terms(b, c1, tail)
                lines.append(f"{name}: X{c1.class_reps[cls] + 1}: " + (" + ".join(terms) or "0") + f" => mu = {mus[cls]}")
            _, mu0 = step2_terms(b, c1, tail)
            lines.append(f"{name}: const => mu = {mu0}")
    return lines


def _short_options(bundle):
    opts: list[list[PathSummary]] = [[]]
    for c in bundle:
        opts.append([c])
        opts.append([c, c])
    for a, b2 in itertools.permutations(bundle, 2):
        opts.append([a, b2])
    return opts


def u_domains(ld: LassoData, cache: dict | None = None) -> list[set[int]]:
    """Per junction, the integers that may occur in counter-free coefficients.

    Taken from the handles with at most two cycle traversals per junction, plus 0.
    """
    cache = {} if cache is None else cache
    out = []
    level: set = set()
    values = {0}
    for s in range(ld.ml.r):
        key = (tuple(tuple(h) for h in ld.ml.handles[: s + 1]), tuple(tuple(b) for b in ld.ml.bundles[: s + 1]))
        if key not in cache:
            opts = _short_options([_counter_free(cache, c) for c in ld.bundles[s]])
            bases = {abs_of(ld.handles[0])} if s == 0 else {_abs_step(cache, lam, ld.handles[s]) for lam in level}
            nxt = set()
            for base in bases:
                for o in opts:
                    lam = base
                    for st in o:
                        lam = _abs_step(cache, lam, st)
                    nxt.add(lam)
            vals = set(values)
            for lam in nxt:
                for _, vec in lam:
                    vals.update(vec)
            cache[key] = (nxt, vals)
        level, values = cache[key]
        out.append(values)
    return out


def check_tuple(ld: LassoData, lam: frozenset, k: int, control_order) -> dict | None:
    out = ld.out
    l = len(ld.handles[0].data)
    data = ld.handles[0].data
    control = ld.handles[0].control
    b = [out.coef(y) for y in data]
    a = [out.coef(x) for x in control]
    for tag, vec in sorted(lam):
        if tag == 0:
            val = out.const + sum(b[j] * vec[j] for j in range(l))
            cond = "constant"
        elif tag <= k:
            x = control[tag - 1]
            same = [i for i, z in enumerate(control) if control_order.rel(z, x) == "="]
            val = sum(a[i] for i in same) + sum(b[j] * vec[j] for j in range(l))
            cond = f"control {x}"
        else:
            val = sum(b[j] * vec[j] for j in range(l))
            cond = "other"
        if val:
            return {"condition": cond, "tuple": [tag, list(vec)], "value": val}
    return None


def compute_abstraction(ld: LassoData, check: bool = True, explain: list | None = None, cache: dict | None = None):
    """Staged fixpoint over (junction, tuple set); returns (family at last junction, firing evidence)."""
    r = ld.ml.r
    k = ld.handles[0].k
    U = u_domains(ld, cache) if check else None
    q_last = ld.ml.junctions[-1]
    orders = ld.orders
    base = abs_of(ld.handles[0])
    steps = [[_counter_free(cache, c) for c in b] for b in ld.bundles]
    start = (0, base)
    parent: dict = {start: None}
    work = deque([start])
    final: list[frozenset] = []
    while work:
        node = work.popleft()
        stage, lam = node
        if check:
            _assert_u(lam, U[stage], node, parent)
            _assert_respect(lam, ld, stage)
        if explain is not None and len(parent) <= EXPLAIN_SETS:
            explain.append(f"abs {' '.join(_path_of(node, parent))} @J{stage + 1}: {format_abs(lam)}")
        if stage == r - 1:
            final.append(lam)
            hit = check_tuple(ld, lam, k, orders[q_last])
            if hit:
                hit["path"] = _path_of(node, parent)
                return final, hit
        moves = [(f"C{stage + 1}.{i + 1}", (stage, _abs_step(cache, lam, st))) for i, st in enumerate(steps[stage])]
        if stage + 1 < r:
            moves.append((f"H{stage + 2}", (stage + 1, _abs_step(cache, lam, ld.handles[stage + 1]))))
        for label, nxt in moves:
            if nxt not in parent:
                parent[nxt] = (node, label)
                work.append(nxt)
    if explain is not None:
        xi, delta = restructure(final, k)
        explain.append(f"abstraction: {len(final)} sets, Xi={len(xi)}, Delta={sorted(delta)}")
    return final, None


def restructure(family, k: int):
    """(Xi, Delta): constant/control parts per set, and every other-atom tuple."""
    xi, delta = set(), set()
    for lam in family:
        xi.add(frozenset(t for t in lam if t[0] != k + 1))
        delta.update(t for t in lam if t[0] == k + 1)
    return frozenset(xi), frozenset(delta)


def _path_of(node, parent) -> list[str]:
    labels = []
    while parent[node] is not None:
        node, label = parent[node]
        labels.append(label)
    return ["H1"] + labels[::-1]


def _assert_u(lam, U, node, parent) -> None:
    for tag, vec in lam:
        for v in vec:
            if v not in U:
                msg = f"coefficient {v} of tuple ({tag}, {vec}) outside U={sorted(U)} along {_path_of(node, parent)}"
                U_VIOLATIONS.append(msg)
                raise UBoundViolation(msg)


def _assert_respect(lam, ld: LassoData, stage: int) -> None:
    order = ld.orders[ld.ml.junctions[stage]]
    control = ld.handles[0].control
    vecs = {tag: vec for tag, vec in lam if 1 <= tag <= len(control)}
    for i, x in enumerate(control):
        for j, z in enumerate(control):
            if order.rel(x, z) == "=" and vecs.get(i + 1) != vecs.get(j + 1):
                raise AssertionError(f"equal control variables {x}, {z} carry different tuples")


def analyze_lasso(s: Snt, ml: MultiLasso, orders, explain: list | None = None, cache: dict | None = None) -> dict | None:
    """Evidence that this multi-lasso yields a non-zero output, or None."""
    ld = prepare(s, ml, orders, cache)
    if ld is None:
        return None
    if cache is not None and explain is None:
        # lassos with the same canonical handles, cycles and output behave alike
        key = (
            "lasso",
            tuple(canonical(h) for h in ld.handles),
            tuple(frozenset(canonical(c) for c in b) for b in ld.bundles),
            ld.out,
        )
        if key in cache:
            return None
        cache[key] = True
    fired, theta, expr = step1(ld)
    if explain is not None:
        explain.append(f"lasso {ml.describe()}")
        named = [(f"H{i + 1}", h) for i, h in enumerate(ld.handles)]
        named += [(f"C{st + 1}.{i + 1}", c) for st, b in enumerate(ld.bundles) for i, c in enumerate(b)]
        for name, theta_p in named:
            explain.append(f"summary {name}: " + "; ".join(theta_p.dump().splitlines()))
        explain.append(f"step1 output over handles: {expr}")
        if ml.r == 1 and 0 < len(ld.bundles[0]) <= 4:
            explain.extend("step2 " + line for line in explain_step2_single(ld))
    if fired:
        return {"step": 1, "expression": str(expr)}
    hit = step2(ld, explain)
    if hit:
        hit["step"] = 2
        return hit
    _, hit = compute_abstraction(ld, explain=explain, cache=cache)
    if hit:
        hit["step"] = 3
        return hit
    return None


def nonzero_output(s: Snt, explain: list | None = None) -> Verdict:
    """HOLDS when some word and initial valuation give an output outside {bottom, 0}."""
    orders = state_orders(s)
    if orders is None or any(t.end and t.guard for t in s.transitions):
        return Verdict("nonzero", UNSUPPORTED, {"reason": "input is not normalized"})
    bad = validate(s)
    if bad:
        return Verdict("nonzero", UNSUPPORTED, {"constraint": bad[0].constraint, "reason": str(bad[0])})
    cache: dict = {}
    for ml in classify(s):
        hit = analyze_lasso(s, ml, orders, explain, cache)
        if hit:
            hit["multilasso"] = ml.describe()
            return Verdict("nonzero", HOLDS, hit)
    return Verdict("nonzero", FAILS, {})


def _nonzero_variant(v: Snt):
    return nonzero_output(v)


def nonzero_any(s: Snt, jobs: int = 1, explain: list | None = None, all_variants: bool = False) -> Verdict:
    """Normalize first (one variant per initial order), then OR the variants."""
    try:
        variants = normalize(s)
    except Unsupported as e:
        return Verdict("nonzero", UNSUPPORTED, {"constraint": e.constraint, "reason": e.message})
    if jobs > 1 and len(variants) > 1 and explain is None:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_nonzero_variant, variants))
    elif all_variants:
        results = [nonzero_output(v, explain) for v in variants]
    else:
        results = []
        for v in variants:
            results.append(nonzero_output(v, explain))
            if results[-1].answer != FAILS:
                break
    parts = []
    for i, (v, res) in enumerate(zip(variants, results)):
        res.evidence["variant"] = i
        res.evidence["initial_order"] = str(v.order_map[v.init])
        parts.append(res)
    for res in results:
        if res.answer == UNSUPPORTED:
            return res
    hits = [r for r in results if r.answer == HOLDS]
    answer = HOLDS if hits else FAILS
    evidence = dict(hits[0].evidence) if hits else {}
    evidence["variants"] = len(variants)
    return Verdict("nonzero", answer, evidence, parts if all_variants else [])


def check_equivalence(s1: Snt, s2: Snt, jobs: int = 1, explain: list | None = None) -> Verdict:
    for s in (s1, s2):
        bad = validate(s)
        if bad:
            return Verdict("equivalent", UNSUPPORTED, {"constraint": bad[0].constraint, "reason": str(bad[0])})
    prod = product(s1, s2)
    res = nonzero_any(prod, jobs, explain)
    if res.answer == UNSUPPORTED:
        return Verdict("equivalent", UNSUPPORTED, res.evidence)
    if res.answer == HOLDS:
        return Verdict("equivalent", FAILS, res.evidence)
    return Verdict("equivalent", HOLDS, res.evidence)


def check_commutativity(s: Snt, jobs: int = 1, explain: list | None = None) -> Verdict:
    """Invariance under swapping the first two values and under rotation (words of length >= 2)."""
    bad = validate(s)
    if bad:
        return Verdict("commutative", UNSUPPORTED, {"constraint": bad[0].constraint, "reason": str(bad[0])})
    base = restrict_min_length(s, 2)
    for label, other in (("swap", build_swap_snt(base)), ("rotate", build_rotate_snt(base))):
        res = check_equivalence(base, other, jobs, explain)
        if res.answer != HOLDS:
            ev = dict(res.evidence)
            ev["permutation"] = label
            return Verdict("commutative", res.answer, ev)
    return Verdict("commutative", HOLDS, {"note": "words of length 0 and 1 have no other permutation"})


def _check_linear(p: ReducerProgram, jobs: int, explain) -> Verdict:
    try:
        s = program_to_snt(slice_program(p))
    except Unsupported as e:
        return Verdict("commutative", UNSUPPORTED, {"constraint": e.constraint, "reason": e.message})
    return check_commutativity(s, jobs, explain)


def check_program(p: ReducerProgram, jobs: int = 1, explain: list | None = None) -> Verdict:
    """Commutativity of a reducer: direct, componentwise, or split across passes."""
    if p.has_init:
        split = check_multipass(p)
        parts = []
        if split.phase1 is not None:
            v = check_program(split.phase1, jobs, explain)
            v.evidence = {**v.evidence, "phase": 1}
            parts.append(v)
        v = check_program(split.phase2, jobs, explain)
        v.evidence = {**v.evidence, "phase": 2}
        parts.append(v)
        answer = _combine(parts)
        notes = [
            "sound but incomplete: both phases commutative implies the program is; "
            "a failing phase does not show the program is not"
        ]
        evidence = {"crossing": list(split.crossing)}
        if answer == FAILS:
            answer = UNSUPPORTED
            evidence["reason"] = "inconclusive: a phase is not commutative on its own"
        return Verdict("commutative", answer, evidence, parts, notes)
    comps = component_programs(p)
    if len(comps) == 1 and isinstance(p.ret, Linear):
        return _check_linear(p, jobs, explain)
    parts = []
    for label, q in comps:
        v = _check_linear(q, jobs, explain)
        v.evidence = {**v.evidence, "component": label}
        parts.append(v)
    return Verdict("commutative", _combine(parts), {"components": [lbl for lbl, _ in comps]}, parts)


def _combine(parts: Sequence[Verdict]) -> str:
    if any(p.answer == UNSUPPORTED for p in parts):
        return UNSUPPORTED
    if any(p.answer == FAILS for p in parts):
        return FAILS
    return HOLDS
