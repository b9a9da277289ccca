"""Shared corpus loaders and samplers for the test suite."""
from __future__ import annotations

import random
from functools import lru_cache

from redcheck import corpus_path
from redcheck.lang import parse_program
from redcheck.oracle import SearchBounds, valuations
from redcheck.randgen import random_lasso
from redcheck.snt import TotalPreorder, parse_snt, trace
from redcheck.transforms import (
    build_rotate_snt,
    build_swap_snt,
    component_programs,
    normalize,
    product,
    program_to_snt,
    restrict_min_length,
)

# programs without init whose return is linear
LINEAR = ("max", "min", "sum", "sum_copy", "cnt", "first", "last", "id", "range", "cntmax", "summax", "mad2")


def red(name: str):
    return parse_program(corpus_path(f"{name}.red").read_text())


def snt(name: str):
    return parse_snt(corpus_path(f"{name}.snt").read_text())


@lru_cache(maxsize=None)
def translated(name: str):
    return program_to_snt(red(name))


@lru_cache(maxsize=None)
def corpus_machines() -> tuple:
    """(label, machine): goldens, translations, derivatives and ten random lassos."""
    out = [("smax", snt("smax")), ("zero", snt("zero"))]
    out += [(n, translated(n)) for n in LINEAR]
    out += [(f"avg:{lbl}", program_to_snt(q)) for lbl, q in component_programs(red("avg"))]
    for n in ("max", "first", "sum"):
        r = restrict_min_length(translated(n), 2)
        out += [(f"{n}/restrict", r), (f"{n}/swap", build_swap_snt(r)), (f"{n}/rotate", build_rotate_snt(r))]
    out.append(("sum*cnt", product(translated("sum"), translated("cnt"))))
    out.append(("max*summax", product(translated("max"), translated("summax"))))
    r = restrict_min_length(translated("max"), 2)
    out += [(f"max*swap/n{i}", v) for i, v in enumerate(normalize(product(r, build_swap_snt(r))))]
    out += [(f"rand{seed}", random_lasso(seed, 1 + seed % 2, 1 + seed % 3, 1 + seed % 3, 1 + (seed // 3) % 2)) for seed in range(10)]
    return tuple(out)


def initial_order(s, rho) -> TotalPreorder:
    if s.orders:
        return s.order_map[s.init]
    return TotalPreorder.from_ranks({x: rho[x] for x in s.control}, s.control)


def consistent(s, rho) -> bool:
    if not s.orders:
        return True
    order = s.order_map[s.init]
    return all(
        order.rel(a, b) == ("<" if rho[a] < rho[b] else ">" if rho[a] > rho[b] else "=")
        for a in s.control
        for b in s.control
    )


def sample_runs(s, n: int, seed: int = 0, max_len: int = 4, lo: int = -3, hi: int = 3):
    """n defined runs as (word, rho0, steps), rho0 respecting links and any initial order."""
    rng = random.Random(seed)
    b = SearchBounds(max_len=max_len, values=tuple(range(lo, hi + 1)), rho_samples=64, seed=seed)
    rhos = [r for r in valuations(s.variables, b, s.links) if consistent(s, r)]
    out, tries = [], 0
    while len(out) < n and tries < 20 * n and rhos:
        tries += 1
        w = tuple(rng.randint(lo, hi) for _ in range(rng.randint(0, max_len)))
        rho = rng.choice(rhos)
        steps = trace(s, w, rho)
        if steps is not None:
            out.append((w, rho, steps))
    return out
