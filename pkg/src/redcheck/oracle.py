"""Bounded brute-force search for commutativity, equivalence and non-zero output witnesses.

Enumeration is deterministic: initial valuations in a fixed order (all-zero
first, then a seeded sample), words by length and then lexicographically over
the value list, permutations in lexicographic order. A search that finds nothing
only says so for the bounds it was given.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable

from . import lang
from .lang import ReducerProgram
from .snt import Snt, run

DEFAULT_VALUES = tuple(range(-3, 4))


@dataclass(frozen=True)
class SearchBounds:
    max_len: int = 5
    values: tuple[int, ...] = DEFAULT_VALUES
    rho_values: tuple[int, ...] = DEFAULT_VALUES
    rho_samples: int = 4
    seed: int = 0

    @staticmethod
    def parse(text: str) -> "SearchBounds":
        """'len=4,lo=-2,hi=2,rho=3' style overrides."""
        kw: dict = {}
        lo, hi = DEFAULT_VALUES[0], DEFAULT_VALUES[-1]
        for part in filter(None, (p.strip() for p in text.split(","))):
            key, _, val = part.partition("=")
            if key in ("len", "max_len"):
                kw["max_len"] = int(val)
            elif key == "lo":
                lo = int(val)
            elif key == "hi":
                hi = int(val)
            elif key in ("rho", "rho_samples"):
                kw["rho_samples"] = int(val)
            elif key == "seed":
                kw["seed"] = int(val)
            else:
                raise ValueError(f"unknown bound {key!r}")
        vals = tuple(range(lo, hi + 1))
        return SearchBounds(values=vals, rho_values=vals, **kw)


@dataclass
class Witness:
    kind: str
    word: tuple[int, ...]
    rho0: dict
    outputs: tuple
    permuted: tuple[int, ...] | None = None

    def to_json(self) -> dict:
        d = {"kind": self.kind, "word": list(self.word), "rho0": self.rho0, "outputs": [_jsonable(o) for o in self.outputs]}
        if self.permuted is not None:
            d["permuted"] = list(self.permuted)
        return d


@dataclass
class SearchResult:
    """witness is None when nothing was found within the bounds (never a proof)."""

    witness: Witness | None
    bounds: SearchBounds
    runs: int = 0
    notes: list = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.witness is not None

    def to_json(self) -> dict:
        return {
            "found": self.found,
            "status": "witness" if self.found else "none within bounds",
            "witness": self.witness.to_json() if self.witness else None,
            "bounds": {"max_len": self.bounds.max_len, "values": list(self.bounds.values), "rho_samples": self.bounds.rho_samples},
            "runs": self.runs,
        }


def _jsonable(o):
    if o is None:
        return None
    if isinstance(o, tuple):
        return [_jsonable(x) for x in o]
    if hasattr(o, "numerator") and getattr(o, "denominator", 1) != 1:
        return str(o)
    return int(o)


def words(b: SearchBounds) -> Iterable[tuple[int, ...]]:
    for n in range(b.max_len + 1):
        yield from itertools.product(b.values, repeat=n)


def valuations(names: Iterable[str], b: SearchBounds, links=()) -> list[dict]:
    """All-zero first, then up to rho_samples-1 seeded samples (linked names share a value)."""
    names = list(dict.fromkeys(names))
    rep = {v: v for v in names}
    for group in links:
        head = min(group, key=lambda v: names.index(v) if v in names else len(names))
        for v in group:
            rep[v] = head
    heads = [v for v in names if rep[v] == v]
    out = [{v: 0 for v in names}]
    rng = random.Random(b.seed)
    seen = {tuple(0 for _ in heads)}
    space = len(b.rho_values) ** len(heads)
    while len(out) < min(b.rho_samples, space):
        pick = tuple(rng.choice(b.rho_values) for _ in heads)
        if pick in seen:
            continue
        seen.add(pick)
        val = dict(zip(heads, pick))
        out.append({v: val[rep[v]] for v in names})
    return out


def _runner(t) -> tuple[Callable, tuple[str, ...], tuple]:
    if isinstance(t, ReducerProgram):
        return (lambda w, rho: lang.interpret(t, w, rho)), t.variables, ()
    if isinstance(t, Snt):
        return (lambda w, rho: run(t, w, rho)), t.variables, t.links
    raise TypeError(f"cannot run {type(t).__name__}")


def oracle_commutative(t, b: SearchBounds = SearchBounds()) -> SearchResult:
    """First (w, sigma(w)) with different outputs, or none within bounds."""
    f, names, links = _runner(t)
    runs = 0
    for rho in valuations(names, b, links):
        for n in range(2, b.max_len + 1):
            outs = {}
            groups: dict = {}
            for w in itertools.product(b.values, repeat=n):
                outs[w] = o = f(w, rho)
                runs += 1
                groups.setdefault(tuple(sorted(w)), set()).add(_key(o))
            for w in itertools.product(b.values, repeat=n):
                if len(groups[tuple(sorted(w))]) == 1:
                    continue
                for perm in sorted(set(itertools.permutations(w))):
                    if _key(outs[perm]) != _key(outs[w]):
                        return SearchResult(Witness("commutative", w, rho, (outs[w], outs[perm]), perm), b, runs)
    return SearchResult(None, b, runs)


def _key(o):
    return ("bot",) if o is None else ("val", o)


def oracle_equivalent(t1, t2, b: SearchBounds = SearchBounds()) -> SearchResult:
    """First (w, rho0) on which the two disagree, bottom counting as a value."""
    f1, n1, l1 = _runner(t1)
    f2, n2, l2 = _runner(t2)
    runs = 0
    for rho in valuations(n1 + n2, b, tuple(l1) + tuple(l2)):
        for w in words(b):
            o1, o2 = f1(w, rho), f2(w, rho)
            runs += 1
            if _key(o1) != _key(o2):
                return SearchResult(Witness("equivalent", w, rho, (o1, o2)), b, runs)
    return SearchResult(None, b, runs)


def oracle_nonzero(s, b: SearchBounds = SearchBounds()) -> SearchResult:
    """First (w, rho0) whose output is defined and non-zero."""
    f, names, links = _runner(s)
    runs = 0
    for rho in valuations(names, b, links):
        for w in words(b):
            o = f(w, rho)
            runs += 1
            if o is not None and o != 0:
                return SearchResult(Witness("nonzero", w, rho, (o,)), b, runs)
    return SearchResult(None, b, runs)
