"""Integer affine forms over named variables.

Used for assignment right-hand sides, output expressions and guard
substitution. Values are immutable and hashable.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping


@dataclass(frozen=True)
class Lin:
    """c0 + sum(coef * var). Zero coefficients are never stored."""

    terms: tuple[tuple[str, int], ...] = ()
    const: int = 0

    @staticmethod
    def of(mapping: Mapping[str, int] | None = None, const: int = 0) -> "Lin":
        items = tuple(sorted((v, c) for v, c in (mapping or {}).items() if c != 0))
        return Lin(items, const)

    @staticmethod
    def var(name: str, coef: int = 1) -> "Lin":
        return Lin.of({name: coef})

    @staticmethod
    def constant(c: int) -> "Lin":
        return Lin((), c)

    def as_dict(self) -> dict[str, int]:
        return dict(self.terms)

    def coef(self, name: str) -> int:
        for v, c in self.terms:
            if v == name:
                return c
        return 0

    def variables(self) -> set[str]:
        return {v for v, _ in self.terms}

    def __add__(self, other: "Lin") -> "Lin":
        d = self.as_dict()
        for v, c in other.terms:
            d[v] = d.get(v, 0) + c
        return Lin.of(d, self.const + other.const)

    def __neg__(self) -> "Lin":
        return self.scale(-1)

    def __sub__(self, other: "Lin") -> "Lin":
        return self + other.scale(-1)

    def scale(self, k: int) -> "Lin":
        return Lin.of({v: c * k for v, c in self.terms}, self.const * k)

    def is_zero(self) -> bool:
        return not self.terms and self.const == 0

    def subst(self, mapping: Mapping[str, "Lin"]) -> "Lin":
        """Simultaneous substitution; unmapped variables stay."""
        out = Lin.constant(self.const)
        for v, c in self.terms:
            out = out + (mapping[v].scale(c) if v in mapping else Lin.var(v, c))
        return out

    def rename(self, mapping: Mapping[str, str]) -> "Lin":
        return self.subst({v: Lin.var(n) for v, n in mapping.items()})

    def evaluate(self, env: Mapping[str, int]):
        total = self.const
        for v, c in self.terms:
            total += c * env[v]
        return total

    def __str__(self) -> str:
        parts: list[str] = []
        for v, c in self.terms:
            mag = abs(c)
            body = v if mag == 1 else f"{mag}*{v}"
            parts.append(("- " if c < 0 else "+ ") + body)
        if self.const or not parts:
            parts.append(("- " if self.const < 0 else "+ ") + str(abs(self.const)))
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]
