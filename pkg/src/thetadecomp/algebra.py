"""Formal linear combinations of basis symbols and the operator algebra on them.

A basis symbol (level, multi-index, characteristic) stands for one auxiliary
theta series; elements are finite complex combinations of symbols, possibly
mixing levels.  Three operator families act termwise:

* scaling_op(k, l): multiplies each term by entry (k,l) of its own level,
* lowering_op(m, a): reduces the multi-index, with integer coefficients
  drawn from the level matrix,
* raising_op(n, b): increments the multi-index.

Coefficient arithmetic keeps whatever numeric type it is given, so operator
identities on integer inputs are exact, not tolerance-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import DimensionMismatchError, IndexOutOfRangeError
from .evaluation import ThetaValue, TruncationConfig, aux_theta_series
from .numerics import Characteristic, LevelMatrix, MultiIndex, PeriodMatrix

PRUNE_EPS = 1e-12  # numeric pruning threshold used by the fitting engine


@dataclass(frozen=True)
class BasisSymbol:
    level: LevelMatrix
    j: MultiIndex
    char: Characteristic

    def __post_init__(self):
        if self.char.level != self.level:
            raise DimensionMismatchError("characteristic belongs to a different level")
        if self.j.h != self.level.h or self.j.g != self.char.g:
            raise DimensionMismatchError("multi-index shape does not match level/characteristic")
        object.__setattr__(self, "_hash", hash((self.level, self.j, self.char)))

    def __hash__(self):
        return self._hash

    @property
    def h(self) -> int:
        return self.level.h

    @property
    def g(self) -> int:
        return self.char.g

    def sort_key(self):
        return (self.h, self.g, self.level.entries, self.j.size, self.j.j, self.char.index)

    def __str__(self):
        return f"sym(level={self.level}, j={self.j}, char#{self.char.index})"


class AlgebraElement:
    """Finite formal combination of basis symbols; immutable value semantics."""

    __slots__ = ("_terms",)

    def __init__(self, terms: dict | None = None):
        clean = {}
        if terms:
            for sym, coeff in terms.items():
                if coeff != 0:
                    clean[sym] = coeff
        self._terms = clean

    @classmethod
    def zero(cls) -> "AlgebraElement":
        return cls({})

    @classmethod
    def from_symbol(cls, sym: BasisSymbol, coeff=1) -> "AlgebraElement":
        return cls({sym: coeff})

    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def sorted_terms(self) -> list:
        return sorted(self._terms.items(), key=lambda kv: kv[0].sort_key())

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self):
        return len(self._terms)

    def __add__(self, other):
        out = dict(self._terms)
        for sym, c in other._terms.items():
            out[sym] = out.get(sym, 0) + c
        return AlgebraElement(out)

    def __sub__(self, other):
        return self + (-1) * other

    def __neg__(self):
        return (-1) * self

    def __rmul__(self, scalar):
        if scalar == 0:
            return AlgebraElement.zero()
        return AlgebraElement({sym: scalar * c for sym, c in self._terms.items()})

    def __mul__(self, scalar):
        return self.__rmul__(scalar)

    def __eq__(self, other):
        return isinstance(other, AlgebraElement) and self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def levels(self) -> list[LevelMatrix]:
        seen = []
        for sym, _ in self.sorted_terms():
            if sym.level not in seen:
                seen.append(sym.level)
        return seen

    def level_component(self, level: LevelMatrix) -> "AlgebraElement":
        """Projection onto one level of the grading."""
        return AlgebraElement({s: c for s, c in self._terms.items() if s.level == level})

    def degree(self) -> int:
        """Largest |J| among the terms (0 for the zero element)."""
        return max((s.j.size for s in self._terms), default=0)

    def prune(self, eps: float = PRUNE_EPS) -> "AlgebraElement":
        return AlgebraElement({s: c for s, c in self._terms.items() if abs(c) > eps})

    def shape(self) -> tuple[int, int]:
        """Common (h, g) of the terms; raises if terms disagree."""
        shapes = {(s.h, s.g) for s in self._terms}
        if len(shapes) > 1:
            raise DimensionMismatchError(f"element mixes shapes {sorted(shapes)}")
        return shapes.pop() if shapes else (0, 0)

    def __repr__(self):
        if self.is_zero():
            return "AlgebraElement(0)"
        bits = [f"{c!r}*{s}" for s, c in self.sorted_terms()]
        return "AlgebraElement(" + " + ".join(bits) + ")"


@dataclass(frozen=True)
class OperatorId:
    """One of the three operator families, with 1-based indices."""

    kind: str  # "scale" | "lower" | "raise"
    i: int
    j: int

    def __post_init__(self):
        if self.kind not in ("scale", "lower", "raise"):
            raise ValueError(f"unknown operator kind {self.kind!r}")


def scaling_op(k: int, l: int) -> OperatorId:
    return OperatorId("scale", k, l)


def lowering_op(m: int, a: int) -> OperatorId:
    return OperatorId("lower", m, a)


def raising_op(n: int, b: int) -> OperatorId:
    return OperatorId("raise", n, b)


def _check_indices(op: OperatorId, h: int, g: int):
    if op.kind == "scale":
        ok = 1 <= op.i <= h and 1 <= op.j <= h
    else:
        ok = 1 <= op.i <= h and 1 <= op.j <= g
    if not ok:
        raise IndexOutOfRangeError(f"{op.kind}({op.i},{op.j}) outside h={h}, g={g}")


def _apply_symbol(op: OperatorId, sym: BasisSymbol, coeff) -> Iterable[tuple[BasisSymbol, object]]:
    _check_indices(op, sym.h, sym.g)
    m = sym.level.entries
    if op.kind == "scale":
        yield sym, coeff * m[op.i - 1][op.j - 1]
    elif op.kind == "raise":
        yield BasisSymbol(sym.level, sym.j.bump(op.i, op.j, +1), sym.char), coeff
    else:  # lower: sum over rows of the level matrix against the multi-index column
        a = op.j
        for l in range(1, sym.h + 1):
            jla = sym.j.j[l - 1][a - 1]
            if jla:
                lowered = BasisSymbol(sym.level, sym.j.bump(l, a, -1), sym.char)
                yield lowered, coeff * m[op.i - 1][l - 1] * jla


def apply(op: OperatorId, x: AlgebraElement) -> AlgebraElement:
    """Apply one operator, extended linearly over the terms."""
    out: dict = {}
    for sym, coeff in x.items():
        for new_sym, c in _apply_symbol(op, sym, coeff):
            out[new_sym] = out.get(new_sym, 0) + c
    return AlgebraElement(out)


def apply_raising_power(j: MultiIndex, x: AlgebraElement) -> AlgebraElement:
    """Compose raising operators entrywise: each index (k,a) applied J_ka times."""
    out = x
    for k in range(1, j.h + 1):
        for a in range(1, j.g + 1):
            for _ in range(j.j[k - 1][a - 1]):
                out = apply(raising_op(k, a), out)
    return out


def commutator(op1: OperatorId, op2: OperatorId, x: AlgebraElement) -> AlgebraElement:
    return apply(op1, apply(op2, x)) - apply(op2, apply(op1, x))


def in_theta_subalgebra(x: AlgebraElement) -> bool:
    """Whether every lowering operator annihilates the element.

    Equivalent to all terms having multi-index zero; the test applies the
    operators rather than inspecting the terms, so it exercises the defining
    property directly.
    """
    if x.is_zero():
        return True
    h, g = x.shape()
    for m in range(1, h + 1):
        for a in range(1, g + 1):
            if not apply(lowering_op(m, a), x).is_zero():
                return False
    return True


def evaluate_element(x: AlgebraElement, omega: PeriodMatrix, z, w,
                     cfg: TruncationConfig) -> ThetaValue:
    """Numeric value of an element: coefficient-weighted sum of its series."""
    value = 0j
    tail = 0.0
    for sym, coeff in x.sorted_terms():
        v = aux_theta_series(sym.level, sym.j, sym.char, omega, z, w, cfg)
        value += complex(coeff) * v.value
        tail += abs(coeff) * v.tail_bound
    return ThetaValue(value=value, tail_bound=tail)
