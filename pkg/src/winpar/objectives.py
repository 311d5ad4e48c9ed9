"""Exact membership of ultimately periodic plays, and window bookkeeping."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .core import Arena, Kind, Lasso, ObjectiveSpec, SpecError, WinparError, unroll


def preceq(c: int, c2: int) -> bool:
    """``c`` answers ``c2``: ``c`` is even and not larger."""
    return c % 2 == 0 and c <= c2


@dataclass(frozen=True)
class WindowVerdict:
    position: int
    closed: bool
    offset: int | None = None
    dim: int = 0

    @property
    def status(self) -> str:
        return f"closed-at {self.offset}" if self.closed else "open"


@dataclass(frozen=True)
class LassoVerdict:
    holds: bool
    position: int | None = None
    dimension: int | None = None

    def __bool__(self) -> bool:
        return self.holds


@dataclass(frozen=True)
class GoodDecomposition:
    """Indices ``head`` then ``loop`` repeated, each loop pass shifted by ``shift``."""

    head: tuple[int, ...]
    loop: tuple[int, ...]
    shift: int

    def indices(self, count: int) -> list[int]:
        out = list(self.head[:count])
        k = 0
        while len(out) < count:
            out.extend(i + k * self.shift for i in self.loop)
            k += 1
        return out[:count]


def window_close(arena: Arena, prefix: Sequence[str], j: int, lam: int, dim: int = 0) -> WindowVerdict:
    """Status of the window opened at position ``j`` of a finite prefix."""
    if lam < 1:
        raise SpecError("window size must be >= 1")
    if len(prefix) < j + lam:
        raise WinparError("insufficient horizon")
    low = None
    for l in range(lam):
        c = arena.priority(prefix[j + l], dim)
        if low is None or c < low:
            low = c
        if c == low and c % 2 == 0:
            return WindowVerdict(j, True, l, dim)
    return WindowVerdict(j, False, None, dim)


def _answered(prios: Sequence[int], j: int, lam: int) -> bool:
    c = prios[j]
    return any(preceq(prios[j + l], c) for l in range(lam))


def _closes(prios: Sequence[int], j: int, lam: int) -> bool:
    low = prios[j]
    for l in range(lam):
        c = prios[j + l]
        if c < low:
            low = c
        if c == low and c % 2 == 0:
            return True
    return False


def _check_fixed(arena: Arena, lasso: Lasso, family: str, lam: int, direct: bool, dims) -> LassoVerdict:
    s, cl = len(lasso.stem), len(lasso.cycle)
    seq = unroll(lasso, s + cl + lam - 1)
    table = [[arena.priority(v, m) for v in seq] for m in dims]
    test = _answered if family == "PR" else _closes
    for j in range(0 if direct else s, s + cl):
        for m, prios in zip(dims, table):
            if not test(prios, j, lam):
                return LassoVerdict(False, j, m)
    return LassoVerdict(True)


def check_lasso(arena: Arena, lasso: Lasso, spec: ObjectiveSpec, dim: int | None = None) -> LassoVerdict:
    """Whether ``stem . cycle^omega`` belongs to the objective.

    Window kinds inspect every position of the stem (direct) or of one
    cycle period (undirect) with look-ahead ``lam - 1``; bounded kinds
    use the fixed kind at ``lam = S + 2C``, which is already sufficient
    for any answer that ever occurs.  Multi-dimension objectives are the
    conjunction of their dimensions; ``dim`` restricts to one.
    """
    dims = range(arena.n) if dim is None else [dim]
    kind = spec.kind
    s, cl = len(lasso.stem), len(lasso.cycle)
    if kind.is_fixed:
        if spec.lam is None:
            raise SpecError("lambda missing")
        return _check_fixed(arena, lasso, kind.family, spec.lam, spec.direct, dims)
    if kind.is_bounded:
        return _check_fixed(arena, lasso, kind.family, s + 2 * cl, spec.direct, dims)
    if kind is Kind.PARITY:
        for m in dims:
            c = min(arena.priority(v, m) for v in lasso.cycle)
            if c % 2:
                return LassoVerdict(False, None, m)
        return LassoVerdict(True)
    seq = list(lasso.stem) + list(lasso.cycle)
    if kind is Kind.REACH:
        return LassoVerdict(any(v in spec.target for v in seq))
    if kind is Kind.SAFE:
        for j, v in enumerate(seq):
            if v not in spec.target:
                return LassoVerdict(False, j)
        return LassoVerdict(True)
    if kind is Kind.BUCHI:
        return LassoVerdict(any(v in spec.target for v in lasso.cycle))
    if kind is Kind.COBUCHI:
        for j, v in enumerate(lasso.cycle):
            if v not in spec.target:
                return LassoVerdict(False, s + j)
        return LassoVerdict(True)
    if kind is Kind.GENREACH:
        seen = set(seq)
        for t, u in enumerate(spec.targets):
            if not seen & u:
                return LassoVerdict(False, None, t)
        return LassoVerdict(True)
    raise SpecError(f"unsupported kind {kind}")


def good_decomposition(arena: Arena, lasso: Lasso, lam: int, dim: int = 0, direct: bool = True):
    """Greedy decomposition into segments whose opening window closes at the segment end.

    Starts at 0 (direct) or at the cycle entry (undirect) and stops once a
    start index repeats modulo the cycle.  Returns ``None`` when some
    window stays open.
    """
    s, cl = len(lasso.stem), len(lasso.cycle)
    seq = unroll(lasso, s + 2 * cl + lam + 1)
    k = 0 if direct else s
    ks: list[int] = []
    seen: dict[int, int] = {}
    while True:
        if k >= s:
            r = (k - s) % cl
            if r in seen:
                first = seen[r]
                return GoodDecomposition(tuple(ks[:first]), tuple(ks[first:]), k - ks[first])
            seen[r] = len(ks)
        if k + lam > len(seq):
            seq = unroll(lasso, k + lam + cl)
        verdict = window_close(arena, seq, k, lam, dim)
        if not verdict.closed:
            return None
        ks.append(k)
        k += verdict.offset + 1


def min_sufficient_lambda(arena: Arena, lasso: Lasso, kind: Kind | str, direct: bool = False, dim: int | None = None):
    """Smallest window size for which the fixed objective holds, or ``math.inf``."""
    kind = Kind(kind)
    if kind.is_bounded:
        kind = Kind.FIXPR if kind is Kind.BNDPR else Kind.FIXWP
    if not kind.is_fixed:
        raise SpecError("min_sufficient_lambda needs a window kind")
    top = len(lasso.stem) + 2 * len(lasso.cycle)
    for lam in range(1, top + 1):
        if check_lasso(arena, lasso, ObjectiveSpec(kind, direct, lam), dim):
            return lam
    return math.inf
