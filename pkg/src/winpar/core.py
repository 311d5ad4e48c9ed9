"""Arena, lasso, objective and Moore-strategy data model."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

P1 = 1
P2 = 2


def opponent(player: int) -> int:
    return 3 - player


class WinparError(Exception):
    """Base class for all library errors."""


class ArenaError(WinparError):
    pass


class SpecError(WinparError):
    pass


class StrategyError(WinparError):
    pass


class Kind(str, enum.Enum):
    PARITY = "parity"
    FIXPR = "fixpr"
    FIXWP = "fixwp"
    BNDPR = "bndpr"
    BNDWP = "bndwp"
    REACH = "reach"
    SAFE = "safe"
    BUCHI = "buchi"
    COBUCHI = "cobuchi"
    GENREACH = "genreach"

    @property
    def is_fixed(self) -> bool:
        return self in (Kind.FIXPR, Kind.FIXWP)

    @property
    def is_bounded(self) -> bool:
        return self in (Kind.BNDPR, Kind.BNDWP)

    @property
    def is_window(self) -> bool:
        return self.is_fixed or self.is_bounded

    @property
    def family(self) -> str | None:
        if self in (Kind.FIXPR, Kind.BNDPR):
            return "PR"
        if self in (Kind.FIXWP, Kind.BNDWP):
            return "WP"
        return None


_SINGLE_TARGET = (Kind.REACH, Kind.SAFE, Kind.BUCHI, Kind.COBUCHI)


@dataclass(frozen=True)
class ObjectiveSpec:
    """Which objective player 1 pursues.

    ``targets`` holds vertex-id sets: one set for reach/safe/buchi/cobuchi
    (target, safe, accepting and allowed set respectively), k sets for
    generalized reachability.
    """

    kind: Kind
    direct: bool = False
    lam: int | None = None
    targets: tuple[frozenset[str], ...] = ()

    def __post_init__(self):
        kind = Kind(self.kind)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "targets", tuple(frozenset(t) for t in self.targets))
        if self.lam is not None and self.lam < 1:
            raise SpecError(f"window size must be >= 1, got {self.lam}")
        if kind.is_fixed and self.lam is None:
            raise SpecError(f"{kind.value} requires a window size lambda")
        if not kind.is_fixed and self.lam is not None:
            raise SpecError(f"{kind.value} takes no window size")
        if not kind.is_window and self.direct:
            object.__setattr__(self, "direct", False)
        if kind in _SINGLE_TARGET and len(self.targets) != 1:
            raise SpecError(f"{kind.value} needs exactly one target set")
        if kind is Kind.GENREACH and not self.targets:
            raise SpecError("genreach needs at least one target set")
        if kind not in _SINGLE_TARGET and kind is not Kind.GENREACH and self.targets:
            raise SpecError(f"{kind.value} takes no target sets")

    @classmethod
    def fixpr(cls, lam: int, direct: bool = False) -> "ObjectiveSpec":
        return cls(Kind.FIXPR, direct, lam)

    @classmethod
    def fixwp(cls, lam: int, direct: bool = False) -> "ObjectiveSpec":
        return cls(Kind.FIXWP, direct, lam)

    @classmethod
    def bndpr(cls, direct: bool = False) -> "ObjectiveSpec":
        return cls(Kind.BNDPR, direct)

    @classmethod
    def bndwp(cls, direct: bool = False) -> "ObjectiveSpec":
        return cls(Kind.BNDWP, direct)

    @classmethod
    def parity(cls) -> "ObjectiveSpec":
        return cls(Kind.PARITY)

    @property
    def target(self) -> frozenset[str]:
        return self.targets[0]

    def with_lambda(self, lam: int) -> "ObjectiveSpec":
        return ObjectiveSpec(self.kind, self.direct, lam, self.targets)

    def describe(self) -> str:
        if not self.kind.is_window:
            return self.kind.value
        name = ("Dir" if self.direct else "") + {
            Kind.FIXPR: "FixPR",
            Kind.FIXWP: "FixWP",
            Kind.BNDPR: "BndPR",
            Kind.BNDWP: "BndWP",
        }[self.kind]
        return f"{name}({self.lam})" if self.lam is not None else name


def round_up_even(x: int) -> int:
    return x + (x & 1)


class Arena:
    """Finite game graph with vertex ownership and one priority per dimension.

    Vertices are addressed by string ids externally and dense indices
    internally.  Construction is permissive: deadlocks, dangling edges and
    bad priorities are recorded and reported by :func:`validate_arena`
    rather than raised, so malformed inputs can be diagnosed.
    """

    def __init__(
        self,
        vertices: Iterable[tuple[str, int, Sequence[int]]],
        edges: Iterable[tuple[str, str]],
        max_priority: int | Sequence[int] | None = None,
    ):
        ids, owner, prios = [], [], []
        index: dict[str, int] = {}
        for vid, own, pr in vertices:
            vid = str(vid)
            if vid in index:
                raise ArenaError(f"duplicate vertex {vid}")
            index[vid] = len(ids)
            ids.append(vid)
            owner.append(int(own))
            prios.append(tuple(int(x) for x in pr))
        self.ids: tuple[str, ...] = tuple(ids)
        self.index: dict[str, int] = index
        self.owner: tuple[int, ...] = tuple(owner)
        self.priorities: tuple[tuple[int, ...], ...] = tuple(prios)
        self.n: int = len(prios[0]) if prios else 1

        succ: list[set[int]] = [set() for _ in ids]
        dangling = []
        for a, b in edges:
            a, b = str(a), str(b)
            if a in index and b in index:
                succ[index[a]].add(index[b])
            else:
                dangling.append((a, b))
        self.succ: tuple[tuple[int, ...], ...] = tuple(tuple(sorted(s)) for s in succ)
        self.dangling: tuple[tuple[str, str], ...] = tuple(dangling)

        if max_priority is None:
            self._declared_max = None
        elif isinstance(max_priority, int):
            self._declared_max = (max_priority,) * self.n
        else:
            self._declared_max = tuple(max_priority)
        dims = []
        for m in range(self.n):
            top = max((p[m] for p in prios if len(p) > m), default=0)
            if self._declared_max is not None:
                top = max(top, self._declared_max[m])
            dims.append(round_up_even(max(top, 0)))
        self.d_dims: tuple[int, ...] = tuple(dims)
        self.d: int = max(dims) if dims else 0

    # construction helpers -------------------------------------------------

    @classmethod
    def build(
        cls,
        owners: Mapping[str, int],
        priorities: Mapping[str, int | Sequence[int]],
        edges: Iterable[tuple[str, str]],
    ) -> "Arena":
        verts = []
        for v, own in owners.items():
            p = priorities[v]
            verts.append((v, own, (p,) if isinstance(p, int) else tuple(p)))
        return cls(verts, edges)

    # basic queries ----------------------------------------------------------

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def num_edges(self) -> int:
        return sum(len(s) for s in self.succ)

    def edges(self) -> Iterable[tuple[str, str]]:
        for i, s in enumerate(self.succ):
            for j in s:
                yield self.ids[i], self.ids[j]

    def has_edge(self, a: str, b: str) -> bool:
        return self.index[b] in self.succ[self.index[a]]

    def successors(self, v: str) -> tuple[str, ...]:
        return tuple(self.ids[j] for j in self.succ[self.index[v]])

    def priority(self, v: str, dim: int = 0) -> int:
        return self.priorities[self.index[v]][dim]

    def owner_of(self, v: str) -> int:
        return self.owner[self.index[v]]

    def indices(self, vs: Iterable[str]) -> frozenset[int]:
        return frozenset(self.index[v] for v in vs)

    def names(self, idx: Iterable[int]) -> frozenset[str]:
        return frozenset(self.ids[i] for i in idx)

    @cached_property
    def game(self):
        from .graph import Game

        src = [i for i, s in enumerate(self.succ) for _ in s]
        dst = [j for s in self.succ for j in s]
        return Game(self.owner, src, dst)

    @cached_property
    def prio_arrays(self):
        import numpy as np

        return [np.array([p[m] for p in self.priorities], dtype=np.int64) for m in range(self.n)]

    def is_one_player(self) -> int | None:
        """Return the player owning every branching vertex, if there is one."""
        owners = {self.owner[i] for i, s in enumerate(self.succ) if len(s) > 1}
        if len(owners) > 1:
            return None
        return owners.pop() if owners else P1

    def __eq__(self, other) -> bool:
        if not isinstance(other, Arena):
            return NotImplemented
        mine = {v: (self.owner[i], self.priorities[i]) for i, v in enumerate(self.ids)}
        theirs = {v: (other.owner[i], other.priorities[i]) for i, v in enumerate(other.ids)}
        return mine == theirs and set(self.edges()) == set(other.edges())

    __hash__ = None

    def __repr__(self) -> str:
        return f"Arena(|V|={len(self)}, |E|={self.num_edges}, n={self.n}, d={self.d})"


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def validate_arena(arena: Arena) -> ValidationReport:
    report = ValidationReport()
    for a, b in arena.dangling:
        report.violations.append(f"dangling edge {a} -> {b}")
    for i, v in enumerate(arena.ids):
        if arena.owner[i] not in (P1, P2):
            report.violations.append(f"invalid owner {arena.owner[i]} at {v}")
        pr = arena.priorities[i]
        if len(pr) != arena.n:
            report.violations.append(f"dimension mismatch at {v}: {len(pr)} priorities, expected {arena.n}")
        for m, c in enumerate(pr):
            top = arena._declared_max[m] if arena._declared_max and m < len(arena._declared_max) else None
            if c < 0 or (top is not None and c > top):
                report.violations.append(f"priority {c} out of range at {v} (dimension {m})")
        if not arena.succ[i]:
            report.violations.append(f"deadlock at {v}")
    if not arena.ids:
        report.violations.append("no vertices")
    return report


def require_valid(arena: Arena) -> None:
    report = validate_arena(arena)
    if not report.ok:
        raise ArenaError("; ".join(report.violations))


@dataclass(frozen=True)
class Lasso:
    """Ultimately periodic play ``stem . cycle^omega``."""

    stem: tuple[str, ...]
    cycle: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "stem", tuple(self.stem))
        object.__setattr__(self, "cycle", tuple(self.cycle))
        if not self.cycle:
            raise ValueError("lasso cycle must be nonempty")

    @classmethod
    def parse(cls, text: str) -> "Lasso":
        if "|" in text:
            stem, cycle = text.split("|", 1)
        else:
            stem, cycle = "", text
        return cls(tuple(stem.split()), tuple(cycle.split()))

    def __len__(self) -> int:
        return len(self.stem) + len(self.cycle)

    def at(self, k: int) -> str:
        s = len(self.stem)
        if k < s:
            return self.stem[k]
        return self.cycle[(k - s) % len(self.cycle)]

    def check_edges(self, arena: Arena) -> None:
        seq = list(self.stem) + list(self.cycle) + [self.cycle[0]]
        for v in seq:
            if v not in arena.index:
                raise ArenaError(f"unknown vertex {v} in lasso")
        for a, b in zip(seq, seq[1:]):
            if not arena.has_edge(a, b):
                raise ArenaError(f"lasso step {a} -> {b} is not an edge")

    def __str__(self) -> str:
        return (" ".join(self.stem) + " | " + " ".join(self.cycle)).strip()


def unroll(lasso: Lasso, k: int) -> list[str]:
    if k < 0:
        raise ValueError("k must be non-negative")
    return [lasso.at(i) for i in range(k)]


@dataclass
class MooreStrategy:
    """Finite-memory strategy ``(M, m0, update, next)`` for one player.

    ``update[(m, v)]`` is the memory after reading ``v`` in memory ``m``;
    ``next[(m, v)]`` is the chosen successor at a vertex ``v`` of
    ``player`` when the memory (updated on the history before ``v``) is
    ``m``.  ``labels`` optionally records what each memory state stands for.
    """

    player: int
    memory: tuple[str, ...]
    initial: str
    update: dict[tuple[str, str], str]
    next: dict[tuple[str, str], str]
    labels: dict[str, object] = field(default_factory=dict, compare=False)

    @property
    def size(self) -> int:
        return len(self.memory)

    @classmethod
    def memoryless(cls, player: int, choice: Mapping[str, str], arena: Arena) -> "MooreStrategy":
        m = "m0"
        nxt = {}
        for i, v in enumerate(arena.ids):
            if arena.owner[i] == player:
                nxt[(m, v)] = choice.get(v, arena.ids[arena.succ[i][0]])
        return cls(player, (m,), m, {(m, v): m for v in arena.ids}, nxt)

    def check(self, arena: Arena) -> None:
        if self.player not in (P1, P2):
            raise StrategyError(f"invalid player {self.player}")
        mem = set(self.memory)
        if self.initial not in mem:
            raise StrategyError(f"initial memory {self.initial} not in memory set")
        for m in self.memory:
            for i, v in enumerate(arena.ids):
                u = self.update.get((m, v))
                if u is None or u not in mem:
                    raise StrategyError(f"update undefined or invalid at ({m}, {v})")
                if arena.owner[i] == self.player:
                    w = self.next.get((m, v))
                    if w is None or w not in arena.index or not arena.has_edge(v, w):
                        raise StrategyError(f"next({m}, {v}) = {w} is not a successor of {v}")

    def reachable_memory(self, arena: Arena, initial: str | Iterable[str] | None = None) -> set[str]:
        starts = arena.ids if initial is None else ([initial] if isinstance(initial, str) else list(initial))
        seen = set()
        stack = [(self.initial, v) for v in starts]
        while stack:
            m, v = stack.pop()
            if (m, v) in seen:
                continue
            seen.add((m, v))
            m2 = self.update[(m, v)]
            if arena.owner_of(v) == self.player:
                succs = [self.next[(m, v)]]
            else:
                succs = arena.successors(v)
            stack.extend((m2, w) for w in succs)
        return {m for m, _ in seen}


def outcome(
    arena: Arena,
    initial: str,
    strategy1: MooreStrategy,
    strategy2: MooreStrategy,
) -> Lasso:
    """The unique play consistent with both strategies, as a lasso."""
    seen: dict[tuple[str, str, str], int] = {}
    seq: list[str] = []
    m1, m2, v = strategy1.initial, strategy2.initial, initial
    while (v, m1, m2) not in seen:
        seen[(v, m1, m2)] = len(seq)
        seq.append(v)
        own = arena.owner_of(v)
        w = (strategy1 if own == P1 else strategy2).next[(m1 if own == P1 else m2, v)]
        m1, m2 = strategy1.update[(m1, v)], strategy2.update[(m2, v)]
        v = w
    k = seen[(v, m1, m2)]
    return Lasso(tuple(seq[:k]), tuple(seq[k:]))
