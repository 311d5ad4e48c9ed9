"""Moore strategies from solved products, strategy restriction, and exact verification."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import product as cartesian
from typing import Iterable, Iterator, Sequence

import numpy as np

from .core import (
    Arena,
    Kind,
    Lasso,
    MooreStrategy,
    ObjectiveSpec,
    P1,
    P2,
    StrategyError,
    WinparError,
    opponent,
    outcome,
)
from .graph import rank_successor
from .objectives import preceq
from .reductions import DEFAULT_MAX_STATES, SolveResult, solve

DEAD = "dead"
ATTRACT = "attract"


class _Namer:
    def __init__(self, first):
        self.names: dict = {}
        self.get(first)

    def get(self, mem) -> str:
        name = self.names.get(mem)
        if name is None:
            name = f"m{len(self.names)}"
            self.names[mem] = name
        return name


def _first(arena: Arena, v: int) -> int:
    return arena.succ[v][0]


def _assemble(arena: Arena, player: int, m0, rule, starts: Iterable[int]) -> MooreStrategy:
    """Explore ``rule(mem, v) -> (new_mem, choice or None)`` from ``(m0, v)`` for each start.

    Only memory reached from a start is kept; the maps are then made
    total, sending unexplored memory updates back to ``m0``.
    """
    namer = _Namer(m0)
    update, nxt = {}, {}
    seen = set()
    queue = deque((m0, v) for v in starts)
    while queue:
        mem, v = queue.popleft()
        if (mem, v) in seen:
            continue
        seen.add((mem, v))
        new, choice = rule(mem, v)
        namer.get(new)
        update[(mem, v)] = new
        if arena.owner[v] == player:
            if choice is None or choice < 0:
                choice = _first(arena, v)
            nxt[(mem, v)] = choice
            queue.append((new, choice))
        else:
            queue.extend((new, w) for w in arena.succ[v])
    mems = list(namer.names)
    # pairs never met from a start are free; copy an explored entry at the same
    # vertex so that minimization can merge more memory states
    sample = {}
    for (mem, v) in update:
        sample.setdefault(v, mem)
    up, ne = {}, {}
    for mem in mems:
        for v in range(len(arena)):
            if (mem, v) not in update:
                other = sample.get(v)
                update[(mem, v)] = update[(other, v)] if other is not None else m0
                if arena.owner[v] == player:
                    nxt[(mem, v)] = nxt[(other, v)] if other is not None else _first(arena, v)
            name, vid = namer.names[mem], arena.ids[v]
            up[(name, vid)] = namer.names[update[(mem, v)]]
            if arena.owner[v] == player:
                ne[(name, vid)] = arena.ids[nxt[(mem, v)]]
    labels = {name: mem for mem, name in namer.names.items()}
    return minimize(MooreStrategy(player, tuple(namer.names[m] for m in mems), "m0", up, ne, labels), arena)


def minimize(strategy: MooreStrategy, arena: Arena) -> MooreStrategy:
    """Merge behaviourally equivalent memory states and drop unreachable ones."""
    own = [v for i, v in enumerate(arena.ids) if arena.owner[i] == strategy.player]
    def renumber(sig):
        ids: dict = {}
        return {m: ids.setdefault(k, len(ids)) for m, k in sig.items()}

    block = renumber({m: tuple(strategy.next[(m, v)] for v in own) for m in strategy.memory})
    while True:
        refined = renumber({m: (block[m],) + tuple(block[strategy.update[(m, v)]] for v in arena.ids)
                            for m in strategy.memory})
        if len(set(refined.values())) == len(set(block.values())):
            break
        block = refined
    # rename classes in breadth-first order from the initial memory
    names: dict = {}
    rep: dict = {}
    queue = deque([strategy.initial])
    while queue:
        m = queue.popleft()
        if block[m] in names:
            continue
        names[block[m]] = f"m{len(names)}"
        rep[block[m]] = m
        queue.extend(strategy.update[(m, v)] for v in arena.ids)
    memory = tuple(names.values())
    update, nxt, labels = {}, {}, {}
    for b, name in names.items():
        m = rep[b]
        labels[name] = strategy.labels.get(m, m)
        for v in arena.ids:
            update[(name, v)] = names[block[strategy.update[(m, v)]]]
        for v in own:
            nxt[(name, v)] = strategy.next[(m, v)]
    return MooreStrategy(strategy.player, memory, "m0", update, nxt, labels)


def _product_rule(prod, strat: np.ndarray):
    def rule(mem, v):
        if mem == DEAD:
            return DEAD, None
        s, new = prod.resolve(mem, v)
        if s is None:
            return DEAD, None
        if new is None:
            new = DEAD
        t = int(strat[s])
        if t < 0:
            return new, None
        w = int(prod.source_of[t])
        if w < 0:
            # heading for the absorbing state: take a move that overflows
            w = next(x for x in prod.source.succ[v] if prod.step(new, x) is None)
        return new, w

    return rule


def _rr_layered_rule(arena: Arena, sol):
    prod = sol.product
    is1 = np.asarray(arena.owner) == P1
    pulls = [rank_successor(arena.game, layer.region & is1, layer.rank) for layer in sol.layers]

    def rule(mem, v):
        k = sol.layer_of(v)
        if k is None:
            return ATTRACT, None
        layer = sol.layers[k]
        if mem != ATTRACT and mem[0] == k:
            s, q = prod.resolve(mem[1], v)
        elif layer.seeds[v]:
            s, q = prod.resolve(prod.m0, v)
        else:
            return ATTRACT, int(pulls[k][v])
        t = int(layer.product_regions.strategy1[s])
        return (k, q), (int(prod.source_of[t]) if t >= 0 else None)

    return rule


def extract_strategy(result: SolveResult, player: int) -> MooreStrategy:
    """Finite-memory winning strategy for ``player`` from the solved instance.

    Memory is the product payload (window state, counters, history,
    visited set or pending requests), pruned to what is reachable from
    the player's winning queried vertices.
    """
    arena = result.arena
    if result.spec.kind.is_bounded and player == P2:
        if not result.spec.direct:
            raise StrategyError("no finite certificate produced")
        if result.rr is None:
            # the threshold product only certifies bounded violations; the
            # pending-request product certifies a request left open forever
            queried = result.queried
            result = solve(arena, result.spec, via="rr")
            result.queried = queried
    mask = result.regions.mask1 if player == P1 else ~result.regions.mask1
    starts = [arena.index[v] for v in result.queried if mask[arena.index[v]]]
    if not starts:
        raise StrategyError(f"player {player} wins from no queried vertex")
    if result.product is None and result.rr is None:
        regions = result.regions
        strat = regions.strategy1 if player == P1 else regions.strategy2
        return _assemble(arena, player, "m", lambda m, v: ("m", int(strat[v])), starts)
    if result.rr is not None and result.product is None:
        # no request can ever be raised
        return _assemble(arena, player, "m", lambda m, v: ("m", None), starts)
    if result.rr is not None and not result.rr.direct:
        if player == P2:
            raise StrategyError("no finite certificate produced")
        return _assemble(arena, player, ATTRACT, _rr_layered_rule(arena, result.rr), starts)
    pr = result.product_regions
    strat = pr.strategy1 if player == P1 else pr.strategy2
    prod = result.product
    return _assemble(arena, player, prod.m0, _product_rule(prod, strat), starts)


def restrict_arena(arena: Arena, strategy: MooreStrategy):
    """Arena of pairs ``(v, m)`` in which the strategy owner has no choice left.

    Returns the arena (ids ``v@m``) and the map from its ids to pairs.
    """
    strategy.check(arena)
    pl = strategy.player
    seen: dict[tuple[str, str], str] = {}
    order = []
    edges = []
    queue = deque()

    def add(v, m):
        key = (v, m)
        if key not in seen:
            seen[key] = f"{v}@{m}"
            order.append(key)
            queue.append(key)
        return seen[key]

    for v in arena.ids:
        add(v, strategy.initial)
    while queue:
        v, m = queue.popleft()
        m2 = strategy.update[(m, v)]
        succ = [strategy.next[(m, v)]] if arena.owner_of(v) == pl else arena.successors(v)
        for w in succ:
            edges.append((seen[(v, m)], add(w, m2)))
    verts = [(seen[k], arena.owner_of(k[0]), arena.priorities[arena.index[k[0]]]) for k in order]
    restricted = Arena(verts, edges, max_priority=arena.d_dims)
    return restricted, {seen[k]: k for k in order}


@dataclass
class Verdict:
    winning: bool
    counterexample: Lasso | None = None
    note: str = ""
    restricted_size: int = 0

    def __bool__(self) -> bool:
        return self.winning


def _lift_spec(spec: ObjectiveSpec, state_map: dict) -> ObjectiveSpec:
    if not spec.targets:
        return spec
    targets = tuple(frozenset(r for r, (v, _) in state_map.items() if v in t) for t in spec.targets)
    return ObjectiveSpec(spec.kind, spec.direct, spec.lam, targets)


def _follow(game, start: int, choice: np.ndarray) -> tuple[list[int], list[int]]:
    """Unique play from ``start`` where branching states use ``choice``."""
    pos: dict[int, int] = {}
    seq: list[int] = []
    s = start
    while s not in pos:
        pos[s] = len(seq)
        seq.append(s)
        succ = game.successors(s)
        if len(succ) == 1 or choice[s] < 0:
            s = int(succ[0])
        else:
            s = int(choice[s])
    k = pos[s]
    return seq[:k], seq[k:]


def _shortest(stem: list, cycle: list) -> Lasso:
    while stem and stem[-1] == cycle[-1]:
        stem.pop()
        cycle = cycle[-1:] + cycle[:-1]
    n = len(cycle)
    for p in range(1, n + 1):
        if n % p == 0 and cycle == cycle[:p] * (n // p):
            cycle = cycle[:p]
            break
    return Lasso(tuple(stem), tuple(cycle))


def _project(names: Sequence[str], state_map: dict, stem: Sequence[int], cycle: Sequence[int]) -> Lasso:
    return _shortest([state_map[names[i]][0] for i in stem], [state_map[names[i]][0] for i in cycle])


def _product_lasso(res: SolveResult, start: str, winner: int, state_map: dict) -> Lasso | None:
    ra = res.arena
    if res.product is None:
        regions = res.regions
        choice = regions.strategy1 if winner == P1 else regions.strategy2
        stem, cycle = _follow(ra.game, ra.index[start], choice)
        return _project(ra.ids, state_map, stem, cycle)
    prod, pr = res.product, res.product_regions
    choice = pr.strategy1 if winner == P1 else pr.strategy2
    stem, cycle = _follow(prod.game, int(prod.initial[ra.index[start]]), choice)
    src = prod.source_of

    def keep(states):
        return [int(src[s]) for s in states if not prod.is_beta[s]]

    stem_v, cycle_v = keep(stem), keep(cycle)
    if not cycle_v:
        # absorbed after a violated prefix: step into the overflow and continue arbitrarily
        last = stem[-1] if stem and not prod.is_beta[stem[-1]] else None
        if last is None:
            return None
        key = prod.key(last)
        mem = prod.memory_of(*key)
        w = next((w for w in ra.succ[key[0]] if prod.step(mem, w) is None), None)
        if w is None:
            return None
        tail, loop = _follow(ra.game, w, np.full(len(ra), -1))
        return _project(ra.ids, state_map, stem_v + tail, loop)
    return _project(ra.ids, state_map, stem_v, cycle_v)


def _bfs_path(ra: Arena, sources: Iterable[int], goal, allowed=None) -> list[int] | None:
    """Shortest path (as vertex list) from any source to a vertex satisfying ``goal``."""
    parent = {}
    queue = deque()
    for s in sources:
        if s not in parent and (allowed is None or allowed(s)):
            parent[s] = None
            queue.append(s)
    while queue:
        x = queue.popleft()
        if goal(x):
            path = []
            while x is not None:
                path.append(x)
                x = parent[x]
            return path[::-1]
        for y in ra.succ[x]:
            if y not in parent and (allowed is None or allowed(y)):
                parent[y] = x
                queue.append(y)
    return None


def _cycle_through(ra: Arena, u: int, allowed) -> list[int] | None:
    path = _bfs_path(ra, [y for y in ra.succ[u] if allowed(y)], lambda x: x == u, allowed)
    if path is None:
        return None
    return [u] + path[:-1]


def _unanswered_lasso(ra: Arena, start: int, direct: bool) -> tuple[list[int], list[int]] | None:
    """Lasso on which some odd priority is never answered again (one-player graph)."""
    everything = lambda x: True
    for m in range(ra.n):
        odd = sorted({p[m] for p in ra.priorities if p[m] % 2})
        for c in odd:
            inside = lambda x, m=m, c=c: not preceq(ra.priorities[x][m], c)
            hits = [u for u in range(len(ra)) if ra.priorities[u][m] == c]
            for u in hits:
                cyc = _cycle_through(ra, u, inside)
                if cyc is None:
                    continue
                stem = _bfs_path(ra, [start], lambda x: x == u, everything)
                if stem is not None:
                    return stem[:-1], cyc
            if not direct:
                continue
            for u in hits:
                stem = _bfs_path(ra, [start], lambda x: x == u, everything)
                if stem is None:
                    continue
                tail = _bfs_path(ra, [u], lambda x: _cycle_through(ra, x, inside) is not None, inside)
                if tail is None:
                    continue
                x = tail[-1]
                return stem[:-1] + tail[:-1], _cycle_through(ra, x, inside)
    return None


def verify_strategy(arena: Arena, strategy: MooreStrategy, spec: ObjectiveSpec, initial: str,
                    max_states: int | None = DEFAULT_MAX_STATES) -> Verdict:
    """Decide exactly whether ``strategy`` wins ``spec`` (or its complement for player 2) from ``initial``.

    On failure the counterexample is a play consistent with the strategy
    that violates its owner's objective.
    """
    if strategy.player not in (P1, P2):
        raise StrategyError(f"invalid player {strategy.player}")
    if initial not in arena.index:
        raise StrategyError(f"unknown initial vertex {initial}")
    ra, state_map = restrict_arena(arena, strategy)
    rspec = _lift_spec(spec, state_map)
    via = "rr" if spec.kind.is_bounded else None
    res = solve(ra, rspec, via=via, max_states=max_states)
    start = f"{initial}@{strategy.initial}"
    winning = res.winner(start) == strategy.player
    verdict = Verdict(winning, restricted_size=len(ra))
    if winning:
        return verdict
    opp = opponent(strategy.player)
    if not spec.kind.is_bounded:
        verdict.counterexample = _product_lasso(res, start, opp, state_map)
    elif opp == P2:
        found = _unanswered_lasso(ra, ra.index[start], spec.direct)
        if found is None:
            verdict.note = "opponent wins only by growing delays; no lasso witness exists"
        else:
            verdict.counterexample = _project(ra.ids, state_map, *found)
    else:
        strat1 = extract_strategy(res, P1)
        forced = MooreStrategy.memoryless(P2, {}, ra)
        lasso = outcome(ra, start, strat1, forced)
        verdict.counterexample = _shortest([state_map[v][0] for v in lasso.stem],
                                           [state_map[v][0] for v in lasso.cycle])
    if verdict.counterexample is None and not verdict.note:
        verdict.note = "no counterexample produced"
    return verdict


def enumerate_moore(arena: Arena, player: int, size: int, update_at: Iterable[str] = (),
                    choose_at: Iterable[str] | None = None) -> Iterator[MooreStrategy]:
    """All Moore machines of ``size`` states whose memory only changes at ``update_at``.

    Choices are enumerated at ``choose_at`` (default: every branching
    vertex of ``player``); other vertices of ``player`` take their first
    successor.  The initial memory is fixed to ``m0`` without loss of
    generality.
    """
    mem = tuple(f"m{i}" for i in range(size))
    update_at = list(update_at)
    if choose_at is None:
        choose_at = [v for i, v in enumerate(arena.ids) if arena.owner[i] == player and len(arena.succ[i]) > 1]
    choose_at = list(choose_at)
    upd_slots = [(m, v) for v in update_at for m in mem]
    nxt_slots = [(m, v) for v in choose_at for m in mem]
    nxt_opts = [arena.successors(v) for _, v in nxt_slots]
    base_update = {(m, v): m for m in mem for v in arena.ids}
    base_next = {(m, v): arena.successors(v)[0] for m in mem for i, v in enumerate(arena.ids)
                 if arena.owner[i] == player}
    for ups in cartesian(mem, repeat=len(upd_slots)):
        update = dict(base_update)
        update.update(zip(upd_slots, ups))
        for picks in cartesian(*nxt_opts):
            nxt = dict(base_next)
            nxt.update(zip(nxt_slots, picks))
            yield MooreStrategy(player, mem, "m0", dict(update), nxt)
