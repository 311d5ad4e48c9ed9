"""Reachability, safety, Büchi, co-Büchi, parity and generalized reachability."""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .core import Arena, WinparError, P1, P2, opponent
from .graph import Game, WinningRegions, attractor, first_successor, rank_successor
from .product import ProductArena


def _to_mask(arena: Arena, vs: Iterable[str]) -> np.ndarray:
    m = np.zeros(len(arena), dtype=bool)
    for v in vs:
        m[arena.index[v]] = True
    return m


def _regions(mask1, s1, s2, ids=None) -> WinningRegions:
    return WinningRegions(mask1, s1, s2, ids)


# game-level algorithms -----------------------------------------------------


def reach_game(game: Game, target: np.ndarray, player: int = P1, alive=None) -> WinningRegions:
    """``player`` tries to reach ``target``."""
    if alive is None:
        alive = np.ones(game.n, dtype=bool)
    opp = opponent(player)
    is_p = game.owner == player
    win, rank = attractor(game, player, target, alive)
    sp = rank_successor(game, win & is_p, rank)
    first_successor(game, win & is_p & (rank == 0), alive, sp)
    so = first_successor(game, alive & ~win & ~is_p, alive & ~win)
    if player == P1:
        return _regions(win, sp, so)
    return _regions(alive & ~win, so, sp)


def safety_game(game: Game, safe: np.ndarray, player: int = P1, alive=None) -> WinningRegions:
    """``player`` tries to stay inside ``safe`` forever."""
    if alive is None:
        alive = np.ones(game.n, dtype=bool)
    return reach_game(game, alive & ~safe, opponent(player), alive)


def buchi_game(game: Game, accepting: np.ndarray, player: int = P1, alive=None) -> WinningRegions:
    """``player`` tries to visit ``accepting`` infinitely often.

    Classical fixpoint: repeatedly drop the opponent attractor of the
    region from which ``accepting`` cannot be reached.
    """
    n = game.n
    alive = np.ones(n, dtype=bool) if alive is None else alive.copy()
    opp = opponent(player)
    is_p = game.owner == player
    sp = np.full(n, -1, dtype=np.int64)
    so = np.full(n, -1, dtype=np.int64)
    lost = np.zeros(n, dtype=bool)
    while alive.any():
        reach, rank = attractor(game, player, accepting & alive, alive)
        trap = alive & ~reach
        if not trap.any():
            rank_successor(game, alive & is_p, rank, sp)
            first_successor(game, alive & is_p & (rank == 0), alive, sp)
            break
        first_successor(game, trap & ~is_p, trap, so)
        escape, r2 = attractor(game, opp, trap, alive)
        rank_successor(game, escape & ~is_p, r2, so)
        lost |= escape
        alive &= ~escape
    if player == P1:
        return _regions(alive, sp, so)
    return _regions(lost, so, sp)


def cobuchi_game(game: Game, allowed: np.ndarray, player: int = P1, alive=None) -> WinningRegions:
    """``player`` tries to eventually stay inside ``allowed``."""
    full = np.ones(game.n, dtype=bool) if alive is None else alive
    return buchi_game(game, full & ~allowed, opponent(player), alive)


def parity_game(game: Game, prio: np.ndarray) -> WinningRegions:
    """Zielonka's recursive algorithm, min-parity, player 1 wins on even."""
    n = game.n
    choice = np.full(n, -1, dtype=np.int64)
    is1 = game.owner == P1

    def solve(alive: np.ndarray) -> np.ndarray:
        # returns the player-1 region of the subgame
        if not alive.any():
            return np.zeros(n, dtype=bool)
        p = int(prio[alive].min())
        player = P1 if p % 2 == 0 else P2
        is_p = is1 if player == P1 else ~is1
        top = alive & (prio == p)
        a, rank = attractor(game, player, top, alive)
        sub1 = solve(alive & ~a)
        sub_opp = (alive & ~a & ~sub1) if player == P1 else sub1
        if not sub_opp.any():
            rank_successor(game, a & is_p, rank, choice)
            first_successor(game, top & is_p, alive, choice)
            return alive.copy() if player == P1 else np.zeros(n, dtype=bool)
        b, rank_b = attractor(game, opponent(player), sub_opp, alive)
        rank_successor(game, b & ~is_p, rank_b, choice)
        rest1 = solve(alive & ~b)
        if player == P1:
            return rest1
        return rest1 | b

    w1 = solve(np.ones(n, dtype=bool))
    s1 = np.where(w1 & is1, choice, -1)
    s2 = np.where(~w1 & ~is1, choice, -1)
    return _regions(w1, s1, s2)


# arena-level API -------------------------------------------------------------


def attractor_set(arena: Arena, player: int, target: Iterable[str]):
    """Attractor of ``target`` for ``player`` with its rank-decreasing strategy."""
    game = arena.game
    mask, rank = attractor(game, player, _to_mask(arena, target))
    strat = rank_successor(game, mask & (game.owner == player), rank)
    choice = {arena.ids[i]: arena.ids[int(strat[i])] for i in np.flatnonzero(strat >= 0)}
    return arena.names(np.flatnonzero(mask)), choice


def solve_reachability(arena: Arena, target: Iterable[str]) -> WinningRegions:
    r = reach_game(arena.game, _to_mask(arena, target))
    r.ids = arena.ids
    return r


def solve_safety(arena: Arena, safe: Iterable[str]) -> WinningRegions:
    r = safety_game(arena.game, _to_mask(arena, safe))
    r.ids = arena.ids
    return r


def solve_buchi(arena: Arena, accepting: Iterable[str]) -> WinningRegions:
    r = buchi_game(arena.game, _to_mask(arena, accepting))
    r.ids = arena.ids
    return r


def solve_cobuchi(arena: Arena, allowed: Iterable[str]) -> WinningRegions:
    r = cobuchi_game(arena.game, _to_mask(arena, allowed))
    r.ids = arena.ids
    return r


def solve_parity(arena: Arena, dim: int | None = None) -> WinningRegions:
    if dim is None:
        if arena.n > 1:
            raise WinparError("parity backend is one-dimensional")
        dim = 0
    r = parity_game(arena.game, arena.prio_arrays[dim])
    r.ids = arena.ids
    return r


def genreach_product(arena: Arena, targets: Sequence[Iterable[str]]) -> ProductArena:
    """Product tracking which target sets have been visited so far."""
    k = len(targets)
    if k < 1:
        raise WinparError("genreach needs at least one target set")
    bits = [0] * len(arena)
    for t, vs in enumerate(targets):
        for v in vs:
            bits[arena.index[v]] |= 1 << t
    full = (1 << k) - 1

    def step(mask, w):
        return mask | bits[w]

    prod = ProductArena(arena, 0, step)
    prod.build(accept=lambda v, q: q == full)
    prod.objective = "reach"
    prod.label = "genreach"
    return prod


def solve_genreach(arena: Arena, targets: Sequence[Iterable[str]]):
    """Returns the source-level regions and the solved visited-set product."""
    prod = genreach_product(arena, targets)
    pr = reach_game(prod.game, prod.good)
    mask1 = pr.mask1[prod.initial]
    none = np.full(len(arena), -1, dtype=np.int64)
    return WinningRegions(mask1, none, none.copy(), arena.ids), prod, pr
