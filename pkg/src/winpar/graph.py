"""Compressed game graphs and vectorised attractor computation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _csr(keys: np.ndarray, vals: np.ndarray, n: int):
    order = np.lexsort((vals, keys))
    keys, vals = keys[order], vals[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(keys, minlength=n), out=indptr[1:])
    return indptr, keys, vals


def gather(indptr: np.ndarray, indices: np.ndarray, nodes: np.ndarray) -> np.ndarray:
    """Concatenate the adjacency slices of ``nodes``."""
    starts = indptr[nodes]
    lens = indptr[nodes + 1] - starts
    total = int(lens.sum())
    if total == 0:
        return indices[:0]
    offs = np.repeat(starts - np.cumsum(lens) + lens, lens) + np.arange(total)
    return indices[offs]


class Game:
    """Two-player game graph over vertices ``0..n-1`` in CSR form.

    ``owner`` holds 1 or 2 per vertex.  Edges are deduplicated and sorted
    by (source, target), so "first matching edge" means lowest-index
    successor.
    """

    def __init__(self, owner, src, dst):
        self.owner = np.asarray(owner, dtype=np.int8)
        self.n = n = len(self.owner)
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        if src.size:
            packed = np.unique(src * max(n, 1) + dst)
            src, dst = packed // max(n, 1), packed % max(n, 1)
        self.indptr, self.esrc, self.edst = _csr(src, dst, n)
        self.pindptr, _, self.pindices = _csr(dst, src, n)
        self.out_degree = np.diff(self.indptr)

    @property
    def num_edges(self) -> int:
        return int(self.esrc.size)

    def successors(self, v: int) -> np.ndarray:
        return self.edst[self.indptr[v]:self.indptr[v + 1]]

    def predecessors(self, v: int) -> np.ndarray:
        return self.pindices[self.pindptr[v]:self.pindptr[v + 1]]

    def mask(self, items=()) -> np.ndarray:
        m = np.zeros(self.n, dtype=bool)
        idx = np.fromiter(items, dtype=np.int64) if not isinstance(items, np.ndarray) else items
        if idx.size:
            m[idx] = True
        return m


def attractor(game: Game, player: int, target: np.ndarray, alive: np.ndarray | None = None):
    """Vertices from which ``player`` forces a visit to ``target``.

    Computed inside the subgame ``alive`` (all vertices by default), which
    must be closed for the opponent's moves where that matters.  Returns
    the attractor mask and the layer rank of each vertex (-1 outside).
    """
    n = game.n
    if alive is None:
        alive = np.ones(n, dtype=bool)
    attr = target & alive
    rank = np.full(n, -1, dtype=np.int64)
    rank[attr] = 0
    live_edge = alive[game.edst]
    count = np.bincount(game.esrc[live_edge], minlength=n)
    is_player = game.owner == player
    frontier = np.flatnonzero(attr)
    layer = 0
    while frontier.size:
        layer += 1
        pred = gather(game.pindptr, game.pindices, frontier)
        pred = pred[alive[pred] & ~attr[pred]]
        if not pred.size:
            break
        mine = is_player[pred]
        grab = pred[mine]
        theirs = pred[~mine]
        if theirs.size:
            u, c = np.unique(theirs, return_counts=True)
            count[u] -= c
            grab = np.concatenate((grab, u[count[u] == 0]))
        frontier = np.unique(grab)
        attr[frontier] = True
        rank[frontier] = layer
    return attr, rank


def first_successor(game: Game, sources: np.ndarray, allowed: np.ndarray, out: np.ndarray | None = None):
    """For each vertex in mask ``sources``, its lowest successor in mask ``allowed``."""
    if out is None:
        out = np.full(game.n, -1, dtype=np.int64)
    sel = sources[game.esrc] & allowed[game.edst]
    s, t = game.esrc[sel], game.edst[sel]
    if s.size:
        u, idx = np.unique(s, return_index=True)
        out[u] = t[idx]
    return out


def rank_successor(game: Game, sources: np.ndarray, rank: np.ndarray, out: np.ndarray | None = None):
    """Lowest successor with strictly smaller non-negative attractor rank."""
    if out is None:
        out = np.full(game.n, -1, dtype=np.int64)
    rs, rd = rank[game.esrc], rank[game.edst]
    sel = sources[game.esrc] & (rs > 0) & (rd >= 0) & (rd < rs)
    s, t = game.esrc[sel], game.edst[sel]
    if s.size:
        u, idx = np.unique(s, return_index=True)
        out[u] = t[idx]
    return out


@dataclass
class WinningRegions:
    """Partition of the vertices plus memoryless strategies.

    ``strategy1[v]`` is the chosen successor for a player-1 vertex of the
    player-1 region (-1 elsewhere), likewise ``strategy2``.  When ``ids``
    is set, the set views return vertex names instead of indices.
    """

    mask1: np.ndarray
    strategy1: np.ndarray
    strategy2: np.ndarray
    ids: tuple | None = None

    def _names(self, mask):
        idx = np.flatnonzero(mask)
        if self.ids is None:
            return frozenset(int(i) for i in idx)
        return frozenset(self.ids[i] for i in idx)

    @property
    def win1(self) -> frozenset:
        return self._names(self.mask1)

    @property
    def win2(self) -> frozenset:
        return self._names(~self.mask1)

    def winner(self, v) -> int:
        i = self.ids.index(v) if self.ids is not None and not isinstance(v, (int, np.integer)) else v
        return 1 if self.mask1[i] else 2

    def choice(self, player: int) -> dict:
        """Memoryless choices of ``player`` on its region, keyed like the sets."""
        strat = self.strategy1 if player == 1 else self.strategy2
        out = {}
        for i in np.flatnonzero(strat >= 0):
            j = int(strat[i])
            if self.ids is None:
                out[int(i)] = j
            else:
                out[self.ids[i]] = self.ids[j]
        return out
