"""Explicit product arenas built on the fly from a memory-update rule.

A product is described by a start memory ``m0``, a function
``step(mem, w)`` giving the payload of the product state entered when the
source play moves to ``w`` (or ``None`` when the move overflows), and a
function ``memory_of(v, payload)`` giving the memory carried out of a
product state.  The same three functions later drive the Moore machines
extracted from product strategies.
"""

from __future__ import annotations

from collections import deque
from typing import Callable, Hashable

import numpy as np

from .core import Arena, WinparError, P1
from .graph import Game

BETA = "beta"

RESET = "reset"
ABSORB = "absorb"
NONE = "none"


class ProductTooLarge(WinparError):
    pass


def _payload_identity(v, q):
    return q


class ProductArena:
    """Product of a source arena with a deterministic memory structure.

    ``objective`` names the player-1 objective on the product: ``safety``
    or ``cobuchi`` over ``good`` (the non-bad states), ``buchi`` or
    ``reach`` towards ``good``.  State ``initial[v]`` is the canonical
    product state for source vertex ``v``.
    """

    kind = "product"

    def __init__(self, source: Arena, m0, step, memory_of=None, overflow: str = NONE):
        self.source = source
        self.m0 = m0
        self.step = step
        self.memory_of = memory_of or _payload_identity
        self.overflow = overflow
        self.objective = "safety"
        self.label = ""

    # generic construction -------------------------------------------------

    def build(self, max_states: int | None = None, accept: Callable | None = None, bad: Callable | None = None):
        src = self.source
        keys: list[Hashable] = []
        index: dict[Hashable, int] = {}
        esrc: list[int] = []
        edst: list[int] = []
        queue: deque[int] = deque()

        def add(key) -> int:
            i = index.get(key)
            if i is None:
                i = len(keys)
                if max_states is not None and i >= max_states:
                    raise ProductTooLarge(f"product exceeds {max_states} states")
                index[key] = i
                keys.append(key)
                queue.append(i)
            return i

        initial = []
        for v in range(len(src)):
            q = self.step(self.m0, v)
            if q is None:
                raise WinparError("start memory must not overflow")
            initial.append(add((v, q)))
        while queue:
            i = queue.popleft()
            key = keys[i]
            if key[0] == BETA:
                w = key[1]
                j = initial[w] if w is not None else i
                esrc.append(i)
                edst.append(j)
                continue
            v, q = key
            mem = self.memory_of(v, q)
            for w in src.succ[v]:
                q2 = self.step(mem, w)
                if q2 is not None:
                    j = add((w, q2))
                elif self.overflow == RESET:
                    j = add((BETA, w))
                elif self.overflow == ABSORB:
                    j = add((BETA, None))
                else:
                    raise WinparError("overflow in a product without bad states")
                esrc.append(i)
                edst.append(j)

        self._keys = keys
        self._index = index
        n = len(keys)
        self.initial = np.array(initial, dtype=np.int64)
        self.source_of = np.array([(-1 if k[1] is None else k[1]) if k[0] == BETA else k[0] for k in keys],
                                  dtype=np.int64)
        self.is_beta = np.array([k[0] == BETA for k in keys], dtype=bool)
        owner = np.array([P1 if k[0] == BETA else src.owner[k[0]] for k in keys], dtype=np.int8)
        self.game = Game(owner, esrc, edst)
        if accept is not None:
            self.good = np.array([(k[0] != BETA and bool(accept(*k))) for k in keys], dtype=bool)
        elif bad is not None:
            self.good = np.array([(k[0] != BETA and not bad(*k)) for k in keys], dtype=bool)
        else:
            self.good = ~self.is_beta
        self.n = n
        return self

    # lookup ---------------------------------------------------------------

    def __len__(self) -> int:
        return self.n

    def key(self, i: int):
        return self._keys[i]

    def find(self, key) -> int | None:
        return self._index.get(key)

    def resolve(self, mem, v: int):
        """Product state entered when the source play reaches ``v`` with memory ``mem``.

        Reset bookkeeping states are skipped; an absorbing overflow yields
        the absorbing state.  Returns the state index and the outgoing memory.
        """
        q = self.step(mem, v)
        if q is None:
            if self.overflow == RESET:
                q = self.step(self.m0, v)
            else:
                return self.find((BETA, None)), None
        i = self.find((v, q))
        return i, self.memory_of(v, q)

    def payload_count(self) -> int:
        return len({self.memory_of(*k) for k in (self.key(i) for i in range(self.n)) if k[0] != BETA})

    def describe_state(self, i: int) -> str:
        k = self.key(i)
        if k[0] == BETA:
            return "beta" if k[1] is None else f"beta[{self.source.ids[k[1]]}]"
        v, q = k
        return f"{self.source.ids[v]}|{_fmt(q)}"

    def to_arena(self) -> Arena:
        """The product as a plain arena (priority 0 on good states, 1 elsewhere)."""
        ids = [self.describe_state(i) for i in range(self.n)]
        verts = [(ids[i], int(self.game.owner[i]), (0 if self.good[i] else 1,)) for i in range(self.n)]
        edges = [(ids[a], ids[b]) for a, b in zip(self.game.esrc, self.game.edst)]
        return Arena(verts, edges)


def _fmt(q) -> str:
    if isinstance(q, tuple):
        return "(" + ",".join(_fmt(x) for x in q) + ")"
    return "_" if q is None else str(q)
