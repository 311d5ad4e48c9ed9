"""Product constructions for window and parity-response objectives, and the solver dispatcher."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import (
    Arena,
    ArenaError,
    Kind,
    ObjectiveSpec,
    P1,
    P2,
    SpecError,
    WinparError,
    validate_arena,
)
from .graph import Game, WinningRegions, attractor, gather
from .objectives import preceq
from .product import ABSORB, BETA, NONE, RESET, ProductArena, ProductTooLarge
from .solvers import (
    buchi_game,
    cobuchi_game,
    reach_game,
    safety_game,
    solve_buchi,
    solve_cobuchi,
    solve_genreach,
    solve_parity,
    solve_reachability,
    solve_safety,
)

THRESHOLD_CAP = 2**31 - 1
DEFAULT_MAX_STATES = 2_000_000
BOUNDED_BUDGET = 200_000


# window parity -------------------------------------------------------------


def _fixwp_step(arena: Arena, lam: int):
    prios = arena.priorities

    def step(mem, w):
        out = []
        for (c, l), p in zip(mem, prios[w]):
            if c % 2 == 0:
                out.append((p, 0))
            elif l < lam - 1:
                out.append((p if p < c else c, l + 1))
            else:
                return None
        return tuple(out)

    return ((0, 0),) * arena.n, step


class DenseWindowProduct(ProductArena):
    """One-dimension window product with states laid out as ``v*K + c*lam + l``.

    Only states reachable from the canonical initial states are kept; the
    transition relation is expanded with array operations, which keeps
    large instances tractable.
    """

    def __init__(self, source: Arena, lam: int, direct: bool):
        m0, step = _fixwp_step(source, lam)
        super().__init__(source, m0, step, overflow=ABSORB if direct else RESET)
        self.lam = lam
        self.width = (source.d + 1) * lam

    def build(self, max_states: int | None = None, **_):
        src, lam, K = self.source, self.lam, self.width
        nv = len(src)
        g = src.game
        prio = src.prio_arrays[0]
        base = nv * K
        beta_off = base
        seeds = np.arange(nv, dtype=np.int64) * K + prio * lam
        seen = np.zeros(base + (1 if self.overflow == ABSORB else nv), dtype=bool)
        seen[seeds] = True
        frontier = seeds
        es, ed = [], []
        count = int(seeds.size)
        while frontier.size:
            normal = frontier[frontier < base]
            betas = frontier[frontier >= base]
            reached = []
            if betas.size:
                t = (betas - beta_off) * K + prio[betas - beta_off] * lam if self.overflow == RESET else betas
                es.append(betas)
                ed.append(t)
                reached.append(t)
            if normal.size:
                v = normal // K
                r = normal % K
                deg = g.indptr[v + 1] - g.indptr[v]
                s = np.repeat(normal, deg)
                w = gather(g.indptr, g.edst, v)
                c = np.repeat(r // lam, deg)
                l = np.repeat(r % lam, deg)
                pw = prio[w]
                even = c % 2 == 0
                grow = ~even & (l < lam - 1)
                over = ~even & ~grow
                t = np.empty_like(s)
                t[even] = w[even] * K + pw[even] * lam
                t[grow] = w[grow] * K + np.minimum(c[grow], pw[grow]) * lam + l[grow] + 1
                t[over] = (beta_off + w[over]) if self.overflow == RESET else beta_off
                es.append(s)
                ed.append(t)
                reached.append(t)
            new = np.unique(np.concatenate(reached))
            new = new[~seen[new]]
            seen[new] = True
            count += int(new.size)
            if max_states is not None and count > max_states:
                raise ProductTooLarge(f"product exceeds {max_states} states")
            frontier = new
        states = np.flatnonzero(seen)
        self.states = states
        remap = np.full(seen.size, -1, dtype=np.int64)
        remap[states] = np.arange(states.size)
        src_e = remap[np.concatenate(es)] if es else np.zeros(0, dtype=np.int64)
        dst_e = remap[np.concatenate(ed)] if ed else np.zeros(0, dtype=np.int64)
        self.n = n = int(states.size)
        self.is_beta = states >= base
        vs = np.where(self.is_beta, (states - beta_off) if self.overflow == RESET else -1, states // K)
        self.source_of = vs
        owner = np.where(self.is_beta, P1, np.asarray(src.owner, dtype=np.int8)[np.maximum(vs, 0)])
        self.game = Game(owner, src_e, dst_e)
        self.good = ~self.is_beta
        self.initial = remap[seeds]
        self._base = base
        return self

    def key(self, i: int):
        s = int(self.states[i])
        if s >= self._base:
            return (BETA, s - self._base) if self.overflow == RESET else (BETA, None)
        v, r = divmod(s, self.width)
        c, l = divmod(r, self.lam)
        return (v, ((c, l),))

    def find(self, key):
        if key[0] == BETA:
            s = self._base + (key[1] if key[1] is not None else 0)
        else:
            v, ((c, l),) = key
            s = v * self.width + c * self.lam + l
        i = int(np.searchsorted(self.states, s))
        if i < self.n and self.states[i] == s:
            return i
        return None


def build_fixwp_product(arena: Arena, lam: int, direct: bool, max_states: int | None = DEFAULT_MAX_STATES,
                        dense: bool | None = None) -> ProductArena:
    """Product tracking the minimum and age of the currently open window per dimension.

    Overflowing a window leads to a bad state: one absorbing state for the
    direct variant (safety), a per-vertex reset state for the undirect
    variant (co-Büchi).
    """
    if lam < 1:
        raise SpecError("window size must be >= 1")
    if dense is None:
        dense = arena.n == 1
    if dense and arena.n == 1:
        prod = DenseWindowProduct(arena, lam, direct).build(max_states)
    else:
        m0, step = _fixwp_step(arena, lam)
        prod = ProductArena(arena, m0, step, overflow=ABSORB if direct else RESET).build(max_states)
    prod.objective = "safety" if direct else "cobuchi"
    prod.label = "fixwp"
    prod.lam = lam
    return prod


# parity response -----------------------------------------------------------


def response_slots(arena: Arena) -> list[tuple[int, int]]:
    """(dimension, odd priority) pairs that occur in the arena."""
    out = []
    for m in range(arena.n):
        odd = sorted({p[m] for p in arena.priorities if p[m] % 2})
        out.extend((m, c) for c in odd)
    return out


def build_fixpr_counter_product(arena: Arena, lam: int, direct: bool,
                                max_states: int | None = DEFAULT_MAX_STATES) -> ProductArena:
    """Product with one counter per (dimension, odd priority) measuring the oldest pending request."""
    if lam < 1:
        raise SpecError("window size must be >= 1")
    if lam == 1:
        prod = build_fixwp_product(arena, 1, direct, max_states)
        prod.label = "fixpr"
        return prod
    slots = response_slots(arena)
    prios = arena.priorities
    top = lam - 2

    def step(mem, w):
        pw = prios[w]
        out = []
        for (m, c), l in zip(slots, mem):
            p = pw[m]
            answered = p % 2 == 0 and p <= c
            if l is not None:
                if answered:
                    out.append(None)
                elif l == top:
                    return None
                else:
                    out.append(l + 1)
            else:
                out.append(0 if p == c else None)
        return tuple(out)

    prod = ProductArena(arena, (None,) * len(slots), step, overflow=ABSORB if direct else RESET)
    prod.build(max_states)
    prod.objective = "safety" if direct else "cobuchi"
    prod.label = "fixpr"
    prod.lam = lam
    prod.slots = slots
    return prod


def build_fixpr_history_product(arena: Arena, lam: int, direct: bool = False,
                                max_states: int | None = DEFAULT_MAX_STATES) -> ProductArena:
    """Product remembering the last ``lam - 1`` vertices; a state is bad when
    the oldest remembered position has not been answered within the window."""
    if arena.n != 1:
        raise WinparError("history product is one-dimensional")
    if lam < 1:
        raise SpecError("window size must be >= 1")
    prio = [p[0] for p in arena.priorities]
    pad = arena.d

    def pr(v):
        return pad if v < 0 else prio[v]

    def step(mem, w):
        return mem

    def memory_of(v, hist):
        return (hist + (v,))[1:]

    def bad(v, hist):
        seq = hist + (v,)
        first = pr(seq[0])
        return not any(preceq(pr(u), first) for u in seq)

    prod = ProductArena(arena, (-1,) * (lam - 1), step, memory_of, overflow=NONE)
    prod.build(max_states, bad=bad)
    prod.objective = "safety" if direct else "cobuchi"
    prod.label = "history"
    prod.lam = lam
    return prod


# bounded variants ------------------------------------------------------------


def bounded_threshold(arena: Arena, kind) -> int:
    """Window size from which the fixed objective has the same winners as the bounded one."""
    fam = kind.family if isinstance(kind, Kind) else str(kind).upper()
    if fam not in ("PR", "WP"):
        raise SpecError(f"unknown family {kind}")
    nv, n, half = len(arena), arena.n, arena.d // 2
    if n == 1:
        lam = nv if fam == "PR" else half * nv
    else:
        b = nv * 2 ** (n * half) * n * half
        lam = b if fam == "PR" else b * half
    if lam > THRESHOLD_CAP:
        raise WinparError("instance too large for bounded solving")
    return max(lam, 1)


def build_rr_instance(arena: Arena) -> list[tuple[frozenset[str], frozenset[str]]]:
    """Request/response pairs: requests of odd ``c`` in dimension ``m`` and their answers."""
    pairs = []
    for m in range(arena.n):
        odd = sorted({p[m] for p in arena.priorities if p[m] % 2}, reverse=True)
        for c in odd:
            rq = frozenset(v for i, v in enumerate(arena.ids) if arena.priorities[i][m] == c)
            rp = frozenset(v for i, v in enumerate(arena.ids) if preceq(arena.priorities[i][m], c))
            if rq:
                pairs.append((rq, rp))
    return pairs


def build_rr_product(arena: Arena, pairs, max_states: int | None = DEFAULT_MAX_STATES) -> ProductArena:
    """Pending-request set plus a round-robin pointer; Büchi on pointer wrap-around."""
    r = len(pairs)
    req = [0] * len(arena)
    resp = [0] * len(arena)
    for k, (rq, rp) in enumerate(pairs):
        for v in rq:
            req[arena.index[v]] |= 1 << k
        for v in rp:
            resp[arena.index[v]] |= 1 << k
    width = max(r, 1)

    def step(mem, w):
        if mem is None:
            return (req[w] & ~resp[w], 0)
        pending, i = mem
        if not (pending >> i) & 1:
            i = (i + 1) % width
        return ((pending | req[w]) & ~resp[w], i)

    prod = ProductArena(arena, None, step, overflow=NONE)
    prod.build(max_states, accept=lambda v, q: q[1] == 0 and not q[0] & 1)
    prod.objective = "buchi"
    prod.label = "rr"
    prod.pairs = pairs
    return prod


@dataclass
class RRLayer:
    alive: np.ndarray
    seeds: np.ndarray
    region: np.ndarray
    rank: np.ndarray
    product_regions: WinningRegions


@dataclass
class RRSolution:
    product: ProductArena | None
    direct: bool
    mask1: np.ndarray
    product_regions: WinningRegions | None = None
    layers: list[RRLayer] = field(default_factory=list)

    def layer_of(self, v: int) -> int | None:
        for k, layer in enumerate(self.layers):
            if layer.region[v]:
                return k
        return None


def solve_request_response(arena: Arena, pairs, direct: bool, max_states: int | None = DEFAULT_MAX_STATES):
    """Winning regions for the bounded request-response objective.

    Direct: the Büchi product is won from the canonical initial state.
    Undirect: repeatedly take the vertices won directly inside the
    current subgame, remove their player-1 attractor, and recurse on the
    rest until nothing new is won.
    """
    nv = len(arena)
    if not pairs:
        mask = np.ones(nv, dtype=bool)
        regions = WinningRegions(mask, np.full(nv, -1), np.full(nv, -1), arena.ids)
        return regions, RRSolution(None, direct, mask)
    prod = build_rr_product(arena, pairs, max_states)
    none = np.full(nv, -1, dtype=np.int64)
    if direct:
        pr = buchi_game(prod.game, prod.good)
        mask = pr.mask1[prod.initial]
        return WinningRegions(mask, none, none.copy(), arena.ids), RRSolution(prod, True, mask, pr)
    alive = np.ones(nv, dtype=bool)
    win = np.zeros(nv, dtype=bool)
    sol = RRSolution(prod, False, win)
    while alive.any():
        pr = buchi_game(prod.game, prod.good, P1, alive[prod.source_of])
        seeds = alive & pr.mask1[prod.initial]
        if not seeds.any():
            break
        region, rank = attractor(arena.game, P1, seeds, alive)
        sol.layers.append(RRLayer(alive.copy(), seeds, region, rank, pr))
        win |= region
        alive &= ~region
    return WinningRegions(win, none, none.copy(), arena.ids), sol


# dispatcher --------------------------------------------------------------------


@dataclass
class SolveResult:
    spec: ObjectiveSpec
    arena: Arena
    queried: tuple[str, ...]
    regions: WinningRegions
    product: ProductArena | None = None
    product_regions: WinningRegions | None = None
    objective: str = ""
    thresholds: dict = field(default_factory=dict)
    via: str = "direct"
    rr: RRSolution | None = None

    @property
    def win1(self) -> frozenset[str]:
        return self.regions.win1 & frozenset(self.queried)

    @property
    def win2(self) -> frozenset[str]:
        return self.regions.win2 & frozenset(self.queried)

    def winner(self, v: str) -> int:
        return P1 if self.regions.mask1[self.arena.index[v]] else P2

    def product_size(self) -> int | None:
        return len(self.product) if self.product is not None else None


def _solve_product(prod: ProductArena) -> WinningRegions:
    g = prod.game
    if prod.objective == "safety":
        return safety_game(g, prod.good)
    if prod.objective == "cobuchi":
        return cobuchi_game(g, prod.good)
    if prod.objective == "buchi":
        return buchi_game(g, prod.good)
    return reach_game(g, prod.good)


def fixed_product(arena: Arena, family: str, lam: int, direct: bool, via: str | None = None,
                  max_states: int | None = DEFAULT_MAX_STATES) -> ProductArena:
    if family == "WP":
        return build_fixwp_product(arena, lam, direct, max_states)
    if via == "history":
        return build_fixpr_history_product(arena, lam, direct, max_states)
    return build_fixpr_counter_product(arena, lam, direct, max_states)


def _check_spec(arena: Arena, spec: ObjectiveSpec):
    for t in spec.targets:
        for v in t:
            if v not in arena.index:
                raise SpecError(f"unknown target vertex {v}")


def solve(arena: Arena, spec: ObjectiveSpec, initial: str | None = None, via: str | None = None,
          max_states: int | None = DEFAULT_MAX_STATES, bounded_budget: int = BOUNDED_BUDGET) -> SolveResult:
    """Solve ``spec`` on ``arena`` and project the result back to source vertices."""
    report = validate_arena(arena)
    if not report.ok:
        raise ArenaError("; ".join(report.violations))
    _check_spec(arena, spec)
    if initial is not None and initial not in arena.index:
        raise SpecError(f"unknown initial vertex {initial}")
    if via not in (None, "product", "rr", "history"):
        raise SpecError(f"unknown route {via}")
    queried = (initial,) if initial is not None else arena.ids
    kind = spec.kind
    base = dict(spec=spec, arena=arena, queried=queried)

    if kind is Kind.PARITY:
        return SolveResult(regions=solve_parity(arena), objective="parity", **base)
    if kind is Kind.REACH:
        return SolveResult(regions=solve_reachability(arena, spec.target), objective="reach", **base)
    if kind is Kind.SAFE:
        return SolveResult(regions=solve_safety(arena, spec.target), objective="safety", **base)
    if kind is Kind.BUCHI:
        return SolveResult(regions=solve_buchi(arena, spec.target), objective="buchi", **base)
    if kind is Kind.COBUCHI:
        return SolveResult(regions=solve_cobuchi(arena, spec.target), objective="cobuchi", **base)
    if kind is Kind.GENREACH:
        regions, prod, pr = solve_genreach(arena, spec.targets)
        return SolveResult(regions=regions, product=prod, product_regions=pr, objective="reach",
                           via="product", **base)

    family = kind.family
    if via == "history" and (family != "PR" or arena.n != 1):
        raise SpecError("history route applies to one-dimension parity-response only")
    if kind.is_fixed:
        prod = fixed_product(arena, family, spec.lam, spec.direct, via, max_states)
        return _finish(prod, base, {"lambda": spec.lam}, via or "product")

    thresholds = {}
    if via != "rr":
        try:
            lam = bounded_threshold(arena, family)
            thresholds["lambda"] = lam
            prod = fixed_product(arena, family, lam, spec.direct, via,
                                 bounded_budget if via is None else max_states)
            return _finish(prod, base, thresholds, via or "product")
        except (ProductTooLarge, WinparError) as exc:
            if via is not None:
                raise
            thresholds["fallback"] = str(exc)
    regions, sol = solve_request_response(arena, build_rr_instance(arena), spec.direct, max_states)
    thresholds["pairs"] = len(sol.product.pairs) if sol.product is not None else 0
    return SolveResult(regions=regions, product=sol.product, product_regions=sol.product_regions,
                       objective="buchi", thresholds=thresholds, via="rr", rr=sol, **base)


def _finish(prod: ProductArena, base: dict, thresholds: dict, via: str) -> SolveResult:
    pr = _solve_product(prod)
    mask = pr.mask1[prod.initial]
    nv = len(mask)
    regions = WinningRegions(mask, np.full(nv, -1), np.full(nv, -1), base["arena"].ids)
    thresholds = dict(thresholds, states=len(prod))
    return SolveResult(regions=regions, product=prod, product_regions=pr, objective=prod.objective,
                       thresholds=thresholds, via=via, **base)
