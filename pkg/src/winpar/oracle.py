"""Independent checks: brute-force lasso search, generators, and lattice cross-checks."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product as cartesian
from typing import Iterable, Sequence

from .core import Arena, ArenaError, Kind, Lasso, ObjectiveSpec, P1, P2, WinparError, validate_arena
from .objectives import check_lasso

NONE_WITHIN_BOUNDS = "none within bounds"


# lasso enumeration -------------------------------------------------------------


def _paths(arena: Arena, start: int, length: int):
    """All vertex paths of ``length`` vertices from ``start``, in successor order."""
    path = [start]

    def rec():
        if len(path) == length:
            yield tuple(path)
            return
        for w in arena.succ[path[-1]]:
            path.append(w)
            yield from rec()
            path.pop()

    yield from rec()


def enumerate_lassos(arena: Arena, initial: str, stem_bound: int, cycle_bound: int, spec: ObjectiveSpec):
    """First lasso from ``initial`` satisfying ``spec``, or ``NONE_WITHIN_BOUNDS``.

    Lassos are tried by total length, then stem length, then successor
    order.  A negative answer only means nothing was found within bounds.
    """
    if arena.is_one_player() is None:
        raise ArenaError("arena not one-player")
    start = arena.index[initial]
    for total in range(1, stem_bound + cycle_bound + 1):
        paths = list(_paths(arena, start, total))
        for s in range(0, min(stem_bound, total - 1) + 1):
            if total - s > cycle_bound:
                continue
            for path in paths:
                if path[s] not in arena.succ[path[-1]]:
                    continue
                names = [arena.ids[i] for i in path]
                lasso = Lasso(tuple(names[:s]), tuple(names[s:]))
                if check_lasso(arena, lasso, spec):
                    return lasso
    return NONE_WITHIN_BOUNDS


# generators ----------------------------------------------------------------------


def random_arena(seed: int, n_vertices: int, density: float = 0.3, n_dims: int = 1, d: int = 2,
                 owner_ratio: float = 0.5) -> Arena:
    """Seeded random arena; about 30% of priorities are 0, deadlocks get a self-loop."""
    if n_vertices < 1 or n_dims < 1 or d < 0:
        raise ValueError("parameters must be positive")
    rng = random.Random(seed)
    ids = [f"v{i}" for i in range(n_vertices)]
    verts = []
    for v in ids:
        owner = P1 if rng.random() < owner_ratio else P2
        prios = tuple(0 if rng.random() < 0.3 else rng.randint(0, d) for _ in range(n_dims))
        verts.append((v, owner, prios))
    edges = []
    for a in ids:
        out = [b for b in ids if rng.random() < density]
        if not out:
            out = [a]
        edges.extend((a, b) for b in out)
    arena = Arena(verts, edges, max_priority=d)
    assert validate_arena(arena).ok
    return arena


def _fig4():
    verts = [("v0", P1, (3,)), ("v1", P1, (1,)), ("v2", P1, (2,)), ("v3", P1, (0,))]
    return Arena(verts, [("v0", "v1"), ("v1", "v2"), ("v2", "v3"), ("v3", "v0")])


def _fig5():
    verts = [("v0", P1, (1,)), ("v1", P2, (2,)), ("v2", P1, (0,))]
    return Arena(verts, [("v0", "v1"), ("v1", "v1"), ("v1", "v2"), ("v2", "v0")])


def _fig6():
    prios = [3, 2, 1, 1, 0, 3, 3]
    verts = [(f"v{i}", P1, (p,)) for i, p in enumerate(prios)]
    edges = [("v0", "v1"), ("v1", "v2"), ("v2", "v0"),
             ("v0", "v3"), ("v3", "v4"), ("v4", "v5"), ("v5", "v6"), ("v6", "v0")]
    return Arena(verts, edges)


def _fig7():
    prios = [1, 0, 1, 1, 0]
    verts = [(f"v{i}", P2, (p,)) for i, p in enumerate(prios)]
    edges = [("v0", "v1"), ("v1", "v2"), ("v2", "v0"), ("v0", "v3"), ("v3", "v4"), ("v4", "v0")]
    return Arena(verts, edges)


def _fig8(d: int = 6):
    if d < 2 or d % 2:
        raise ValueError("d must be even and at least 2")
    half = d // 2
    verts = [("v0", P2, (d,)), ("g", P1, (d,))]
    edges = []
    for k in range(1, half + 1):
        c = d - (2 * k - 1)
        req = [f"q{k}_{i}" for i in range(half - k + 1)]
        ans = [f"a{k}_{i}" for i in range(k)]
        verts += [(q, P1, (c if i == 0 else d,)) for i, q in enumerate(req)]
        verts += [(a, P1, (c - 1 if i == k - 1 else d,)) for i, a in enumerate(ans)]
        chain = ["v0"] + req + ["g"]
        edges += list(zip(chain, chain[1:]))
        chain = ["g"] + ans + ["v0"]
        edges += list(zip(chain, chain[1:]))
    return Arena(verts, edges)


def _fig9(n: int = 2):
    if n < 2:
        raise ValueError("n must be at least 2")
    verts = [("v0", P2, (1,))]
    edges = []
    for i in range(1, n + 1):
        verts.append((f"u{i}", P1, (1,)))
        edges.append(("v0", f"u{i}"))
    for j in range(1, n + 1):
        path = [f"r{j}_{k}" for k in range(1, n + 1)]
        verts += [(x, P1, (0 if k == j else 1,)) for k, x in enumerate(path, 1)]
        edges += list(zip(path, path[1:])) + [(path[-1], "v0")]
        edges += [(f"u{i}", path[0]) for i in range(1, n + 1) if i != j]
    return Arena(verts, edges)


def _fig10(n: int = 2):
    if n < 1:
        raise ValueError("n must be at least 1")
    dims = 2 * n

    def pr(dim_hot=None, val=2):
        return tuple(val if dim_hot is not None and m == dim_hot else 2 for m in range(dims))

    verts, edges = [], []
    for side, owner, hot in (("v", P2, 1), ("u", P1, 0)):
        for i in range(1, n + 1):
            verts.append((f"{side}{i}", owner, pr()))
            verts.append((f"{side}{i}L", owner, pr(2 * i - 2, hot)))
            verts.append((f"{side}{i}R", owner, pr(2 * i - 1, hot)))
    for side, other in (("v", "u"), ("u", "v")):
        for i in range(1, n + 1):
            nxt = f"{side}{i + 1}" if i < n else f"{other}1"
            for br in "LR":
                edges += [(f"{side}{i}", f"{side}{i}{br}"), (f"{side}{i}{br}", nxt)]
    return Arena(verts, edges)


_GALLERY = {
    "fig4": (_fig4, {}, "v0"),
    "fig5": (_fig5, {}, "v0"),
    "fig6": (_fig6, {}, "v0"),
    "fig7": (_fig7, {}, "v0"),
    "fig8": (_fig8, {"d": 6}, "v0"),
    "fig9": (_fig9, {"n": 2}, "v0"),
    "fig10": (_fig10, {"n": 2}, "v1"),
}

# expected outcomes as (spec, player who wins from the initial vertex)
GALLERY_EXPECTED = {
    "fig4": [(ObjectiveSpec.fixpr(3, True), P1), (ObjectiveSpec.fixwp(4, True), P1),
             (ObjectiveSpec.fixwp(3, True), P2)],
    "fig5": [(ObjectiveSpec.parity(), P1)] + [(ObjectiveSpec(k, dr, lam), P2) for k in ("fixpr", "fixwp")
                                              for dr in (True, False) for lam in range(1, 7)],
    "fig6": [(ObjectiveSpec.fixpr(4, True), P1), (ObjectiveSpec.fixpr(4, False), P1)],
    "fig7": [(ObjectiveSpec.fixpr(3, False), P2)],
    "fig8": [(ObjectiveSpec.fixwp(5, True), P1), (ObjectiveSpec.fixwp(5, False), P1)],
    "fig9": [(ObjectiveSpec.fixwp(5, False), P2)],
    "fig10": [(ObjectiveSpec.fixwp(6, False), P1)],
}


def gallery_names() -> list[str]:
    return list(_GALLERY)


def paper_gallery(name: str, **params) -> Arena:
    """Arenas of the worked examples; fig8 takes ``d``, fig9 and fig10 take ``n``."""
    if name not in _GALLERY:
        raise WinparError(f"unknown gallery arena {name}")
    make, defaults, _ = _GALLERY[name]
    unknown = set(params) - set(defaults)
    if unknown:
        raise WinparError(f"unknown parameter {sorted(unknown)[0]} for {name}")
    return make(**{**defaults, **params})


def gallery_initial(name: str) -> str:
    return _GALLERY[name][2]


# generalized reachability --------------------------------------------------------


RESTART = "restart"


def genreach_to_fixwp(arena: Arena, targets: Sequence[Iterable[str]], initial: str):
    """Encode a generalized reachability game as a multi-dimension window game.

    Every edge is split through a player-2 branch vertex that may divert
    to a restart vertex; the restart vertex has priority 0 everywhere and
    leads back to ``initial``.  Returns the new arena, the window size and
    the number of dimensions; the new initial vertex is ``RESTART``.
    """
    targets = [frozenset(t) for t in targets]
    k = len(targets)
    if k < 1:
        raise WinparError("genreach needs at least one target set")

    def prio(v):
        if v == initial:
            return tuple(0 if v in t else 1 for t in targets)
        return tuple(0 if v in t else 2 for t in targets)

    verts = [(v, arena.owner_of(v), prio(v)) for v in arena.ids]
    verts.append((RESTART, P2, (0,) * k))
    edges = [(RESTART, initial)]
    for a, b in arena.edges():
        br = f"b[{a}>{b}]"
        verts.append((br, P2, (2,) * k))
        edges += [(a, br), (br, b), (br, RESTART)]
    lam = 2 * k * len(arena)
    return Arena(verts, edges, max_priority=2), lam, k


# cross-checks ----------------------------------------------------------------------


@dataclass
class CrossCheckReport:
    arena: Arena
    checks: int = 0
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def expect(self, cond: bool, message: str):
        self.checks += 1
        if not cond:
            self.violations.append(message)

    def summary(self) -> dict:
        return {"checks": self.checks, "violations": list(self.violations), "ok": self.ok}


def cross_check(arena: Arena, lambdas: Iterable[int] = (1, 2, 3, 4), routes: bool = True,
                max_states: int | None = None) -> CrossCheckReport:
    """Solve every objective over a grid of window sizes and test the inclusion lattice.

    Also compares alternative constructions (counter vs history product,
    threshold vs request-response route) when ``routes`` is set.
    """
    from .reductions import DEFAULT_MAX_STATES, solve

    max_states = max_states or DEFAULT_MAX_STATES
    lambdas = sorted(set(lambdas))
    rep = CrossCheckReport(arena)
    everything = frozenset(arena.ids)
    half = max(arena.d // 2, 1)
    cache: dict = {}

    def win(kind, direct=False, lam=None, via=None):
        key = (kind, direct, lam, via)
        if key not in cache:
            spec = ObjectiveSpec(kind, direct, lam)
            res = solve(arena, spec, via=via, max_states=max_states)
            rep.expect(res.regions.win1 | res.regions.win2 == everything
                       and not res.regions.win1 & res.regions.win2,
                       f"determinacy fails for {spec.describe()} via {res.via}")
            cache[key] = res.regions.win1
        return cache[key]

    def sub(a, b, what):
        rep.expect(a <= b, f"{what}: {sorted(a - b)} violate inclusion")

    if arena.n == 1:
        parity = win(Kind.PARITY)
    else:
        from .solvers import solve_parity

        parity = everything
        for m in range(arena.n):
            parity = parity & solve_parity(arena, m).win1

    for fam in ("fixpr", "fixwp"):
        for lam in lambdas:
            sub(win(fam, True, lam), win(fam, False, lam), f"Dir{fam}({lam}) vs {fam}({lam})")
        for a, b in zip(lambdas, lambdas[1:]):
            for dr in (True, False):
                sub(win(fam, dr, a), win(fam, dr, b), f"{fam} direct={dr} lambda {a} vs {b}")
    for lam in lambdas:
        for dr in (True, False):
            tag = "Dir" if dr else ""
            sub(win("fixwp", dr, lam), win("fixpr", dr, lam), f"{tag}FixWP({lam}) vs {tag}FixPR({lam})")
            sub(win("fixpr", dr, lam), win("fixwp", dr, half * lam),
                f"{tag}FixPR({lam}) vs {tag}FixWP({half * lam})")
            if arena.d <= 2:
                rep.expect(win("fixpr", dr, lam) == win("fixwp", dr, lam),
                           f"d<=2 but {tag}FixPR({lam}) != {tag}FixWP({lam})")
            if routes and arena.n == 1:
                rep.expect(win("fixpr", dr, lam) == win("fixpr", dr, lam, "history"),
                           f"counter and history products differ for {tag}FixPR({lam})")

    for dr in (True, False):
        tag = "Dir" if dr else ""
        bpr, bwp = win("bndpr", dr), win("bndwp", dr)
        rep.expect(bpr == bwp, f"{tag}BndPR != {tag}BndWP")
        sub(bwp, parity, f"{tag}BndWP vs Parity")
        for lam in lambdas:
            sub(win("fixpr", dr, lam), bpr, f"{tag}FixPR({lam}) vs {tag}BndPR")
            sub(win("fixwp", dr, lam), bwp, f"{tag}FixWP({lam}) vs {tag}BndWP")
        if routes:
            for fam in ("bndpr", "bndwp"):
                rep.expect(win(fam, dr) == win(fam, dr, via="rr"),
                           f"threshold and request-response routes differ for {tag}{fam}")
    sub(win("bndpr", True), win("bndpr", False), "DirBndPR vs BndPR")
    return rep
