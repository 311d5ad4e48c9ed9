"""Slow reference implementations used only as test oracles."""

from itertools import product as cartesian

from winpar import P1, P2, Lasso, MooreStrategy, outcome


def naive_attractor(arena, player, target):
    """Textbook attractor by repeated sweeps over plain Python sets."""
    attr = set(target)
    changed = True
    while changed:
        changed = False
        for i, v in enumerate(arena.ids):
            if v in attr:
                continue
            succ = arena.successors(v)
            if arena.owner[i] == player:
                hit = any(w in attr for w in succ)
            else:
                hit = all(w in attr for w in succ)
            if hit:
                attr.add(v)
                changed = True
    return attr


def memoryless(arena, player):
    own = [v for i, v in enumerate(arena.ids) if arena.owner[i] == player]
    for picks in cartesian(*[arena.successors(v) for v in own]):
        yield MooreStrategy.memoryless(player, dict(zip(own, picks)), arena)


def brute_force_win1(arena, holds):
    """Vertices where some memoryless P1 strategy beats every memoryless P2 strategy.

    Exact for objectives with memoryless determinacy (reachability,
    safety, Büchi, co-Büchi, parity); ``holds`` maps a lasso to a boolean.
    """
    s2s = list(memoryless(arena, P2))
    out = set()
    for v in arena.ids:
        for s1 in memoryless(arena, P1):
            if all(holds(outcome(arena, v, s1, s2)) for s2 in s2s):
                out.add(v)
                break
    return out


def lasso_min_cycle_priority(arena, lasso: Lasso, dim=0):
    return min(arena.priority(v, dim) for v in lasso.cycle)


def naive_genreach_win1(arena, targets):
    """Visited-set product solved by the naive attractor, projected to vertices."""
    k = len(targets)
    full = (1 << k) - 1
    bits = {v: sum(1 << t for t, vs in enumerate(targets) if v in vs) for v in arena.ids}
    states = {}
    stack = [(v, bits[v]) for v in arena.ids]
    while stack:
        s = stack.pop()
        if s in states:
            continue
        v, q = s
        states[s] = [(w, q | bits[w]) for w in arena.successors(v)]
        stack.extend(states[s])
    attr = {s for s in states if s[1] == full}
    changed = True
    while changed:
        changed = False
        for s, succ in states.items():
            if s in attr:
                continue
            mine = arena.owner_of(s[0]) == P1
            if (any if mine else all)(t in attr for t in succ):
                attr.add(s)
                changed = True
    return {v for v in arena.ids if (v, bits[v]) in attr}
