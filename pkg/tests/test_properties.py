import math

from hypothesis import assume, given, settings
from hypothesis import strategies as st

from oracles import naive_attractor
from winpar import P1, P2, Lasso, ObjectiveSpec, check_lasso, extract_strategy, good_decomposition
from winpar import min_sufficient_lambda, solve, unroll, verify_strategy
from winpar.io import parse_game, write_game
from winpar.oracle import NONE_WITHIN_BOUNDS, enumerate_lassos, random_arena


@st.composite
def arenas(draw, max_v=5, max_dims=1, ds=(2, 4)):
    seed = draw(st.integers(0, 10**6))
    nv = draw(st.integers(1, max_v))
    dims = draw(st.integers(1, max_dims))
    d = draw(st.sampled_from(ds))
    return random_arena(seed, nv, density=0.4, n_dims=dims, d=d)


@st.composite
def arena_lassos(draw, max_v=5, max_dims=1, ds=(2, 4, 6)):
    """An arena together with a lasso following its edges."""
    arena = draw(arenas(max_v, max_dims, ds))
    walk = [draw(st.sampled_from(arena.ids))]
    for _ in range(draw(st.integers(0, 10))):
        walk.append(draw(st.sampled_from(arena.successors(walk[-1]))))
    # close the walk at the first earlier occurrence of a successor
    while True:
        succ = arena.successors(walk[-1])
        back = [i for i, v in enumerate(walk) if v in succ]
        if back:
            i = draw(st.sampled_from(back))
            return arena, Lasso(tuple(walk[:i]), tuple(walk[i:]))
        walk.append(draw(st.sampled_from(succ)))


lams = st.integers(1, 6)


@given(arena_lassos(), st.integers(0, 20), st.integers(0, 20))
def test_unroll_is_prefix_closed(al, k, extra):
    _, lasso = al
    long = unroll(lasso, k + extra)
    assert unroll(lasso, k) == long[:k]
    if k > len(lasso.stem):
        for i in range(len(lasso.stem), k - len(lasso.cycle)):
            assert long[i] == long[i + len(lasso.cycle)]


@given(arena_lassos(max_dims=2), lams)
def test_lasso_hierarchy(al, lam):
    arena, lasso = al
    half = max(arena.d // 2, 1)

    def holds(kind, direct=False, lam=None):
        return check_lasso(arena, lasso, ObjectiveSpec(kind, direct, lam)).holds

    for fam in ("fixwp", "fixpr"):
        assert not holds(fam, True, lam) or holds(fam, False, lam)
        assert not holds(fam, False, lam) or holds(fam, False, lam + 1)
        assert not holds(fam, True, lam) or holds(fam, True, lam + 1)
    for direct in (True, False):
        assert not holds("fixwp", direct, lam) or holds("fixpr", direct, lam)
        assert not holds("fixpr", direct, lam) or holds("fixwp", direct, half * lam)
        assert not holds("fixwp", direct, lam) or holds("bndwp", direct)
        assert not holds("fixpr", direct, lam) or holds("bndpr", direct)
    assert not holds("bndwp") or holds("bndpr")
    if arena.n == 1:
        assert not holds("bndpr") or holds("parity")


@given(arena_lassos(ds=(2,)), lams)
def test_small_priorities_collapse_families(al, lam):
    arena, lasso = al
    for direct in (True, False):
        assert (check_lasso(arena, lasso, ObjectiveSpec.fixpr(lam, direct)).holds
                == check_lasso(arena, lasso, ObjectiveSpec.fixwp(lam, direct)).holds)


@given(arena_lassos(), lams, st.booleans())
def test_decomposition_iff_window_objective(al, lam, direct):
    arena, lasso = al
    dec = good_decomposition(arena, lasso, lam, direct=direct)
    assert (dec is not None) == check_lasso(arena, lasso, ObjectiveSpec.fixwp(lam, direct)).holds
    if dec is not None:
        ks = dec.indices(len(lasso.stem) + 3 * len(lasso.cycle))
        assert all(b - a <= lam for a, b in zip(ks, ks[1:]))


@given(arena_lassos(max_dims=2), st.sampled_from(["fixpr", "fixwp"]), st.booleans())
def test_bounded_is_some_fixed_window(al, fam, direct):
    arena, lasso = al
    bounded = check_lasso(arena, lasso, ObjectiveSpec("bnd" + fam[3:], direct)).holds
    horizon = len(lasso.stem) + 2 * len(lasso.cycle)
    some = any(check_lasso(arena, lasso, ObjectiveSpec(fam, direct, lam)).holds for lam in range(1, horizon + 1))
    assert bounded == some
    best = min_sufficient_lambda(arena, lasso, fam, direct=direct)
    assert (best < math.inf) == bounded
    if bounded:
        assert check_lasso(arena, lasso, ObjectiveSpec(fam, direct, best))
        assert best == 1 or not check_lasso(arena, lasso, ObjectiveSpec(fam, direct, best - 1))


@given(arenas(max_v=6, max_dims=3), st.booleans())
def test_write_parse_round_trip(arena, with_init):
    init = arena.ids[0] if with_init else None
    again, got = parse_game(write_game(arena, init))
    assert again == arena and got == init


@given(arenas(max_v=5, max_dims=2), lams, st.sampled_from(["fixpr", "fixwp", "bndpr", "bndwp"]), st.booleans())
def test_determinacy(arena, lam, kind, direct):
    spec = ObjectiveSpec(kind, direct, lam if kind.startswith("fix") else None)
    res = solve(arena, spec)
    assert res.win1 | res.win2 == frozenset(arena.ids)
    assert not res.win1 & res.win2


@given(arenas(max_v=5), st.integers(1, 4), st.sampled_from(["fixpr", "fixwp"]), st.booleans())
def test_extract_verify_round_trip(arena, lam, kind, direct):
    spec = ObjectiveSpec(kind, direct, lam)
    res = solve(arena, spec)
    for player, region in ((P1, res.win1), (P2, res.win2)):
        if not region:
            continue
        strat = extract_strategy(res, player)
        for v in region:
            assert verify_strategy(arena, strat, spec, v)


@given(arenas(max_v=5), st.integers(1, 3))
def test_window_win_inside_parity_win(arena, lam):
    parity = solve(arena, ObjectiveSpec.parity()).win1
    for direct in (True, False):
        assert solve(arena, ObjectiveSpec.fixwp(lam, direct)).win1 <= parity
    # direct windows at lambda 1 is safety inside the even vertices
    even = {v for v in arena.ids if arena.priority(v) % 2 == 0}
    trap = naive_attractor(arena, P2, set(arena.ids) - even)
    assert solve(arena, ObjectiveSpec.fixwp(1, True)).win1 == frozenset(arena.ids) - trap


@settings(max_examples=30)
@given(arenas(max_v=3, ds=(2, 4)), st.integers(1, 2), st.booleans())
def test_one_player_wins_have_lasso_witnesses(arena, lam, direct):
    assume(arena.is_one_player() == P1)
    spec = ObjectiveSpec.fixwp(lam, direct)
    res = solve(arena, spec)
    bound = len(res.product)
    for v in arena.ids:
        found = enumerate_lassos(arena, v, bound, bound, spec)
        assert (found != NONE_WITHIN_BOUNDS) == (v in res.win1)
