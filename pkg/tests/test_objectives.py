import math

import pytest

from winpar import Arena, Kind, Lasso, ObjectiveSpec, P1, SpecError, WinparError
from winpar import check_lasso, good_decomposition, min_sufficient_lambda, preceq, unroll, window_close
from winpar.oracle import paper_gallery

FIG4_PLAY = Lasso((), ("v0", "v1", "v2", "v3"))
FIG6_PLAY = Lasso((), ("v0", "v1", "v2", "v0", "v3", "v4", "v5", "v6"))
FIG7_PLAY = Lasso((), ("v0", "v1", "v2", "v0", "v3", "v4"))


def test_preceq():
    assert preceq(0, 3) and preceq(2, 3) and preceq(2, 2)
    assert not preceq(1, 3) and not preceq(4, 3) and not preceq(3, 3)


def test_window_close_fig4():
    arena = paper_gallery("fig4")
    prefix = unroll(FIG4_PLAY, 8)
    v3 = window_close(arena, prefix, 0, 3)
    assert not v3.closed and v3.status == "open"
    v4 = window_close(arena, prefix, 0, 4)
    assert v4.closed and v4.offset == 3 and v4.status == "closed-at 3"
    # even priority closes immediately
    assert window_close(arena, prefix, 2, 1).offset == 0
    with pytest.raises(WinparError, match="insufficient horizon"):
        window_close(arena, prefix, 6, 4)


def test_check_lasso_fig4_frozen():
    arena = paper_gallery("fig4")
    assert check_lasso(arena, FIG4_PLAY, ObjectiveSpec.fixpr(3, True))
    assert not check_lasso(arena, FIG4_PLAY, ObjectiveSpec.fixwp(3, True))
    assert check_lasso(arena, FIG4_PLAY, ObjectiveSpec.fixwp(4, True))
    verdict = check_lasso(arena, FIG4_PLAY, ObjectiveSpec.fixwp(3, True))
    assert (verdict.position, verdict.dimension) == (0, 0)


def test_check_lasso_fig6_and_fig7():
    assert check_lasso(paper_gallery("fig6"), FIG6_PLAY, ObjectiveSpec.fixpr(4, True))
    assert not check_lasso(paper_gallery("fig7"), FIG7_PLAY, ObjectiveSpec.fixpr(3))


def test_even_self_loop_satisfies_everything():
    arena = Arena([("v", P1, (0,))], [("v", "v")])
    lasso = Lasso((), ("v",))
    for kind in ("fixpr", "fixwp"):
        for direct in (True, False):
            assert check_lasso(arena, lasso, ObjectiveSpec(kind, direct, 1))
    for kind in ("bndpr", "bndwp", "parity"):
        assert check_lasso(arena, lasso, ObjectiveSpec(kind))


def test_direct_checks_stem_undirect_ignores_it():
    arena = Arena([("a", P1, (1,)), ("b", P1, (0,))], [("a", "b"), ("b", "b")])
    lasso = Lasso(("a",), ("b",))
    # the request at a is answered at offset 1
    assert not check_lasso(arena, lasso, ObjectiveSpec.fixpr(1, True))
    assert check_lasso(arena, lasso, ObjectiveSpec.fixpr(1, False))
    assert check_lasso(arena, lasso, ObjectiveSpec.fixpr(2, True))


def test_bounded_and_parity_verdicts():
    arena = paper_gallery("fig5")
    loop = Lasso(("v0",), ("v1",))
    assert not check_lasso(arena, loop, ObjectiveSpec.bndpr(True))
    assert check_lasso(arena, loop, ObjectiveSpec.bndpr(False))
    assert check_lasso(arena, loop, ObjectiveSpec.parity())
    cyc = Lasso((), ("v0", "v1", "v2"))
    assert check_lasso(arena, cyc, ObjectiveSpec.bndwp(True))


def test_multi_dimension_conjunction():
    arena = Arena([("a", P1, (0, 1)), ("b", P1, (1, 0))], [("a", "b"), ("b", "a")])
    lasso = Lasso((), ("a", "b"))
    v = check_lasso(arena, lasso, ObjectiveSpec.fixwp(1))
    # smallest failing position first: a is odd in the second dimension
    assert not v and (v.position, v.dimension) == (0, 1)
    assert check_lasso(arena, lasso, ObjectiveSpec.fixwp(2))
    first = check_lasso(arena, lasso, ObjectiveSpec.fixwp(1), dim=0)
    assert not first and first.position == 1


def test_check_lasso_requires_lambda():
    arena = paper_gallery("fig4")
    spec = ObjectiveSpec.fixwp(3)
    object.__setattr__(spec, "lam", None)
    with pytest.raises(SpecError):
        check_lasso(arena, FIG4_PLAY, spec)


def test_good_decomposition():
    arena = paper_gallery("fig4")
    dec = good_decomposition(arena, FIG4_PLAY, 4, direct=True)
    assert dec.indices(4) == [0, 4, 8, 12]
    assert good_decomposition(arena, FIG4_PLAY, 3, direct=True) is None
    single = Arena([("v", P1, (0,))], [("v", "v")])
    assert good_decomposition(single, Lasso((), ("v",)), 1).indices(3) == [0, 1, 2]


def test_min_sufficient_lambda():
    arena = paper_gallery("fig4")
    assert min_sufficient_lambda(arena, FIG4_PLAY, Kind.FIXWP, direct=True) == 4
    assert min_sufficient_lambda(arena, FIG4_PLAY, "fixpr", direct=True) == 3
    odd = Arena([("v", P1, (1,))], [("v", "v")])
    assert min_sufficient_lambda(odd, Lasso((), ("v",)), Kind.FIXPR) == math.inf
    with pytest.raises(SpecError):
        min_sufficient_lambda(arena, FIG4_PLAY, Kind.PARITY)
