import pytest

from winpar import P1, P2, Arena, ArenaError, Kind, Lasso, MooreStrategy, ObjectiveSpec, SpecError, StrategyError
from winpar import outcome, unroll, validate_arena
from winpar.core import opponent, require_valid
from winpar.oracle import paper_gallery


def loop_arena(prio=0, owner=P1):
    return Arena([("v", owner, (prio,))], [("v", "v")])


def test_minimal_arena_is_valid():
    assert validate_arena(loop_arena()).ok


def test_deadlock_reported():
    arena = Arena([("v", P1, (0,))], [])
    report = validate_arena(arena)
    assert not report.ok
    assert report.violations == ["deadlock at v"]
    with pytest.raises(ArenaError, match="deadlock at v"):
        require_valid(arena)


def test_fig4_arena_valid_and_shaped():
    arena = paper_gallery("fig4")
    assert validate_arena(arena).ok
    assert arena.ids == ("v0", "v1", "v2", "v3")
    assert [arena.priority(v) for v in arena.ids] == [3, 1, 2, 0]
    assert list(arena.edges()) == [("v0", "v1"), ("v1", "v2"), ("v2", "v3"), ("v3", "v0")]
    assert arena.d == 4 and arena.n == 1


def test_dangling_edge_and_bad_owner_and_range():
    arena = Arena([("a", 3, (5,)), ("b", P1, (0,))], [("a", "b"), ("b", "zz"), ("b", "a")], max_priority=4)
    msgs = validate_arena(arena).violations
    assert "dangling edge b -> zz" in msgs
    assert "invalid owner 3 at a" in msgs
    assert any(m.startswith("priority 5 out of range at a") for m in msgs)


def test_dimension_mismatch_reported():
    arena = Arena([("a", P1, (0, 1)), ("b", P1, (0,))], [("a", "b"), ("b", "a")])
    assert any("dimension mismatch at b" in m for m in validate_arena(arena).violations)


def test_empty_arena_reported():
    assert validate_arena(Arena([], [])).violations == ["no vertices"]


def test_duplicate_vertex_rejected():
    with pytest.raises(ArenaError, match="duplicate vertex a"):
        Arena([("a", P1, (0,)), ("a", P2, (1,))], [])


def test_odd_maximum_padded_to_even():
    arena = Arena([("a", P1, (3, 0)), ("b", P2, (1, 2))], [("a", "b"), ("b", "a")])
    assert arena.d_dims == (4, 2)
    assert arena.d == 4


def test_build_helper_and_equality():
    a = Arena.build({"x": P1, "y": P2}, {"x": 0, "y": (1,)}, [("x", "y"), ("y", "x")])
    b = Arena([("x", P1, (0,)), ("y", P2, (1,))], [("y", "x"), ("x", "y")])
    assert a == b
    assert a.successors("x") == ("y",)
    assert a.owner_of("y") == P2
    # only branching vertices matter for who actually chooses
    assert a.is_one_player() == P1
    assert paper_gallery("fig5").is_one_player() == P2
    assert paper_gallery("fig10").is_one_player() is None


def test_unroll_examples():
    assert unroll(Lasso((), ("v0", "v1", "v2", "v3")), 6) == ["v0", "v1", "v2", "v3", "v0", "v1"]
    assert unroll(Lasso(("a",), ("b",)), 3) == ["a", "b", "b"]
    assert unroll(Lasso((), ("a",)), 0) == []
    with pytest.raises(ValueError):
        unroll(Lasso((), ("a",)), -1)


def test_lasso_parse_and_print():
    lasso = Lasso.parse("v0 v1 | v2 v3")
    assert lasso.stem == ("v0", "v1") and lasso.cycle == ("v2", "v3")
    assert str(lasso) == "v0 v1 | v2 v3"
    assert str(Lasso.parse("| a")) == "| a"
    assert Lasso.parse("a b") == Lasso((), ("a", "b"))
    with pytest.raises(ValueError):
        Lasso.parse("a |")


def test_lasso_edge_check():
    arena = paper_gallery("fig4")
    Lasso.parse("| v0 v1 v2 v3").check_edges(arena)
    with pytest.raises(ArenaError, match="not an edge"):
        Lasso.parse("| v0 v2").check_edges(arena)
    with pytest.raises(ArenaError, match="unknown vertex"):
        Lasso.parse("| q").check_edges(arena)


def test_spec_validation():
    with pytest.raises(SpecError, match="requires a window size"):
        ObjectiveSpec(Kind.FIXPR)
    with pytest.raises(SpecError, match="takes no window size"):
        ObjectiveSpec(Kind.BNDWP, lam=3)
    with pytest.raises(SpecError, match=">= 1"):
        ObjectiveSpec.fixwp(0)
    with pytest.raises(SpecError, match="exactly one target"):
        ObjectiveSpec(Kind.REACH)
    with pytest.raises(SpecError, match="at least one target"):
        ObjectiveSpec(Kind.GENREACH)
    with pytest.raises(SpecError, match="takes no target"):
        ObjectiveSpec(Kind.PARITY, targets=[{"a"}])


def test_spec_describe_and_kinds():
    assert ObjectiveSpec.fixpr(3, True).describe() == "DirFixPR(3)"
    assert ObjectiveSpec.bndwp().describe() == "BndWP"
    assert ObjectiveSpec.parity().describe() == "parity"
    assert ObjectiveSpec("fixwp", False, 2).with_lambda(5) == ObjectiveSpec.fixwp(5)
    assert Kind.BNDPR.family == "PR" and Kind.FIXWP.family == "WP" and Kind.PARITY.family is None
    assert Kind.FIXPR.is_fixed and Kind.BNDWP.is_bounded and not Kind.REACH.is_window
    assert ObjectiveSpec(Kind.REACH, targets=[{"a"}]).target == frozenset({"a"})


def test_opponent():
    assert opponent(P1) == P2 and opponent(P2) == P1


def test_memoryless_strategy_and_outcome():
    arena = paper_gallery("fig5")
    s1 = MooreStrategy.memoryless(P1, {}, arena)
    s2 = MooreStrategy.memoryless(P2, {"v1": "v2"}, arena)
    s1.check(arena)
    s2.check(arena)
    assert s1.size == 1
    assert outcome(arena, "v0", s1, s2) == Lasso((), ("v0", "v1", "v2"))
    stay = MooreStrategy.memoryless(P2, {"v1": "v1"}, arena)
    assert outcome(arena, "v0", s1, stay) == Lasso(("v0",), ("v1",))


def test_strategy_check_rejects_bad_moves():
    arena = paper_gallery("fig5")
    bad = MooreStrategy(P2, ("m0",), "m0", {("m0", v): "m0" for v in arena.ids}, {("m0", "v1"): "v0"})
    with pytest.raises(StrategyError, match="not a successor"):
        bad.check(arena)
    partial = MooreStrategy(P2, ("m0",), "m0", {}, {("m0", "v1"): "v1"})
    with pytest.raises(StrategyError, match="update undefined"):
        partial.check(arena)
    with pytest.raises(StrategyError, match="initial memory"):
        MooreStrategy(P1, ("m0",), "zz", {}, {}).check(arena)


def test_reachable_memory():
    arena = paper_gallery("fig5")
    upd = {(m, v): m for m in ("a", "b") for v in arena.ids}
    upd[("a", "v2")] = "b"
    s = MooreStrategy(P1, ("a", "b", "c"), "a", {**upd, **{("c", v): "c" for v in arena.ids}},
                      {(m, v): arena.successors(v)[0] for m in ("a", "b", "c") for v in ("v0", "v2")})
    assert s.reachable_memory(arena, "v0") == {"a", "b"}
