"""Command-line interface; every command prints one JSON object."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .core import ArenaError, Kind, Lasso, ObjectiveSpec, P1, P2, SpecError, StrategyError, WinparError, \
    validate_arena
from .io import ParseError, export_dot, parse_game, read_strategy, write_game, write_strategy
from .objectives import check_lasso
from .oracle import cross_check, gallery_initial, paper_gallery, random_arena
from .reductions import solve
from .synthesis import extract_strategy, verify_strategy

EXIT_OK, EXIT_PARSE, EXIT_ARGS, EXIT_CONSISTENCY = 0, 2, 3, 4


class UsageError(Exception):
    pass


class ConsistencyError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ARGS, f"{self.prog}: error: {message}\n")


def _add_objective(p):
    p.add_argument("--file", required=True)
    p.add_argument("--obj", required=True, choices=[k.value for k in Kind])
    p.add_argument("--direct", action="store_true")
    p.add_argument("--lambda", dest="lam", type=int)
    p.add_argument("--target", action="append", default=[],
                   help="space-separated vertex set; repeat for several target sets")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="winpar", description="Window parity and parity-response games.")
    sub = parser.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="solve a game")
    _add_objective(p)
    p.add_argument("--init")
    p.add_argument("--all", action="store_true", help="report full winning regions")
    p.add_argument("--strategy", help="write a winning Moore strategy here")
    p.add_argument("--via", choices=["product", "rr", "history"])

    p = sub.add_parser("check", help="membership of a lasso")
    _add_objective(p)
    p.add_argument("--lasso", required=True, help='"stem | cycle"')

    p = sub.add_parser("verify", help="verify a Moore strategy")
    _add_objective(p)
    p.add_argument("--strategy", required=True)
    p.add_argument("--init", required=True)

    p = sub.add_parser("product", help="build the product arena")
    _add_objective(p)
    p.add_argument("--emit-dot", required=True)
    p.add_argument("--via", choices=["product", "history"])

    p = sub.add_parser("oracle", help="cross-check a seeded random corpus")
    p.add_argument("--seeds", required=True, help="A..B")
    p.add_argument("--max-v", type=int, default=6)
    p.add_argument("--max-lambda", type=int, default=4)
    p.add_argument("--max-dims", type=int, default=2)

    p = sub.add_parser("gallery", help="write a worked-example arena")
    p.add_argument("--name", required=True)
    p.add_argument("--param", action="append", default=[], help="k=v")
    p.add_argument("--out", required=True)
    return parser


def _load(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    arena, init = parse_game(text)
    report = validate_arena(arena)
    if not report.ok:
        raise ArenaError("; ".join(report.violations))
    return arena, init


def _spec(args, arena) -> ObjectiveSpec:
    targets = tuple(frozenset(t.split()) for t in args.target)
    for t in targets:
        for v in t:
            if v not in arena.index:
                raise UsageError(f"unknown target vertex {v}")
    return ObjectiveSpec(Kind(args.obj), args.direct, args.lam, targets)


def cmd_solve(args) -> dict:
    arena, file_init = _load(args.file)
    spec = _spec(args, arena)
    init = args.init or (None if args.all else file_init)
    res = solve(arena, spec, initial=init, via=args.via)
    out = {
        "objective": spec.describe(),
        "winner": {v: res.winner(v) for v in res.queried},
        "via": res.via,
        "thresholds": res.thresholds,
        "product_states": res.product_size(),
    }
    if args.all or init is None:
        out["win1"] = sorted(res.regions.win1)
        out["win2"] = sorted(res.regions.win2)
    if args.strategy:
        if init is not None:
            player = res.winner(init)
        else:
            player = P1 if res.win1 else P2
        try:
            strat = extract_strategy(res, player)
        except StrategyError as exc:
            out["strategy"] = None
            out["strategy_note"] = str(exc)
        else:
            Path(args.strategy).write_text(write_strategy(strat), encoding="utf-8")
            out["strategy"] = args.strategy
            out["strategy_player"] = player
            out["memory_size"] = strat.size
    return out


def cmd_check(args) -> dict:
    arena, _ = _load(args.file)
    spec = _spec(args, arena)
    lasso = Lasso.parse(args.lasso)
    lasso.check_edges(arena)
    v = check_lasso(arena, lasso, spec)
    return {"objective": spec.describe(), "lasso": str(lasso), "holds": v.holds,
            "position": v.position, "dimension": v.dimension}


def cmd_verify(args) -> dict:
    arena, _ = _load(args.file)
    spec = _spec(args, arena)
    try:
        text = Path(args.strategy).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {args.strategy}: {exc.strerror}") from None
    strat = read_strategy(text)
    verdict = verify_strategy(arena, strat, spec, args.init)
    if verdict.counterexample is not None:
        holds = check_lasso(arena, verdict.counterexample, spec).holds
        if holds != (strat.player == P2):
            raise ConsistencyError("counterexample does not refute the strategy")
    return {
        "objective": spec.describe(),
        "player": strat.player,
        "memory_size": strat.size,
        "winning": verdict.winning,
        "counterexample": str(verdict.counterexample) if verdict.counterexample else None,
        "note": verdict.note,
    }


def cmd_product(args) -> dict:
    arena, _ = _load(args.file)
    spec = _spec(args, arena)
    res = solve(arena, spec, via=args.via)
    if res.product is None:
        raise UsageError(f"{spec.kind.value} is solved without a product")
    Path(args.emit_dot).write_text(export_dot(res.product), encoding="utf-8")
    return {"objective": spec.describe(), "states": len(res.product),
            "edges": res.product.game.num_edges, "product_objective": res.product.objective,
            "dot": args.emit_dot}


def _seed_range(text: str) -> range:
    try:
        a, b = text.split("..")
        return range(int(a), int(b) + 1)
    except ValueError:
        raise UsageError(f"bad seed range {text}, expected A..B") from None


def cmd_oracle(args) -> dict:
    seeds = _seed_range(args.seeds)
    if args.max_v < 1 or args.max_lambda < 1 or args.max_dims < 1:
        raise UsageError("bounds must be positive")
    checks, violations = 0, []
    for seed in seeds:
        nv = 1 + seed % args.max_v
        dims = 1 + (seed // args.max_v) % args.max_dims
        d = 2 if seed % 3 else 4
        arena = random_arena(seed, nv, density=0.4, n_dims=dims, d=d)
        rep = cross_check(arena, range(1, args.max_lambda + 1))
        checks += rep.checks
        violations += [f"seed {seed}: {v}" for v in rep.violations]
    out = {"arenas": len(seeds), "checks": checks, "violations": violations}
    if violations:
        raise ConsistencyError(json.dumps(out))
    return out


def cmd_gallery(args) -> dict:
    params = {}
    for item in args.param:
        k, _, v = item.partition("=")
        if not v.isdigit():
            raise UsageError(f"bad parameter {item}, expected k=integer")
        params[k] = int(v)
    try:
        arena = paper_gallery(args.name, **params)
    except (WinparError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    init = gallery_initial(args.name)
    Path(args.out).write_text(write_game(arena, init), encoding="utf-8")
    return {"name": args.name, "vertices": len(arena), "edges": arena.num_edges, "dims": arena.n,
            "init": init, "out": args.out}


COMMANDS = {"solve": cmd_solve, "check": cmd_check, "verify": cmd_verify, "product": cmd_product,
            "oracle": cmd_oracle, "gallery": cmd_gallery}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        out = COMMANDS[args.cmd](args)
    except ParseError as exc:
        return _fail(EXIT_PARSE, "parse", exc)
    except ArenaError as exc:
        return _fail(EXIT_PARSE, "validation", exc)
    except (UsageError, SpecError, StrategyError) as exc:
        return _fail(EXIT_ARGS, "argument", exc)
    except ConsistencyError as exc:
        return _fail(EXIT_CONSISTENCY, "consistency", exc)
    except WinparError as exc:
        return _fail(EXIT_ARGS, "argument", exc)
    print(json.dumps(out, sort_keys=True))
    return EXIT_OK


def _fail(code: int, kind: str, exc: Exception) -> int:
    print(json.dumps({"error": kind, "message": str(exc)}, sort_keys=True))
    return code


if __name__ == "__main__":
    sys.exit(main())
