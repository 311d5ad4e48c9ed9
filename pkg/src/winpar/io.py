"""Text formats for games and strategies, and DOT export."""

from __future__ import annotations

import re

from .core import Arena, MooreStrategy, P1, WinparError
from .product import ProductArena

HEADER = re.compile(r"^winpar\s+1\s+dims=(\d+)$")


class ParseError(WinparError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message if line is None else f"{message} at line {line}")


def _lines(text: str):
    for k, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield k, line


def parse_game(text: str) -> tuple[Arena, str | None]:
    """Parse the line-oriented game format; returns the arena and the optional initial vertex."""
    lines = _lines(text)
    first = next(lines, None)
    if first is None or not HEADER.match(first[1]):
        raise ParseError("missing header", first[0] if first else 1)
    dims = int(HEADER.match(first[1]).group(1))
    if dims < 1:
        raise ParseError("dims must be at least 1", first[0])
    verts, seen, edges = [], {}, []
    initial = None
    for k, line in lines:
        parts = line.split()
        tag = parts[0]
        if tag == "vertex":
            if len(parts) < 4:
                raise ParseError("vertex needs an id, an owner and priorities", k)
            vid, owner, prios = parts[1], parts[2], parts[3:]
            if vid in seen:
                raise ParseError(f"duplicate vertex {vid}", k)
            if owner not in ("1", "2"):
                raise ParseError(f"owner must be 1 or 2, got {owner}", k)
            if len(prios) != dims:
                raise ParseError("dimension mismatch", k)
            try:
                values = tuple(int(p) for p in prios)
            except ValueError:
                raise ParseError("priorities must be integers", k) from None
            if any(p < 0 for p in values):
                raise ParseError("priorities must be non-negative", k)
            seen[vid] = k
            verts.append((vid, int(owner), values))
        elif tag == "edge":
            if len(parts) != 3:
                raise ParseError("edge needs two endpoints", k)
            edges.append((k, parts[1], parts[2]))
        elif tag == "init":
            if len(parts) != 2:
                raise ParseError("init needs one vertex", k)
            initial = (k, parts[1])
        else:
            raise ParseError(f"unknown directive {tag}", k)
    if not verts:
        raise ParseError("no vertices")
    for k, a, b in edges:
        for x in (a, b):
            if x not in seen:
                raise ParseError(f"unknown edge endpoint {x}", k)
    if initial is not None and initial[1] not in seen:
        raise ParseError(f"unknown initial vertex {initial[1]}", initial[0])
    arena = Arena(verts, [(a, b) for _, a, b in edges])
    return arena, (initial[1] if initial else None)


def write_game(arena: Arena, initial: str | None = None) -> str:
    out = [f"winpar 1 dims={arena.n}"]
    for i, v in enumerate(arena.ids):
        prios = " ".join(str(p) for p in arena.priorities[i])
        out.append(f"vertex {v} {arena.owner[i]} {prios}")
    out.extend(f"edge {a} {b}" for a, b in arena.edges())
    if initial is not None:
        out.append(f"init {initial}")
    return "\n".join(out) + "\n"


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(obj) -> str:
    """DOT text; player 1 as circles, player 2 as boxes, bad product states filled octagons."""
    lines = ["digraph G {"]
    if isinstance(obj, ProductArena):
        names = [obj.describe_state(i) for i in range(len(obj))]
        for i, name in enumerate(names):
            if obj.is_beta[i]:
                attrs = "shape=octagon, style=filled, fillcolor=lightgray"
            else:
                shape = "circle" if obj.game.owner[i] == P1 else "box"
                attrs = f"shape={shape}" + ("" if obj.good[i] else ", style=dashed")
            lines.append(f"  {_q(name)} [{attrs}, label={_q(name)}];")
        for a, b in zip(obj.game.esrc, obj.game.edst):
            lines.append(f"  {_q(names[a])} -> {_q(names[b])};")
    else:
        for i, v in enumerate(obj.ids):
            shape = "circle" if obj.owner[i] == P1 else "box"
            label = v + "\\n" + ",".join(str(p) for p in obj.priorities[i])
            lines.append(f'  {_q(v)} [shape={shape}, label="{label}"];')
        for a, b in obj.edges():
            lines.append(f"  {_q(a)} -> {_q(b)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_strategy(strategy: MooreStrategy) -> str:
    out = [f"moore {strategy.player} init={strategy.initial}"]
    for (m, v), w in sorted(strategy.next.items()):
        out.append(f"next {m} {v} -> {w}")
    for (m, v), m2 in sorted(strategy.update.items()):
        out.append(f"update {m} {v} -> {m2}")
    return "\n".join(out) + "\n"


def read_strategy(text: str) -> MooreStrategy:
    lines = _lines(text)
    first = next(lines, None)
    m = re.match(r"^moore\s+([12])\s+init=(\S+)$", first[1]) if first else None
    if m is None:
        raise ParseError("missing moore header", first[0] if first else 1)
    player, init = int(m.group(1)), m.group(2)
    memory = {init: None}
    update, nxt = {}, {}
    for k, line in lines:
        parts = line.split()
        if len(parts) != 5 or parts[3] != "->" or parts[0] not in ("next", "update"):
            raise ParseError("expected 'next|update <m> <v> -> <x>'", k)
        tag, mem, v, _, x = parts
        memory.setdefault(mem, None)
        if tag == "next":
            nxt[(mem, v)] = x
        else:
            update[(mem, v)] = x
            memory.setdefault(x, None)
    return MooreStrategy(player, tuple(memory), init, update, nxt)
