"""Readers and writers for DIMACS ``.col`` files, edge lists and assignments."""

from __future__ import annotations

import logging
import re
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np

from .errors import DimacsParseError
from .graph import ColorAssignment, Graph


logger = logging.getLogger(__name__)

TextLike = Union[str, bytes]

_NODE_COUNT_HEADER = re.compile(r"^\s*#\s*n\s*=\s*(\d+)")


def _as_text(data: TextLike) -> str:
    if isinstance(data, bytes):
        return data.decode("utf-8", errors="replace")
    return data


def parse_dimacs(data: TextLike, *, strict: bool = False) -> Graph:
    """Parse a DIMACS ``.col`` document (1-based ids) into a :class:`Graph`.

    Repeated and reversed ``e`` lines are collapsed unless *strict* is set.
    Errors carry the offending line number.
    """
    n: Optional[int] = None
    declared_m = 0
    edges: List[Tuple[int, int]] = []
    seen: set = set()

    for line_number, raw in enumerate(_as_text(data).splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] == "c":
            continue

        tokens = line.split()
        kind = tokens[0]

        if kind == "p":
            if n is not None:
                raise DimacsParseError("duplicate 'p' line", line_number)
            if len(tokens) != 4:
                raise DimacsParseError(f"expected 'p edge N M', got {line!r}", line_number)
            try:
                n = int(tokens[2])
                declared_m = int(tokens[3])
            except ValueError:
                raise DimacsParseError(f"non-integer size in {line!r}", line_number) from None
            if n < 0 or declared_m < 0:
                raise DimacsParseError(f"negative size in {line!r}", line_number)

        elif kind == "e":
            if n is None:
                raise DimacsParseError("edge line before 'p' line", line_number)
            if len(tokens) != 3:
                raise DimacsParseError(f"expected 'e u v', got {line!r}", line_number)
            try:
                u, v = int(tokens[1]), int(tokens[2])
            except ValueError:
                raise DimacsParseError(f"non-integer node id in {line!r}", line_number) from None
            for node in (u, v):
                if not 1 <= node <= n:
                    raise DimacsParseError(f"node id {node} outside 1..{n}", line_number)
            if u == v:
                raise DimacsParseError(f"self-loop on node {u}", line_number)
            pair = (min(u, v) - 1, max(u, v) - 1)
            if pair in seen:
                if strict:
                    raise DimacsParseError(f"duplicate edge {u} {v}", line_number)
                continue
            seen.add(pair)
            edges.append(pair)

        else:
            raise DimacsParseError(f"unrecognised line type {kind!r}", line_number)

    if n is None:
        raise DimacsParseError("missing 'p' line")

    graph = Graph.from_edges(n, edges)
    if graph.m != declared_m:
        logger.debug("DIMACS header declares %d edges, parsed %d distinct", declared_m, graph.m)
    return graph


def write_dimacs(g: Graph) -> bytes:
    """Serialise *g* as DIMACS with 1-based ids."""
    lines = [f"p edge {g.n} {g.m}"]
    lines.extend(f"e {u + 1} {v + 1}" for u, v in g.edges.tolist())
    return ("\n".join(lines) + "\n").encode("utf-8")


def parse_edge_list(data: TextLike, n: Optional[int] = None) -> Graph:
    """Parse ``u v`` lines with 0-based ids; ``#`` starts a comment.

    The node count is *n* when given, else the first ``# n=N`` header
    (as written by :func:`write_edge_list`), else one more than the
    largest id seen.
    """
    edges: List[Tuple[int, int]] = []
    for line_number, raw in enumerate(_as_text(data).splitlines(), start=1):
        if n is None:
            header = _NODE_COUNT_HEADER.match(raw)
            if header:
                n = int(header.group(1))
                seen = max((max(e) for e in edges), default=-1)
                if seen >= n:
                    raise DimacsParseError(f"header declares {n} nodes but node id {seen} was seen", line_number)
                continue
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise DimacsParseError(f"expected 'u v', got {raw.strip()!r}", line_number)
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise DimacsParseError(f"non-integer node id in {raw.strip()!r}", line_number) from None
        if u < 0 or v < 0:
            raise DimacsParseError(f"negative node id in {raw.strip()!r}", line_number)
        if n is not None and max(u, v) >= n:
            raise DimacsParseError(f"node id {max(u, v)} outside 0..{n - 1}", line_number)
        if u == v:
            raise DimacsParseError(f"self-loop on node {u}", line_number)
        edges.append((u, v))

    if n is None:
        n = 1 + max((max(e) for e in edges), default=-1)
    return Graph.from_edges(n, edges)


def write_edge_list(g: Graph) -> bytes:
    lines = [f"# n={g.n} m={g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.edges.tolist())
    return ("\n".join(lines) + "\n").encode("utf-8")


def load_graph(path: Union[str, Path], *, strict: bool = False) -> Graph:
    """Read a graph file; ``.col`` means DIMACS, anything else an edge list."""
    path = Path(path)
    data = path.read_bytes()
    if path.suffix.lower() == ".col":
        return parse_dimacs(data, strict=strict)
    return parse_edge_list(data)


def save_graph(g: Graph, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = write_dimacs(g) if path.suffix.lower() == ".col" else write_edge_list(g)
    path.write_bytes(payload)
    return path


def write_assignment(a: ColorAssignment, path: Union[str, Path]) -> Path:
    """One colour per line; line i holds the colour of node i."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(f"{c}\n" for c in a.colors.tolist()), encoding="utf-8")
    return path


def read_assignment(path: Union[str, Path], k: Optional[int] = None) -> ColorAssignment:
    lines = [ln.strip() for ln in Path(path).read_text(encoding="utf-8").splitlines()]
    colors = np.asarray([int(ln) for ln in lines if ln], dtype=np.int64)
    if k is None:
        k = int(colors.max()) + 1 if colors.size else 1
    return ColorAssignment(colors, k)
