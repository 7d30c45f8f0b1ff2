"""Text formats: the PCN graph file, generic edge lists and CSV tables."""

from __future__ import annotations

import os
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .graph import CallGraph

HEADER_PREFIX = "PCN v1"


class GraphFormatError(ValueError):
    def __init__(self, path, lineno: int | None, message: str):
        where = f"{path}:{lineno}" if lineno is not None else str(path)
        super().__init__(f"{where}: {message}")
        self.path = path
        self.lineno = lineno


def save_graph(g: CallGraph, path: str | os.PathLike) -> None:
    """Write ``g`` as ``PCN v1 N=<n> E=<pairs>``, one ``<id> <name>`` line per
    node, then ``<src> <dst> <multiplicity>`` per edge in sorted order."""
    for name in g.names:
        if not name or any(c.isspace() for c in name):
            raise ValueError(f"node name {name!r} cannot be serialized")
    lines = [f"{HEADER_PREFIX} N={g.n} E={g.n_edges}"]
    lines.extend(f"{i} {name}" for i, name in enumerate(g.names))
    src, dst, mult = g.edge_arrays
    lines.extend(f"{s} {d} {m}" for s, d, m in zip(src.tolist(), dst.tolist(), mult.tolist()))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _parse_header(path, line: str) -> tuple[int, int]:
    parts = line.split()
    if len(parts) != 4 or " ".join(parts[:2]) != HEADER_PREFIX:
        raise GraphFormatError(path, 1, f"expected header '{HEADER_PREFIX} N=<n> E=<e>', got {line.strip()!r}")
    try:
        key_n, n = parts[2].split("=")
        key_e, e = parts[3].split("=")
        if key_n != "N" or key_e != "E":
            raise ValueError
        n, e = int(n), int(e)
    except ValueError:
        raise GraphFormatError(path, 1, f"malformed header {line.strip()!r}") from None
    if n < 0 or e < 0:
        raise GraphFormatError(path, 1, "negative counts in header")
    return n, e


def load_graph(path: str | os.PathLike) -> CallGraph:
    """Inverse of :func:`save_graph`."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise GraphFormatError(path, 1, "empty file")
    n, e = _parse_header(path, lines[0])
    if len(lines) < 1 + n + e:
        raise GraphFormatError(path, len(lines), f"truncated: expected {1 + n + e} lines, found {len(lines)}")
    if any(line.strip() for line in lines[1 + n + e :]):
        raise GraphFormatError(path, 2 + n + e, "trailing data after the last edge")
    names = []
    for k in range(n):
        lineno = k + 2
        parts = lines[k + 1].split()
        if len(parts) != 2 or parts[0] != str(k):
            raise GraphFormatError(path, lineno, f"expected '{k} <name>', got {lines[k + 1]!r}")
        names.append(parts[1])
    edges: dict[tuple[int, int], int] = {}
    for k in range(e):
        lineno = n + k + 2
        parts = lines[n + k + 1].split()
        try:
            s, d, m = (int(p) for p in parts)
        except ValueError:
            raise GraphFormatError(path, lineno, f"expected '<src> <dst> <multiplicity>', got {lines[n + k + 1]!r}") from None
        if not (0 <= s < n and 0 <= d < n):
            raise GraphFormatError(path, lineno, f"edge ({s}, {d}) references a node id outside [0, {n})")
        if m < 1:
            raise GraphFormatError(path, lineno, f"multiplicity {m} < 1")
        if (s, d) in edges:
            raise GraphFormatError(path, lineno, f"duplicate edge ({s}, {d})")
        edges[(s, d)] = m
    return CallGraph(n, tuple(names), edges)


def load_edge_list(path: str | os.PathLike, format: str = "plain") -> CallGraph:
    """Read a directed edge list, one ``src dst`` pair per line.

    ``plain`` expects nonnegative integer ids and gives ``N = max id + 1``;
    ``named`` takes arbitrary tokens and numbers them by first appearance.
    ``#`` starts a comment.  Repeated lines add to an edge's multiplicity.
    """
    if format not in ("plain", "named"):
        raise ValueError(f"format must be 'plain' or 'named', got {format!r}")
    ids: dict[str, int] = {}
    edges: dict[tuple[int, int], int] = {}
    max_id = -1
    with open(path, encoding="utf-8", errors="replace") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise GraphFormatError(path, lineno, f"expected two fields, got {len(parts)}")
            if format == "plain":
                try:
                    s, d = int(parts[0]), int(parts[1])
                except ValueError:
                    raise GraphFormatError(path, lineno, f"non-integer node id in {line!r}") from None
                if s < 0 or d < 0:
                    raise GraphFormatError(path, lineno, "negative node id")
                max_id = max(max_id, s, d)
            else:
                s = ids.setdefault(parts[0], len(ids))
                d = ids.setdefault(parts[1], len(ids))
            edges[(s, d)] = edges.get((s, d), 0) + 1
    if not edges:
        raise GraphFormatError(path, None, "empty graph")
    if format == "plain":
        n = max_id + 1
        names = tuple(str(i) for i in range(n))
    else:
        n = len(ids)
        names = tuple(ids)
    return CallGraph(n, names, dict(sorted(edges.items())))


def fmt(x) -> str:
    """Numbers at full precision: integers as-is, floats with 17 significant digits."""
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return str(x)


def write_csv(
    path: str | os.PathLike,
    columns: Sequence[str],
    rows: Iterable[Sequence],
    comments: Sequence[str] = (),
) -> None:
    """Comma-separated table with ``#`` comment lines and a ``#`` column header."""
    out = [f"# {c}" for c in comments]
    out.append("# " + ",".join(columns))
    out.extend(",".join(fmt(v) for v in row) for row in rows)
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")


def read_csv(path: str | os.PathLike) -> list[list[str]]:
    with open(path, encoding="utf-8") as fh:
        return [line.rstrip("\n").split(",") for line in fh if line.strip() and not line.startswith("#")]
