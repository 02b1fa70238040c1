"""Text formats: graph/length files, signal files, PGM images, curve CSV."""

from __future__ import annotations

import numpy as np

from .errors import ParseError
from .generators import GrayImage
from .graph import WeightedGraph
from .uncertainty import MeanCurve, UncertaintyCurve


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def parse_edge_list(text: str, allow_zero: bool = False):
    """Parse ``n`` followed by ``u v w`` lines; returns ``(n, [(u, v, w), ...])``.

    Blank lines and ``#`` comments are ignored. Self-loops, repeated pairs,
    out-of-range nodes and negative (or, unless ``allow_zero``, zero)
    values are rejected.
    """
    lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((lineno, line))
    if not lines:
        raise ParseError("empty graph file")
    lineno, first = lines[0]
    try:
        n = int(first)
    except ValueError:
        raise ParseError(f"line {lineno}: expected node count, got {first!r}") from None
    if n < 1:
        raise ParseError(f"line {lineno}: node count must be positive")
    seen = set()
    edges = []
    for lineno, line in lines[1:]:
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(f"line {lineno}: expected 'u v w', got {line!r}")
        try:
            u, v, w = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise ParseError(f"line {lineno}: malformed entry {line!r}") from None
        if not (0 <= u < n and 0 <= v < n):
            raise ParseError(f"line {lineno}: node index out of range [0, {n})")
        if u == v:
            raise ParseError(f"line {lineno}: self-loop at node {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise ParseError(f"line {lineno}: duplicate pair {key}")
        if not np.isfinite(w) or w < 0 or (w == 0 and not allow_zero):
            raise ParseError(f"line {lineno}: invalid value {parts[2]!r}")
        seen.add(key)
        edges.append((u, v, w))
    return n, edges


def parse_graph(text: str) -> WeightedGraph:
    n, edges = parse_edge_list(text)
    return WeightedGraph.from_edges(n, edges)


def parse_lengths(text: str) -> np.ndarray:
    """Length matrix from the edge-list format; unlisted pairs are ``inf``."""
    n, edges = parse_edge_list(text, allow_zero=True)
    m = np.full((n, n), np.inf)
    np.fill_diagonal(m, 0.0)
    for u, v, w in edges:
        m[u, v] = m[v, u] = w
    return m


def format_graph(g: WeightedGraph) -> str:
    rows = [str(g.n)] + [f"{u} {v} {_fmt(w)}" for u, v, w in g.edges()]
    return "\n".join(rows) + "\n"


def format_lengths(lengths) -> str:
    m = np.asarray(lengths, dtype=float)
    n = m.shape[0]
    rows = [str(n)]
    for u in range(n):
        for v in range(u + 1, n):
            if np.isfinite(m[u, v]):
                rows.append(f"{u} {v} {_fmt(m[u, v])}")
    return "\n".join(rows) + "\n"


def parse_signal(text: str, n: int | None = None) -> np.ndarray:
    values = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            values.append(float(line))
        except ValueError:
            raise ParseError(f"line {lineno}: not a number: {line!r}") from None
    x = np.array(values)
    if not np.all(np.isfinite(x)):
        raise ParseError("signal contains non-finite values")
    if n is not None and x.size != n:
        raise ParseError(f"signal has {x.size} values, graph has {n} nodes")
    return x


def _pgm_tokens(data: bytes):
    """Yield whitespace-separated header tokens and the offset after each."""
    i, end = 0, len(data)
    while i < end:
        c = data[i : i + 1]
        if c == b"#":
            while i < end and data[i : i + 1] not in (b"\n", b"\r"):
                i += 1
        elif c.isspace():
            i += 1
        else:
            j = i
            while j < end and not data[j : j + 1].isspace() and data[j : j + 1] != b"#":
                j += 1
            yield data[i:j], j
            i = j


def read_pgm(data: bytes) -> GrayImage:
    """Decode an 8-bit binary (P5) or ASCII (P2) PGM into intensities in [0, 1]."""
    tokens = _pgm_tokens(data)
    try:
        magic, _ = next(tokens)
        if magic not in (b"P2", b"P5"):
            raise ParseError(f"not a PGM file (magic {magic[:2]!r})")
        width = int(next(tokens)[0])
        height = int(next(tokens)[0])
        maxval_tok, offset = next(tokens)
        maxval = int(maxval_tok)
    except (StopIteration, ValueError):
        raise ParseError("truncated or malformed PGM header") from None
    if width < 1 or height < 1 or not 0 < maxval < 256:
        raise ParseError(f"unsupported PGM geometry {width}x{height}, maxval {maxval}")
    count = width * height
    if magic == b"P5":
        raster = data[offset + 1 : offset + 1 + count]
        if len(raster) != count:
            raise ParseError(f"PGM raster has {len(raster)} bytes, expected {count}")
        pixels = np.frombuffer(raster, dtype=np.uint8).astype(float)
    else:
        try:
            pixels = np.array([int(t) for t, _ in tokens], dtype=float)
        except ValueError:
            raise ParseError("non-integer pixel in ASCII PGM") from None
        if pixels.size != count:
            raise ParseError(f"PGM has {pixels.size} pixels, expected {count}")
    if np.any(pixels > maxval):
        raise ParseError("pixel value exceeds maxval")
    return GrayImage(width, height, pixels / maxval)


def write_pgm(img: GrayImage, binary: bool = True) -> bytes:
    pixels = np.rint(img.intensities * 255).astype(np.uint8)
    header = f"{'P5' if binary else 'P2'}\n{img.width} {img.height}\n255\n".encode()
    if binary:
        return header + pixels.tobytes()
    rows = [" ".join(str(int(p)) for p in row) for row in pixels.reshape(img.height, img.width)]
    return header + ("\n".join(rows) + "\n").encode()


def curve_csv(c: UncertaintyCurve) -> str:
    rows = ["s,g,slope"] + [f"{_fmt(p.s)},{_fmt(p.g)},{_fmt(p.slope)}" for p in c.points]
    return "\n".join(rows) + "\n"


def parse_curve_csv(text: str) -> np.ndarray:
    lines = text.strip().splitlines()
    if not lines or lines[0].strip() != "s,g,slope":
        raise ParseError("curve CSV must start with header 's,g,slope'")
    return np.array([[float(v) for v in line.split(",")] for line in lines[1:]])


def mean_curve_csv(mc: MeanCurve) -> str:
    rows = ["s,mean_g,stddev_g,trials"] + [
        f"{_fmt(s)},{_fmt(m)},{_fmt(sd)},{mc.trials}" for s, m, sd in zip(mc.s, mc.mean_g, mc.stddev_g)
    ]
    return "\n".join(rows) + "\n"


def gnuplot_block(columns, header: dict, names=("s", "g")) -> str:
    """Whitespace-separated data block with a ``#`` comment header."""
    lines = [f"# {k}: {v}" for k, v in header.items()]
    lines.append("# " + " ".join(names))
    for row in zip(*columns):
        lines.append(" ".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"
