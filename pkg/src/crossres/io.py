"""Graph ingestion (edge list, GraphML, GML), layout JSON and SVG export."""

from __future__ import annotations

import json
import re
import xml.etree.ElementTree as ET
from pathlib import Path
from typing import IO, Optional, Union

import numpy as np

from .graph_model import BoundingBox, Drawing, Graph, GraphError, bounding_box

Source = Union[bytes, str, IO[bytes], IO[str]]

FORMATS = ("edgelist", "graphml", "gml")


class ParseError(ValueError):
    pass


def _read_text(source: Source) -> str:
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    return source


def format_from_suffix(path: Union[str, Path]) -> str:
    suffix = Path(path).suffix.lower()
    if suffix == ".graphml":
        return "graphml"
    if suffix == ".gml":
        return "gml"
    return "edgelist"


def load_graph(source: Source, format: str = "edgelist") -> Graph:
    """Parse a graph; self-loops and duplicate edges raise :class:`GraphError`."""
    graph, _ = load_graph_with_positions(source, format)
    return graph


def load_graph_with_positions(source: Source, format: str = "edgelist"):
    """Like :func:`load_graph` but also returns an ``(n, 2)`` array of
    coordinates when every node carries x/y attributes, else ``None``."""
    text = _read_text(source)
    if format == "edgelist":
        return _parse_edgelist(text), None
    if format == "graphml":
        return _parse_graphml(text)
    if format == "gml":
        return _parse_gml(text)
    raise ValueError(f"unknown graph format {format!r}")


def read_graph_file(path: Union[str, Path]) -> Graph:
    with open(path, "rb") as fh:
        return load_graph(fh, format_from_suffix(path))


def _parse_edgelist(text: str) -> Graph:
    edges = []
    n = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"line {lineno}: expected 'u v', got {raw!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"line {lineno}: vertex ids must be integers") from None
        if u < 0 or v < 0:
            raise GraphError(f"line {lineno}: negative vertex id")
        edges.append((u, v))
        n = max(n, u + 1, v + 1)
    return Graph(n, edges)


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _parse_graphml(text: str):
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise ParseError(f"malformed GraphML: {exc}") from None
    graph_el = next((el for el in root.iter() if _local(el.tag) == "graph"), None)
    if graph_el is None:
        raise ParseError("no <graph> element")

    coord_keys = {}
    for key in root.iter():
        if _local(key.tag) == "key" and key.get("attr.name") in ("x", "y"):
            coord_keys[key.get("id")] = key.get("attr.name")

    index: dict[str, int] = {}
    coords: list[dict] = []
    edges = []
    for el in graph_el:
        tag = _local(el.tag)
        if tag == "node":
            node_id = el.get("id")
            if node_id is None or node_id in index:
                raise ParseError(f"missing or repeated node id {node_id!r}")
            index[node_id] = len(index)
            xy = {}
            for data in el:
                if _local(data.tag) == "data" and data.get("key") in coord_keys:
                    xy[coord_keys[data.get("key")]] = float(data.text)
            coords.append(xy)
        elif tag == "edge":
            edges.append((el.get("source"), el.get("target")))
    resolved = []
    for s, t in edges:
        if s not in index or t not in index:
            raise GraphError(f"edge ({s}, {t}) references an unknown node")
        resolved.append((index[s], index[t]))
    graph = Graph(len(index), resolved)
    return graph, _coords_or_none(coords)


def _coords_or_none(coords: list[dict]) -> Optional[np.ndarray]:
    if coords and all("x" in c and "y" in c for c in coords):
        return np.array([(c["x"], c["y"]) for c in coords], dtype=float)
    return None


_GML_TOKEN = re.compile(r'\s*(?:(\[)|(\])|("[^"]*")|([^\s\[\]"]+))')


def _gml_tokens(text: str):
    text = "\n".join(line for line in text.splitlines() if not line.lstrip().startswith("#"))
    pos = 0
    while pos < len(text):
        match = _GML_TOKEN.match(text, pos)
        if match is None:
            if text[pos:].strip():
                raise ParseError(f"unexpected GML input at offset {pos}")
            break
        pos = match.end()
        if match.group(0).strip():
            yield match.group(0).strip()


def _gml_list(tokens, closing: bool) -> list:
    items = []
    for tok in tokens:
        if tok == "]":
            if not closing:
                raise ParseError("unbalanced ']' in GML")
            return items
        key = tok
        value = next(tokens, None)
        if value is None:
            raise ParseError(f"GML key {key!r} without value")
        if value == "[":
            items.append((key, _gml_list(tokens, closing=True)))
        elif value == "]":
            raise ParseError(f"GML key {key!r} without value")
        else:
            items.append((key, value.strip('"')))
    if closing:
        raise ParseError("unterminated GML list")
    return items


def _parse_gml(text: str):
    top = _gml_list(_gml_tokens(text), closing=False)
    graphs = [v for k, v in top if k == "graph"]
    if len(graphs) != 1:
        raise ParseError("expected exactly one GML graph block")
    index: dict[str, int] = {}
    coords: list[dict] = []
    edges = []
    for key, value in graphs[0]:
        if key == "node":
            attrs = dict((k, v) for k, v in value if not isinstance(v, list))
            if "id" not in attrs or attrs["id"] in index:
                raise ParseError("GML node without unique id")
            index[attrs["id"]] = len(index)
            xy = {}
            for k, v in value:
                if k == "graphics" and isinstance(v, list):
                    xy.update((gk, float(gv)) for gk, gv in v if gk in ("x", "y"))
            coords.append(xy)
        elif key == "edge":
            attrs = dict((k, v) for k, v in value if not isinstance(v, list))
            edges.append((attrs.get("source"), attrs.get("target")))
    resolved = []
    for s, t in edges:
        if s not in index or t not in index:
            raise GraphError(f"edge ({s}, {t}) references an unknown node")
        resolved.append((index[s], index[t]))
    return Graph(len(index), resolved), _coords_or_none(coords)


# ---------------------------------------------------------------------------
# Layout JSON
# ---------------------------------------------------------------------------


def layout_document(drawing: Drawing) -> dict:
    return {
        "nodes": [
            {"id": v, "x": float(x), "y": float(y)}
            for v, (x, y) in enumerate(drawing.positions.tolist())
        ],
        "edges": [[u, v] for u, v in drawing.graph.edges],
    }


def save_layout(drawing: Drawing, sink: Union[str, Path, IO[str]]) -> None:
    """Write the layout JSON.  Floats use Python's shortest round-trip repr,
    so reloading gives bit-identical coordinates."""
    text = json.dumps(layout_document(drawing), indent=1) + "\n"
    if hasattr(sink, "write"):
        sink.write(text)
    else:
        Path(sink).write_text(text)


def load_layout(source: Union[Source, Path]) -> Drawing:
    if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
        source = Path(source).read_text()
    try:
        doc = json.loads(_read_text(source))
        nodes = sorted(doc["nodes"], key=lambda node: int(node["id"]))
        ids = [int(node["id"]) for node in nodes]
        if ids != list(range(len(ids))):
            raise ParseError("node ids must be dense 0..n-1")
        positions = [(float(node["x"]), float(node["y"])) for node in nodes]
        graph = Graph(len(nodes), [tuple(e) for e in doc["edges"]])
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise ParseError(f"malformed layout document: {exc}") from None
    return Drawing(graph, positions)


# ---------------------------------------------------------------------------
# SVG
# ---------------------------------------------------------------------------


def _padded_box(drawing: Drawing) -> BoundingBox:
    if drawing.graph.n == 0:
        return BoundingBox(0.0, 0.0, 1.0, 1.0)
    box = bounding_box(drawing)
    w = box.width or 1.0
    h = box.height or 1.0
    return BoundingBox(box.min_x - 0.05 * w, box.min_y - 0.05 * h, box.max_x + 0.05 * w, box.max_y + 0.05 * h)


def render_svg(drawing: Drawing, width: int = 600, stroke: str = "#333333",
               highlight=None, highlight_stroke: str = "#d62728") -> str:
    """Render a straight-line drawing as an SVG 1.1 document.

    ``highlight`` is an optional critical set; edges belonging to any of its
    pairs are drawn in ``highlight_stroke``.
    """
    box = _padded_box(drawing)
    height = max(1, round(width * box.height / box.width))
    unit = max(box.width, box.height) / width
    marked = set()
    if highlight is not None:
        for pair in highlight.pairs:
            marked.update(pair)

    pos = drawing.positions.tolist()
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="{box.min_x!r} {box.min_y!r} {box.width!r} {box.height!r}">',
    ]
    for k, (u, v) in enumerate(drawing.graph.edges):
        color = highlight_stroke if k in marked else stroke
        out.append(
            f'<line x1="{pos[u][0]!r}" y1="{pos[u][1]!r}" x2="{pos[v][0]!r}" y2="{pos[v][1]!r}" '
            f'stroke="{color}" stroke-width="{unit * 1.5!r}"/>'
        )
    for v in range(drawing.graph.n):
        out.append(f'<circle cx="{pos[v][0]!r}" cy="{pos[v][1]!r}" r="{unit * 3!r}" fill="#1f77b4"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
