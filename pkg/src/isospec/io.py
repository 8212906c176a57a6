"""JSON documents for graphs and interactions, and DOT export.

Graph document::

    {"format": 1, "vertices": ["v1", "v2"],
     "edges": [{"from": "v1", "to": "v2", "weight": "1/(l-1)"}]}

Repeated ``(from, to)`` records are merged by adding their weights; a sum
that cancels to zero leaves no edge.

Interaction document::

    {"format": 1, "labels": [...], "box": [[0, 1], ...],
     "components": [<expression>, ...],
     "lipschitz": [[...], ...],            # optional, null entries are estimated
     "local_maps": [{"func": <expression>, "L": 1.0} | null, ...]}   # optional

Expressions are ``{"kind", "params", "args"}`` objects (see
:func:`isospec.expr.node_from_json`); a bare integer or vertex label in
``args`` stands for that variable.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Iterable, Mapping

import numpy as np

from .dynnet import InteractionNetwork, LocalMap, lipschitz_estimate
from .errors import DocumentError, ZeroWeightEdge
from .expr import node_from_json, node_to_json
from .graph import VertexRef, WeightedDigraph, as_vertex_set
from .ratfun import ZERO, RatFunc
from .weights import format_weight, parse_weight

__all__ = [
    "FORMAT",
    "graph_from_doc",
    "graph_to_doc",
    "load_graph",
    "network_from_doc",
    "network_to_doc",
    "load_network",
    "to_dot",
]

FORMAT = 1


def _check_format(doc: Any, what: str) -> None:
    if not isinstance(doc, Mapping):
        raise DocumentError(f"{what} document must be a JSON object")
    if doc.get("format") != FORMAT:
        raise DocumentError(f"{what} document must declare \"format\": {FORMAT}")


def graph_from_doc(doc: Mapping) -> WeightedDigraph:
    _check_format(doc, "graph")
    labels = doc.get("vertices")
    if not isinstance(labels, list) or not all(isinstance(v, str) for v in labels):
        raise DocumentError("'vertices' must be a list of strings")
    if len(set(labels)) != len(labels):
        raise DocumentError("vertex labels must be distinct")
    index = {v: k for k, v in enumerate(labels)}
    n = len(labels)
    W = [[ZERO] * n for _ in range(n)]
    for rec in doc.get("edges", []):
        if not isinstance(rec, Mapping) or not {"from", "to", "weight"} <= set(rec):
            raise DocumentError(f"edge record needs from, to and weight: {rec!r}")
        a, b = rec["from"], rec["to"]
        if a not in index or b not in index:
            raise DocumentError(f"edge {a!r}->{b!r} names an unknown vertex")
        w = rec["weight"]
        w = parse_weight(w) if isinstance(w, str) else RatFunc.const(w) if isinstance(w, int) else None
        if w is None:
            raise DocumentError("edge weights are expression strings or integers")
        if not w:
            raise ZeroWeightEdge(f"edge {a}->{b} has weight 0")
        i, j = index[a], index[b]
        W[i][j] = W[i][j] + w
    return WeightedDigraph(labels, W)


def graph_to_doc(G: WeightedDigraph) -> dict:
    return {
        "format": FORMAT,
        "vertices": list(G.labels),
        "edges": [{"from": G.labels[i], "to": G.labels[j], "weight": format_weight(w)} for i, j, w in G.edges()],
    }


def _read_json(path: str | Path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def load_graph(path: str | Path) -> WeightedDigraph:
    return graph_from_doc(_read_json(path))


def _resolve_labels(obj: Any, index: Mapping[str, int]) -> Any:
    if isinstance(obj, str):
        if obj not in index:
            raise DocumentError(f"expression names unknown vertex {obj!r}")
        return index[obj]
    if isinstance(obj, Mapping):
        out = dict(obj)
        if "args" in out:
            out["args"] = [_resolve_labels(a, index) for a in out["args"]]
        return out
    return obj


def network_from_doc(doc: Mapping) -> InteractionNetwork:
    _check_format(doc, "interaction")
    comps_raw = doc.get("components")
    if not isinstance(comps_raw, list) or not comps_raw:
        raise DocumentError("'components' must be a nonempty list")
    n = len(comps_raw)
    labels = doc.get("labels") or [f"v{i + 1}" for i in range(n)]
    index = {v: k for k, v in enumerate(labels)}
    try:
        comps = [node_from_json(_resolve_labels(c, index)) for c in comps_raw]
        box = np.asarray(doc.get("box", [[0.0, 1.0]] * n), dtype=float)
        lam = None
        if doc.get("lipschitz") is not None:
            lam = np.array([[np.nan if x is None else float(x) for x in row] for row in doc["lipschitz"]])
        maps = None
        if doc.get("local_maps") is not None:
            maps = [None if m is None else LocalMap(node_from_json(_resolve_labels(m["func"], index)), float(m["L"]))
                    for m in doc["local_maps"]]
        F = InteractionNetwork(comps, box, list(labels), local_maps=maps)
    except DocumentError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise DocumentError(f"malformed interaction document: {exc}") from None
    if lam is not None:
        if lam.shape != (n, n):
            raise DocumentError(f"'lipschitz' must be {n}x{n}")
        if np.isnan(lam).any():
            lam = lipschitz_estimate(F, declared=lam)
        F.lipschitz = lam
    return F


def network_to_doc(F: InteractionNetwork) -> dict:
    doc: dict[str, Any] = {
        "format": FORMAT,
        "labels": list(F.labels),
        "box": F.box.tolist(),
        "components": [node_to_json(c) for c in F.components],
    }
    if F.lipschitz is not None:
        doc["lipschitz"] = F.lipschitz.tolist()
    if F.local_maps is not None:
        doc["local_maps"] = [None if m is None else {"func": node_to_json(m.func), "L": m.L} for m in F.local_maps]
    return doc


def load_network(path: str | Path) -> InteractionNetwork:
    return network_from_doc(_read_json(path))


def _dot_id(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(G: WeightedDigraph, S: Iterable[VertexRef] | None = None, name: str = "G") -> str:
    """DOT text; vertices of ``S`` are drawn as filled double circles."""
    marked = set(as_vertex_set(G, S)) if S is not None else set()
    lines = [f"digraph {_dot_id(name)} {{"]
    for k, lab in enumerate(G.labels):
        attrs = ' [shape=doublecircle, style=filled, fillcolor="lightgray"]' if k in marked else " [shape=circle]"
        lines.append(f"  {_dot_id(lab)}{attrs};")
    for i, j, w in G.edges():
        lines.append(f"  {_dot_id(G.labels[i])} -> {_dot_id(G.labels[j])} [label={_dot_id(format_weight(w))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
