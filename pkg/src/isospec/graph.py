"""Weighted digraphs over the rational function field, structural sets and branches."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, Union

from .errors import (
    BadIndex,
    DuplicateEdge,
    EmptySet,
    NotStructural,
    ZeroWeightEdge,
)
from .ratfun import ZERO, RatFunc, as_ratfunc

__all__ = [
    "WeightedDigraph",
    "Branch",
    "graph_build",
    "as_vertex_set",
    "subgraph",
    "strip_loops",
    "is_structural",
    "is_st0",
    "in_Gpi",
    "branches",
    "branches_into",
]

VertexRef = Union[int, str]


class WeightedDigraph:
    """Finite digraph with loops whose edge weights live in the field W.

    ``weights[i][j]`` is the weight of the edge ``v_i -> v_j`` and is exactly
    :data:`~isospec.ratfun.ZERO` when the edge is absent.  Instances are
    immutable.
    """

    __slots__ = ("labels", "weights", "_index")

    def __init__(self, labels: Sequence[str], weights: Sequence[Sequence[RatFunc]]):
        labels = tuple(str(x) for x in labels)
        if len(set(labels)) != len(labels):
            raise ValueError(f"vertex labels are not distinct: {labels}")
        n = len(labels)
        rows = tuple(tuple(as_ratfunc(w) for w in row) for row in weights)
        if len(rows) != n or any(len(r) != n for r in rows):
            raise ValueError(f"weight matrix must be {n}x{n}")
        self.labels = labels
        self.weights = rows
        self._index = {lab: i for i, lab in enumerate(labels)}

    @classmethod
    def from_matrix(cls, matrix: Sequence[Sequence], labels: Sequence[str] | None = None) -> "WeightedDigraph":
        n = len(matrix)
        if labels is None:
            labels = [f"v{i + 1}" for i in range(n)]
        return cls(labels, matrix)

    @property
    def n(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    def __getitem__(self, ij: tuple[int, int]) -> RatFunc:
        i, j = ij
        return self.weights[i][j]

    def index(self, v: VertexRef) -> int:
        if isinstance(v, str):
            try:
                return self._index[v]
            except KeyError:
                raise BadIndex(f"no vertex labelled {v!r}") from None
        if isinstance(v, bool) or not isinstance(v, int) or not 0 <= v < self.n:
            raise BadIndex(f"vertex index {v!r} out of range for {self.n} vertices")
        return v

    def edges(self) -> Iterator[tuple[int, int, RatFunc]]:
        for i, row in enumerate(self.weights):
            for j, w in enumerate(row):
                if w:
                    yield i, j, w

    def successors(self, i: int) -> list[int]:
        return [j for j, w in enumerate(self.weights[i]) if w]

    def out_degree(self, i: int) -> int:
        """Number of out-edges of ``v_i``, its loop included."""
        return sum(1 for w in self.weights[i] if w)

    def in_degree(self, i: int) -> int:
        return sum(1 for row in self.weights if row[i])

    def loop(self, i: int) -> RatFunc:
        return self.weights[i][i]

    def weight_set(self) -> set[RatFunc]:
        return {w for _, _, w in self.edges()}

    def matrix(self) -> list[list[RatFunc]]:
        return [list(row) for row in self.weights]

    def relabel(self, labels: Sequence[str]) -> "WeightedDigraph":
        return WeightedDigraph(labels, self.weights)

    def __eq__(self, other):
        if not isinstance(other, WeightedDigraph):
            return NotImplemented
        return self.labels == other.labels and self.weights == other.weights

    def __hash__(self):
        return hash((self.labels, self.weights))

    def same_matrix(self, other: "WeightedDigraph") -> bool:
        """Equal adjacency matrices, ignoring labels."""
        return self.weights == other.weights

    def __repr__(self):
        edges = ", ".join(f"{self.labels[i]}->{self.labels[j]}: {w}" for i, j, w in self.edges())
        return f"WeightedDigraph([{', '.join(self.labels)}]; {edges})"


@dataclass(frozen=True)
class Branch:
    """A path or cycle between structural-set vertices.

    ``vertices`` holds the indices ``v_1 ... v_m``; ``omega`` is the sequence
    edge, loop, edge, ..., edge of length ``2(m-2)+1``.
    """

    vertices: tuple[int, ...]
    omega: tuple[RatFunc, ...]

    def __post_init__(self):
        m = len(self.vertices)
        if m < 2:
            raise ValueError("a branch has at least two vertices")
        if len(self.omega) != 2 * (m - 2) + 1:
            raise ValueError(f"weight sequence of a {m}-vertex branch has {2 * (m - 2) + 1} entries")

    @property
    def start(self) -> int:
        return self.vertices[0]

    @property
    def end(self) -> int:
        return self.vertices[-1]

    @property
    def interior(self) -> tuple[int, ...]:
        return self.vertices[1:-1]

    def __len__(self) -> int:
        return len(self.vertices)

    def edge_weights(self) -> tuple[RatFunc, ...]:
        return self.omega[0::2]

    def loop_weights(self) -> tuple[RatFunc, ...]:
        return self.omega[1::2]

    def tag(self, labels: Sequence[str]) -> str:
        return "-".join(labels[v] for v in self.vertices)


def graph_build(labels: Sequence[str], edges: Iterable[tuple[VertexRef, VertexRef, object]]) -> WeightedDigraph:
    """Build a graph from labelled vertices and ``(from, to, weight)`` triples.

    Endpoints may be labels or 0-based indices; weights may be anything
    :func:`~isospec.ratfun.as_ratfunc` accepts, including weight strings.
    """
    labels = [str(x) for x in labels]
    if len(set(labels)) != len(labels):
        raise ValueError("vertex labels are not distinct")
    index = {lab: i for i, lab in enumerate(labels)}
    n = len(labels)
    W = [[ZERO] * n for _ in range(n)]
    seen: set[tuple[int, int]] = set()

    def resolve(v) -> int:
        if isinstance(v, str):
            if v not in index:
                raise BadIndex(f"no vertex labelled {v!r}")
            return index[v]
        if isinstance(v, bool) or not isinstance(v, int) or not 0 <= v < n:
            raise BadIndex(f"vertex index {v!r} out of range")
        return v

    for a, b, w in edges:
        i, j = resolve(a), resolve(b)
        w = as_ratfunc(w)
        if not w:
            raise ZeroWeightEdge(f"edge {labels[i]}->{labels[j]} has weight 0")
        if (i, j) in seen:
            raise DuplicateEdge(f"edge {labels[i]}->{labels[j]} given twice")
        seen.add((i, j))
        W[i][j] = w
    return WeightedDigraph(labels, W)


def as_vertex_set(G: WeightedDigraph, S: Iterable[VertexRef]) -> tuple[int, ...]:
    """Sorted tuple of vertex indices from labels or indices."""
    return tuple(sorted({G.index(v) for v in S}))


def _complement(G: WeightedDigraph, S: Sequence[int]) -> list[int]:
    inside = set(S)
    return [v for v in range(G.n) if v not in inside]


def subgraph(G: WeightedDigraph, S: Iterable[VertexRef]) -> WeightedDigraph:
    """Induced subgraph on ``S``."""
    idx = as_vertex_set(G, S)
    if not idx:
        raise EmptySet("cannot restrict to an empty vertex set")
    return WeightedDigraph([G.labels[i] for i in idx], [[G.weights[i][j] for j in idx] for i in idx])


def strip_loops(G: WeightedDigraph) -> WeightedDigraph:
    W = [[ZERO if i == j else w for j, w in enumerate(row)] for i, row in enumerate(G.weights)]
    return WeightedDigraph(G.labels, W)


def topological_order(G: WeightedDigraph, vertices: Sequence[int]) -> tuple[list[int] | None, list[int]]:
    """Kahn's algorithm on the loop-free subgraph induced by ``vertices``.

    Returns ``(order, [])`` when acyclic, else ``(None, cycle)`` with a cycle
    recovered from the residual graph.
    """
    verts = list(vertices)
    inside = set(verts)
    indeg = {v: 0 for v in verts}
    succ: dict[int, list[int]] = {v: [] for v in verts}
    for v in verts:
        for w in G.successors(v):
            if w != v and w in inside:
                succ[v].append(w)
                indeg[w] += 1
    queue = deque(sorted(v for v in verts if indeg[v] == 0))
    order: list[int] = []
    while queue:
        v = queue.popleft()
        order.append(v)
        for w in succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                queue.append(w)
    if len(order) == len(verts):
        return order, []
    # every residual vertex keeps a residual predecessor; walk back until a repeat
    residual = {v for v in verts if indeg[v] > 0}
    pred = {w: v for v in sorted(residual) for w in succ[v] if w in residual}
    v = min(residual)
    seen: dict[int, int] = {}
    walk: list[int] = []
    while v not in seen:
        seen[v] = len(walk)
        walk.append(v)
        v = pred[v]
    cycle = walk[seen[v]:][::-1]
    return None, cycle


def is_structural(G: WeightedDigraph, S: Iterable[VertexRef]) -> tuple[bool, str]:
    """Whether ``S`` is a structural set, with a reason when it is not."""
    idx = as_vertex_set(G, S)
    if not idx:
        raise EmptySet("a structural set is nonempty")
    comp = _complement(G, idx)
    for v in comp:
        if G.loop(v).is_lambda():
            return False, f"vertex {G.labels[v]} outside the set has loop weight l"
    order, cycle = topological_order(G, comp)
    if order is None:
        names = " -> ".join(G.labels[v] for v in cycle + cycle[:1])
        return False, f"cycle outside the set: {names}"
    return True, ""


def require_structural(G: WeightedDigraph, S: Iterable[VertexRef]) -> tuple[int, ...]:
    idx = as_vertex_set(G, S)
    ok, reason = is_structural(G, idx)
    if not ok:
        raise NotStructural(reason)
    return idx


def is_st0(G: WeightedDigraph, S: Iterable[VertexRef]) -> bool:
    """Structural with every loop outside ``S`` exactly zero."""
    idx = as_vertex_set(G, S)
    if not idx:
        return False
    if any(G.loop(v) for v in _complement(G, idx)):
        return False
    return is_structural(G, idx)[0]


def in_Gpi(G: WeightedDigraph) -> bool:
    """Every nonzero weight has numerator degree at most its denominator degree."""
    return all(w.pi() <= 0 for _, _, w in G.edges())


def branches(G: WeightedDigraph, S: Iterable[VertexRef]) -> dict[tuple[int, int], list[Branch]]:
    """All branches of ``G`` with respect to the structural set ``S``.

    Keys are ordered pairs ``(i, j)`` of vertex indices in ``S`` that have at
    least one branch; each list is sorted by interior index sequence.
    """
    idx = require_structural(G, S)
    inside = set(idx)
    out: dict[tuple[int, int], list[Branch]] = {}

    def walk(path: list[int], omega: list[RatFunc]):
        v = path[-1]
        for w in G.successors(v):
            if w in inside:
                key = (path[0], w)
                b = Branch(tuple(path) + (w,), tuple(omega) + (G.weights[v][w],))
                out.setdefault(key, []).append(b)
            elif w != v and w not in path:
                walk(path + [w], omega + [G.weights[v][w], G.loop(w)])

    for i in idx:
        walk([i], [])
    for key in out:
        out[key].sort(key=lambda b: b.interior)
    return dict(sorted(out.items()))


def branches_into(G: WeightedDigraph, S: Iterable[VertexRef]) -> dict[int, list[Branch]]:
    """Branches grouped by their end vertex."""
    grouped: dict[int, list[Branch]] = {}
    for (i, j), bs in branches(G, S).items():
        grouped.setdefault(j, []).extend(bs)
    return grouped
