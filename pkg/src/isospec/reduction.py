"""Isospectral reductions.

Two independent routes compute the same object:

* :func:`reduce` sums branch products over the branches of a structural set;
* :func:`reduce_matrix` takes the Schur complement ``D - C A^{-1} B`` of the
  block of ``M - l I`` indexed by the removed vertices, with ``A`` applied by
  a triangular solve in topological order.

The test-suite checks each against the other.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import (
    ComplementNotTriangulable,
    EmptyTarget,
    InteriorLoopEqualsLambda,
    NotInGpi,
    NotNested,
    SingularDiagonal,
    StepNotStructural,
)
from .graph import (
    Branch,
    VertexRef,
    WeightedDigraph,
    as_vertex_set,
    branches,
    in_Gpi,
    is_structural,
    require_structural,
    topological_order,
)
from .ratfun import LAMBDA, ZERO, RatFunc

__all__ = [
    "ReductionTrace",
    "branch_product",
    "reduce",
    "reduce_matrix",
    "reduce_sequence",
    "reduce_any",
    "reduce_via_matrix",
    "shifted_matrix",
]


def branch_product(branch: Branch) -> RatFunc:
    """``w(e_12) * prod w(e_k,k+1) / (l - w(e_kk))`` over the interior of the branch."""
    edges = branch.edge_weights()
    loops = branch.loop_weights()
    out = edges[0]
    for e, loop in zip(edges[1:], loops):
        if loop.is_lambda():
            raise InteriorLoopEqualsLambda("interior loop weight equals l")
        out = out * e / (LAMBDA - loop)
    return out


def reduce(G: WeightedDigraph, S: Iterable[VertexRef]) -> WeightedDigraph:
    """Isospectral reduction of ``G`` over the structural set ``S``."""
    idx = require_structural(G, S)
    pos = {v: k for k, v in enumerate(idx)}
    W = [[ZERO] * len(idx) for _ in idx]
    for (i, j), bs in branches(G, idx).items():
        total = ZERO
        for b in bs:
            total = total + branch_product(b)
        W[pos[i]][pos[j]] = total
    return WeightedDigraph([G.labels[v] for v in idx], W)


def shifted_matrix(G: WeightedDigraph) -> list[list[RatFunc]]:
    """``M(G) - l I``."""
    return [[w - LAMBDA if i == j else w for j, w in enumerate(row)] for i, row in enumerate(G.weights)]


def reduce_matrix(M: Sequence[Sequence[RatFunc]], I: Iterable[int]) -> list[list[RatFunc]]:
    """Schur complement ``D - C A^{-1} B`` of ``M`` over the index set ``I``.

    The block ``A`` indexed by the complement of ``I`` must be permutable to
    triangular form with a nonzero diagonal.
    """
    n = len(M)
    keep = sorted(set(I))
    if any(not 0 <= k < n for k in keep):
        raise IndexError("index set out of range")
    if not keep:
        raise ValueError("index set must be nonempty")
    drop = [k for k in range(n) if k not in set(keep)]
    if not drop:
        return [list(row) for row in M]
    support = WeightedDigraph([str(k) for k in range(n)], M)
    order, cycle = topological_order(support, drop)
    if order is None:
        raise ComplementNotTriangulable(f"indices {cycle} form a cycle in the removed block")
    for k in order:
        if not M[k][k]:
            raise SingularDiagonal(f"diagonal entry {k} of the removed block is zero")
    # back substitution: A X = B with A upper triangular in topological order
    X: dict[int, list[RatFunc]] = {}
    for p in reversed(order):
        rhs = list(M[p][c] for c in keep)
        for q in order:
            a = M[p][q]
            if q == p or not a or q not in X:
                continue
            xq = X[q]
            rhs = [r - a * x if x else r for r, x in zip(rhs, xq)]
        inv = M[p][p].reciprocal()
        X[p] = [r * inv if r else ZERO for r in rhs]
    out: list[list[RatFunc]] = []
    for r in keep:
        row = []
        for t, c in enumerate(keep):
            acc = M[r][c]
            for p in order:
                cp = M[r][p]
                if cp:
                    x = X[p][t]
                    if x:
                        acc = acc - cp * x
            row.append(acc)
        out.append(row)
    return out


def reduce_via_matrix(G: WeightedDigraph, S: Iterable[VertexRef]) -> WeightedDigraph:
    """The reduction computed as ``r(M(G) - l I; S) + l I``."""
    idx = as_vertex_set(G, S)
    R = reduce_matrix(shifted_matrix(G), idx)
    W = [[w + LAMBDA if i == j else w for j, w in enumerate(row)] for i, row in enumerate(R)]
    return WeightedDigraph([G.labels[v] for v in idx], W)


@dataclass
class ReductionTrace:
    """Vertex sets used at each step and the graph each step produced."""

    steps: list[tuple[tuple[str, ...], WeightedDigraph]] = field(default_factory=list)

    @property
    def final(self) -> WeightedDigraph | None:
        return self.steps[-1][1] if self.steps else None

    def __len__(self) -> int:
        return len(self.steps)


def reduce_sequence(G: WeightedDigraph, sets: Sequence[Iterable[VertexRef]]) -> tuple[WeightedDigraph, ReductionTrace]:
    """Reduce over a nested decreasing sequence of vertex sets.

    Sets are given relative to ``G`` (labels or original indices).  Each must
    be structural in the graph produced by the previous step.
    """
    label_sets = [tuple(G.labels[v] for v in as_vertex_set(G, s)) for s in sets]
    trace = ReductionTrace()
    current = G
    previous = set(G.labels)
    for k, labs in enumerate(label_sets):
        if not set(labs) <= previous:
            raise NotNested(f"set {k} is not contained in set {k - 1}")
        idx = as_vertex_set(current, labs)
        ok, reason = is_structural(current, idx)
        if not ok:
            raise StepNotStructural(f"step {k}: {reason}", k)
        current = reduce(current, idx)
        trace.steps.append((labs, current))
        previous = set(labs)
    return current, trace


def reduce_any(G: WeightedDigraph, target: Iterable[VertexRef], order: Sequence[VertexRef] | None = None) -> WeightedDigraph:
    """Unique reduction of a graph in G_pi onto any nonempty vertex subset.

    Vertices outside ``target`` are removed one at a time, in ascending index
    order unless ``order`` lists them explicitly.
    """
    if not in_Gpi(G):
        raise NotInGpi("graph has an edge weight with positive degree")
    keep = as_vertex_set(G, target)
    if not keep:
        raise EmptyTarget("target vertex set is empty")
    removed = [v for v in range(G.n) if v not in set(keep)]
    if order is not None:
        seq = [G.index(v) for v in order]
        if sorted(seq) != removed:
            raise ValueError("order must list exactly the vertices outside the target")
        removed = seq
    current = G
    for v in removed:
        lab = G.labels[v]
        current = reduce(current, [u for u in current.labels if u != lab])
    return current
