"""Branch expansions, the L-construction, spectral equivalence and isomorphism."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import NotInGpi, NotSt0, SizeMismatch, TooLarge, UncoveredVertex
from .graph import (
    Branch,
    VertexRef,
    WeightedDigraph,
    as_vertex_set,
    branches,
    in_Gpi,
    is_st0,
    require_structural,
)
from .ratfun import LAMBDA, ONE, ZERO, RatFunc
from .reduction import branch_product, reduce, reduce_any

__all__ = [
    "BranchCorrespondence",
    "branch_expand",
    "branch_counts",
    "l_construct",
    "l_chains",
    "spectrally_equivalent",
    "isomorphic",
    "tau_min_outdegree",
    "tau_equivalent",
    "ISOMORPHISM_CAP",
]

ISOMORPHISM_CAP = 12


@dataclass(frozen=True)
class BranchCorrespondence:
    """Pairs ``(branch of the source graph, matching branch of the new graph)``."""

    pairs: tuple[tuple[Branch, Branch], ...]

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)


def _check_covered(G: WeightedDigraph, found: dict[tuple[int, int], list[Branch]]) -> None:
    covered = {v for bs in found.values() for b in bs for v in b.vertices}
    for v in range(G.n):
        if v not in covered:
            raise UncoveredVertex(f"vertex {G.labels[v]} lies on no branch")


def branch_expand(G: WeightedDigraph, S: Iterable[VertexRef]) -> tuple[WeightedDigraph, BranchCorrespondence]:
    """``X_S(G)``: every branch gets its own copy of its interior vertices.

    Vertices of ``S`` come first, in index order, followed by the chain of
    each branch in branch order; chain vertex ``k`` of branch ``b`` is
    labelled ``"<tag of b>:<k>"``.
    """
    idx = require_structural(G, S)
    found = branches(G, idx)
    _check_covered(G, found)
    labels = [G.labels[v] for v in idx]
    pos = {v: k for k, v in enumerate(idx)}
    edges: list[tuple[int, int, RatFunc]] = []
    planned: list[tuple[Branch, tuple[int, ...]]] = []
    for bs in found.values():
        for b in bs:
            chain = []
            for k in range(1, len(b) - 1):
                chain.append(len(labels))
                labels.append(f"{b.tag(G.labels)}:{k}")
            verts = (pos[b.start],) + tuple(chain) + (pos[b.end],)
            es, ls = b.edge_weights(), b.loop_weights()
            for k in range(len(verts) - 1):
                edges.append((verts[k], verts[k + 1], es[k]))
            for c, loop in zip(chain, ls):
                if loop:
                    edges.append((c, c, loop))
            planned.append((b, verts))
    n = len(labels)
    W = [[ZERO] * n for _ in range(n)]
    for a, c, w in edges:
        W[a][c] = w
    X = WeightedDigraph(labels, W)
    pairs = tuple((b, Branch(verts, b.omega)) for b, verts in planned)
    return X, BranchCorrespondence(pairs)


def branch_counts(G: WeightedDigraph, S: Iterable[VertexRef]) -> dict[int, int]:
    """Number of branches through each vertex outside ``S``."""
    idx = require_structural(G, S)
    counts: Counter[int] = Counter()
    for bs in branches(G, idx).values():
        for b in bs:
            counts.update(b.interior)
    inside = set(idx)
    return {v: counts[v] for v in range(G.n) if v not in inside}


def _edge_product(b: Branch) -> RatFunc:
    out = ONE
    for w in b.edge_weights():
        out = out * w
    return out


def l_chains(G: WeightedDigraph, S: Iterable[VertexRef]) -> dict[int, Branch]:
    """The retained maximal branch into each target vertex of ``S``.

    Ties in length go to the lexicographically smallest interior sequence,
    then to the smallest start vertex.
    """
    idx = as_vertex_set(G, S)
    if not is_st0(G, idx):
        raise NotSt0("vertex set is not structural with zero loops outside it")
    found = branches(G, idx)
    _check_covered(G, found)
    into: dict[int, list[Branch]] = {}
    for (_, j), bs in found.items():
        into.setdefault(j, []).extend(bs)
    return {j: min(bs, key=lambda b: (-len(b), b.interior, b.start)) for j, bs in sorted(into.items())}


def l_construct(G: WeightedDigraph, S: Iterable[VertexRef]) -> WeightedDigraph:
    """The L-construction ``L_S(G)``.

    One chain per target ``j`` follows the longest branch into ``j``; every
    other branch ``g`` into ``j`` becomes a single edge from its start to the
    chain vertex at distance ``|g|-2`` from ``j``, weighted by
    ``l^(|g|-2) P(g)``, which for zero interior loops is the product of the
    edge weights of ``g``.
    """
    idx = as_vertex_set(G, S)
    chosen = l_chains(G, idx)
    found = branches(G, idx)
    labels = [G.labels[v] for v in idx]
    pos = {v: k for k, v in enumerate(idx)}
    # chain_at[j][d] is the vertex at distance d from v_j along its chain
    chain_at: dict[int, list[int]] = {}
    for j, beta in chosen.items():
        at = [pos[j]]
        m = len(beta)
        for d in range(1, m - 1):
            at.append(len(labels))
            labels.append(f"{beta.tag(G.labels)}:{m - 1 - d}")
        chain_at[j] = at
    n = len(labels)
    W = [[ZERO] * n for _ in range(n)]
    for j, at in chain_at.items():
        for d in range(1, len(at)):
            W[at[d]][at[d - 1]] = ONE
    for bs in found.values():
        for g in bs:
            at = chain_at[g.end]
            depth = len(g) - 2
            w = LAMBDA ** depth * branch_product(g)
            if w != _edge_product(g):  # pragma: no cover - guaranteed by zero interior loops
                raise ArithmeticError("branch weight left the weight ring")
            a, c = pos[g.start], at[depth]
            W[a][c] = W[a][c] + w
    return WeightedDigraph(labels, W)


def _ordered(G: WeightedDigraph, S: Sequence[VertexRef]) -> list[int]:
    out = [G.index(v) for v in S]
    if len(set(out)) != len(out):
        raise ValueError("vertex set lists a vertex twice")
    return out


def spectrally_equivalent(G: WeightedDigraph, S: Sequence[VertexRef], H: WeightedDigraph, T: Sequence[VertexRef]) -> bool:
    """Whether ``R_S(G)`` and ``R_T(H)`` coincide when ``S[k]`` is matched with ``T[k]``."""
    s, t = _ordered(G, S), _ordered(H, T)
    if len(s) != len(t):
        raise SizeMismatch(f"|S| = {len(s)} but |T| = {len(t)}")
    RG, RH = reduce(G, s), reduce(H, t)
    ps = [sorted(s).index(v) for v in s]
    pt = [sorted(t).index(v) for v in t]
    return all(RG.weights[ps[a]][ps[b]] == RH.weights[pt[a]][pt[b]] for a in range(len(s)) for b in range(len(s)))


def _signature(G: WeightedDigraph, v: int) -> tuple:
    out_w = sorted(repr(w) for w in G.weights[v] if w)
    in_w = sorted(repr(row[v]) for row in G.weights if row[v])
    return repr(G.weights[v][v]), tuple(out_w), tuple(in_w)


def isomorphic(G: WeightedDigraph, H: WeightedDigraph) -> tuple[int, ...] | None:
    """A weight-preserving vertex bijection ``G -> H`` or ``None``.

    The result maps vertex ``k`` of ``G`` to vertex ``result[k]`` of ``H`` and
    is the lexicographically least such tuple.
    """
    if max(G.n, H.n) > ISOMORPHISM_CAP:
        raise TooLarge(f"isomorphism search is capped at {ISOMORPHISM_CAP} vertices")
    n = G.n
    if n != H.n:
        return None
    if Counter(G.weights[i][j] for i in range(n) for j in range(n)) != Counter(
        H.weights[i][j] for i in range(n) for j in range(n)
    ):
        return None
    sg = [_signature(G, v) for v in range(n)]
    sh = [_signature(H, v) for v in range(n)]
    if Counter(sg) != Counter(sh):
        return None
    image: list[int] = []
    used = [False] * n

    def extend(v: int) -> bool:
        if v == n:
            return True
        for b in range(n):
            if used[b] or sh[b] != sg[v]:
                continue
            if any(G.weights[v][u] != H.weights[b][image[u]] or G.weights[u][v] != H.weights[image[u]][b]
                   for u in range(v)):
                continue
            used[b] = True
            image.append(b)
            if extend(v + 1):
                return True
            image.pop()
            used[b] = False
        return False

    return tuple(image) if extend(0) else None


def tau_min_outdegree(G: WeightedDigraph) -> WeightedDigraph:
    """Repeatedly remove the vertices of minimal out-degree until all degrees agree.

    Out-degree counts every nonzero entry of the row, the loop included.
    """
    if not in_Gpi(G):
        raise NotInGpi("graph has an edge weight with positive degree")
    while True:
        deg = [G.out_degree(v) for v in range(G.n)]
        low = min(deg)
        keep = [v for v in range(G.n) if deg[v] != low]
        if not keep:
            return G
        G = reduce_any(G, keep)


def tau_equivalent(G: WeightedDigraph, H: WeightedDigraph) -> bool:
    """``G ~ H`` when their minimal-out-degree reductions are isomorphic."""
    return isomorphic(tau_min_outdegree(G), tau_min_outdegree(H)) is not None
