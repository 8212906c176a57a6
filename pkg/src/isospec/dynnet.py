"""Dynamical networks ``N = F o T``: stability, restriction and expansion.

Conventions
-----------
* ``lipschitz[i][j]`` bounds the sensitivity of ``F_j`` to ``x_i``, so the
  interaction graph has an edge ``v_i -> v_j`` whenever ``F_j`` reads ``x_i``.
* Without local maps the analysed system is ``F`` itself and every ``L_i``
  is 1.
* Distances are coordinatewise absolute differences aggregated by max.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .errors import BadInitialState, DomainEscape, MissingLipschitz, NotSt0
from .expr import Identity, Node, Var, substitute
from .graph import Branch, VertexRef, WeightedDigraph, as_vertex_set, branches, is_st0
from .ratfun import RatFunc, coeff
from .spectrum import spectral_radius

__all__ = [
    "InteractionNetwork",
    "LocalMap",
    "StabilityVerdict",
    "RestrictedInteraction",
    "ExpansionPlan",
    "dependency_graph",
    "interaction_graph",
    "lipschitz_estimate",
    "stability_check",
    "restrict",
    "net_expand",
    "constructed_lipschitz",
    "simulate",
    "verify_expansion_dynamics",
    "GRID_PER_AXIS",
    "GRID_BUDGET",
]

GRID_PER_AXIS = 1024
GRID_BUDGET = 2_000_000
BOX_TOL = 1e-12


@dataclass(frozen=True)
class LocalMap:
    """``T_i``: an expression in ``x_i`` alone, with Lipschitz constant ``L``."""

    func: Node
    L: float


@dataclass
class InteractionNetwork:
    """An interaction ``F`` on a product of intervals, optionally with local maps."""

    components: list[Node]
    box: np.ndarray
    labels: list[str] = field(default_factory=list)
    lipschitz: np.ndarray | None = None
    local_maps: list[LocalMap | None] | None = None

    def __post_init__(self):
        n = len(self.components)
        if n == 0:
            raise ValueError("an interaction has at least one component")
        self.box = np.asarray(self.box, dtype=float).reshape(n, 2)
        if np.any(self.box[:, 0] > self.box[:, 1]):
            raise ValueError("box intervals must have lo <= hi")
        if not self.labels:
            self.labels = [f"v{i + 1}" for i in range(n)]
        if len(self.labels) != n:
            raise ValueError("one label per component")
        for j, c in enumerate(self.components):
            vs = c.vars()
            if not vs:
                raise ValueError(f"component {self.labels[j]} reads no variable")
            if any(not 0 <= v < n for v in vs):
                raise ValueError(f"component {self.labels[j]} reads a variable out of range")
        if self.lipschitz is not None:
            self.lipschitz = np.asarray(self.lipschitz, dtype=float).reshape(n, n)
            if np.any(self.lipschitz < 0):
                raise ValueError("Lipschitz constants are nonnegative")
        if self.local_maps is not None and len(self.local_maps) != n:
            raise ValueError("one local map slot per component")

    @property
    def n(self) -> int:
        return len(self.components)

    def reads(self, j: int) -> frozenset[int]:
        """``I_j``: the variables ``F_j`` depends on."""
        return self.components[j].vars()

    def L(self) -> np.ndarray:
        out = np.ones(self.n)
        if self.local_maps:
            for i, m in enumerate(self.local_maps):
                if m is not None:
                    out[i] = m.L
        return out

    def step(self, x: np.ndarray) -> np.ndarray:
        y = x
        if self.local_maps:
            y = np.array(x, dtype=float)
            for i, m in enumerate(self.local_maps):
                if m is not None:
                    y[i] = m.func.eval(x)
        return np.array([float(c.eval(y)) for c in self.components])

    def with_lipschitz(self, lam) -> "InteractionNetwork":
        return replace(self, lipschitz=np.asarray(lam, dtype=float))


def dependency_graph(F: InteractionNetwork) -> WeightedDigraph:
    """Unit-weight graph with ``v_i -> v_j`` whenever ``F_j`` reads ``x_i``."""
    n = F.n
    W = [[RatFunc()] * n for _ in range(n)]
    for j in range(n):
        for i in F.reads(j):
            W[i][j] = RatFunc.const(1)
    return WeightedDigraph(F.labels, W)


def interaction_graph(F: InteractionNetwork) -> WeightedDigraph:
    """``Gamma_F``: the graph with adjacency matrix ``lipschitz`` on the dependency edges."""
    if F.lipschitz is None:
        raise MissingLipschitz("interaction has no Lipschitz matrix; estimate or declare one")
    n = F.n
    W = [[RatFunc()] * n for _ in range(n)]
    for j in range(n):
        for i in F.reads(j):
            lam = float(F.lipschitz[i, j])
            if lam:
                W[i][j] = RatFunc.const(coeff(lam))
    return WeightedDigraph(F.labels, W)


# -- Lipschitz estimation ----------------------------------------------------

def _golden_max(f, lo: float, hi: float, iters: int = 60) -> tuple[float, float]:
    g = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def _max_abs(D: Node, box: np.ndarray, per_axis: int) -> float:
    """Max of ``|D|`` over the box: dense grid, then coordinate golden-section refinement."""
    support = sorted(D.vars())
    if not support:
        return abs(float(D.eval({})))
    k = len(support)
    m = per_axis if k <= 2 else max(8, int(GRID_BUDGET ** (1.0 / k)))
    axes = [np.linspace(box[v, 0], box[v, 1], m) for v in support]
    grids = np.meshgrid(*axes, indexing="ij")
    vals = np.abs(np.broadcast_to(D.eval(dict(zip(support, grids))), grids[0].shape))
    flat = int(np.argmax(vals))
    best = float(vals.flat[flat])
    at = np.unravel_index(flat, vals.shape)
    point = {v: float(axes[t][at[t]]) for t, v in enumerate(support)}
    steps = [(box[v, 1] - box[v, 0]) / (m - 1) if m > 1 else 0.0 for v in support]
    lo_hi = {v: (max(box[v, 0], point[v] - h), min(box[v, 1], point[v] + h)) for v, h in zip(support, steps)}
    for _ in range(4):
        for v in support:
            lo, hi = lo_hi[v]
            if hi <= lo:
                continue

            def along(t, v=v):
                p = dict(point)
                p[v] = t
                return abs(float(D.eval(p)))

            t, val = _golden_max(along, lo, hi)
            if val > best:
                best, point[v] = val, t
    return best


def lipschitz_estimate(F: InteractionNetwork, grid: int = GRID_PER_AXIS, declared: np.ndarray | None = None) -> np.ndarray:
    """``Lambda_ij = max over the box of |dF_j/dx_i|``.

    Partial derivatives depending on one or two variables are sampled on a
    ``grid``-per-axis mesh; with three or more variables the mesh is coarsened
    to about two million points.  Either way the best cell is refined by
    golden-section search.  Entries of ``declared`` that are not NaN win over
    the estimate.
    """
    n = F.n
    lam = np.zeros((n, n))
    for j, comp in enumerate(F.components):
        for i in sorted(comp.vars()):
            lam[i, j] = _max_abs(comp.diff(i), F.box, grid)
    if declared is not None:
        declared = np.asarray(declared, dtype=float)
        mask = ~np.isnan(declared)
        lam[mask] = declared[mask]
    return lam


# -- stability -----------------------------------------------------------------

@dataclass(frozen=True)
class StabilityVerdict:
    rho: float
    M_N: np.ndarray
    stable: bool
    rho_lambda: float
    bound: float


def stability_check(F: InteractionNetwork) -> StabilityVerdict:
    """Spectral radius of ``M_N = Lambda^T diag(L)`` and the verdict ``rho < 1``.

    ``bound`` is the cruder ``max(L) * rho(Lambda)``.
    """
    if F.lipschitz is None:
        raise MissingLipschitz("interaction has no Lipschitz matrix; estimate or declare one")
    L = F.L()
    M = F.lipschitz.T @ np.diag(L)
    rho = spectral_radius(M)
    rho_lam = spectral_radius(F.lipschitz)
    return StabilityVerdict(rho, M, bool(rho < 1), rho_lam, float(L.max()) * rho_lam)


# -- restriction and expansion ---------------------------------------------------

def _require_st0(F: InteractionNetwork, S: Iterable[VertexRef]) -> tuple[WeightedDigraph, tuple[int, ...]]:
    if F.local_maps and any(m is not None for m in F.local_maps):
        raise ValueError("restriction and expansion act on the interaction alone; drop the local maps first")
    G = dependency_graph(F)
    idx = as_vertex_set(G, S)
    if not is_st0(G, idx):
        raise NotSt0("vertex set is not structural with zero loops outside it in the interaction graph")
    return G, idx


@dataclass(frozen=True)
class RestrictedInteraction:
    """``F|_S``: components of ``S`` written in lagged ``S``-variables.

    Component ``k`` evaluates on a window ``(x^0|_S, ..., x^C|_S)``; variable
    ``t * |S| + p`` of its expression is coordinate ``p`` of ``x^t|_S``.
    """

    S: tuple[int, ...]
    C: int
    components: tuple[Node, ...]

    def eval(self, window: Sequence[Sequence[float]]) -> np.ndarray:
        if len(window) != self.C + 1:
            raise ValueError(f"window must hold {self.C + 1} states")
        flat = np.concatenate([np.asarray(w, dtype=float) for w in window])
        return np.array([float(c.eval(flat)) for c in self.components])


def _max_depth(found: dict[tuple[int, int], list[Branch]]) -> int:
    return max((len(b) - 2 for bs in found.values() for b in bs), default=0)


def restrict(F: InteractionNetwork, S: Iterable[VertexRef]) -> RestrictedInteraction:
    G, idx = _require_st0(F, S)
    C = _max_depth(branches(G, idx))
    pos = {v: k for k, v in enumerate(idx)}
    ns = len(idx)

    def unfold(node: Node, depth: int) -> Node:
        def leaf(v: Var) -> Node:
            if v.index in pos:
                return Var((C - depth) * ns + pos[v.index])
            return unfold(F.components[v.index], depth + 1)

        return substitute(node, leaf)

    return RestrictedInteraction(idx, C, tuple(unfold(F.components[j], 0) for j in idx))


@dataclass(frozen=True)
class ExpansionPlan:
    """Bookkeeping for ``X_S F``.

    ``eta[(k, l)]`` is the state index of position ``l`` on branch ``k`` of
    ``branch_list``; position 0 is the branch's start vertex in ``S``.
    """

    S: tuple[int, ...]
    branch_list: tuple[Branch, ...]
    eta: dict[tuple[int, int], int]
    C: int
    C_j: dict[int, int]
    labels: tuple[str, ...]
    tags: tuple[str, ...]

    @property
    def size(self) -> int:
        return len(self.labels)

    def find(self, tag: str, position: int) -> int:
        """State index of ``eta(beta, position)`` for the branch tagged ``tag``."""
        return self.eta[(self.tags.index(tag), position)]


def net_expand(F: InteractionNetwork, S: Iterable[VertexRef], lipschitz: str = "estimate",
               grid: int = GRID_PER_AXIS) -> tuple[InteractionNetwork, ExpansionPlan]:
    """``X_S F``: the interaction with one identity delay chain per long branch.

    ``lipschitz`` is ``"estimate"`` (maximise the new partial derivatives),
    ``"constructed"`` (the constants built from ``F``'s own matrix) or
    ``"none"``.
    """
    G, idx = _require_st0(F, S)
    found = branches(G, idx)
    blist = tuple(b for bs in found.values() for b in bs)
    pos = {v: k for k, v in enumerate(idx)}
    labels = [F.labels[v] for v in idx]
    eta: dict[tuple[int, int], int] = {}
    by_path: dict[tuple[int, ...], int] = {}
    for k, b in enumerate(blist):
        eta[(k, 0)] = pos[b.start]
        by_path[b.vertices] = k
        for l in range(1, len(b) - 1):
            eta[(k, l)] = len(labels)
            labels.append(f"{b.tag(F.labels)}:{l}")
    C = _max_depth(found)
    C_j = {j: max((len(b) - 2 for b in blist if b.end == j), default=0) for j in idx}

    def unfold(node: Node, path: tuple[int, ...]) -> Node:
        # path lists the vertices from the current component back to the target
        def leaf(v: Var) -> Node:
            if v.index in pos:
                k = by_path[(v.index,) + path[::-1]]
                return Var(eta[(k, len(path) - 1)])
            return unfold(F.components[v.index], path + (v.index,))

        return substitute(node, leaf)

    comps: list[Node] = [unfold(F.components[j], (j,)) for j in idx]
    for k, b in enumerate(blist):
        for l in range(1, len(b) - 1):
            comps.append(Identity(Var(eta[(k, l - 1)])))
    box = np.vstack([F.box[list(idx)]] + [F.box[b.start][None, :] for b in blist for _ in range(1, len(b) - 1)])
    X = InteractionNetwork(comps, box, labels)
    plan = ExpansionPlan(idx, blist, eta, C, C_j, tuple(labels), tuple(b.tag(F.labels) for b in blist))
    if lipschitz == "estimate":
        X.lipschitz = lipschitz_estimate(X, grid)
    elif lipschitz == "constructed":
        X.lipschitz = constructed_lipschitz(F, plan)
    elif lipschitz != "none":
        raise ValueError(f"unknown Lipschitz mode {lipschitz!r}")
    return X, plan


def constructed_lipschitz(F: InteractionNetwork, plan: ExpansionPlan) -> np.ndarray:
    """Constants for ``X_S F`` assembled from ``F``'s matrix.

    Chain edges get 1; the edge from ``eta(beta, |beta|-2)`` into the target
    of ``beta`` gets the product of ``Lambda`` along ``beta``.
    """
    if F.lipschitz is None:
        raise MissingLipschitz("the constructed constants need the interaction's Lipschitz matrix")
    N = plan.size
    pos = {v: k for k, v in enumerate(plan.S)}
    lam = np.zeros((N, N))
    for k, b in enumerate(plan.branch_list):
        m = len(b)
        for l in range(1, m - 1):
            lam[plan.eta[(k, l - 1)], plan.eta[(k, l)]] = 1.0
        prod = 1.0
        for a, c in zip(b.vertices, b.vertices[1:]):
            prod *= float(F.lipschitz[a, c])
        lam[plan.eta[(k, m - 2)], pos[b.end]] += prod
    return lam


# -- simulation ----------------------------------------------------------------

def _check_state(F: InteractionNetwork, x: np.ndarray) -> None:
    if x.shape != (F.n,):
        raise BadInitialState(f"initial state must have {F.n} coordinates")
    if not np.all(np.isfinite(x)):
        raise BadInitialState("initial state has non-finite coordinates")
    bad = np.nonzero((x < F.box[:, 0] - BOX_TOL) | (x > F.box[:, 1] + BOX_TOL))[0]
    if bad.size:
        raise BadInitialState(f"coordinate {int(bad[0])} of the initial state lies outside the box")


def simulate(F: InteractionNetwork, x0, steps: int) -> np.ndarray:
    """The orbit ``x^0, ..., x^steps``; row ``k`` is ``x^k``."""
    x = np.asarray(x0, dtype=float)
    _check_state(F, x)
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    out = np.empty((steps + 1, F.n))
    out[0] = x
    lo, hi = F.box[:, 0], F.box[:, 1]
    for k in range(1, steps + 1):
        x = F.step(x)
        bad = np.nonzero(~np.isfinite(x) | (x < lo - BOX_TOL) | (x > hi + BOX_TOL))[0]
        if bad.size:
            c = int(bad[0])
            raise DomainEscape(f"step {k}: coordinate {c} left the box with value {x[c]!r}", k, c)
        x = np.clip(x, lo, hi)
        out[k] = x
    return out


def verify_expansion_dynamics(F: InteractionNetwork, S: Iterable[VertexRef], x0, steps: int,
                              expanded: tuple[InteractionNetwork, ExpansionPlan] | None = None) -> float:
    """Max over ``k <= steps`` of ``|X_S F(x~^(C+k))|_S - F(x^(C+k))|_S|``.

    The expanded system starts from ``x^C|_S`` with each chain variable
    ``eta(beta, l)`` holding ``x^(C-l)`` of the branch's start vertex.
    """
    X, plan = expanded if expanded is not None else net_expand(F, S, lipschitz="none")
    if steps < plan.C:
        raise ValueError(f"steps must be at least the buffer depth {plan.C}")
    orbit = simulate(F, x0, plan.C + steps)
    C = plan.C
    xt = np.empty(plan.size)
    xt[: len(plan.S)] = orbit[C, list(plan.S)]
    for (k, l), t in plan.eta.items():
        if l > 0:
            src = plan.branch_list[k].start
            xt[t] = orbit[C - l, src]
    orbit_x = simulate(X, xt, steps)
    return float(np.max(np.abs(orbit_x[:, : len(plan.S)] - orbit[C:, list(plan.S)])))
