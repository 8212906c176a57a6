"""Random instances and independent oracles shared by the test modules.

The oracles deliberately avoid the library's own algebra: determinants,
Schur complements and gcds are recomputed with sympy, and small determinants
by the Leibniz permutation sum.
"""
from __future__ import annotations

import itertools
import random
from fractions import Fraction

import sympy as sp

from isospec.graph import WeightedDigraph, branches, graph_build, is_st0, topological_order
from isospec.ratfun import LAMBDA, ONE, ZERO, Poly, RatFunc, gauss, imag_part, real_part

X = sp.Symbol("l")


# -- conversions to sympy --------------------------------------------------------

def coeff_to_sympy(c):
    return sp.Rational(int(real_part(c).numerator), int(real_part(c).denominator)) + sp.I * sp.Rational(
        int(imag_part(c).numerator), int(imag_part(c).denominator))


def poly_to_sympy(p: Poly):
    return sum((coeff_to_sympy(c) * X ** k for k, c in enumerate(p.c)), sp.Integer(0))


def rf_to_sympy(w: RatFunc):
    return poly_to_sympy(w.num) / poly_to_sympy(w.den)


def sympy_equal(a, b) -> bool:
    return sp.cancel(sp.together(sp.expand(a - b))) == 0


def sympy_equal_up_to_unit(a, b) -> bool:
    """``a = c b`` for a nonzero constant ``c``."""
    if a == 0 or b == 0:
        return a == 0 and b == 0
    q = sp.cancel(sp.together(a / b))
    return q.free_symbols == set() and q != 0


def matrix_to_sympy(G: WeightedDigraph, shift: bool = True):
    n = G.n
    return sp.Matrix(n, n, lambda i, j: rf_to_sympy(G.weights[i][j]) - (X if shift and i == j else 0))


def sympy_charfun(G: WeightedDigraph):
    return sp.cancel(matrix_to_sympy(G).det(method="berkowitz"))


def sympy_schur(G: WeightedDigraph, keep) -> sp.Matrix:
    """``D - C A^{-1} B + l I`` by sympy's general inverse."""
    keep = sorted(keep)
    drop = [k for k in range(G.n) if k not in keep]
    M = matrix_to_sympy(G)
    if not drop:
        return M + X * sp.eye(len(keep))
    A = M.extract(drop, drop)
    B = M.extract(drop, keep)
    C = M.extract(keep, drop)
    D = M.extract(keep, keep)
    R = D - C * A.inv(method="LU") * B + X * sp.eye(len(keep))
    return R.applyfunc(sp.cancel)


def graph_matches_sympy(G: WeightedDigraph, M: sp.Matrix) -> bool:
    return all(sympy_equal(rf_to_sympy(G.weights[i][j]), M[i, j]) for i in range(G.n) for j in range(G.n))


# -- Leibniz determinant over W -------------------------------------------------------

def _perm_sign(p) -> int:
    sign, seen = 1, [False] * len(p)
    for i in range(len(p)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def leibniz_det(M) -> RatFunc:
    n = len(M)
    total = ZERO
    for p in itertools.permutations(range(n)):
        term = ONE
        for i in range(n):
            term = term * M[i][p[i]]
            if not term:
                break
        if term:
            total = total + term if _perm_sign(p) > 0 else total - term
    return total


# -- random instances -------------------------------------------------------------------

def random_constant(rng: random.Random, complex_ok: bool = True) -> RatFunc:
    kind = rng.random()
    if kind < 0.45:
        v = rng.choice([-3, -2, -1, 1, 2, 3])
        return RatFunc.const(v)
    if kind < 0.8 or not complex_ok:
        num = rng.choice([-5, -3, -2, -1, 1, 2, 3, 5])
        return RatFunc.const(Fraction(num, rng.choice([1, 2, 3, 4])))
    re = Fraction(rng.randint(-3, 3), rng.choice([1, 2]))
    im = Fraction(rng.choice([-2, -1, 1, 2]), rng.choice([1, 3]))
    return RatFunc.const(gauss(re, im))


def random_rational(rng: random.Random, gpi: bool = True, complex_ok: bool = True) -> RatFunc:
    """A small rational function; with ``gpi`` its degree is at most 0."""
    c = rng.randint(-2, 2)
    d = rng.randint(1, 3)
    choice = rng.randrange(5 if gpi else 6)
    if choice == 0:
        return ONE / (LAMBDA - c)
    if choice == 1:
        return RatFunc.const(d) / (LAMBDA * LAMBDA + d)
    if choice == 2:
        return (LAMBDA + c) / (LAMBDA - d)
    if choice == 3:
        return (LAMBDA - c) / (LAMBDA * LAMBDA - d)
    if choice == 4:
        return random_constant(rng, complex_ok)
    return LAMBDA + c


def random_weight(rng: random.Random, p_rational: float = 0.3, gpi: bool = True, complex_ok: bool = True) -> RatFunc:
    if rng.random() < p_rational:
        return random_rational(rng, gpi, complex_ok)
    return random_constant(rng, complex_ok)


def random_graph(rng: random.Random, n: int | None = None, density: float | None = None,
                 p_rational: float = 0.3, gpi: bool = True, complex_ok: bool = True,
                 loops: float = 0.4, max_n: int = 8) -> WeightedDigraph:
    n = n if n is not None else rng.randint(1, max_n)
    density = density if density is not None else rng.uniform(0.15, 0.6)
    labels = [f"v{i + 1}" for i in range(n)]
    edges = []
    for i in range(n):
        for j in range(n):
            p = loops if i == j else density
            if rng.random() < p:
                edges.append((i, j, random_weight(rng, p_rational, gpi, complex_ok)))
    return graph_build(labels, edges)


def random_integer_graph(rng: random.Random, n: int, density: float) -> WeightedDigraph:
    labels = [f"v{i + 1}" for i in range(n)]
    edges = [(i, j, rng.choice([-2, -1, 1, 1, 2, 3])) for i in range(n) for j in range(n)
             if i != j and rng.random() < density]
    return graph_build(labels, edges)


def random_structural_set(rng: random.Random, G: WeightedDigraph, st0: bool = False) -> tuple[int, ...]:
    """Grow the complement greedily in random order while it stays admissible."""
    order = list(range(G.n))
    rng.shuffle(order)
    target = rng.randint(0, G.n - 1)
    comp: list[int] = []
    for v in order:
        if len(comp) >= target:
            break
        loop = G.loop(v)
        if loop.is_lambda() or (st0 and loop):
            continue
        trial = comp + [v]
        if topological_order(G, trial)[0] is not None:
            comp = trial
    keep = tuple(v for v in range(G.n) if v not in comp)
    return keep


def is_covered(G, S) -> bool:
    """Every vertex lies on some branch of ``B_S(G)``."""
    found = branches(G, S)
    on = {v for bs in found.values() for b in bs for v in b.vertices}
    return len(on) == G.n


def _expanded_extra(G, S) -> int:
    """Number of chain vertices the branch expansion over ``S`` would create."""
    return sum(len(b) - 2 for bs in branches(G, S).values() for b in bs)


def random_covered(rng, max_expanded=16, **kw):
    """A covered instance whose expansion stays small enough for exact determinants."""
    for _ in range(100):
        G = random_graph(rng, **kw)
        S = random_structural_set(rng, G)
        if is_covered(G, S) and len(S) + _expanded_extra(G, S) <= max_expanded:
            return G, S
    return kn(2), (0,)


def random_st0_integer(rng):
    for _ in range(200):
        G = random_integer_graph(rng, rng.randint(2, 7), rng.uniform(0.2, 0.5))
        S = random_structural_set(rng, G, st0=True)
        if is_st0(G, S) and is_covered(G, S):
            return G, S
    return kn(2), (0, 1)


def has_lambda_loop(G: WeightedDigraph) -> bool:
    return any(G.loop(v).is_lambda() for v in range(G.n))


def kn(n: int) -> WeightedDigraph:
    return WeightedDigraph.from_matrix([[1] * n for _ in range(n)])


# -- named fixtures -----------------------------------------------------------------------

def figure3_H() -> WeightedDigraph:
    """Four vertices, unit weights, spectrum {2, -1, 1, 0}; reduces over {v1, v3}."""
    return graph_build(["v1", "v2", "v3", "v4"], [
        ("v1", "v2", 1), ("v2", "v1", 1), ("v2", "v3", 1), ("v2", "v2", 1),
        ("v3", "v4", 1), ("v4", "v1", 1), ("v4", "v3", 1), ("v3", "v3", 1)])


def figure1_G() -> WeightedDigraph:
    """The branch-split version of :func:`figure3_H` on six vertices."""
    return graph_build(["v1", "v2", "v3", "v4", "v5", "v6"], [
        ("v1", "v5", 1), ("v5", "v5", 1), ("v5", "v1", 1), ("v1", "v2", 1), ("v2", "v2", 1),
        ("v2", "v3", 1), ("v3", "v4", 1), ("v4", "v1", 1), ("v3", "v6", 1), ("v6", "v3", 1),
        ("v3", "v3", 1)])


def figure2_middle() -> WeightedDigraph:
    return graph_build(["v1", "v2", "v3", "v4"], [
        ("v1", "v2", 1), ("v2", "v1", 1), ("v2", "v3", 1), ("v3", "v4", 1), ("v4", "v1", 1)])


def figure5_left() -> WeightedDigraph:
    """Dependency graph of the four-component example interaction."""
    return graph_build(["v1", "v2", "v3", "v4"], [
        ("v1", "v2", Fraction(1, 2)), ("v1", "v3", Fraction(1, 2)), ("v1", "v4", Fraction(1, 2)),
        ("v2", "v1", 1), ("v3", "v4", Fraction(1, 2)), ("v4", "v2", 1)])


def lfixture() -> WeightedDigraph:
    """Integer-weighted graph with an st0 set {a, b} that the L-construction shrinks."""
    return graph_build(["a", "b", "c", "d", "e", "f"], [
        ("a", "c", 2), ("c", "d", 1), ("d", "b", 3), ("a", "e", 1), ("e", "b", 2),
        ("b", "f", 1), ("f", "b", 1), ("f", "a", 2), ("b", "a", 1), ("a", "a", 1)])


def example_H():
    """The four-component logistic/quadratic interaction on the unit box."""
    from isospec.dynnet import InteractionNetwork
    from isospec.expr import affine, named

    def quarter(name, v):
        return affine([0.25], [named(name, v)])

    comps = [
        quarter("logistic", 1),
        affine([1, 1], [quarter("quadratic", 0), quarter("logistic", 3)]),
        quarter("quadratic", 0),
        affine([1, 1], [quarter("quadratic", 0), quarter("quadratic", 2)]),
    ]
    return InteractionNetwork(comps, [[0, 1]] * 4, ["v1", "v2", "v3", "v4"])


# paper order (x1, x2, x5, x6, x7) of the expanded example, as indices into net_expand's states
EXPANDED_ORDER = [0, 1, 4, 2, 3]
