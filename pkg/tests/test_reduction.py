import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isospec.errors import (
    ComplementNotTriangulable,
    EmptyTarget,
    InteriorLoopEqualsLambda,
    NotInGpi,
    NotNested,
    NotStructural,
    SingularDiagonal,
    StepNotStructural,
)
from isospec.graph import Branch, graph_build, in_Gpi, subgraph
from isospec.ratfun import LAMBDA, ONE, ZERO
from isospec.reduction import (
    branch_product,
    reduce,
    reduce_any,
    reduce_matrix,
    reduce_sequence,
    reduce_via_matrix,
    shifted_matrix,
)
from isospec.spectrum import charfun, equal_up_to_unit
from isospec.weights import parse_weight

from helpers import (
    figure2_middle,
    figure3_H,
    graph_matches_sympy,
    kn,
    random_graph,
    random_structural_set,
    sympy_schur,
)

seeds = st.integers(0, 2**32 - 1)
W = parse_weight


# -- branch products ------------------------------------------------------------

def test_branch_product_single_edge():
    w = W("(l+1)/(l-2)")
    assert branch_product(Branch((0, 1), (w,))) == w


def test_branch_product_zero_loop():
    assert branch_product(Branch((0, 2, 1), (ONE, ZERO, ONE))) == W("1/l")


def test_branch_product_unit_loop():
    assert branch_product(Branch((0, 2, 1), (ONE, ONE, ONE))) == W("1/(l-1)")


def test_branch_product_lambda_loop():
    with pytest.raises(InteriorLoopEqualsLambda):
        branch_product(Branch((0, 2, 1), (ONE, LAMBDA, ONE)))


# -- reduce -------------------------------------------------------------------------

def test_reduce_k3():
    R = reduce(kn(3), [0, 1])
    assert all(w == W("l/(l-1)") for row in R.weights for w in row)


def test_reduce_k3_matches_schur_oracle():
    assert graph_matches_sympy(reduce(kn(3), [0, 1]), sympy_schur(kn(3), [0, 1]))


def test_reduce_over_everything_is_identity():
    H = figure3_H()
    assert reduce(H, range(4)) == H


def test_reduce_figure3():
    R = reduce(figure3_H(), ["v1", "v3"])
    assert R.weights == ((W("1/(l-1)"), W("1/(l-1)")), (W("1/l"), W("(l+1)/l")))


def test_reduce_figure2_middle_graph():
    M = figure2_middle()
    G = reduce(M, ["v1", "v2"])
    # {v3, v4} leaves the v1-v2 cycle outside, so only the unique reduction applies
    K = reduce_any(M, ["v3", "v4"])
    assert G.weights == ((ZERO, ONE), (W("1+1/l^2"), ZERO))
    assert K.weights == ((ZERO, ONE), (W("1/(l^2-1)"), ZERO))


def test_reduce_requires_structural():
    G = graph_build(["a", "b", "c"], [("a", "b", 1), ("b", "c", 1), ("c", "b", 1)])
    with pytest.raises(NotStructural):
        reduce(G, ["a"])


# -- matrix path --------------------------------------------------------------------

def test_reduce_matrix_full_index_set():
    M = shifted_matrix(figure3_H())
    assert reduce_matrix(M, range(4)) == [list(r) for r in M]


def test_reduce_matrix_two_by_two():
    w22 = W("3")
    G = graph_build(["a", "b"], [("a", "a", 1), ("a", "b", 1), ("b", "a", 1), ("b", "b", w22)])
    R = reduce_matrix(shifted_matrix(G), [1])
    assert R == [[w22 - LAMBDA + W("1/(l-1)")]]


def test_reduce_matrix_not_triangulable():
    M = [[ZERO, ONE, ZERO], [ZERO, -LAMBDA, ONE], [ZERO, ONE, -LAMBDA]]
    with pytest.raises(ComplementNotTriangulable):
        reduce_matrix(M, [0])


def test_reduce_matrix_singular_diagonal():
    M = [[ONE, ONE], [ONE, ZERO]]
    with pytest.raises(SingularDiagonal):
        reduce_matrix(M, [0])


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_both_paths_agree(seed):
    rng = random.Random(seed)
    G = random_graph(rng, gpi=False)
    S = random_structural_set(rng, G)
    assert reduce(G, S) == reduce_via_matrix(G, S)


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_reduce_matches_sympy_schur(seed):
    rng = random.Random(seed)
    G = random_graph(rng, max_n=5, p_rational=0.2)
    S = random_structural_set(rng, G)
    assert graph_matches_sympy(reduce(G, S), sympy_schur(G, S))


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_determinant_identity(seed):
    rng = random.Random(seed)
    G = random_graph(rng, max_n=7)
    S = random_structural_set(rng, G)
    comp = [v for v in range(G.n) if v not in S]
    rhs = charfun(reduce(G, S)) * (charfun(subgraph(G, comp)) if comp else ONE)
    assert equal_up_to_unit(charfun(G), rhs)


# -- sequences ------------------------------------------------------------------------

def test_sequence_single_step():
    H = figure3_H()
    R, trace = reduce_sequence(H, [["v1", "v3"]])
    assert R == reduce(H, ["v1", "v3"])
    assert len(trace) == 1 and trace.final == R


def test_sequence_nested_equals_direct():
    H = figure3_H()
    R, trace = reduce_sequence(H, [["v1", "v2", "v3"], ["v1", "v3"], ["v1"]])
    assert R == reduce_any(H, ["v1"])
    assert [labs for labs, _ in trace.steps] == [("v1", "v2", "v3"), ("v1", "v3"), ("v1",)]


def test_sequence_not_nested():
    with pytest.raises(NotNested):
        reduce_sequence(kn(3), [[0, 1], [1, 2]])


def test_sequence_reports_failing_step():
    G = graph_build(["a", "b", "c"], [("a", "b", 1), ("b", "c", 1), ("c", "b", 1)])
    with pytest.raises(StepNotStructural) as info:
        reduce_sequence(G, [["a", "b", "c"], ["a"]])
    assert info.value.step == 1


# -- unique reductions in G_pi -----------------------------------------------------------

def test_reduce_any_target_everything():
    H = figure3_H()
    assert reduce_any(H, range(4)) == H


def test_reduce_any_k4_single_vertex():
    R = reduce_any(kn(4), [0])
    # folding three unit vertices into one: l/(l-3)
    assert R.weights == ((W("l/(l-3)"),),)
    # times the complement's charfun -(l-3)l^2 this recovers det(M(K4) - l I)
    assert charfun(R) * charfun(kn(3)) == charfun(kn(4))


def test_reduce_any_order_independent_example():
    G = figure2_middle()
    assert reduce_any(G, ["v1"], order=["v2", "v3", "v4"]) == reduce_any(G, ["v1"], order=["v4", "v3", "v2"])


def test_reduce_any_errors():
    with pytest.raises(NotInGpi):
        reduce_any(graph_build(["a", "b"], [("a", "a", "l^2"), ("a", "b", 1)]), ["a"])
    with pytest.raises(EmptyTarget):
        reduce_any(kn(3), [])


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_reduce_any_matches_reduce_when_structural(seed):
    rng = random.Random(seed)
    G = random_graph(rng, max_n=6, gpi=True)
    S = random_structural_set(rng, G)
    assert reduce_any(G, S) == reduce(G, S)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_removal_orders_agree(seed):
    rng = random.Random(seed)
    G = random_graph(rng, max_n=6, gpi=True)
    k = rng.randint(1, G.n)
    target = sorted(rng.sample(range(G.n), k))
    rest = [v for v in range(G.n) if v not in target]
    shuffled = rest[:]
    rng.shuffle(shuffled)
    assert reduce_any(G, target, order=rest).same_matrix(reduce_any(G, target, order=shuffled))


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_gpi_closure(seed):
    rng = random.Random(seed)
    G = random_graph(rng, max_n=7, gpi=True)
    S = random_structural_set(rng, G)
    R = reduce(G, S)
    assert in_Gpi(R)
    assert not any(R.loop(v).is_lambda() for v in range(R.n))
