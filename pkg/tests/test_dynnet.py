import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isospec.dynnet import (
    InteractionNetwork,
    LocalMap,
    constructed_lipschitz,
    dependency_graph,
    interaction_graph,
    lipschitz_estimate,
    net_expand,
    restrict,
    simulate,
    stability_check,
    verify_expansion_dynamics,
)
from isospec.errors import BadInitialState, DomainEscape, MissingLipschitz, NotSt0
from isospec.expansion import branch_expand, isomorphic
from isospec.expr import Identity, affine, const, identity, named, poly1d
from isospec.ratfun import ONE, RatFunc
from isospec.spectrum import spectral_radius

from helpers import EXPANDED_ORDER, example_H

seeds = st.integers(0, 2**32 - 1)

LAMBDA_H = np.array([
    [0, .5, .5, .5],
    [1, 0, 0, 0],
    [0, 0, 0, .5],
    [0, 1, 0, 0],
])
LAMBDA_TILDE = np.array([
    [0, .5, 1, 1, 0],
    [1, 0, 0, 0, 0],
    [0, .265, 0, 0, 0],
    [0, 0, 0, 0, 1],
    [0, .012, 0, 0, 0],
])


@pytest.fixture(scope="module")
def H():
    F = example_H()
    F.lipschitz = lipschitz_estimate(F)
    return F


@pytest.fixture(scope="module")
def XH(H):
    return net_expand(H, ["v1", "v2"])


def _paper_order(lam):
    p = EXPANDED_ORDER
    return lam[np.ix_(p, p)]


def _H(x):
    L = lambda u: 4 * u * (1 - u)
    Q = lambda u: 1 - u * u
    return np.array([L(x[1]) / 4, Q(x[0]) / 4 + L(x[3]) / 4, Q(x[0]) / 4, Q(x[0]) / 4 + Q(x[2]) / 4])


# -- graphs and Lipschitz constants -------------------------------------------------------

def test_step_matches_hand_written_map():
    F = example_H()
    rng = np.random.default_rng(1)
    for _ in range(20):
        x = rng.random(4)
        assert np.allclose(F.step(x), _H(x), atol=1e-15)


def test_example_lipschitz_matrix(H):
    assert np.allclose(H.lipschitz, LAMBDA_H, atol=1e-9)


def test_logistic_and_quadratic_entries():
    one = InteractionNetwork([affine([0.25], [named("logistic", 0)])], [[0, 1]])
    two = InteractionNetwork([affine([0.25], [named("quadratic", 0)])], [[0, 1]])
    assert lipschitz_estimate(one)[0, 0] == pytest.approx(1.0, abs=1e-9)
    assert lipschitz_estimate(two)[0, 0] == pytest.approx(0.5, abs=1e-9)


def test_expanded_lipschitz_entries(XH):
    X, _ = XH
    assert np.allclose(_paper_order(X.lipschitz), LAMBDA_TILDE, atol=0.005)


def test_declared_entries_override(H):
    declared = np.full((4, 4), np.nan)
    declared[1, 0] = 2.0
    lam = lipschitz_estimate(example_H(), declared=declared)
    assert lam[1, 0] == 2.0 and lam[0, 1] == pytest.approx(0.5)


def test_three_variable_partial_uses_coarse_grid():
    prod = InteractionNetwork([affine([1], [named("sin", affine([1, 1, 1], [0, 1, 2]))]), identity(1), identity(2)],
                              [[0, 1]] * 3)
    # d/dx1 sin(x1+x2+x3) = cos(sum), largest at sum = 0
    assert lipschitz_estimate(prod)[0, 0] == pytest.approx(1.0, abs=1e-9)


def test_dependency_and_interaction_graphs(H):
    D = dependency_graph(H)
    assert sorted((i, j) for i, j, _ in D.edges()) == [(0, 1), (0, 2), (0, 3), (1, 0), (2, 3), (3, 1)]
    G = interaction_graph(H)
    assert G.weights[0][1] == RatFunc.const(0.5) and G.weights[1][0] == ONE
    with pytest.raises(MissingLipschitz):
        interaction_graph(example_H())


def test_single_self_map():
    F = InteractionNetwork([affine([0.5], [0])], [[0, 1]])
    F.lipschitz = lipschitz_estimate(F)
    G = interaction_graph(F)
    assert G.n == 1 and G.loop(0) == RatFunc.const(0.5)


# -- stability -----------------------------------------------------------------------------

def test_example_not_certified(H):
    v = stability_check(H)
    assert v.rho == pytest.approx(1.08, abs=0.01)
    assert not v.stable
    assert np.allclose(v.M_N, H.lipschitz.T)


def test_expansion_certified(XH):
    v = stability_check(XH[0])
    assert v.rho == pytest.approx(0.90, abs=0.01)
    assert v.stable


def test_zero_matrix_stable():
    F = InteractionNetwork([affine([0.0], [1]), affine([0.0], [0])], [[0, 1]] * 2, lipschitz=np.zeros((2, 2)))
    v = stability_check(F)
    assert v.rho == 0 and v.stable


def test_local_maps_scale_m_n():
    F = InteractionNetwork([affine([0.5], [1]), affine([0.5], [0])], [[0, 1]] * 2,
                           lipschitz=[[0, 0.5], [0.5, 0]],
                           local_maps=[LocalMap(identity(0), 3.0), None])
    v = stability_check(F)
    assert np.allclose(v.M_N, [[0, 0.5], [1.5, 0]])
    assert v.rho == pytest.approx(np.sqrt(0.75))
    assert v.bound == pytest.approx(1.5)


# -- restriction ------------------------------------------------------------------------------

def test_restriction_second_component(H):
    R = restrict(H, ["v1", "v2"])
    assert R.C == 2
    rng = np.random.default_rng(3)
    L = lambda u: 4 * u * (1 - u)
    Q = lambda u: 1 - u * u
    for _ in range(20):
        w = rng.random((3, 2))  # rows are x^0|_S, x^1|_S, x^2|_S
        h3 = Q(w[0, 0]) / 4
        h4 = Q(w[1, 0]) / 4 + Q(h3) / 4
        h2 = Q(w[2, 0]) / 4 + L(h4) / 4
        assert R.eval(w)[1] == pytest.approx(h2, abs=1e-15)
        assert R.eval(w)[0] == pytest.approx(L(w[2, 1]) / 4, abs=1e-15)


def test_restriction_to_everything(H):
    R = restrict(H, range(4))
    x = np.random.default_rng(0).random(4)
    assert R.C == 0
    assert np.allclose(R.eval([x]), H.step(x))


def test_restriction_lemma_along_orbits(H):
    R = restrict(H, ["v1", "v2"])
    rng = np.random.default_rng(5)
    for _ in range(5):
        orbit = simulate(H, rng.random(4), 30)
        for k in range(25):
            window = orbit[k:k + R.C + 1][:, [0, 1]]
            assert np.allclose(R.eval(window), orbit[k + R.C + 1][[0, 1]], atol=1e-14)


def test_restriction_requires_st0(H):
    # outside {v3} the cycle v1 -> v2 -> v1 survives
    with pytest.raises(NotSt0):
        restrict(H, ["v3"])


# -- expansion --------------------------------------------------------------------------------

def test_expansion_shape(XH):
    X, plan = XH
    assert X.n == 5 and plan.size == 5
    assert plan.C == 2 and plan.C_j == {0: 0, 1: 2}
    assert all(isinstance(c, Identity) for c in X.components[2:])
    assert sorted(tuple(X.reads(t)) for t in range(2, 5)) == [(0,), (0,), (2,)]
    assert plan.find("v1-v3-v4-v2", 2) == 3


def test_expansion_graph_is_branch_expansion(H, XH):
    X, _ = XH
    G, _ = branch_expand(dependency_graph(H), ["v1", "v2"])
    assert isomorphic(dependency_graph(X), G) is not None


def test_constructed_constants(H, XH):
    X, plan = XH
    lam = constructed_lipschitz(H, plan)
    assert spectral_radius(lam) <= spectral_radius(H.lipschitz) + 1e-12
    assert spectral_radius(lam) == pytest.approx(spectral_radius(H.lipschitz), abs=1e-9)
    # the estimate is never looser than the constructed constants
    assert np.all(X.lipschitz <= lam + 1e-9)


def test_expand_modes(H):
    X, _ = net_expand(H, ["v1", "v2"], lipschitz="none")
    assert X.lipschitz is None
    with pytest.raises(ValueError):
        net_expand(H, ["v1", "v2"], lipschitz="guess")


def test_expand_rejects_local_maps():
    F = example_H()
    F.local_maps = [LocalMap(identity(0), 1.0), None, None, None]
    with pytest.raises(ValueError):
        net_expand(F, ["v1", "v2"])


def test_expand_over_everything_is_a_copy(H):
    X, plan = net_expand(H, range(4))
    x = np.random.default_rng(2).random(4)
    assert plan.C == 0 and np.allclose(X.step(x), H.step(x))


def test_sequential_expansion(XH):
    X, plan = XH
    T = [0, plan.find("v1-v4-v2", 1), plan.find("v1-v3-v4-v2", 1), plan.find("v1-v3-v4-v2", 2)]
    Y, _ = net_expand(X, T)
    rho = stability_check(Y).rho
    assert rho < stability_check(X).rho
    assert rho == pytest.approx(0.7495, abs=5e-4)


# -- simulation ------------------------------------------------------------------------------

def test_constant_map_reaches_constant():
    F = InteractionNetwork([affine([0.0], [0], 0.25), affine([0.0], [1], 0.75)], [[0, 1]] * 2)
    orbit = simulate(F, [0.9, 0.1], 3)
    assert np.allclose(orbit[1:], [[0.25, 0.75]] * 3)


def test_identity_map_is_stationary():
    F = InteractionNetwork([identity(0), identity(1)], [[0, 1]] * 2)
    assert np.allclose(simulate(F, [0.2, 0.4], 5), [[0.2, 0.4]] * 6)


def test_domain_escape_reports_step_and_coordinate():
    F = InteractionNetwork([identity(0), affine([2.0], [1])], [[0, 1]] * 2)
    with pytest.raises(DomainEscape) as info:
        simulate(F, [0.5, 0.3], 4)
    assert (info.value.step, info.value.coordinate) == (2, 1)


def test_bad_initial_state(H):
    with pytest.raises(BadInitialState):
        simulate(H, [0.5, 0.5, 0.5], 1)
    with pytest.raises(BadInitialState):
        simulate(H, [0.5, 0.5, 0.5, 1.5], 1)
    with pytest.raises(BadInitialState):
        simulate(H, [0.5, np.nan, 0.5, 0.5], 1)


def test_example_converges(H):
    orbit = simulate(H, [0.3] * 4, 200)
    assert np.max(np.abs(orbit[-1] - orbit[-2])) < 1e-10


def test_local_maps_applied_first():
    F = InteractionNetwork([identity(0)], [[0, 1]], local_maps=[LocalMap(poly1d([0, 0, 1], 0), 2.0)])
    assert simulate(F, [0.5], 2)[-1, 0] == pytest.approx(0.0625)


# -- expansion dynamics and soundness ------------------------------------------------------------

@settings(max_examples=15, deadline=None)
@given(seeds)
def test_expansion_dynamics_match(seed):
    H = example_H()
    x0 = np.random.default_rng(seed).random(4)
    assert verify_expansion_dynamics(H, ["v1", "v2"], x0, 50) <= 1e-12


def test_expansion_dynamics_trivial_and_short():
    H = example_H()
    assert verify_expansion_dynamics(H, range(4), [0.1, 0.2, 0.3, 0.4], 10) == 0.0
    with pytest.raises(ValueError):
        verify_expansion_dynamics(H, ["v1", "v2"], [0.1] * 4, 1)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_lipschitz_soundness(seed):
    F = example_H()
    F.lipschitz = lipschitz_estimate(F)
    rng = np.random.default_rng(seed)
    x, y = rng.random((2, 200, 4))
    fx = np.array([F.step(p) for p in x])
    fy = np.array([F.step(p) for p in y])
    bound = np.abs(x - y) @ F.lipschitz
    assert np.all(np.abs(fx - fy) <= bound + 1e-9)


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_contraction_propagation(seed):
    F = example_H()
    F.lipschitz = lipschitz_estimate(F)
    M = stability_check(F).M_N
    rng = np.random.default_rng(seed)
    x, y = rng.random((2, 4))
    ox, oy = simulate(F, x, 10), simulate(F, y, 10)
    d0 = np.abs(x - y)
    Mk = np.eye(4)
    for k in range(1, 11):
        Mk = M @ Mk
        assert np.all(np.abs(ox[k] - oy[k]) <= Mk @ d0 + 1e-12)


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_unique_fixed_point(seed):
    F = example_H()
    rng = np.random.default_rng(seed)
    a = simulate(F, rng.random(4), 500)[-1]
    b = simulate(F, rng.random(4), 500)[-1]
    assert np.max(np.abs(a - b)) < 1e-8


def test_network_validation():
    with pytest.raises(ValueError):
        InteractionNetwork([], [])
    with pytest.raises(ValueError):
        InteractionNetwork([const(1.0)], [[0, 1]])
    with pytest.raises(ValueError):
        InteractionNetwork([identity(3)], [[0, 1]])
    with pytest.raises(ValueError):
        InteractionNetwork([identity(0)], [[1, 0]])
    with pytest.raises(ValueError):
        InteractionNetwork([identity(0)], [[0, 1]], lipschitz=[[-1.0]])
