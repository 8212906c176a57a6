"""Isospectral graph reductions and expansions, and stability of dynamical networks.

Edge weights are exact rational functions of the spectral variable ``l``
with Gaussian-rational coefficients.  Graph reductions remove vertices while
keeping the spectrum up to an explicit correction; network expansions use the
same machinery to sharpen global stability estimates for coupled maps.
"""
from .errors import IsospecError
from .ratfun import LAMBDA, ONE, ZERO, Poly, RatFunc, poly_gcd, squarefree_factor
from .weights import format_weight, parse_weight
from .graph import (
    Branch,
    WeightedDigraph,
    branches,
    graph_build,
    in_Gpi,
    is_st0,
    is_structural,
    strip_loops,
    subgraph,
)
from .reduction import ReductionTrace, branch_product, reduce, reduce_any, reduce_matrix, reduce_sequence
from .spectrum import SpectrumList, charfun, sigma, sigma_inv, spectral_radius, verify_main_theorem
from .expansion import (
    BranchCorrespondence,
    branch_expand,
    isomorphic,
    l_construct,
    spectrally_equivalent,
    tau_min_outdegree,
)
from .dynnet import (
    ExpansionPlan,
    InteractionNetwork,
    interaction_graph,
    lipschitz_estimate,
    net_expand,
    restrict,
    simulate,
    stability_check,
    verify_expansion_dynamics,
)

__version__ = "0.1.0"
