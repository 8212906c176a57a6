"""Command-line front end.

Every subcommand prints one JSON document on standard output::

    {"command": {...}, "result": {...}, "timing": {"seconds": ...}}

or, on failure, ``{"command": ..., "error": {"name": ..., "message": ...}}``
with exit status 1.  Usage errors exit with status 2.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Any, Callable, Sequence

import numpy as np

from . import dynnet, expansion, io, reduction, spectrum
from .errors import IsospecError
from .graph import WeightedDigraph, _complement, as_vertex_set, subgraph
from .spectrum import SpectrumList
from .weights import format_weight

__all__ = ["main", "build_parser"]


class _Usage(Exception):
    pass


class _Failed(Exception):
    """A verification ran to completion and reported a failure."""

    def __init__(self, result: dict):
        self.result = result


def _split(s: str) -> list[str]:
    return [x.strip() for x in s.split(",") if x.strip()]


def _floats(s: str) -> list[float]:
    try:
        return [float(x) for x in _split(s)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {s!r}") from None


def _graph(G: WeightedDigraph) -> dict:
    return io.graph_to_doc(G)


def _roots(sl: SpectrumList) -> list[dict]:
    return [{"re": z.real, "im": z.imag, "multiplicity": m} for z, m in sl.roots]


def _matrix(a: np.ndarray) -> list[list[float]]:
    return [[float(x) for x in row] for row in np.asarray(a)]


def _network(args) -> dynnet.InteractionNetwork:
    F = io.load_network(args.net)
    if F.lipschitz is None:
        F.lipschitz = dynnet.lipschitz_estimate(F, args.grid)
    return F


# -- graph commands ----------------------------------------------------------------

def cmd_reduce(args) -> dict:
    G = io.load_graph(args.graph)
    sets = [_split(k) for k in args.keep]
    if args.matrix:
        if len(sets) != 1:
            raise _Usage("--matrix takes a single --keep set")
        R = reduction.reduce_via_matrix(G, sets[0])
        return {"graph": _graph(R), "path": "matrix"}
    if len(sets) == 1:
        return {"graph": _graph(reduction.reduce(G, sets[0])), "path": "branches"}
    R, trace = reduction.reduce_sequence(G, sets)
    return {"graph": _graph(R), "path": "branches",
            "trace": [{"keep": list(labs), "graph": _graph(g)} for labs, g in trace.steps]}


def cmd_reduce_any(args) -> dict:
    G = io.load_graph(args.graph)
    order = _split(args.order) if args.order else None
    return {"graph": _graph(reduction.reduce_any(G, _split(args.keep), order))}


def cmd_expand(args) -> dict:
    G = io.load_graph(args.graph)
    X, corr = expansion.branch_expand(G, _split(args.keep))
    return {"graph": _graph(X),
            "branches": [{"source": b.tag(G.labels), "expanded": c.tag(X.labels)} for b, c in corr]}


def cmd_lreduce(args) -> dict:
    G = io.load_graph(args.graph)
    return {"graph": _graph(expansion.l_construct(G, _split(args.keep)))}


def cmd_spectrum(args) -> dict:
    G = io.load_graph(args.graph)
    s = spectrum.sigma(G)
    return {"charfun": format_weight(s.char_fun), "eigenvalues": _roots(s),
            "poles": _roots(spectrum.sigma_inv(G))}


def cmd_verify(args) -> dict:
    G = io.load_graph(args.graph)
    S = as_vertex_set(G, _split(args.keep))
    R = reduction.reduce(G, S)
    comp = _complement(G, S)
    cB = spectrum.charfun(subgraph(G, comp)) if comp else None
    lhs = spectrum.charfun(G)
    rhs = spectrum.charfun(R) * cB if cB is not None else spectrum.charfun(R)
    checks = [
        {"name": "determinant identity", "pass": spectrum.equal_up_to_unit(lhs, rhs)},
        {"name": "main theorem", "pass": spectrum.verify_main_theorem(G, S)},
        {"name": "matrix path agrees", "pass": reduction.reduce_via_matrix(G, S) == R},
    ]
    result = {"checks": checks, "pass": all(c["pass"] for c in checks)}
    if not result["pass"]:
        raise _Failed(result)
    return result


def cmd_equiv(args) -> dict:
    G, H = io.load_graph(args.graph), io.load_graph(args.other)
    ok = expansion.spectrally_equivalent(G, _split(args.keep), H, _split(args.other_keep))
    return {"equivalent": ok}


def cmd_iso(args) -> dict:
    G, H = io.load_graph(args.graph), io.load_graph(args.other)
    if args.tau:
        G, H = expansion.tau_min_outdegree(G), expansion.tau_min_outdegree(H)
    b = expansion.isomorphic(G, H)
    out: dict[str, Any] = {"isomorphic": b is not None,
                           "bijection": None if b is None else {G.labels[k]: H.labels[v] for k, v in enumerate(b)}}
    if args.tau:
        out["reduced"] = [_graph(G), _graph(H)]
    return out


def cmd_export_dot(args) -> str:
    G = io.load_graph(args.graph)
    return io.to_dot(G, _split(args.keep) if args.keep else None)


# -- network commands ----------------------------------------------------------------

def _verdict(v: dynnet.StabilityVerdict, F: dynnet.InteractionNetwork) -> dict:
    return {"rho": v.rho, "stable": v.stable, "rho_lambda": v.rho_lambda, "bound": v.bound,
            "labels": list(F.labels), "lipschitz": _matrix(F.lipschitz), "M_N": _matrix(v.M_N)}


def cmd_net_stability(args) -> dict:
    F = _network(args)
    out = {"network": _verdict(dynnet.stability_check(F), F)}
    if args.expand:
        X, _ = dynnet.net_expand(F, _split(args.expand), lipschitz=args.lipschitz, grid=args.grid)
        out["expanded"] = _verdict(dynnet.stability_check(X), X)
        out["stable"] = out["network"]["stable"] or out["expanded"]["stable"]
    else:
        out["stable"] = out["network"]["stable"]
    return out


def cmd_net_expand(args) -> dict:
    F = _network(args)
    X, plan = dynnet.net_expand(F, _split(args.keep), lipschitz=args.lipschitz, grid=args.grid)
    return {"network": io.network_to_doc(X), "C": plan.C,
            "C_j": {F.labels[j]: c for j, c in plan.C_j.items()},
            "chains": [{"branch": plan.tags[k], "position": l, "state": X.labels[t]}
                       for (k, l), t in sorted(plan.eta.items()) if l > 0]}


def cmd_simulate(args) -> dict:
    F = io.load_network(args.net)
    orbit = dynnet.simulate(F, args.x0, args.steps)
    return {"labels": list(F.labels), "final": orbit[-1].tolist(),
            "trajectory": orbit.tolist() if args.full else None}


def cmd_verify_expansion(args) -> dict:
    F = io.load_network(args.net)
    dev = dynnet.verify_expansion_dynamics(F, _split(args.keep), args.x0, args.steps)
    result = {"deviation": dev, "tolerance": args.tol, "pass": dev <= args.tol}
    if not result["pass"]:
        raise _Failed(result)
    return result


# -- parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="isospec", description="Isospectral graph reductions and network stability.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name: str, fn: Callable, help: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help)
        sp.set_defaults(func=fn)
        return sp

    sp = add("reduce", cmd_reduce, "reduce a graph over a structural set (repeat --keep for a nested sequence)")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--keep", required=True, action="append", help="comma-separated vertex labels")
    sp.add_argument("--matrix", action="store_true", help="use the Schur-complement path")

    sp = add("reduce-any", cmd_reduce_any, "reduce a graph in G_pi onto any vertex subset")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--keep", required=True)
    sp.add_argument("--order", help="removal order of the other vertices")

    sp = add("expand", cmd_expand, "branch expansion over a structural set")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--keep", required=True)

    sp = add("lreduce", cmd_lreduce, "fixed-weight-set L-construction")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--keep", required=True)

    sp = add("spectrum", cmd_spectrum, "characteristic function, eigenvalues and poles")
    sp.add_argument("--graph", required=True)

    sp = add("verify", cmd_verify, "check the spectral identities for a reduction")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--keep", required=True)

    sp = add("equiv", cmd_equiv, "spectral equivalence of two graphs")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--keep", required=True)
    sp.add_argument("--other", required=True)
    sp.add_argument("--other-keep", required=True)

    sp = add("iso", cmd_iso, "weighted graph isomorphism")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--other", required=True)
    sp.add_argument("--tau", action="store_true", help="compare minimal-out-degree reductions")

    for name, fn, help in [
        ("net-stability", cmd_net_stability, "stability verdict of an interaction"),
        ("net-expand", cmd_net_expand, "expand an interaction over a structural set"),
    ]:
        sp = add(name, fn, help)
        sp.add_argument("--net", required=True)
        sp.add_argument("--grid", type=int, default=dynnet.GRID_PER_AXIS)
        sp.add_argument("--lipschitz", choices=["estimate", "constructed"], default="estimate")
        if name == "net-stability":
            sp.add_argument("--expand", help="also analyse the expansion over these vertices")
        else:
            sp.add_argument("--keep", required=True)

    sp = add("simulate", cmd_simulate, "iterate an interaction")
    sp.add_argument("--net", required=True)
    sp.add_argument("--x0", required=True, type=_floats)
    sp.add_argument("--steps", required=True, type=int)
    sp.add_argument("--full", action="store_true", help="include the whole trajectory")

    sp = add("verify-expansion", cmd_verify_expansion, "co-simulate an interaction and its expansion")
    sp.add_argument("--net", required=True)
    sp.add_argument("--keep", required=True)
    sp.add_argument("--x0", required=True, type=_floats)
    sp.add_argument("--steps", required=True, type=int)
    sp.add_argument("--tol", type=float, default=1e-10)

    sp = add("export-dot", cmd_export_dot, "write a graph in DOT, marking a vertex set")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--keep")
    return p


def _echo(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "func"}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    echo = _echo(args)
    t0 = time.perf_counter()
    status = 0
    try:
        result = args.func(args)
        if isinstance(result, str):
            sys.stdout.write(result)
            return 0
        doc: dict[str, Any] = {"command": echo, "result": result}
    except _Usage as exc:
        parser.error(str(exc))
    except _Failed as exc:
        doc = {"command": echo, "result": exc.result}
        status = 1
    except IsospecError as exc:
        doc = {"command": echo, "error": {"name": exc.name, "message": str(exc)}}
        status = 1
    except OSError as exc:
        doc = {"command": echo, "error": {"name": type(exc).__name__, "message": str(exc)}}
        status = 1
    doc["timing"] = {"seconds": round(time.perf_counter() - t0, 6)}
    print(json.dumps(doc, indent=2))
    return status


if __name__ == "__main__":
    sys.exit(main())
