"""Expression trees for the component functions of an interaction.

Nodes evaluate on scalars or, elementwise, on numpy arrays, and differentiate
symbolically so that Lipschitz bounds can be estimated from exact partial
derivatives.  ``x`` in :meth:`Node.eval` is anything indexable by variable
number: a list, a vector or a dict of grid arrays.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import NonDifferentiableComponent

__all__ = [
    "Node",
    "Var",
    "Const",
    "Affine",
    "Poly1d",
    "Named",
    "Identity",
    "Product",
    "NamedFunction",
    "register",
    "REGISTRY",
    "var",
    "const",
    "affine",
    "poly1d",
    "named",
    "identity",
    "substitute",
    "node_from_json",
    "node_to_json",
]


class Node:
    __slots__ = ()

    def eval(self, x):
        raise NotImplementedError

    def vars(self) -> frozenset[int]:
        raise NotImplementedError

    def diff(self, i: int) -> "Node":
        raise NotImplementedError

    def children(self) -> tuple["Node", ...]:
        return ()

    def rebuild(self, children: Sequence["Node"]) -> "Node":
        return self

    def __call__(self, x):
        return self.eval(x)

    def __repr__(self):
        return str(self)


@dataclass(frozen=True, eq=True)
class Var(Node):
    index: int

    def eval(self, x):
        return x[self.index]

    def vars(self):
        return frozenset((self.index,))

    def diff(self, i):
        return ONE_NODE if i == self.index else ZERO_NODE

    def __str__(self):
        return f"x{self.index + 1}"


@dataclass(frozen=True, eq=True)
class Const(Node):
    value: float

    def eval(self, x):
        return self.value

    def vars(self):
        return frozenset()

    def diff(self, i):
        return ZERO_NODE

    def __str__(self):
        return f"{self.value:g}"


ZERO_NODE = Const(0.0)
ONE_NODE = Const(1.0)


@dataclass(frozen=True, eq=True)
class Affine(Node):
    """``offset + sum(w_k * args_k)``."""

    weights: tuple[float, ...]
    args: tuple[Node, ...]
    offset: float = 0.0

    def __post_init__(self):
        if len(self.weights) != len(self.args):
            raise ValueError("affine node needs one weight per argument")

    def eval(self, x):
        out = self.offset
        for w, a in zip(self.weights, self.args):
            out = out + w * a.eval(x)
        return out

    def vars(self):
        return frozenset().union(*(a.vars() for a in self.args))

    def diff(self, i):
        return _sum([(w, a.diff(i)) for w, a in zip(self.weights, self.args)])

    def children(self):
        return self.args

    def rebuild(self, children):
        return Affine(self.weights, tuple(children), self.offset)

    def __str__(self):
        terms = [f"{w:g}*{a}" if w != 1 else str(a) for w, a in zip(self.weights, self.args)]
        if self.offset:
            terms.append(f"{self.offset:g}")
        return " + ".join(terms) if terms else "0"


@dataclass(frozen=True, eq=True)
class Poly1d(Node):
    """``sum(c_k * arg**k)`` with ascending coefficients."""

    coeffs: tuple[float, ...]
    arg: Node

    def eval(self, x):
        u = self.arg.eval(x)
        out = 0.0
        for c in reversed(self.coeffs):
            out = out * u + c
        return out

    def vars(self):
        return self.arg.vars()

    def diff(self, i):
        d = tuple(k * c for k, c in enumerate(self.coeffs) if k)
        return _mul(_poly(d, self.arg), self.arg.diff(i))

    def children(self):
        return (self.arg,)

    def rebuild(self, children):
        return Poly1d(self.coeffs, children[0])

    def __str__(self):
        return f"poly{list(self.coeffs)}({self.arg})"


@dataclass(frozen=True)
class NamedFunction:
    """A registered scalar nonlinearity and, when differentiable, its derivative.

    ``derivative`` builds the derivative node from the argument node.
    """

    name: str
    func: Callable
    derivative: Callable[[Node], Node] | None
    formula: str


REGISTRY: dict[str, NamedFunction] = {}


def register(fn: NamedFunction) -> NamedFunction:
    REGISTRY[fn.name] = fn
    return fn


@dataclass(frozen=True, eq=True)
class Named(Node):
    name: str
    arg: Node

    def __post_init__(self):
        if self.name not in REGISTRY:
            raise KeyError(f"no registered function {self.name!r}")

    def eval(self, x):
        return REGISTRY[self.name].func(self.arg.eval(x))

    def vars(self):
        return self.arg.vars()

    def diff(self, i):
        fn = REGISTRY[self.name]
        du = self.arg.diff(i)
        if du == ZERO_NODE:
            return ZERO_NODE
        if fn.derivative is None:
            raise NonDifferentiableComponent(f"{self.name} has no registered derivative")
        return _mul(fn.derivative(self.arg), du)

    def children(self):
        return (self.arg,)

    def rebuild(self, children):
        return Named(self.name, children[0])

    def __str__(self):
        return f"{self.name}({self.arg})"


@dataclass(frozen=True, eq=True)
class Identity(Node):
    arg: Node

    def eval(self, x):
        return self.arg.eval(x)

    def vars(self):
        return self.arg.vars()

    def diff(self, i):
        return self.arg.diff(i)

    def children(self):
        return (self.arg,)

    def rebuild(self, children):
        return Identity(children[0])

    def __str__(self):
        return f"Id({self.arg})"


@dataclass(frozen=True, eq=True)
class Product(Node):
    args: tuple[Node, ...]

    def eval(self, x):
        out = 1.0
        for a in self.args:
            out = out * a.eval(x)
        return out

    def vars(self):
        return frozenset().union(*(a.vars() for a in self.args))

    def diff(self, i):
        terms = []
        for k, a in enumerate(self.args):
            da = a.diff(i)
            if da != ZERO_NODE:
                terms.append((1.0, _mul(*self.args[:k], da, *self.args[k + 1:])))
        return _sum(terms)

    def children(self):
        return self.args

    def rebuild(self, children):
        return Product(tuple(children))

    def __str__(self):
        return "*".join(f"({a})" for a in self.args)


# -- simplifying constructors used by differentiation

def _poly(coeffs: tuple[float, ...], arg: Node) -> Node:
    cs = list(coeffs)
    while cs and cs[-1] == 0:
        cs.pop()
    if not cs:
        return ZERO_NODE
    if len(cs) == 1:
        return Const(float(cs[0]))
    return Poly1d(tuple(cs), arg)


def _mul(*factors: Node) -> Node:
    scale = 1.0
    rest: list[Node] = []
    for f in factors:
        if isinstance(f, Const):
            scale *= f.value
        elif isinstance(f, Product):
            rest.extend(f.args)
        else:
            rest.append(f)
    if scale == 0:
        return ZERO_NODE
    if not rest:
        return Const(scale)
    body = rest[0] if len(rest) == 1 else Product(tuple(rest))
    return body if scale == 1 else Affine((scale,), (body,))


def _sum(terms: list[tuple[float, Node]]) -> Node:
    offset = 0.0
    ws: list[float] = []
    args: list[Node] = []
    for w, t in terms:
        if isinstance(t, Const):
            offset += w * t.value
        elif w:
            ws.append(w)
            args.append(t)
    if not args:
        return Const(offset)
    if len(args) == 1 and offset == 0 and ws[0] == 1:
        return args[0]
    return Affine(tuple(ws), tuple(args), offset)


# -- registered nonlinearities

register(NamedFunction("logistic", lambda u: 4.0 * u * (1.0 - u), lambda a: Poly1d((4.0, -8.0), a), "4x(1-x)"))
register(NamedFunction("quadratic", lambda u: 1.0 - u * u, lambda a: Poly1d((0.0, -2.0), a), "1-x^2"))
register(NamedFunction("tanh", np.tanh, lambda a: Poly1d((1.0, 0.0, -1.0), Named("tanh", a)), "tanh(x)"))
register(NamedFunction("sin", np.sin, lambda a: Named("cos", a), "sin(x)"))
register(NamedFunction("cos", np.cos, lambda a: Affine((-1.0,), (Named("sin", a),)), "cos(x)"))
register(NamedFunction("abs", np.abs, None, "|x|"))


# -- convenience builders

def _arg(a) -> Node:
    if isinstance(a, Node):
        return a
    if isinstance(a, (int, np.integer)) and not isinstance(a, bool):
        return Var(int(a))
    raise TypeError(f"cannot use {a!r} as an argument")


def var(i: int) -> Var:
    return Var(int(i))


def const(c: float) -> Const:
    return Const(float(c))


def affine(weights: Sequence[float], args: Sequence, offset: float = 0.0) -> Affine:
    return Affine(tuple(float(w) for w in weights), tuple(_arg(a) for a in args), float(offset))


def poly1d(coeffs: Sequence[float], arg) -> Poly1d:
    return Poly1d(tuple(float(c) for c in coeffs), _arg(arg))


def named(name: str, arg) -> Named:
    return Named(name, _arg(arg))


def identity(arg) -> Identity:
    return Identity(_arg(arg))


def substitute(node: Node, fn: Callable[[Var], Node]) -> Node:
    """Replace every variable leaf ``v`` by ``fn(v)``."""
    if isinstance(node, Var):
        return fn(node)
    kids = node.children()
    if not kids:
        return node
    return node.rebuild([substitute(k, fn) for k in kids])


# -- JSON form: {"kind": ..., "params": {...}, "args": [...]}; a bare integer is a variable

def node_from_json(obj) -> Node:
    if isinstance(obj, int) and not isinstance(obj, bool):
        return Var(obj)
    if not isinstance(obj, Mapping) or "kind" not in obj:
        raise ValueError(f"expression object needs a 'kind': {obj!r}")
    kind = obj["kind"]
    params = obj.get("params", {}) or {}
    args = [node_from_json(a) for a in obj.get("args", [])]

    def one() -> Node:
        if len(args) != 1:
            raise ValueError(f"{kind} takes exactly one argument")
        return args[0]

    if kind == "var":
        return Var(int(params["index"]))
    if kind == "const":
        return Const(float(params["value"]))
    if kind in ("affine", "sum"):
        weights = params.get("weights", [1.0] * len(args))
        return Affine(tuple(float(w) for w in weights), tuple(args), float(params.get("offset", 0.0)))
    if kind == "poly1d":
        return Poly1d(tuple(float(c) for c in params["coeffs"]), one())
    if kind == "named":
        return Named(str(params["name"]), one())
    if kind == "identity":
        return Identity(one())
    if kind == "product":
        return Product(tuple(args))
    raise ValueError(f"unknown expression kind {kind!r}")


def node_to_json(node: Node):
    if isinstance(node, Var):
        return {"kind": "var", "params": {"index": node.index}, "args": []}
    if isinstance(node, Const):
        return {"kind": "const", "params": {"value": node.value}, "args": []}
    if isinstance(node, Affine):
        return {"kind": "affine", "params": {"weights": list(node.weights), "offset": node.offset},
                "args": [node_to_json(a) for a in node.args]}
    if isinstance(node, Poly1d):
        return {"kind": "poly1d", "params": {"coeffs": list(node.coeffs)}, "args": [node_to_json(node.arg)]}
    if isinstance(node, Named):
        return {"kind": "named", "params": {"name": node.name}, "args": [node_to_json(node.arg)]}
    if isinstance(node, Identity):
        return {"kind": "identity", "params": {}, "args": [node_to_json(node.arg)]}
    if isinstance(node, Product):
        return {"kind": "product", "params": {}, "args": [node_to_json(a) for a in node.args]}
    raise TypeError(f"cannot serialise {type(node).__name__}")
