"""Characteristic functions, eigenvalue lists and spectral radii.

Identities between spectra are always checked on exact polynomials.  Floating
roots are only produced for display and for the spectral radius, and their
multiplicities come from the exact square-free factorization.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import CrossCheckDisagreement, EmptyGraph, NonFinite
from .graph import VertexRef, WeightedDigraph, _complement, require_structural, subgraph
from .ratfun import ONE, Poly, RatFunc, coeff, poly_gcd, squarefree_factor
from .reduction import reduce, shifted_matrix

__all__ = [
    "SpectrumList",
    "charfun",
    "det",
    "sigma",
    "sigma_inv",
    "poly_roots",
    "equal_up_to_unit",
    "nonzero_part",
    "verify_main_theorem",
    "spectral_radius",
]

CROSS_CHECK_TOL = 1e-6
POWER_ITER_CAP = 10_000


@dataclass(frozen=True)
class SpectrumList:
    """Roots of a characteristic function's numerator (or denominator).

    ``roots`` pairs each distinct floating root with its exact multiplicity
    and is sorted by real then imaginary part.
    """

    char_fun: RatFunc
    roots: tuple[tuple[complex, int], ...]

    def __iter__(self) -> Iterator[tuple[complex, int]]:
        return iter(self.roots)

    def __len__(self) -> int:
        return len(self.roots)

    @property
    def size(self) -> int:
        """Number of roots counted with multiplicity."""
        return sum(m for _, m in self.roots)

    def multiplicity(self, z: complex, tol: float = 1e-8) -> int:
        return sum(m for r, m in self.roots if abs(r - z) <= tol * max(1.0, abs(z)))

    def as_list(self) -> list[tuple[complex, int]]:
        return list(self.roots)


def _lcm(a: Poly, b: Poly) -> Poly:
    if a.is_one():
        return b
    if b.is_one():
        return a
    return (a * b).exact_div(poly_gcd(a, b)).monic()


def det(M: Sequence[Sequence[RatFunc]]) -> RatFunc:
    """Exact determinant of a square matrix over W.

    Each row is lifted to polynomials by its own common denominator, the
    polynomial matrix is eliminated with Bareiss's fraction-free scheme, and
    the row denominators are divided back out at the end.
    """
    n = len(M)
    if n == 0:
        return ONE
    rows: list[list[Poly]] = []
    denom = Poly.const(1)
    for row in M:
        d = Poly.const(1)
        for w in row:
            if w:
                d = _lcm(d, w.den)
        rows.append([w.num * d.exact_div(w.den) if w else Poly() for w in row])
        denom = denom * d
    sign = 1
    prev = Poly.const(1)
    for k in range(n - 1):
        if not rows[k][k]:
            # pick the pivot of lowest degree among nonzero candidates
            cands = [r for r in range(k + 1, n) if rows[r][k]]
            if not cands:
                return RatFunc()
            p = min(cands, key=lambda r: (rows[r][k].degree, r))
            rows[k], rows[p] = rows[p], rows[k]
            sign = -sign
        piv = rows[k][k]
        for i in range(k + 1, n):
            rik = rows[i][k]
            ri = rows[i]
            rk = rows[k]
            for j in range(k + 1, n):
                v = ri[j] * piv
                if rik and rk[j]:
                    v = v - rik * rk[j]
                ri[j] = v.exact_div(prev) if v else v
            ri[k] = Poly()
        prev = piv
    top = rows[n - 1][n - 1]
    if sign < 0:
        top = -top
    return RatFunc(top, denom)


def charfun(G: WeightedDigraph) -> RatFunc:
    """``det(M(G) - l I)`` as a canonical element of W."""
    if G.n == 0:
        raise EmptyGraph("characteristic function of the empty graph")
    return det(shifted_matrix(G))


def _polish(p: Poly, dp: Poly, z: complex) -> complex:
    """Newton steps for as long as the residual keeps shrinking."""
    f = p.eval(z)
    for _ in range(50):
        d = dp.eval(z)
        if d == 0 or f == 0:
            break
        w = z - f / d
        g = p.eval(w)
        if abs(g) >= abs(f):
            break
        z, f = w, g
    return z


def _simple_roots(p: Poly) -> list[complex]:
    """Floating roots of a square-free polynomial."""
    deg = p.degree
    if deg < 1:
        return []
    cs = p.complex_coeffs()
    if deg == 1:
        return [-cs[0] / cs[1]]
    desc = np.array(cs[::-1], dtype=complex)
    desc = desc / desc[0]
    zs = np.roots(desc)
    dp = p.derivative()
    out = [_polish(p, dp, complex(z)) for z in zs]
    out = [complex(0.0 if abs(z.real) <= 1e-14 * abs(z) else z.real,
                   0.0 if abs(z.imag) <= 1e-12 * max(1.0, abs(z)) else z.imag) for z in out]
    if p.is_real():
        # nonreal roots of a real polynomial come in conjugate pairs
        upper = [z for z in out if z.imag > 0]
        if 2 * len(upper) == sum(1 for z in out if z.imag):
            out = [z for z in out if z.imag == 0] + upper + [z.conjugate() for z in upper]
    return out


def poly_roots(p: Poly) -> tuple[tuple[complex, int], ...]:
    """Distinct roots with exact multiplicities, sorted by (re, im)."""
    if not p or p.degree == 0:
        return ()
    out: list[tuple[complex, int]] = []
    for f, m in squarefree_factor(p):
        out.extend((complex(z.real + 0.0, z.imag + 0.0), m) for z in _simple_roots(f))
    out.sort(key=lambda t: (round(t[0].real, 12), round(t[0].imag, 12)))
    return tuple(out)


def sigma(G: WeightedDigraph) -> SpectrumList:
    """Eigenvalues: roots of the numerator of the characteristic function."""
    c = charfun(G)
    return SpectrumList(c, poly_roots(c.num))


def sigma_inv(G: WeightedDigraph) -> SpectrumList:
    """Poles: roots of the denominator of the characteristic function."""
    c = charfun(G)
    return SpectrumList(c, poly_roots(c.den))


def equal_up_to_unit(a: RatFunc, b: RatFunc) -> bool:
    """``a == c * b`` for some nonzero constant ``c``."""
    if not a or not b:
        return not a and not b
    return a.den == b.den and a.num.monic() == b.num.monic()


def nonzero_part(p: Poly) -> Poly:
    """Monic ``p`` with every factor of ``l`` removed."""
    if not p:
        return p
    return Poly(p.c[p.trailing_zeros():]).monic()


def verify_main_theorem(G: WeightedDigraph, S: Iterable[VertexRef]) -> bool:
    """Check the spectrum theorem for ``R_S(G)`` as a polynomial identity.

    With ``cG = det(M(G) - l I)``, ``cB`` the same for ``G`` restricted to the
    complement of ``S`` and ``cR`` for the reduction, tests
    ``num(cR) num(cB) den(cG) = u num(cG) den(cR) den(cB)`` for a unit ``u``.
    """
    idx = require_structural(G, S)
    comp = _complement(G, idx)
    cG = charfun(G)
    cR = charfun(reduce(G, idx))
    cB = charfun(subgraph(G, comp)) if comp else ONE
    lhs = cR.num * cB.num * cG.den
    rhs = cG.num * cR.den * cB.den
    if not lhs or not rhs:
        return not lhs and not rhs
    return lhs.monic() == rhs.monic()


def _power_bracket(A: np.ndarray) -> tuple[float, float]:
    """Collatz-Wielandt bounds on ``rho(A)`` from power iteration on ``A + I``.

    For nonnegative ``B`` and positive ``x``, ``min (Bx)_i/x_i <= rho(B) <=
    max (Bx)_i/x_i``; iterating tightens the bracket whenever ``A`` is
    irreducible.
    """
    n = A.shape[0]
    B = A + np.eye(n)
    x = np.ones(n)
    lo, hi = 0.0, math.inf
    for _ in range(POWER_ITER_CAP):
        y = B @ x
        r = y / x
        lo, hi = max(lo, float(r.min())), min(hi, float(r.max()))
        if hi - lo <= 1e-13 * max(1.0, hi):
            break
        # any positive vector gives valid bounds, so keep x away from underflow
        x = np.maximum(y / np.linalg.norm(y), 1e-300)
    return lo - 1.0, hi - 1.0


def spectral_radius(A) -> float:
    """Largest eigenvalue modulus of a real matrix.

    Floating entries are converted exactly to rationals and the radius is read
    off the exact characteristic polynomial.  For nonnegative matrices the
    value must also fall inside the power-iteration bracket.
    """
    arr = np.asarray(A, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise ValueError("spectral_radius needs a nonempty square matrix")
    if not np.all(np.isfinite(arr)):
        raise NonFinite("matrix has non-finite entries")
    n = arr.shape[0]
    G = WeightedDigraph([str(k) for k in range(n)],
                        [[RatFunc.const(coeff(float(x))) if x else RatFunc() for x in row] for row in arr])
    roots = poly_roots(charfun(G).num)
    rho = max((abs(z) for z, _ in roots), default=0.0)
    if np.all(arr >= 0):
        lo, hi = _power_bracket(arr)
        slack = CROSS_CHECK_TOL * max(1.0, rho)
        if not lo - slack <= rho <= hi + slack:
            raise CrossCheckDisagreement(
                f"characteristic route gives {rho!r}, power iteration brackets [{lo!r}, {hi!r}]")
    return rho
