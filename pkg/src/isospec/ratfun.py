"""Exact arithmetic in the field of rational functions in the spectral variable.

Coefficients are Gaussian rationals ``a + b i`` with ``a, b`` exact rationals.
Real coefficients are plain :class:`gmpy2.mpq` values; a coefficient with a
nonzero imaginary part is a :class:`GaussianRational`.  Arithmetic between the
two collapses back to ``mpq`` whenever the imaginary part cancels, so the
common all-real case runs entirely on gmpy2.

Polynomials are immutable tuples of coefficients in ascending degree order
with no trailing zeros.  A :class:`RatFunc` is always kept canonical: the
numerator and denominator are coprime and the denominator is monic, so two
elements are equal exactly when their representations are.
"""
from __future__ import annotations

import math
import numbers
from fractions import Fraction
from typing import Iterable, Sequence, Union

from gmpy2 import mpq

from .errors import (
    BothZero,
    DivisionByZeroElement,
    PoleAtPoint,
    UndefinedDegree,
    ZeroDenominator,
    ZeroPolynomial,
)

__all__ = [
    "GaussianRational",
    "coeff",
    "real_part",
    "imag_part",
    "Poly",
    "RatFunc",
    "poly_gcd",
    "squarefree_factor",
    "rf_make",
    "rf_add",
    "rf_mul",
    "rf_div",
    "rf_pi",
    "rf_eval",
    "LAMBDA",
    "ZERO",
    "ONE",
    "POLE_TOLERANCE",
]

POLE_TOLERANCE = 1e-12

_Q0 = mpq(0)
_Q1 = mpq(1)


class GaussianRational(numbers.Number):
    """A Gaussian rational with nonzero imaginary part.

    Build values through :func:`gauss`, which returns a plain ``mpq`` when the
    imaginary part is zero.
    """

    __slots__ = ("re", "im")

    def __init__(self, re, im):
        self.re = re
        self.im = im

    def _parts(self, other):
        if isinstance(other, GaussianRational):
            return other.re, other.im
        return coeff(other), _Q0

    def __add__(self, other):
        if not isinstance(other, (GaussianRational, int, type(_Q0), Fraction)):
            return NotImplemented
        a, b = self._parts(other)
        return gauss(self.re + a, self.im + b)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, (GaussianRational, int, type(_Q0), Fraction)):
            return NotImplemented
        a, b = self._parts(other)
        return gauss(self.re - a, self.im - b)

    def __rsub__(self, other):
        a, b = self._parts(other)
        return gauss(a - self.re, b - self.im)

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, other):
        if isinstance(other, GaussianRational):
            return gauss(self.re * other.re - self.im * other.im,
                         self.re * other.im + self.im * other.re)
        if isinstance(other, (int, type(_Q0), Fraction)):
            other = coeff(other)
            return gauss(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, GaussianRational):
            return self * other.reciprocal()
        if isinstance(other, (int, type(_Q0), Fraction)):
            other = coeff(other)
            if not other:
                raise ZeroDivisionError("division by zero coefficient")
            return gauss(self.re / other, self.im / other)
        return NotImplemented

    def __rtruediv__(self, other):
        return coeff(other) * self.reciprocal()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.reciprocal() ** (-k)
        out, base = _Q1, self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def reciprocal(self):
        n = self.re * self.re + self.im * self.im
        return gauss(self.re / n, -self.im / n)

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        return False

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return True

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self):
        return abs(complex(self))

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"


def gauss(re, im):
    """Gaussian rational ``re + im*i``; a plain ``mpq`` when ``im`` is zero."""
    return GaussianRational(re, im) if im else re


def coeff(x) -> Union[mpq, GaussianRational]:
    """Coerce ``x`` to an exact coefficient.

    Floats (and complex floats) are converted exactly from their binary value.
    """
    if isinstance(x, (type(_Q0), GaussianRational)):
        return x
    if isinstance(x, (int, Fraction)):
        return mpq(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"non-finite coefficient {x!r}")
        return mpq(x)
    if isinstance(x, complex):
        return gauss(coeff(x.real), coeff(x.imag))
    if isinstance(x, str):
        return mpq(x)
    if isinstance(x, numbers.Rational):
        return mpq(int(x.numerator), int(x.denominator))
    raise TypeError(f"cannot use {type(x).__name__} as a coefficient")


def real_part(c):
    return c.re if isinstance(c, GaussianRational) else c


def imag_part(c):
    return c.im if isinstance(c, GaussianRational) else _Q0


def _to_complex(c) -> complex:
    if isinstance(c, GaussianRational):
        return complex(c)
    return complex(float(c), 0.0)


# polynomials ---------------------------------------------------------------

def _trim(cs: list) -> tuple:
    n = len(cs)
    while n and not cs[n - 1]:
        n -= 1
    return tuple(cs[:n])


class Poly:
    """Univariate polynomial in ``l`` (the spectral variable) with exact coefficients.

    >>> p = Poly([-1, 0, 1])          # l^2 - 1
    >>> p // Poly([-1, 1])
    Poly('l+1')
    """

    __slots__ = ("c",)

    def __init__(self, coeffs: Iterable = ()):
        self.c = _trim([coeff(x) for x in coeffs])

    @classmethod
    def _raw(cls, cs: tuple) -> "Poly":
        p = object.__new__(cls)
        p.c = cs
        return p

    @classmethod
    def const(cls, value) -> "Poly":
        value = coeff(value)
        return cls._raw((value,) if value else ())

    @classmethod
    def monomial(cls, k: int, value=1) -> "Poly":
        value = coeff(value)
        if not value:
            return _PZERO
        return cls._raw((_Q0,) * k + (value,))

    # -- structure
    @property
    def degree(self):
        """Degree; ``-math.inf`` for the zero polynomial."""
        return len(self.c) - 1 if self.c else -math.inf

    @property
    def lc(self):
        if not self.c:
            raise ZeroPolynomial("zero polynomial has no leading coefficient")
        return self.c[-1]

    def is_constant(self) -> bool:
        return len(self.c) <= 1

    def is_one(self) -> bool:
        return len(self.c) == 1 and self.c[0] == 1

    def __bool__(self):
        return bool(self.c)

    def __len__(self):
        return len(self.c)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.c == other.c
        if isinstance(other, (int, Fraction, type(_Q0), GaussianRational)):
            return self.c == Poly.const(other).c
        return NotImplemented

    def __hash__(self):
        return hash(self.c)

    # -- arithmetic
    def __neg__(self):
        return Poly._raw(tuple(-x for x in self.c))

    def __add__(self, other):
        other = _as_poly(other)
        if other is None:
            return NotImplemented
        a, b = self.c, other.c
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, y in enumerate(b):
            out[i] = out[i] + y
        return Poly._raw(_trim(out))

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_poly(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Poly):
            a, b = self.c, other.c
            if not a or not b:
                return _PZERO
            if len(b) == 1:
                y = b[0]
                return Poly._raw(tuple(x * y for x in a))
            if len(a) == 1:
                x = a[0]
                return Poly._raw(tuple(x * y for y in b))
            out = [_Q0] * (len(a) + len(b) - 1)
            for i, x in enumerate(a):
                if x:
                    for j, y in enumerate(b):
                        out[i + j] = out[i + j] + x * y
            return Poly._raw(_trim(out))
        try:
            y = coeff(other)
        except TypeError:
            return NotImplemented
        if not y:
            return _PZERO
        return Poly._raw(tuple(x * y for x in self.c))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out, base = _PONE, self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __divmod__(self, other):
        other = _as_poly(other)
        if not other:
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.c)
        d = other.c
        dd = len(d) - 1
        if len(r) - 1 < dd:
            return _PZERO, self
        inv = _Q1 / d[-1]
        q = [_Q0] * (len(r) - dd)
        for k in range(len(r) - 1 - dd, -1, -1):
            t = r[k + dd] * inv
            if t:
                q[k] = t
                for i in range(dd):
                    r[k + i] = r[k + i] - t * d[i]
            r[k + dd] = _Q0
        return Poly._raw(_trim(q)), Poly._raw(_trim(r[:dd]))

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other: "Poly") -> "Poly":
        """Quotient of a division known to be exact; raises if it is not."""
        if other.is_one():
            return self
        q, r = divmod(self, other)
        if r:
            raise ArithmeticError(f"{other} does not divide {self}")
        return q

    def monic(self) -> "Poly":
        if not self.c:
            return self
        lc = self.c[-1]
        if lc == 1:
            return self
        inv = _Q1 / lc
        return Poly._raw(tuple(x * inv for x in self.c[:-1]) + (_Q1,))

    def derivative(self) -> "Poly":
        return Poly._raw(_trim([x * k for k, x in enumerate(self.c) if k]))

    def shift_degree(self, k: int) -> "Poly":
        """Multiply by ``l**k``."""
        if not self.c or k == 0:
            return self
        return Poly._raw((_Q0,) * k + self.c)

    def trailing_zeros(self) -> int:
        """Multiplicity of the root ``0``."""
        k = 0
        for x in self.c:
            if x:
                break
            k += 1
        return k

    # -- evaluation
    def at(self, x):
        """Exact value at an exact point."""
        x = coeff(x)
        out = _Q0
        for a in reversed(self.c):
            out = out * x + a
        return out

    def eval(self, z) -> complex:
        """Floating value at ``z`` by Horner's rule."""
        z = complex(z)
        out = 0j
        for a in reversed(self.c):
            out = out * z + _to_complex(a)
        return out

    def complex_coeffs(self) -> list[complex]:
        """Ascending floating coefficients."""
        return [_to_complex(a) for a in self.c]

    def is_real(self) -> bool:
        return not any(isinstance(a, GaussianRational) for a in self.c)

    # -- printing
    def n_terms(self) -> int:
        return sum(1 for a in self.c if a)

    def __str__(self):
        return render_poly(self)

    def __repr__(self):
        return f"Poly({str(self)!r})"


_PZERO = Poly._raw(())
_PONE = Poly._raw((_Q1,))
_PX = Poly._raw((_Q0, _Q1))


def _as_poly(x):
    if isinstance(x, Poly):
        return x
    try:
        return Poly.const(x)
    except TypeError:
        return None


def poly_gcd(p: Poly, q: Poly) -> Poly:
    """Monic greatest common divisor by the Euclidean algorithm."""
    if not p and not q:
        raise BothZero("gcd of two zero polynomials is undefined")
    if not p:
        return q.monic()
    if not q:
        return p.monic()
    if len(p.c) == 1 or len(q.c) == 1:
        return _PONE
    if len(p.c) < len(q.c):
        p, q = q, p
    p, q = p.monic(), q.monic()
    while q:
        r = p % q
        p, q = q, r.monic()
    return p


def squarefree_factor(p: Poly) -> list[tuple[Poly, int]]:
    """Square-free decomposition ``p = lc(p) * prod f_i**m_i`` (Yun's algorithm).

    Factors are monic, pairwise coprime and square-free; multiplicities are
    strictly increasing.  A constant input gives an empty list.
    """
    if not p:
        raise ZeroPolynomial("cannot factor the zero polynomial")
    f = p.monic()
    if f.degree < 1:
        return []
    df = f.derivative()
    a = poly_gcd(f, df)
    b = f.exact_div(a)
    c = df.exact_div(a)
    d = c - b.derivative()
    out: list[tuple[Poly, int]] = []
    i = 1
    while b.degree >= 1:
        a = poly_gcd(b, d) if d else b
        if a.degree >= 1:
            out.append((a, i))
        b = b.exact_div(a)
        c = d.exact_div(a)
        d = c - b.derivative()
        i += 1
    return out


# rendering -----------------------------------------------------------------

def _render_rational(q) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _render_coeff(c) -> str:
    """Coefficient as an expression that reparses to itself (sign included)."""
    if not isinstance(c, GaussianRational):
        return _render_rational(c)
    im = c.im
    if im == 1:
        ims = "i"
    elif im == -1:
        ims = "-i"
    elif im.denominator == 1:
        ims = f"{im.numerator}i"
    else:
        ims = f"{_render_rational(im)}*i"
    if not c.re:
        return f"({ims})"
    sep = "" if ims.startswith("-") else "+"
    return f"({_render_rational(c.re)}{sep}{ims})"


def render_poly(p: Poly, var: str = "l") -> str:
    """Descending-power rendering, e.g. ``l^2-2*l+1/2``."""
    if not p.c:
        return "0"
    parts: list[str] = []
    for k in range(len(p.c) - 1, -1, -1):
        a = p.c[k]
        if not a:
            continue
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        if isinstance(a, GaussianRational):
            sign, body = "+", _render_coeff(a)
            term = body if not mono else f"{body}*{mono}"
        else:
            sign = "-" if a < 0 else "+"
            mag = -a if a < 0 else a
            if not mono:
                term = _render_rational(mag)
            elif mag == 1:
                term = mono
            else:
                term = f"{_render_rational(mag)}*{mono}"
        if not parts:
            parts.append(term if sign == "+" else f"-{term}")
        else:
            parts.append(f"{sign}{term}")
    return "".join(parts)


# rational functions --------------------------------------------------------

class RatFunc:
    """Canonical element ``num/den`` of the rational function field.

    Construction cancels the gcd and makes the denominator monic, so equality
    is equality of representations and values are safe dictionary keys.
    """

    __slots__ = ("num", "den")

    def __init__(self, num=None, den=None):
        num = _PZERO if num is None else _as_poly_strict(num)
        den = _PONE if den is None else _as_poly_strict(den)
        if not den:
            raise ZeroDenominator("denominator is the zero polynomial")
        if not num:
            num, den = _PZERO, _PONE
        elif den.is_constant():
            if den.c[0] != 1:
                num = num * (_Q1 / den.c[0])
                den = _PONE
        else:
            g = poly_gcd(num, den)
            if not g.is_one():
                num, den = num.exact_div(g), den.exact_div(g)
            lc = den.c[-1]
            if lc != 1:
                inv = _Q1 / lc
                num, den = num * inv, den * inv
        self.num = num
        self.den = den

    @classmethod
    def _raw(cls, num: Poly, den: Poly) -> "RatFunc":
        w = object.__new__(cls)
        w.num = num
        w.den = den
        return w

    @classmethod
    def const(cls, value) -> "RatFunc":
        return cls._raw(Poly.const(value), _PONE)

    # -- predicates
    def __bool__(self):
        return bool(self.num)

    def is_zero(self) -> bool:
        return not self.num

    def is_polynomial(self) -> bool:
        return self.den.is_one()

    def is_constant(self) -> bool:
        return self.den.is_one() and len(self.num.c) <= 1

    def constant_value(self):
        """Exact coefficient of a constant element."""
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.num.c[0] if self.num.c else _Q0

    def is_lambda(self) -> bool:
        return self.den.is_one() and self.num.c == _PX.c

    def is_real(self) -> bool:
        return self.num.is_real() and self.den.is_real()

    def __eq__(self, other):
        if isinstance(other, RatFunc):
            return self.num.c == other.num.c and self.den.c == other.den.c
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return self == o

    def __hash__(self):
        return hash((self.num.c, self.den.c))

    # -- field operations
    def __neg__(self):
        return RatFunc._raw(-self.num, self.den)

    def __add__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        a, b, c, d = self.num, self.den, o.num, o.den
        if not a:
            return o
        if not c:
            return self
        if b.is_one() and d.is_one():
            return RatFunc._raw(a + c, _PONE)
        if b.is_one():
            return RatFunc._raw(a * d + c, d)
        if d.is_one():
            return RatFunc._raw(a + c * b, b)
        g = poly_gcd(b, d)
        if g.is_one():
            return RatFunc._raw(a * d + c * b, b * d)
        b1, d1 = b.exact_div(g), d.exact_div(g)
        n = a * d1 + c * b1
        if not n:
            return ZERO
        h = poly_gcd(n, g)
        den = b1 * d
        if not h.is_one():
            n, den = n.exact_div(h), den.exact_div(h)
        return RatFunc._raw(n, den)

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        a, b, c, d = self.num, self.den, o.num, o.den
        if not a or not c:
            return ZERO
        if b.is_one() and d.is_one():
            return RatFunc._raw(a * c, _PONE)
        if len(c.c) == 1 and d.is_one():
            return RatFunc._raw(a * c.c[0], b)
        if len(a.c) == 1 and b.is_one():
            return RatFunc._raw(c * a.c[0], d)
        g1 = poly_gcd(a, d)
        g2 = poly_gcd(c, b)
        if not g1.is_one():
            a, d = a.exact_div(g1), d.exact_div(g1)
        if not g2.is_one():
            c, b = c.exact_div(g2), b.exact_div(g2)
        return RatFunc._raw(a * c, b * d)

    __rmul__ = __mul__

    def reciprocal(self) -> "RatFunc":
        if not self.num:
            raise DivisionByZeroElement("the zero element has no inverse")
        lc = self.num.c[-1]
        if lc == 1:
            return RatFunc._raw(self.den, self.num)
        inv = _Q1 / lc
        return RatFunc._raw(self.den * inv, self.num * inv)

    def __truediv__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return self * o.reciprocal()

    def __rtruediv__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return o * self.reciprocal()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.reciprocal() ** (-k)
        return RatFunc._raw(self.num ** k, self.den ** k)

    # -- degree functional and evaluation
    def pi(self) -> int:
        """``deg(num) - deg(den)``; undefined on zero."""
        if not self.num:
            raise UndefinedDegree("degree functional is undefined on the zero element")
        return len(self.num.c) - len(self.den.c)

    def __call__(self, z, pole_tol: float = POLE_TOLERANCE) -> complex:
        return self.eval(z, pole_tol)

    def eval(self, z, pole_tol: float = POLE_TOLERANCE) -> complex:
        q = self.den.eval(z)
        if abs(q) < pole_tol:
            raise PoleAtPoint(f"|den({z})| = {abs(q):.3g} is below the pole tolerance {pole_tol:g}")
        return self.num.eval(z) / q

    def at(self, x):
        """Exact value at an exact point."""
        q = self.den.at(x)
        if not q:
            raise PoleAtPoint(f"{self} has a pole at {x}")
        return self.num.at(x) / q

    # -- printing
    def __str__(self):
        n = render_poly(self.num)
        if self.den.is_one():
            return n
        d = render_poly(self.den)
        if self.num.n_terms() > 1:
            n = f"({n})"
        if self.den.n_terms() > 1:
            d = f"({d})"
        return f"{n}/{d}"

    def __repr__(self):
        return f"RatFunc({str(self)!r})"


def _as_poly_strict(x) -> Poly:
    p = _as_poly(x)
    if p is None:
        raise TypeError(f"cannot use {type(x).__name__} as a polynomial")
    return p


def _coerce(x):
    if isinstance(x, RatFunc):
        return x
    if isinstance(x, Poly):
        return RatFunc._raw(x, _PONE)
    try:
        return RatFunc._raw(Poly.const(x), _PONE)
    except (TypeError, ValueError):
        return None


ZERO = RatFunc._raw(_PZERO, _PONE)
ONE = RatFunc._raw(_PONE, _PONE)
LAMBDA = RatFunc._raw(_PX, _PONE)


# functional surface --------------------------------------------------------

def rf_make(num, den) -> RatFunc:
    return RatFunc(num, den)


def rf_add(a: RatFunc, b: RatFunc) -> RatFunc:
    return a + b


def rf_mul(a: RatFunc, b: RatFunc) -> RatFunc:
    return a * b


def rf_div(a: RatFunc, b: RatFunc) -> RatFunc:
    return a / b


def rf_pi(w: RatFunc) -> int:
    return w.pi()


def rf_eval(w: RatFunc, z, pole_tol: float = POLE_TOLERANCE) -> complex:
    return w.eval(z, pole_tol)


def as_ratfunc(x) -> RatFunc:
    """Coerce numbers, polynomials and weight strings to :class:`RatFunc`."""
    if isinstance(x, str):
        from .weights import parse_weight

        return parse_weight(x)
    w = _coerce(x)
    if w is None:
        raise TypeError(f"cannot use {type(x).__name__} as a weight")
    return w


def lambda_minus(w: RatFunc) -> RatFunc:
    """``l - w``."""
    return LAMBDA - w


def poly_from_roots(roots: Sequence) -> Poly:
    out = _PONE
    for r in roots:
        out = out * Poly([-coeff(r), 1])
    return out
