"""Exact arithmetic in multiquadratic fields Q(sqrt(d1), sqrt(d2), ...).

A :class:`SurdSum` is a finite sum ``sum_r c_r * sqrt(r)`` with rational
``c_r`` and distinct squarefree radicands ``r`` (``r == 1`` is the rational
part).  Square roots of distinct squarefree integers are linearly
independent over Q, so the normalized map is a canonical form and equality
is structural.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd

import mpmath

from .factor import squarefree_part

MIN_DIGITS = 32


@lru_cache(maxsize=1 << 16)
def surd_product(m, n):
    """sqrt(m) * sqrt(n) == g * sqrt(r) for squarefree m, n; returns (g, r)."""
    g = gcd(m, n)
    return g, (m // g) * (n // g)


def _as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to a rational")


class SurdSum:
    """Immutable element of a multiquadratic number field."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms=None):
        # trusted fast path: callers inside this module pass normalized dicts
        self._terms = {} if terms is None else terms
        self._hash = None

    # -- construction -----------------------------------------------------

    @classmethod
    def from_terms(cls, items):
        """Build from (radicand, coefficient) pairs; radicands need not be squarefree."""
        acc = {}
        for r, c in items:
            c = _as_fraction(c)
            if r < 1:
                raise ValueError(f"radicand must be positive, got {r}")
            s, f = squarefree_part(r)
            if f != 1:
                c = c * f
            acc[s] = acc.get(s, 0) + c
        return cls({r: c for r, c in sorted(acc.items()) if c})

    @classmethod
    def rational(cls, q):
        q = _as_fraction(q)
        return cls({1: q} if q else {})

    @classmethod
    def sqrt(cls, n):
        return cls.from_terms([(n, 1)])

    @classmethod
    def coerce(cls, x):
        if isinstance(x, SurdSum):
            return x
        return cls.rational(x)

    # -- inspection -------------------------------------------------------

    @property
    def terms(self):
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items())

    def radicands(self):
        return sorted(self._terms)

    def is_zero(self):
        return not self._terms

    def is_rational(self):
        return not self._terms or (len(self._terms) == 1 and 1 in self._terms)

    def rational_part(self):
        return self._terms.get(1, Fraction(0))

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = SurdSum.rational(other)
        if not isinstance(other, SurdSum):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- field operations -------------------------------------------------

    def __neg__(self):
        return SurdSum({r: -c for r, c in self._terms.items()})

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = SurdSum.rational(other)
        elif not isinstance(other, SurdSum):
            return NotImplemented
        if not other._terms:
            return self
        if not self._terms:
            return other
        acc = dict(self._terms)
        for r, c in other._terms.items():
            v = acc.get(r)
            if v is None:
                acc[r] = c
            else:
                v += c
                if v:
                    acc[r] = v
                else:
                    del acc[r]
        return SurdSum(acc)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = SurdSum.rational(other)
        elif not isinstance(other, SurdSum):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, q):
        """Multiply by a rational."""
        if not q:
            return SurdSum()
        if q == 1:
            return self
        return SurdSum({r: c * q for r, c in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, SurdSum):
            return NotImplemented
        a, b = self._terms, other._terms
        if not a or not b:
            return SurdSum()
        if len(a) == 1 and 1 in a:
            return other.scale(a[1])
        if len(b) == 1 and 1 in b:
            return self.scale(b[1])
        acc = {}
        for r1, c1 in a.items():
            for r2, c2 in b.items():
                g, r = surd_product(r1, r2)
                v = c1 * c2 * g
                w = acc.get(r)
                acc[r] = v if w is None else w + v
        return SurdSum({r: c for r, c in acc.items() if c})

    __rmul__ = __mul__

    def conjugate(self, p):
        """Image under the automorphism sqrt(p) -> -sqrt(p) for a prime p."""
        return SurdSum({r: (-c if r % p == 0 else c) for r, c in self._terms.items()})

    def inverse(self):
        """Multiplicative inverse by recursive conjugation over the prime support."""
        if not self._terms:
            raise ZeroDivisionError("SurdSum inverse of zero")
        num = SurdSum.rational(1)
        den = self
        while not den.is_rational():
            # pick the largest prime dividing some radicand
            p = max(_primes_of(r)[-1] for r in den._terms if r != 1)
            conj = den.conjugate(p)
            num = num * conj
            den = den * conj
        return num.scale(1 / den._terms[1])

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("SurdSum division by zero")
            return self.scale(1 / Fraction(other))
        if not isinstance(other, SurdSum):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return SurdSum.coerce(other) * self.inverse()

    def __pow__(self, e):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        out, base = SurdSum.rational(1), self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    # -- ordering (decided numerically, exactness fallback for zero) -------

    def sign(self):
        if not self._terms:
            return 0
        if self.is_rational():
            return 1 if self._terms[1] > 0 else -1
        digits = MIN_DIGITS
        while True:
            bf = to_float(self, digits)
            if abs(bf.value) > bf.err:
                return 1 if bf.value > 0 else -1
            digits *= 2

    def __lt__(self, other):
        return (self - SurdSum.coerce(other)).sign() < 0

    def __le__(self, other):
        return (self - SurdSum.coerce(other)).sign() <= 0

    def __gt__(self, other):
        return (self - SurdSum.coerce(other)).sign() > 0

    def __ge__(self, other):
        return (self - SurdSum.coerce(other)).sign() >= 0

    def __float__(self):
        return float(to_float(self, MIN_DIGITS).value)

    # -- text -------------------------------------------------------------

    def __str__(self):
        return format_surd(self)

    def __repr__(self):
        return f"SurdSum({format_surd(self)!r})"


@lru_cache(maxsize=1 << 14)
def _primes_of(r):
    from .factor import factorize

    return tuple(factorize(r))


def _format_rational(q):
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_surd(x):
    """Render as ``a/b*sqrt(n) + ...`` using the potential-file coefficient syntax."""
    if not x._terms:
        return "0"
    parts = []
    for r, c in sorted(x._terms.items()):
        s = _format_rational(c)
        if r != 1:
            s += f"*sqrt({r})"
        parts.append(s)
    out = parts[0]
    for p in parts[1:]:
        out += " - " + p[1:] if p.startswith("-") else " + " + p
    return out


def normalize_sqrt_rational(p, q=1):
    """SurdSum equal to sqrt(p/q): (f/q) * sqrt(s) with p*q = f**2 * s."""
    if p < 1 or q < 1:
        raise ValueError(f"sqrt({p}/{q}) requires positive integers")
    s, f = squarefree_part(p * q)
    return SurdSum({s: Fraction(f, q)})


# -- multiprecision embedding ----------------------------------------------


@dataclass(frozen=True)
class BigFloat:
    """A real value at fixed decimal precision with a propagated absolute error bound.

    The bound tracks rounding conservatively (a few ulps per operation); it is
    a heuristic, not an interval enclosure.
    """

    value: mpmath.mpf
    err: mpmath.mpf
    digits: int

    def _ulp(self, v):
        return abs(v) * mpmath.mpf(10) ** (-self.digits)

    def __add__(self, other):
        if not isinstance(other, BigFloat):
            other = BigFloat(mpmath.mpf(other), mpmath.mpf(0), self.digits)
        d = min(self.digits, other.digits)
        with mpmath.workdps(d + 10):
            v = self.value + other.value
            return BigFloat(v, self.err + other.err + self._ulp(v), d)

    __radd__ = __add__

    def __neg__(self):
        return BigFloat(-self.value, self.err, self.digits)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, BigFloat):
            other = BigFloat(mpmath.mpf(other), mpmath.mpf(0), self.digits)
        d = min(self.digits, other.digits)
        with mpmath.workdps(d + 10):
            v = self.value * other.value
            e = abs(self.value) * other.err + abs(other.value) * self.err + self.err * other.err
            return BigFloat(v, e + self._ulp(v), d)

    __rmul__ = __mul__

    def __float__(self):
        return float(self.value)

    def rel_err(self):
        return self.err / abs(self.value) if self.value else mpmath.inf


def to_float(x, digits=64):
    """Evaluate a SurdSum to ``digits`` decimal digits with an error bound."""
    if digits < MIN_DIGITS:
        raise ValueError(f"precision must be at least {MIN_DIGITS} digits")
    x = SurdSum.coerce(x)
    with mpmath.workdps(digits + 10):
        total = mpmath.mpf(0)
        mag = mpmath.mpf(0)
        for r, c in x.items():
            t = mpmath.mpf(c.numerator) / c.denominator
            if r != 1:
                t *= mpmath.sqrt(r)
            total += t
            mag += abs(t)
        n = len(x._terms)
        err = mag * (n + 3) * mpmath.mpf(10) ** (-(digits + 9)) if n else mpmath.mpf(0)
        return BigFloat(+total, err, digits)


def to_mp(x):
    """Plain mpmath value of a SurdSum (no error tracking); caller sets precision."""
    if isinstance(x, (int, Fraction)):
        return mpmath.mpf(x.numerator) / x.denominator if isinstance(x, Fraction) else mpmath.mpf(x)
    total = mpmath.mpf(0)
    for r, c in x._terms.items():
        t = mpmath.mpf(c.numerator) / c.denominator
        if r != 1:
            t *= mpmath.sqrt(r)
        total += t
    return total


def is_squarefree(n):
    return squarefree_part(n)[1] == 1

