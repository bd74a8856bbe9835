"""Calculus with an algebraic function Z(t) defined by A*Z**2 + B(t)*Z + C(t) = 0.

Two views of Z are provided:

* symbolic: :class:`RationalForm` ``N(t, Z) / W**k`` with ``W = 2*A*Z + B``
  and ``N`` kept Z-linear by eager reduction, closed under total derivatives;
* pointwise: :class:`QuotientElement` ``a + b*Z`` in
  ``K[Z] / (A*Z**2 + B0*Z + C0)`` at a fixed point, which checks an identity
  on both roots at once.
"""

from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .errors import DegeneratePoint, NotInvertible
from .poly import Poly
from .surd import SurdSum, to_mp


@dataclass(frozen=True)
class QuadraticConstraint:
    A: SurdSum
    B: Poly
    C: Poly

    def __post_init__(self):
        if not self.A:
            raise ValueError("leading coefficient A of the Z-quadratic must be nonzero")
        for name, p in (("B", self.B), ("C", self.C)):
            if p.uses(p.zslot):
                raise ValueError(f"constraint coefficient {name} must not contain Z")

    @property
    def nslots(self):
        return self.B.nslots

    def polynomial(self):
        """A*Z**2 + B*Z + C as a Poly."""
        z = self.B.zslot
        return Poly.monomial((0,) * z + (2,), self.A) + self.B.mul_var(z) + self.C

    def W(self):
        return Poly.monomial((0,) * self.B.zslot + (1,), self.A.scale(2)) + self.B

    def at(self, point):
        """Quotient ring at a point of t-space."""
        b0 = _const_at(self.B, point)
        c0 = _const_at(self.C, point)
        return QuotientRing(self.A, b0, c0)


def _const_at(p, point):
    cs = p.z_coefficients_at(point)
    return cs[0] if cs else SurdSum()


def discriminant_at(q, point):
    ring = q.at(point)
    return ring.discriminant()


# -- quotient algebra at a point ---------------------------------------------


class QuotientRing:
    """K[Z]/(A Z^2 + B0 Z + C0); stores Z^2 = zb*Z + zc."""

    __slots__ = ("A", "B0", "C0", "zb", "zc")

    def __init__(self, A, B0, C0):
        self.A, self.B0, self.C0 = A, B0, C0
        inv_a = A.inverse()
        self.zb = -(B0 * inv_a)
        self.zc = -(C0 * inv_a)

    def discriminant(self):
        return self.B0 * self.B0 - (self.A * self.C0).scale(4)

    def __call__(self, a, b=None):
        return QuotientElement(SurdSum.coerce(a), SurdSum() if b is None else SurdSum.coerce(b), self)

    def one(self):
        return self(1)

    def z(self):
        return self(0, 1)

    def W(self):
        """Image of W = 2 A Z + B."""
        return self(self.B0, self.A.scale(2))

    def reduce(self, coeffs):
        """Image of sum_k coeffs[k] * Z**k (quotient_reduce)."""
        a, b = SurdSum(), SurdSum()
        # Horner in Z: x -> x*Z + c
        for c in reversed(list(coeffs)):
            a, b = b * self.zc + c, a + b * self.zb
        return QuotientElement(a, b, self)

    def __eq__(self, other):
        return (
            isinstance(other, QuotientRing)
            and self.A == other.A
            and self.B0 == other.B0
            and self.C0 == other.C0
        )

    def __hash__(self):
        return hash((self.A, self.B0, self.C0))


class QuotientElement:
    __slots__ = ("a", "b", "ring")

    def __init__(self, a, b, ring):
        self.a, self.b, self.ring = a, b, ring

    def _wrap(self, other):
        if isinstance(other, QuotientElement):
            return other
        return QuotientElement(SurdSum.coerce(other), SurdSum(), self.ring)

    def is_zero(self):
        return not self.a and not self.b

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, SurdSum)):
            other = self._wrap(other)
        if not isinstance(other, QuotientElement):
            return NotImplemented
        return self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.a, self.b))

    def __add__(self, other):
        other = self._wrap(other)
        return QuotientElement(self.a + other.a, self.b + other.b, self.ring)

    __radd__ = __add__

    def __neg__(self):
        return QuotientElement(-self.a, -self.b, self.ring)

    def __sub__(self, other):
        other = self._wrap(other)
        return QuotientElement(self.a - other.a, self.b - other.b, self.ring)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, QuotientElement):
            other = SurdSum.coerce(other)
            return QuotientElement(self.a * other, self.b * other, self.ring)
        a, b, c, d = self.a, self.b, other.a, other.b
        if not b and not d:
            return QuotientElement(a * c, SurdSum(), self.ring)
        if not b:
            return QuotientElement(a * c, a * d, self.ring)
        if not d:
            return QuotientElement(a * c, b * c, self.ring)
        bd = b * d
        r = self.ring
        return QuotientElement(a * c + bd * r.zc, a * d + b * c + bd * r.zb, r)

    __rmul__ = __mul__

    def norm(self):
        r = self.ring
        return self.a * self.a + self.a * self.b * r.zb - self.b * self.b * r.zc

    def conjugate(self):
        return QuotientElement(self.a + self.b * self.ring.zb, -self.b, self.ring)

    def inverse(self):
        n = self.norm()
        if not n:
            raise NotInvertible("quotient element has zero norm", witness=n)
        ninv = n.inverse()
        c = self.conjugate()
        return QuotientElement(c.a * ninv, c.b * ninv, self.ring)

    def __truediv__(self, other):
        return self * self._wrap(other).inverse()

    def at_branch(self, z):
        """Push through a numeric root z (caller sets mpmath precision)."""
        return to_mp(self.a) + to_mp(self.b) * z

    def __repr__(self):
        return f"QuotientElement({self.a} + ({self.b})*Z)"


def quotient_mul(x, y):
    return x * y


def quotient_add(x, y):
    return x + y


def quotient_inv(x):
    return x.inverse()


def quotient_reduce(ring, coeffs):
    return ring.reduce(coeffs)


# -- numeric branches ----------------------------------------------------------


@dataclass(frozen=True)
class ZBranch:
    sign: int  # +1 takes +sqrt(disc), -1 takes -sqrt(disc)
    value: object  # mpf or mpc
    digits: int
    residual: object  # |A z^2 + B0 z + C0| / (|A z^2| + |B0 z| + |C0|)


def z_roots_numeric(ring_or_constraint, point=None, digits=64):
    ring = ring_or_constraint if point is None else ring_or_constraint.at(point)
    disc = ring.discriminant()
    if not disc:
        raise DegeneratePoint("discriminant vanishes at sample point")
    out = []
    with mpmath.workdps(digits + 20):
        A, B0, C0 = to_mp(ring.A), to_mp(ring.B0), to_mp(ring.C0)
        d = to_mp(disc)
        real = disc.sign() > 0
        s = mpmath.sqrt(d) if real else mpmath.sqrt(mpmath.mpc(d))
        for sign in (1, -1):
            # stable pairing: compute the non-cancelling root directly
            z = (-B0 + sign * s) / (2 * A)
            if real and B0 != 0 and mpmath.sign(-B0) != sign:
                z = 2 * C0 / (-B0 - sign * s)
            res = abs(A * z * z + B0 * z + C0) / (abs(A * z * z) + abs(B0 * z) + abs(C0))
            out.append(ZBranch(sign, z, digits, res))
    return tuple(out)


# -- symbolic rational forms ------------------------------------------------


def reduce_z(p, q):
    """Reduce Z-degree to <= 1 using A Z^2 = -(B Z + C)."""
    if p.z_degree() <= 1:
        return p
    z = p.zslot
    parts = p.split_z()
    inv_a = q.A.inverse()
    nb, nc = q.B.scale(-inv_a), q.C.scale(-inv_a)
    for k in range(len(parts) - 1, 1, -1):
        top = parts[k]
        if not top:
            continue
        parts[k - 1] = parts[k - 1] + top * nb
        parts[k - 2] = parts[k - 2] + top * nc
    return parts[0] + parts[1].mul_var(z)


class RationalForm:
    """N / W**k with W = 2 A Z + B; N is Z-linear."""

    __slots__ = ("num", "k", "constraint")

    def __init__(self, num, k, constraint):
        self.num = reduce_z(num, constraint)
        self.k = k
        self.constraint = constraint

    def is_zero(self):
        return not self.num

    def with_denominator(self, k):
        """Same value written over W**k (k >= self.k)."""
        if k < self.k:
            raise ValueError("cannot lower the W-exponent without cancellation")
        q = self.constraint
        num = self.num
        w = q.W()
        for _ in range(k - self.k):
            num = reduce_z(num * w, q)
        return RationalForm(num, k, q)

    def __add__(self, other):
        k = max(self.k, other.k)
        a, b = self.with_denominator(k), other.with_denominator(k)
        return RationalForm(a.num + b.num, k, self.constraint)

    def __neg__(self):
        return RationalForm(-self.num, self.k, self.constraint)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, RationalForm):
            return RationalForm(reduce_z(self.num * other.num, self.constraint), self.k + other.k, self.constraint)
        return RationalForm(self.num * other, self.k, self.constraint)

    __rmul__ = __mul__

    def evaluate(self, point, ring=None):
        """Value at a point as a QuotientElement."""
        ring = ring or self.constraint.at(point)
        val = ring.reduce(self.num.z_coefficients_at(point))
        if self.k:
            val = val * _pow(ring.W().inverse(), self.k)
        return val

    def __repr__(self):
        return f"RationalForm(k={self.k}, terms={len(self.num)})"


def _pow(x, k):
    out = x.ring.one()
    for _ in range(k):
        out = out * x
    return out


def implicit_dZ(q, i):
    """dZ/dt_i = -(dB/dt_i * Z + dC/dt_i) / W."""
    z = q.B.zslot
    num = -(q.B.diff(i).mul_var(z) + q.C.diff(i))
    return RationalForm(num, 1, q)


def total_derivative(f, i):
    """D_i (N / W^k) with Z = Z(t) implicit."""
    q = f.constraint
    z = q.B.zslot
    n = f.num
    w = q.W()
    dB, dC = q.B.diff(i), q.C.diff(i)
    if not dB and not dC:
        # Z does not depend on t_i
        return RationalForm(n.diff(i), f.k, q)
    zi_num = dB.mul_var(z) + dC
    dzn = n.diff(z)
    if not f.k:
        # N is polynomial: one power of W suffices
        out = reduce_z(w * n.diff(i), q)
        if dzn:
            out = out - reduce_z(dzn * zi_num, q)
        return RationalForm(out, 1, q)
    dw_num = dB * q.B - dC.scale(q.A.scale(2))
    out = reduce_z(w * w, q) * n.diff(i)
    if dzn:
        out = out - reduce_z(w * dzn * zi_num, q)
    out = out - (n * dw_num).scale(f.k)
    return RationalForm(out, f.k + 2, q)
