"""Sparse multivariate polynomials in t1..tn and Z over the SurdSum field."""

from dataclasses import dataclass
from fractions import Fraction

from .surd import SurdSum, format_surd

ONE = SurdSum.rational(1)


def var_names(ntimes):
    return [f"t{i + 1}" for i in range(ntimes)] + ["Z"]


def grlex_key(exps):
    return (sum(exps), exps)


class Poly:
    """Polynomial with ``nslots`` variables; the last slot is Z.

    ``terms`` maps exponent tuples to nonzero SurdSums.  Instances are treated
    as immutable once built.
    """

    __slots__ = ("nslots", "terms")

    def __init__(self, nslots, terms=None):
        self.nslots = nslots
        self.terms = {} if terms is None else terms

    @classmethod
    def constant(cls, nslots, c):
        c = SurdSum.coerce(c)
        return cls(nslots, {(0,) * nslots: c} if c else {})

    @classmethod
    def var(cls, nslots, i):
        e = [0] * nslots
        e[i] = 1
        return cls(nslots, {tuple(e): ONE})

    @classmethod
    def monomial(cls, exps, c=ONE):
        c = SurdSum.coerce(c)
        return cls(len(exps), {tuple(exps): c} if c else {})

    @property
    def zslot(self):
        return self.nslots - 1

    def __len__(self):
        return len(self.terms)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.nslots == other.nslots and self.terms == other.terms

    def sorted_terms(self):
        """Terms in descending graded-lex order."""
        return sorted(self.terms.items(), key=lambda kv: grlex_key(kv[0]), reverse=True)

    # -- ring operations ---------------------------------------------------

    def _lift(self, other):
        if isinstance(other, Poly):
            if other.nslots != self.nslots:
                raise ValueError("polynomials live in different variable sets")
            return other
        return Poly.constant(self.nslots, other)

    def __add__(self, other):
        other = self._lift(other)
        acc = dict(self.terms)
        for e, c in other.terms.items():
            v = acc.get(e)
            if v is None:
                acc[e] = c
            else:
                v = v + c
                if v:
                    acc[e] = v
                else:
                    del acc[e]
        return Poly(self.nslots, acc)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.nslots, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = SurdSum.coerce(c)
        if not c:
            return Poly(self.nslots)
        out = {}
        for e, v in self.terms.items():
            w = v * c
            if w:
                out[e] = w
        return Poly(self.nslots, out)

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return self.scale(other)
        other = self._lift(other)
        if len(self.terms) < len(other.terms):
            a, b = self.terms, other.terms
        else:
            a, b = other.terms, self.terms
        acc = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                v = c1 * c2
                w = acc.get(e)
                acc[e] = v if w is None else w + v
        return Poly(self.nslots, {e: c for e, c in acc.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n):
        out = Poly.constant(self.nslots, 1)
        for _ in range(n):
            out = out * self
        return out

    # -- calculus ----------------------------------------------------------

    def diff(self, i):
        """Partial derivative with respect to slot ``i``."""
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                e2 = e[:i] + (k - 1,) + e[i + 1 :]
                v = c.scale(k)
                w = out.get(e2)
                if w is None:
                    out[e2] = v
                else:
                    w = w + v
                    if w:
                        out[e2] = w
                    else:
                        del out[e2]
        return Poly(self.nslots, out)

    def mul_var(self, i, k=1):
        """Multiply by the k-th power of slot ``i``."""
        out = {}
        for e, c in self.terms.items():
            out[e[:i] + (e[i] + k,) + e[i + 1 :]] = c
        return Poly(self.nslots, out)

    def degree_in(self, i):
        return max((e[i] for e in self.terms), default=0)

    def z_degree(self):
        return self.degree_in(self.zslot)

    def uses(self, i):
        return any(e[i] for e in self.terms)

    def split_z(self):
        """Coefficients of Z**k as Z-free polynomials, index k."""
        z = self.zslot
        parts = [dict() for _ in range(self.z_degree() + 1)]
        for e, c in self.terms.items():
            parts[e[z]][e[:z] + (0,)] = c
        return [Poly(self.nslots, p) for p in parts]

    def evaluate_t(self, point):
        """Substitute the t-slots, leaving Z symbolic."""
        coeffs = self.z_coefficients_at(point)
        z = self.zslot
        out = {}
        for k, c in enumerate(coeffs):
            if c:
                out[(0,) * z + (k,)] = c
        return Poly(self.nslots, out)

    def z_coefficients_at(self, point):
        """Coefficients [c0, c1, ...] of the polynomial in Z obtained by substituting ``point``."""
        z = self.zslot
        if len(point) != z:
            raise ValueError(f"point has {len(point)} entries, expected {z}")
        pows = [_PowerCache(v) for v in point]
        out = {}
        for e, c in self.terms.items():
            v = c
            for i in range(z):
                if e[i]:
                    v = v * pows[i][e[i]]
                    if not v:
                        break
            if v:
                w = out.get(e[z])
                out[e[z]] = v if w is None else w + v
        deg = max(out, default=-1)
        return [out.get(k, SurdSum()) for k in range(deg + 1)]

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Poly({format_poly(self)!r})"


class _PowerCache:
    __slots__ = ("base", "pows")

    def __init__(self, base):
        self.base = base
        self.pows = [SurdSum.rational(1)] if isinstance(base, SurdSum) else [Fraction(1)]

    def __getitem__(self, k):
        while len(self.pows) <= k:
            self.pows.append(self.pows[-1] * self.base)
        return self.pows[k]


def format_monomial(exps, names=None):
    names = names or var_names(len(exps) - 1)
    parts = []
    for n, k in zip(names, exps):
        if k == 1:
            parts.append(n)
        elif k > 1:
            parts.append(f"{n}^{k}")
    return " * ".join(parts) if parts else "1"


def format_poly(p):
    if not p.terms:
        return "0"
    return " + ".join(f"({format_surd(c)})*{format_monomial(e)}" for e, c in p.sorted_terms())


@dataclass(frozen=True)
class WeightSystem:
    """Quasihomogeneity data: one weight per slot (Z last), the charge and the target degree of F."""

    weights: tuple
    charge: Fraction
    target: Fraction

    @property
    def ntimes(self):
        return len(self.weights) - 1

    def weighted_degree(self, exps):
        return sum((w * k for w, k in zip(self.weights, exps) if k), Fraction(0))


def weighted_degree(exps, ws):
    return ws.weighted_degree(exps)


def is_quasihomogeneous(p, ws, target):
    """Monomials of ``p`` whose weighted degree differs from ``target`` (empty iff homogeneous)."""
    return [e for e, _ in p.sorted_terms() if ws.weighted_degree(e) != target]


def euler_operator(p, ws):
    """sum_i w_i * x_i * d/dx_i applied to p, all slots including Z."""
    out = {}
    for e, c in p.terms.items():
        d = ws.weighted_degree(e)
        if d:
            out[e] = c.scale(d)
    return Poly(p.nslots, out)
