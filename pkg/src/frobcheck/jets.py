"""Truncated multivariate Taylor expansions ("jets") at a point.

A jet of order 3 in n variables is a dict keyed by sorted index tuples of
length <= 3; ``(0, 0, 6)`` is the coefficient of eps_1**2 * eps_7.  The
coefficient ring is whatever the caller feeds in (SurdSum, QuotientElement,
mpmath numbers), so the same code serves exact and numeric evaluation.
"""

from itertools import combinations_with_replacement
from math import comb, factorial


class JetSpace:
    def __init__(self, nvars, order=3):
        self.nvars = nvars
        self.order = order
        self.keys = [k for d in range(order + 1) for k in combinations_with_replacement(range(nvars), d)]
        self._prod = {}
        for k1 in self.keys:
            for k2 in self.keys:
                if len(k1) + len(k2) <= order and k1 <= k2:
                    self._prod[k1, k2] = tuple(sorted(k1 + k2))

    def product_key(self, k1, k2):
        return self._prod[(k1, k2) if k1 <= k2 else (k2, k1)]

    def mul(self, a, b):
        out = {}
        order = self.order
        for k1, c1 in a.items():
            n1 = len(k1)
            for k2, c2 in b.items():
                if n1 + len(k2) > order:
                    continue
                k = self.product_key(k1, k2)
                v = c1 * c2
                w = out.get(k)
                out[k] = v if w is None else w + v
        return out

    @staticmethod
    def add(a, b):
        out = dict(a)
        for k, c in b.items():
            w = out.get(k)
            out[k] = c if w is None else w + c
        return out

    @staticmethod
    def sub(a, b):
        out = dict(a)
        for k, c in b.items():
            w = out.get(k)
            out[k] = -c if w is None else w - c
        return out

    @staticmethod
    def scale(a, s):
        return {k: c * s for k, c in a.items()}

    def monomial_factors(self, exps):
        """Taylor coefficients of prod_i (x_i + eps_i)**e_i as (key, [(i, binom, power)])."""
        supp = [i for i in range(self.nvars) if exps[i]]
        out = []
        for d in range(self.order + 1):
            for key in combinations_with_replacement(supp, d):
                mult = {}
                for i in key:
                    mult[i] = mult.get(i, 0) + 1
                if any(a > exps[i] for i, a in mult.items()):
                    continue
                out.append((key, [(i, comb(exps[i], mult.get(i, 0)), exps[i] - mult.get(i, 0)) for i in supp]))
        return out

    def poly_jet(self, terms, point, one):
        """Jet of sum_m c_m * t**m at ``point``; ``terms`` is an iterable of (exps, c)."""
        pows = [_Powers(x, one) for x in point]
        out = {}
        for exps, c in terms:
            for key, factors in self.monomial_factors(exps):
                f = None
                for i, b, p in factors:
                    v = pows[i][p]
                    if b != 1:
                        v = v * b
                    f = v if f is None else f * v
                    if not f:
                        break
                if f is None:
                    f = one
                if not f:
                    continue
                v = c * f
                w = out.get(key)
                out[key] = v if w is None else w + v
        return out

    @staticmethod
    def key_factorial(key):
        """prod_i a_i! for the multi-index of ``key``."""
        out = 1
        i = 0
        while i < len(key):
            j = i
            while j < len(key) and key[j] == key[i]:
                j += 1
            out *= factorial(j - i)
            i = j
        return out

    def derivative(self, jet, key, zero):
        """Partial derivative d^key f at the expansion point."""
        c = jet.get(tuple(sorted(key)))
        if c is None:
            return zero
        return c * self.key_factorial(tuple(sorted(key)))


class _Powers:
    __slots__ = ("base", "pows")

    def __init__(self, base, one):
        self.base = base
        self.pows = [one]

    def __getitem__(self, k):
        while len(self.pows) <= k:
            self.pows.append(self.pows[-1] * self.base)
        return self.pows[k]


def solve_quadratic_jet(space, A, bjet, cjet, z0, w0_inv):
    """Jet of the root Z of A Z^2 + B Z + C = 0 through z0.

    Simplified Newton with frozen derivative W0 = 2 A z0 + B(x); each sweep
    gains one order, so ``order`` sweeps suffice.
    """
    zjet = {(): z0}
    for _ in range(space.order):
        res = space.add(space.add(space.scale(space.mul(zjet, zjet), A), space.mul(bjet, zjet)), cjet)
        zjet = space.sub(zjet, space.scale(res, w0_inv))
    return zjet
