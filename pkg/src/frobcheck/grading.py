"""Square-class grading of a potential's coefficients.

If every coefficient of F (and of the Z-quadratic) satisfies

    class(coeff of t**e Z**ez) = c + sum_i e_i * k_i + ez * k_Z      (mod squares)

for squarefree k_i, then at a point t_i = q_i * sqrt(k_i) with rational q_i
every evaluated quantity is a single surd.  Finding the k_i is linear algebra
over GF(2) with one coordinate per prime.
"""

from .factor import factorize
from .surd import SurdSum


def _class_vector(c, primes):
    """Bitmask of primes in the squarefree radicand of a single-surd coefficient, or None."""
    rads = c.radicands()
    if len(rads) != 1:
        return None
    vec = 0
    for p in factorize(rads[0]) if rads[0] > 1 else ():
        vec |= 1 << primes.setdefault(p, len(primes))
    return vec


def find_grading(bundle):
    """Return per-slot squarefree classes (t1..tn, Z) or None if the coefficients are not graded.

    Unknowns: one class per slot plus an offset for F and one for the quadratic.
    """
    n = bundle.dim
    nslots = n + 1
    primes = {}
    rows = []  # (coefficient-mask over unknowns, class vector)
    # unknown layout: 0 = F offset, 1 = quadratic offset, 2.. = slots
    for e, c in bundle.F.terms.items():
        v = _class_vector(c, primes)
        if v is None:
            return None
        mask = 1
        for i, k in enumerate(e):
            if k % 2:
                mask ^= 1 << (2 + i)
        rows.append((mask, v))
    q = bundle.constraint
    if q is not None:
        zbit = 1 << (2 + n)
        v = _class_vector(q.A, primes)
        if v is None:
            return None
        rows.append((0b10, v))  # A Z^2: even in Z
        for poly, zodd in ((q.B, True), (q.C, False)):
            for e, c in poly.terms.items():
                v = _class_vector(c, primes)
                if v is None:
                    return None
                mask = 0b10 ^ (zbit if zodd else 0)
                for i, k in enumerate(e[:n]):
                    if k % 2:
                        mask ^= 1 << (2 + i)
                rows.append((mask, v))
    # Gauss-Jordan over GF(2) with bitmask RHS
    pivots = {}
    for mask, v in rows:
        for b, (pm, pv) in pivots.items():
            if mask >> b & 1:
                mask ^= pm
                v ^= pv
        if not mask:
            if v:
                return None
            continue
        b = (mask & -mask).bit_length() - 1
        for b2 in list(pivots):
            pm, pv = pivots[b2]
            if pm >> b & 1:
                pivots[b2] = (pm ^ mask, pv ^ v)
        pivots[b] = (mask, v)
    # free unknowns set to zero; each pivot row then fixes its unknown
    sol = [0] * (2 + nslots)
    for b, (pm, pv) in pivots.items():
        sol[b] = pv
    inv = {i: p for p, i in primes.items()}
    classes = []
    for vec in sol[2:]:
        r = 1
        i = 0
        while vec:
            if vec & 1:
                r *= inv[i]
            vec >>= 1
            i += 1
        classes.append(r)
    return classes


def lift_point(qs, classes):
    """Graded sample point t_i = q_i * sqrt(k_i)."""
    return [SurdSum({k: q}) if q else SurdSum() for q, k in zip(qs, classes)]
