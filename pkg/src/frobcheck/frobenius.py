"""Frobenius-manifold axioms as exact checks at sample points.

Indices are 0-based throughout the library; reports print them 1-based.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from concurrent.futures import ProcessPoolExecutor
import hashlib
import random
import time

import mpmath

from .algebraic import (
    QuotientElement,
    RationalForm,
    total_derivative,
    z_roots_numeric,
)
from .errors import DegeneratePoint, MetricDegenerate, NotInvertible
from .grading import find_grading, lift_point
from .jets import JetSpace, solve_quadratic_jet
from .poly import Poly, euler_operator, format_monomial, is_quasihomogeneous
from .report import VerificationReport
from .surd import SurdSum, format_surd, to_mp

NUMERATORS = [k for k in range(-9, 10) if k]
DENOMINATORS = [1, 2, 3]
MAX_RESAMPLE = 1000


@lru_cache(maxsize=None)
def jet_space(n):
    return JetSpace(n, order=3)


def _tkey(*idx):
    return tuple(sorted(idx))


def _z_part(x):
    return x.b if isinstance(x, QuotientElement) else SurdSum()


def _scalar_part(x):
    return x.a if isinstance(x, QuotientElement) else x


# -- third derivatives ---------------------------------------------------------


class ThirdDerivativeTable:
    """c_{ijk} at one point, stored once per unordered triple."""

    def __init__(self, n, values, ring=None):
        self.n = n
        self._values = values
        self.ring = ring

    def __call__(self, i, j, k):
        return self._values[_tkey(i, j, k)]

    get = __call__

    def items(self):
        return sorted(self._values.items())

    def __len__(self):
        return len(self._values)


def _t_terms(poly, n):
    return [(e[:n], c) for e, c in poly.terms.items()]


def third_derivatives(bundle, point):
    """All c_{ijk} at an exact point via order-3 Taylor expansion.

    With a constraint the values are QuotientElements of K[Z]/(A Z^2 + B0 Z + C0);
    otherwise SurdSums.  Raises DegeneratePoint if the discriminant vanishes.
    """
    n = bundle.dim
    space = jet_space(n)
    one = SurdSum.rational(1)
    parts = bundle.F.split_z()
    q = bundle.constraint
    if q is None:
        fjet = space.poly_jet(_t_terms(parts[0], n), point, one)
        zero, ring = SurdSum(), None
    else:
        ring = q.at(point)
        if not ring.discriminant():
            raise DegeneratePoint("discriminant vanishes at sample point")
        w0_inv = ring.W().inverse()
        bjet = space.poly_jet(_t_terms(q.B, n), point, one)
        cjet = space.poly_jet(_t_terms(q.C, n), point, one)
        zjet = solve_quadratic_jet(space, q.A, bjet, cjet, ring.z(), w0_inv)
        fjet = {}
        for part in reversed(parts):
            fjet = space.add(space.mul(fjet, zjet), space.poly_jet(_t_terms(part, n), point, one))
        fjet = {k: (v if isinstance(v, QuotientElement) else ring(v)) for k, v in fjet.items()}
        zero = ring(0)
    values = {k: space.derivative(fjet, k, zero) for k in space.keys if len(k) == 3}
    return ThirdDerivativeTable(n, values, ring)


def third_derivative_symbolic(bundle, i, j, k):
    """c_{ijk} as a RationalForm (or Poly without constraint), differentiating in order i, j, k."""
    q = bundle.constraint
    if q is None:
        return bundle.F.diff(i).diff(j).diff(k)
    f = RationalForm(bundle.F, 0, q)
    for v in (i, j, k):
        f = total_derivative(f, v)
    return f


# -- metric -------------------------------------------------------------------


@dataclass
class MetricMatrix:
    eta: list  # n x n SurdSums
    inverse: list

    def nonzero(self):
        n = len(self.eta)
        return [(i, j) for i in range(n) for j in range(n) if self.eta[i][j]]

    def digest(self):
        text = ";".join(",".join(format_surd(x) for x in row) for row in self.eta)
        return hashlib.sha256(text.encode()).hexdigest()[:16]


def metric_inverse(eta):
    """Gauss-Jordan inverse over the SurdSum field."""
    n = len(eta)
    a = [list(row) + [SurdSum.rational(int(i == j)) for j in range(n)] for i, row in enumerate(eta)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            raise MetricDegenerate(f"metric is singular (no pivot in column {col + 1})")
        a[col], a[piv] = a[piv], a[col]
        inv = a[col][col].inverse()
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def metric(bundle, point=None, table=None):
    """eta_{ij} = c_{ij u} at a point; must be Z-free."""
    if table is None:
        table = third_derivatives(bundle, point)
    u = bundle.unity_index
    n = bundle.dim
    eta = []
    for i in range(n):
        row = []
        for j in range(n):
            v = table(i, j, u)
            if _z_part(v):
                raise MetricDegenerate(f"eta[{i + 1},{j + 1}] depends on Z")
            row.append(_scalar_part(v))
        eta.append(row)
    return MetricMatrix(eta, metric_inverse(eta))


def metric_from_matrix(eta):
    return MetricMatrix(eta, metric_inverse(eta))


# -- checks ---------------------------------------------------------------------


def unity_check(bundle, point=None, table=None, met=None):
    """C^k_{u j} = delta^k_j exactly; returns (ok, witnesses) with 0-based (k, j)."""
    if table is None:
        table = third_derivatives(bundle, point)
    if met is None:
        met = metric(bundle, table=table)
    u, n = bundle.unity_index, bundle.dim
    bad = []
    for k in range(n):
        for j in range(n):
            s = sum((met.inverse[k][p] * table(p, u, j) for p in range(n) if met.inverse[k][p]), SurdSum())
            if _z_part(s) or _scalar_part(s) != int(k == j):
                bad.append((k, j))
    return not bad, bad


class WDVVContraction:
    """M[(i,j),(q,n)] = sum_{k,p} c_{ijk} eta^{kp} c_{pqn}, for all unordered pairs."""

    def __init__(self, table, inverse, zero):
        n = table.n
        self.n = n
        pairs = [(i, j) for i in range(n) for j in range(i, n)]
        lowered = {}
        for x in pairs:
            row = []
            for p in range(n):
                s = zero
                for k in range(n):
                    e = inverse[k][p]
                    if e:
                        c = table(x[0], x[1], k)
                        if c:
                            s = s + c * e
                row.append(s)
            lowered[x] = row
        self._m = {}
        for a, x in enumerate(pairs):
            for y in pairs[a:]:
                s = zero
                for p in range(n):
                    d = lowered[x][p]
                    if d:
                        c = table(p, y[0], y[1])
                        if c:
                            s = s + d * c
                self._m[x, y] = s

    def m(self, i, j, q, n):
        x, y = _tkey(i, j), _tkey(q, n)
        return self._m[(x, y)] if (x, y) in self._m else self._m[(y, x)]

    def residual(self, i, j, q, n):
        return self.m(i, j, q, n) - self.m(n, j, q, i)


def _generators(t):
    i, j, q, n = t
    return [((n, j, q, i), -1), ((i, q, j, n), -1), ((j, i, n, q), 1), ((q, n, i, j), 1)]


@lru_cache(maxsize=None)
def wdvv_orbits(n):
    """Canonical tuples under the residual's symmetry group.

    Returns (representatives, images) where ``images`` maps every tuple to
    (representative, sign); tuples forced to vanish map to (None, 0).
    """
    images = {}
    reps = []
    for t in product(range(n), repeat=4):
        if t in images:
            continue
        orbit = {t: 1}
        stack = [t]
        zero = False
        while stack:
            s = stack.pop()
            for g, sg in _generators(s):
                sign = orbit[s] * sg
                if g in orbit:
                    if orbit[g] != sign:
                        zero = True
                    continue
                orbit[g] = sign
                stack.append(g)
        rep = min(orbit)
        for s, sign in orbit.items():
            images[s] = (None, 0) if zero else (rep, sign * orbit[rep])
        if not zero:
            reps.append(rep)
    return sorted(reps), images


def wdvv_residual(bundle, point, i, j, q, n, table=None, met=None):
    if table is None:
        table = third_derivatives(bundle, point)
    if met is None:
        met = metric(bundle, table=table)
    zero = table.ring(0) if table.ring is not None else SurdSum()
    lhs = sum_terms(table(i, j, k) * met.inverse[k][p] * table(p, q, n) for k in range(bundle.dim) for p in range(bundle.dim) if met.inverse[k][p])
    rhs = sum_terms(table(n, j, k) * met.inverse[k][p] * table(p, q, i) for k in range(bundle.dim) for p in range(bundle.dim) if met.inverse[k][p])
    return zero + lhs - rhs


def sum_terms(it):
    it = iter(it)
    total = next(it, SurdSum())
    for x in it:
        total = total + x
    return total


# -- Euler identity -------------------------------------------------------------


@dataclass
class EulerReport:
    offenders: dict  # section -> list of exponent tuples
    operator_zero: bool

    @property
    def ok(self):
        return self.operator_zero and not any(self.offenders.values())


def euler_residual(bundle):
    """Term-wise weighted degrees plus the full identity E F - target F == 0 with implicit Z."""
    ws = bundle.weights
    offenders = {"F": is_quasihomogeneous(bundle.F, ws, ws.target)}
    q = bundle.constraint
    if q is None:
        resid = euler_operator(bundle.F, ws) - bundle.F.scale(ws.target)
        return EulerReport(offenders, not resid)
    dz = ws.weights[-1]
    offenders["B"] = is_quasihomogeneous(q.B, ws, dz)
    offenders["C"] = is_quasihomogeneous(q.C, ws, 2 * dz)
    f = RationalForm(bundle.F, 0, q)
    total = RationalForm(bundle.F.scale(-ws.target), 0, q)
    for i in range(bundle.dim):
        if ws.weights[i]:
            d = total_derivative(f, i)
            total = total + RationalForm(d.num.mul_var(i).scale(ws.weights[i]), d.k, q)
    return EulerReport(offenders, total.is_zero())


def z_euler_residual(bundle):
    """sum_i d_i t_i Z_i - d_Z Z as a RationalForm (zero for a graded constraint)."""
    from .algebraic import implicit_dZ

    q = bundle.constraint
    ws = bundle.weights
    z = bundle.dim
    total = RationalForm(Poly.var(q.nslots, z).scale(-ws.weights[-1]), 0, q)
    for i in range(bundle.dim):
        d = implicit_dZ(q, i)
        total = total + RationalForm(d.num.mul_var(i).scale(ws.weights[i]), d.k, q)
    return total


# -- sampling -------------------------------------------------------------------


class PointSampler:
    """Seeded rational draws, optionally lifted to the graded point t_i = q_i sqrt(k_i)."""

    def __init__(self, bundle, seed, sampling="graded"):
        self.bundle = bundle
        self.rng = random.Random(seed)
        self.classes = None
        if sampling == "graded":
            cl = find_grading(bundle)
            if cl is not None and any(k != 1 for k in cl[: bundle.dim]):
                self.classes = cl[: bundle.dim]
        elif sampling != "rational":
            raise ValueError(f"unknown sampling {sampling!r}")

    def draw(self):
        qs = [Fraction(self.rng.choice(NUMERATORS), self.rng.choice(DENOMINATORS)) for _ in range(self.bundle.dim)]
        if self.classes is None:
            return qs, [SurdSum.rational(x) for x in qs]
        return qs, lift_point(qs, self.classes)


# -- numeric branch evaluation ---------------------------------------------------


def numeric_third_derivatives(bundle, point, branch_value, digits):
    """c_{ijk} along one numeric Z-branch, recomputed from scratch in mpmath."""
    n = bundle.dim
    space = jet_space(n)
    with mpmath.workdps(digits + 20):
        one = mpmath.mpf(1)
        pt = [to_mp(x) for x in point]

        def jet(p):
            return space.poly_jet([(e[:n], to_mp(c)) for e, c in p.terms.items()], pt, one)

        parts = bundle.F.split_z()
        q = bundle.constraint
        if q is None:
            fjet = jet(parts[0])
        else:
            A = to_mp(q.A)
            bjet, cjet = jet(q.B), jet(q.C)
            z0 = branch_value
            w0 = 2 * A * z0 + bjet.get((), mpmath.mpf(0))
            zjet = solve_quadratic_jet(space, A, bjet, cjet, z0, 1 / w0)
            fjet = {}
            for part in reversed(parts):
                fjet = space.add(space.mul(fjet, zjet), jet(part))
        return {k: space.derivative(fjet, k, mpmath.mpf(0)) for k in space.keys if len(k) == 3}


def numeric_checks(bundle, point, branch_value, digits, ref_eta=None, full_sweep=False):
    """Relative residuals for WDVV, unity and metric constancy along one branch.

    Returns (residuals, eta) where eta is the numeric metric at this point;
    ``ref_eta`` is the metric of the first sample point (None to skip).
    Raises ZeroDivisionError if the numeric metric is singular.
    """
    n, u = bundle.dim, bundle.unity_index
    c = numeric_third_derivatives(bundle, point, branch_value, digits)
    with mpmath.workdps(digits + 20):

        def C(i, j, k):
            return c[_tkey(i, j, k)]

        eta = mpmath.matrix(n, n)
        for i in range(n):
            for j in range(n):
                eta[i, j] = C(i, j, u)
        scale_eta = max(max(abs(eta[i, j]) for i in range(n) for j in range(n)), mpmath.mpf(1))
        inv = eta**-1
        const_res = mpmath.mpf(0)
        if ref_eta is not None:
            for i in range(n):
                for j in range(n):
                    const_res = max(const_res, abs(eta[i, j] - ref_eta[i, j]) / scale_eta)
        unity_res = mpmath.mpf(0)
        for k in range(n):
            for j in range(n):
                terms = [inv[k, p] * C(p, u, j) for p in range(n)]
                s = sum(terms) - (1 if k == j else 0)
                unity_res = max(unity_res, abs(s) / max(sum(abs(t) for t in terms), 1))
        low = {}
        for i in range(n):
            for j in range(i, n):
                low[i, j] = [sum(C(i, j, k) * inv[k, p] for k in range(n)) for p in range(n)]
        wdvv_res = mpmath.mpf(0)
        tuples = product(range(n), repeat=4) if full_sweep else wdvv_orbits(n)[0]
        for i, j, q, nn in tuples:
            a = [low[_tkey(i, j)][p] * C(p, q, nn) for p in range(n)]
            b = [low[_tkey(nn, j)][p] * C(p, q, i) for p in range(n)]
            mag = sum(abs(t) for t in a) + sum(abs(t) for t in b)
            if mag:
                wdvv_res = max(wdvv_res, abs(sum(a) - sum(b)) / mag)
        return {"wdvv": wdvv_res, "unity": unity_res, "metric_constancy": const_res}, eta


def numeric_threshold(digits):
    """Pass threshold for relative residuals: 1e-150 at 256 digits, scaled proportionally."""
    return mpmath.mpf(10) ** (-((150 * digits) // 256))


def exact_to_branch(table, branch_value, digits):
    """Push exact quotient values through a numeric root."""
    with mpmath.workdps(digits + 20):
        out = {}
        for k, v in table.items():
            out[k] = v.at_branch(branch_value) if isinstance(v, QuotientElement) else to_mp(v)
        return out


def branch_values(bundle, point, digits):
    if bundle.constraint is None:
        return [(0, None)]
    return [(b.sign, b.value) for b in z_roots_numeric(bundle.constraint, point, digits)]


# -- driver ------------------------------------------------------------------------

SYMMETRY_SAMPLE = 64


def _fmt_value(x):
    if isinstance(x, QuotientElement):
        return f"{format_surd(x.a)} + ({format_surd(x.b)})*Z"
    return format_surd(x)


def _nstr(x):
    return mpmath.nstr(x, 5, min_fixed=0, max_fixed=0)


def _wdvv_exact(table, met, full_sweep, rng):
    n = table.n
    zero = table.ring(0) if table.ring is not None else SurdSum()
    contraction = WDVVContraction(table, met.inverse, zero)
    reps, images = wdvv_orbits(n)
    tuples = list(product(range(n), repeat=4)) if full_sweep else reps
    failures = []
    for t in tuples:
        r = contraction.residual(*t)
        if r:
            failures.append({"tuple": [x + 1 for x in t], "residual": _fmt_value(r)})
    # the symmetries used to cut the tuple set, re-checked on a sample of the rest
    others = [t for t in product(range(n), repeat=4) if images[t][0] != t]
    symmetry_ok = True
    for t in rng.sample(others, min(SYMMETRY_SAMPLE, len(others))):
        rep, sign = images[t]
        r = contraction.residual(*t)
        expected = zero if rep is None else (contraction.residual(*rep) if sign > 0 else -contraction.residual(*rep))
        if r != expected:
            symmetry_ok = False
    return {
        "checked": len(tuples),
        "passed": len(tuples) - len(failures),
        "failures": failures,
        "symmetry": symmetry_ok,
    }


def _branch_records(bundle, pt, digits, ref_eta, full_sweep):
    thr = numeric_threshold(digits)
    out = []
    eta0 = None
    for sign, z in branch_values(bundle, pt, digits):
        res, eta = numeric_checks(bundle, pt, z, digits, ref_eta, full_sweep)
        if ref_eta is None and eta0 is None:
            eta0 = eta
        rec = {k: _nstr(v) for k, v in res.items()}
        rec["sign"] = sign
        rec["z"] = _nstr(z) if z is not None else None
        rec["pass"] = all(v < thr for v in res.values())
        out.append((rec, eta))
    return out


def evaluate_point(bundle, qs, pt, mode, digits, ref, full_sweep):
    """Check one candidate point; returns (record, metric) or None if the point is degenerate."""
    rec = {"q": [str(x) for x in qs], "point": [format_surd(x) for x in pt]}
    if bundle.constraint is not None:
        disc = bundle.constraint.at(pt).discriminant()
        if not disc:
            return None
        rec["discriminant"] = {"sign": disc.sign(), "branches": "real" if disc.sign() > 0 else "complex"}
    if mode == "numeric":
        try:
            branches = _branch_records(bundle, pt, digits, ref, full_sweep)
        except ZeroDivisionError:
            return None
        rec["branches"] = [b for b, _ in branches]
        rec["pass"] = all(b["pass"] for b in rec["branches"])
        return rec, (ref if ref is not None else branches[0][1])
    try:
        table = third_derivatives(bundle, pt)
        met = metric(bundle, table=table)
    except (DegeneratePoint, NotInvertible):
        return None
    except MetricDegenerate as exc:
        if "singular" in str(exc) and bundle.constraint is None:
            return None
        rec["error"] = str(exc)
        rec["pass"] = False
        return rec, ref
    constant = ref is None or met.eta == ref
    rec["metric"] = {"hash": met.digest(), "constant": constant, "support": [[i + 1, j + 1] for i, j in met.nonzero()]}
    ok, witnesses = unity_check(bundle, table=table, met=met)
    rec["unity"] = {"pass": ok, "witnesses": [[k + 1, j + 1] for k, j in witnesses]}
    rec["wdvv"] = _wdvv_exact(table, met, full_sweep, random.Random(str(rec["q"])))
    rec["pass"] = constant and ok and not rec["wdvv"]["failures"] and rec["wdvv"]["symmetry"]
    if not rec["pass"] and bundle.constraint is not None:
        # which root (if any) still satisfies the axioms
        rec["branches"] = [b for b, _ in _branch_records(bundle, pt, max(digits, 64), None, full_sweep)]
    return rec, (ref if ref is not None else met.eta)


_WORKER = {}


def _worker_init(bundle, mode, digits, full_sweep):
    _WORKER.update(bundle=bundle, mode=mode, digits=digits, full_sweep=full_sweep)


def _worker_eval(args):
    qs, pt, ref = args
    w = _WORKER
    return evaluate_point(w["bundle"], qs, pt, w["mode"], w["digits"], ref, w["full_sweep"])


def euler_record(bundle):
    e = euler_residual(bundle)
    return {
        "pass": e.ok,
        "operator_zero": e.operator_zero,
        "offenders": {sec: [format_monomial(m) for m in bad] for sec, bad in sorted(e.offenders.items())},
    }


def verify(bundle, n_points=5, seed=1, mode="exact", digits=256, full_sweep=False, jobs=1, sampling="graded"):
    """Run the Euler identity once, then metric, unity and WDVV checks at ``n_points`` sampled points.

    Candidates are drawn from one seeded stream and the first ``n_points``
    admissible ones are kept in stream order, so the report does not depend
    on ``jobs``.
    """
    if n_points < 1:
        raise ValueError("n_points must be at least 1")
    if mode not in ("exact", "numeric"):
        raise ValueError(f"unknown mode {mode!r}")
    timings = {}
    t0 = time.perf_counter()
    euler = euler_record(bundle)
    timings["euler"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    sampler = PointSampler(bundle, seed, sampling)
    timings["grading"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    records = []
    ref = None
    tries = 0
    # the first point fixes the reference metric
    while not records:
        if tries >= MAX_RESAMPLE:
            raise DegeneratePoint(f"no admissible point after {MAX_RESAMPLE} draws")
        qs, pt = sampler.draw()
        tries += 1
        got = evaluate_point(bundle, qs, pt, mode, digits, None, full_sweep)
        if got is not None:
            records.append(got[0])
            ref = got[1]
    pool = None
    if jobs > 1 and n_points > 1:
        pool = ProcessPoolExecutor(jobs, initializer=_worker_init, initargs=(bundle, mode, digits, full_sweep))
    try:
        while len(records) < n_points:
            need = n_points - len(records)
            if tries + need > MAX_RESAMPLE:
                raise DegeneratePoint(f"no admissible point after {MAX_RESAMPLE} draws")
            batch = [sampler.draw() for _ in range(need)]
            tries += need
            if pool is None:
                results = [evaluate_point(bundle, qs, pt, mode, digits, ref, full_sweep) for qs, pt in batch]
            else:
                results = list(pool.map(_worker_eval, [(qs, pt, ref) for qs, pt in batch]))
            records.extend(r[0] for r in results if r is not None)
    finally:
        if pool is not None:
            pool.shutdown()
    timings["points"] = time.perf_counter() - t0
    for i, r in enumerate(records):
        r["index"] = i

    return VerificationReport(
        bundle=bundle.name,
        mode=mode,
        seed=seed,
        digits=digits,
        sampling=sampling if sampler.classes is not None else "rational",
        full_sweep=full_sweep,
        euler=euler,
        points=records,
        classes=sampler.classes,
        timings=timings,
    )
