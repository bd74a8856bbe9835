"""Potential bundles: the ``.pot`` text format, validation and built-in fixtures.

File grammar (line oriented, UTF-8, ``#`` starts a comment)::

    @meta name value
    @weights r1 ... r_dim
    @weight Z r
    @unity k
    @charge r
    @target r
    @terms F|A|B|C
    rational [ * sqrt(p[/q]) ] { * var[^uint] }

with ``rational = [-]uint[/uint]`` and ``var`` one of ``t1 .. t9, Z``.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
import re

from .algebraic import QuadraticConstraint
from .errors import PotentialSyntaxError
from .poly import Poly, WeightSystem, format_monomial
from .surd import SurdSum, normalize_sqrt_rational

MAX_TIMES = 9
SECTIONS = ("F", "A", "B", "C")
FIXTURES = {"e8a1": "e8a1.pot", "cubic-trivial": "cubic_trivial.pot", "a3-poly": "a3_poly.pot"}


@dataclass
class PotentialBundle:
    name: str
    weights: WeightSystem
    unity: int  # 1-based, as written in the file
    F: Poly
    constraint: QuadraticConstraint = None
    meta: dict = field(default_factory=dict)
    term_lines: dict = field(default_factory=dict)  # (section, exps) -> source line
    warnings: list = field(default_factory=list)

    @property
    def dim(self):
        return self.weights.ntimes

    @property
    def unity_index(self):
        return self.unity - 1

    @property
    def declared_terms(self):
        v = self.meta.get("terms_F")
        return int(v) if v is not None else None


@dataclass
class Issue:
    code: str
    message: str
    line: int = None

    def as_dict(self):
        return {"code": self.code, "message": self.message, "line": self.line}


@dataclass
class ValidationReport:
    errors: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    degree_summary: dict = field(default_factory=dict)

    @property
    def ok(self):
        return not self.errors

    def as_dict(self):
        return {
            "ok": self.ok,
            "errors": [e.as_dict() for e in self.errors],
            "warnings": [w.as_dict() for w in self.warnings],
            "degrees": self.degree_summary,
        }


# -- parsing -----------------------------------------------------------------

_RAT = r"-?\d+(?:/\d+)?"
_RAT_RE = re.compile(_RAT + r"$")
_SQRT_RE = re.compile(r"sqrt\(\s*(\d+)(?:\s*/\s*(\d+))?\s*\)$")
_VAR_RE = re.compile(r"(t[1-9]|Z)(?:\^(\d+))?$")


def _rational(tok, line, col):
    if not _RAT_RE.match(tok):
        raise PotentialSyntaxError(f"bad rational {tok!r}", line, col, "[-]uint[/uint]")
    q = Fraction(tok)
    return q


def _split_factors(text):
    """Split on '*' keeping 1-based column offsets."""
    out, start = [], 0
    for m in re.finditer(r"\*", text):
        out.append((text[start : m.start()], start))
        start = m.end()
    out.append((text[start:], start))
    res = []
    for tok, off in out:
        stripped = tok.strip()
        lead = len(tok) - len(tok.lstrip())
        res.append((stripped, off + lead + 1))
    return res


def _parse_term(text, lineno, ntimes):
    factors = _split_factors(text)
    tok, col = factors[0]
    if not tok:
        raise PotentialSyntaxError("empty term", lineno, col, "rational")
    coeff = _rational(tok, lineno, col)
    surd = SurdSum.rational(1)
    exps = [0] * (ntimes + 1)
    seen_sqrt = False
    for tok, col in factors[1:]:
        m = _SQRT_RE.match(tok)
        if m:
            if seen_sqrt or any(exps):
                raise PotentialSyntaxError("sqrt factor out of place", lineno, col, "variable")
            seen_sqrt = True
            p, q = int(m.group(1)), int(m.group(2) or 1)
            if p == 0 or q == 0:
                raise PotentialSyntaxError("sqrt argument must be positive", lineno, col, "positive integers")
            surd = normalize_sqrt_rational(p, q)
            continue
        m = _VAR_RE.match(tok)
        if not m:
            raise PotentialSyntaxError(f"unexpected token {tok!r}", lineno, col, "sqrt(p[/q]) or var[^uint]")
        name, power = m.group(1), int(m.group(2) or 1)
        if name == "Z":
            slot = ntimes
        else:
            slot = int(name[1:]) - 1
            if slot >= ntimes:
                raise PotentialSyntaxError(f"variable {name} exceeds dimension {ntimes}", lineno, col, f"t1..t{ntimes} or Z")
        exps[slot] += power
    return tuple(exps), surd.scale(coeff)


def parse_potential(text, name=None):
    """Parse ``.pot`` text into a :class:`PotentialBundle`."""
    meta = {}
    weights = None
    wz = None
    unity = charge = target = None
    sections = {}
    lines = {}
    warnings = []
    current = None
    ntimes = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        if body.startswith("@"):
            parts = body.split()
            head = parts[0]
            args = parts[1:]
            col = raw.index(head) + 1
            if head == "@meta":
                if len(args) < 2:
                    raise PotentialSyntaxError("@meta needs a key and a value", lineno, col, "@meta key value")
                meta[args[0]] = " ".join(args[1:])
            elif head == "@weights":
                if not args or len(args) > MAX_TIMES:
                    raise PotentialSyntaxError("@weights needs 1..9 rationals", lineno, col, "rationals")
                weights = [_rational(a, lineno, col) for a in args]
                ntimes = len(weights)
            elif head == "@weight":
                if len(args) != 2 or args[0] != "Z":
                    raise PotentialSyntaxError("malformed @weight", lineno, col, "@weight Z r")
                wz = _rational(args[1], lineno, col)
            elif head in ("@unity", "@charge", "@target"):
                if len(args) != 1:
                    raise PotentialSyntaxError(f"{head} takes one value", lineno, col, "one value")
                if head == "@unity":
                    if not args[0].isdigit():
                        raise PotentialSyntaxError("bad unity index", lineno, col, "uint")
                    unity = int(args[0])
                elif head == "@charge":
                    charge = _rational(args[0], lineno, col)
                else:
                    target = _rational(args[0], lineno, col)
            elif head == "@terms":
                if len(args) != 1 or args[0] not in SECTIONS:
                    raise PotentialSyntaxError("unknown section", lineno, col, "F, A, B or C")
                if ntimes is None:
                    raise PotentialSyntaxError("@terms before @weights", lineno, col, "@weights")
                current = args[0]
                if current in sections:
                    raise PotentialSyntaxError(f"section {current} repeated", lineno, col, "a new section")
                sections[current] = {}
            else:
                raise PotentialSyntaxError(f"unknown directive {head}", lineno, col, "@meta, @weights, @weight, @unity, @charge, @target or @terms")
            continue
        if current is None:
            raise PotentialSyntaxError("term outside a section", lineno, 1, "@terms")
        exps, c = _parse_term(body, lineno, ntimes)
        if not c:
            warnings.append(Issue("ZeroCoefficient", f"zero coefficient dropped for {format_monomial(exps)}", lineno))
            continue
        sec = sections[current]
        old = sec.get(exps)
        if old is not None:
            if set(old.radicands()) & set(c.radicands()):
                warnings.append(Issue("DuplicateTerm", f"{current}: {format_monomial(exps)} repeated, merged", lineno))
            c = old + c
            if not c:
                del sec[exps]
                continue
        sec[exps] = c
        lines.setdefault((current, exps), lineno)

    nlines = len(text.splitlines())
    if weights is None:
        raise PotentialSyntaxError("missing @weights", nlines, 1, "@weights")
    if unity is None:
        raise PotentialSyntaxError("missing @unity", nlines, 1, "@unity")
    if not 1 <= unity <= ntimes:
        raise PotentialSyntaxError(f"unity index {unity} out of range", nlines, 1, f"1..{ntimes}")
    if "F" not in sections or not sections["F"]:
        raise PotentialSyntaxError("F section missing or empty", nlines, 1, "@terms F with at least one term")
    if target is None and charge is None:
        raise PotentialSyntaxError("need @target or @charge", nlines, 1, "@target r")
    if target is None:
        target = 3 - charge
    if charge is None:
        charge = 3 - target
    has_q = any(s in sections for s in "ABC")
    if has_q and wz is None:
        raise PotentialSyntaxError("constraint given without @weight Z", nlines, 1, "@weight Z r")
    ws = WeightSystem(tuple(weights) + (wz if wz is not None else Fraction(0),), charge, target)
    nslots = ntimes + 1
    F = Poly(nslots, sections["F"])
    constraint = None
    if has_q:
        if not sections.get("A"):
            raise PotentialSyntaxError("constraint needs a nonzero A section", nlines, 1, "@terms A")
        a_terms = sections["A"]
        if len(a_terms) != 1 or any(next(iter(a_terms))):
            line = min(lines[("A", e)] for e in a_terms)
            raise PotentialSyntaxError("A must be a single constant", line, 1, "constant term")
        A = next(iter(a_terms.values()))
        B = Poly(nslots, sections.get("B", {}))
        C = Poly(nslots, sections.get("C", {}))
        for sec, p in (("B", B), ("C", C)):
            if p.uses(ntimes):
                line = min(lines[(sec, e)] for e in p.terms if e[ntimes])
                raise PotentialSyntaxError(f"{sec} must not contain Z", line, 1, "Z-free terms")
        constraint = QuadraticConstraint(A, B, C)
    return PotentialBundle(
        name=name or meta.get("name", "unnamed"),
        weights=ws,
        unity=unity,
        F=F,
        constraint=constraint,
        meta=meta,
        term_lines=lines,
        warnings=warnings,
    )


def load_potential(path):
    with open(path, encoding="utf-8") as fh:
        return parse_potential(fh.read())


# -- serialization -------------------------------------------------------------


def _fmt_rational(q):
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_coefficient_terms(c):
    """One ``rational [* sqrt(r)]`` string per radicand of a SurdSum."""
    out = []
    for r, q in c.items():
        s = _fmt_rational(q)
        if r != 1:
            s += f" * sqrt({r})"
        out.append(s)
    return out


def _term_lines(poly, ntimes):
    names = [f"t{i + 1}" for i in range(ntimes)] + ["Z"]
    out = []
    for exps, c in poly.sorted_terms():
        mono = "".join(f" * {n}" + (f"^{k}" if k > 1 else "") for n, k in zip(names, exps) if k)
        for coef in format_coefficient_terms(c):
            out.append(coef + mono)
    return out


def serialize_potential(bundle):
    ws = bundle.weights
    lines = []
    for k in sorted(bundle.meta):
        lines.append(f"@meta {k} {bundle.meta[k]}")
    lines.append("@weights " + " ".join(_fmt_rational(w) for w in ws.weights[:-1]))
    if bundle.constraint is not None:
        lines.append(f"@weight Z {_fmt_rational(ws.weights[-1])}")
    lines.append(f"@unity {bundle.unity}")
    lines.append(f"@charge {_fmt_rational(ws.charge)}")
    lines.append(f"@target {_fmt_rational(ws.target)}")
    lines.append("@terms F")
    lines += _term_lines(bundle.F, bundle.dim)
    q = bundle.constraint
    if q is not None:
        lines.append("@terms A")
        lines += format_coefficient_terms(q.A)
        lines.append("@terms B")
        lines += _term_lines(q.B, bundle.dim)
        lines.append("@terms C")
        lines += _term_lines(q.C, bundle.dim)
    return "\n".join(lines) + "\n"


# -- validation ------------------------------------------------------------------


def metric_support(bundle):
    """Index pairs (i, j), i <= j, 0-based, of the constant metric read off F's cubic unity terms.

    Returns (pairs, offending) where ``offending`` lists F-monomials containing the
    unity variable that are not of the form t_u * t_i * t_j.
    """
    u = bundle.unity_index
    z = bundle.dim
    pairs, bad = {}, []
    for exps, c in bundle.F.sorted_terms():
        if not exps[u]:
            continue
        if sum(exps) != 3 or exps[z]:
            bad.append(exps)
            continue
        rest = list(exps)
        rest[u] -= 1
        idx = [i for i in range(z) for _ in range(rest[i])]
        pairs[tuple(idx)] = c
    return pairs, bad


def validate(bundle):
    """Term-wise checks that localize transcription errors; never raises."""
    rep = ValidationReport()
    ws = bundle.weights
    err = rep.errors.append
    warn = rep.warnings.append
    rep.warnings.extend(bundle.warnings)

    def line_of(sec, exps):
        return bundle.term_lines.get((sec, exps))

    declared = bundle.declared_terms
    if declared is None:
        warn(Issue("MissingTermCount", "no '@meta terms_F' declaration; term count not checked"))
    elif declared != len(bundle.F):
        err(Issue("TermCount", f"section F has {len(bundle.F)} terms, declared {declared}"))

    if ws.target != 3 - ws.charge:
        err(Issue("ChargeMismatch", f"target {ws.target} != 3 - charge {ws.charge}"))
    if ws.weights[bundle.unity_index] != 1:
        err(Issue("UnityDegree", f"weight of unity variable t{bundle.unity} is {ws.weights[bundle.unity_index]}, expected 1"))

    checks = [("F", bundle.F, ws.target)]
    q = bundle.constraint
    if q is not None:
        dz = ws.weights[-1]
        checks += [("B", q.B, dz), ("C", q.C, 2 * dz)]
        if not q.A:
            err(Issue("ZeroA", "leading coefficient A is zero"))
        for sec, p in (("B", q.B), ("C", q.C)):
            if p.uses(bundle.unity_index):
                for e in p.terms:
                    if e[bundle.unity_index]:
                        err(Issue("UnityInConstraint", f"{sec}: {format_monomial(e)} contains the unity variable", line_of(sec, e)))
    for sec, p, target in checks:
        count = 0
        for e, _ in p.sorted_terms():
            d = ws.weighted_degree(e)
            if d != target:
                err(Issue("Quasihomogeneity", f"{sec}: {format_monomial(e)} has weighted degree {d}, expected {target}", line_of(sec, e)))
            else:
                count += 1
        rep.degree_summary[sec] = {"target": str(target), "terms": len(p), "matching": count}

    zdeg = bundle.F.z_degree()
    if zdeg and q is None:
        err(Issue("UnboundZ", "F contains Z but no constraint is given"))
    if zdeg > 1:
        err(Issue("ZNonlinear", f"F has Z-degree {zdeg}, expected at most 1"))

    pairs, bad = metric_support(bundle)
    for e in bad:
        err(Issue("UnityTerm", f"F: {format_monomial(e)} contains the unity variable but is not cubic in t", line_of("F", e)))
    partners = set()
    for (i, j) in pairs:
        partners |= {i, j}
        if ws.weights[i] + ws.weights[j] != 2 - ws.charge:
            err(Issue("Duality", f"metric pair (t{i + 1}, t{j + 1}): degrees sum to {ws.weights[i] + ws.weights[j]}, expected {2 - ws.charge}"))
    lonely = [i for i in range(bundle.dim) if i not in partners]
    if lonely:
        err(Issue("MetricSupport", "no metric partner for " + ", ".join(f"t{i + 1}" for i in lonely)))

    cox = bundle.meta.get("cox_order")
    if cox is not None:
        n = int(cox)
        for i, w in enumerate(ws.weights[:-1]):
            if (w * n - 1).denominator != 1:
                warn(Issue("ExponentIntegrality", f"t{i + 1}: degree*{n} - 1 = {w * n - 1} is not an integer"))
    return rep


# -- fixtures ----------------------------------------------------------------------


def fixture_text(name):
    fname = FIXTURES.get(name, name)
    return resources.files("frobcheck.data").joinpath(fname).read_text(encoding="utf-8")


def fixture_path(name):
    fname = FIXTURES.get(name, name)
    return str(resources.files("frobcheck.data").joinpath(fname))


def builtin_fixtures():
    return [parse_potential(fixture_text(n)) for n in FIXTURES]
