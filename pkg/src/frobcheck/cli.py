"""Command-line front end: ``frobcheck validate|verify|eta|residuals FILE``.

Exit codes: 0 pass, 1 verification failure, 2 input or usage error.
"""

import argparse
import json
import os
import sys
import time

from . import frobenius as fr
from .errors import FrobcheckError, MetricDegenerate, PotentialSyntaxError
from .potential import FIXTURES, fixture_path, load_potential, validate
from .report import SCHEMA
from .surd import format_surd

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
DEFAULT_DIGITS = 256


class InputError(Exception):
    pass


def _resolve(path):
    """A path on disk, or the name of a packaged fixture (``e8a1`` or ``e8a1.pot``)."""
    if os.path.exists(path):
        return path
    base = os.path.basename(path)
    for name, fname in FIXTURES.items():
        if base in (name, fname):
            return fixture_path(name)
    return path


def _load(path):
    try:
        return load_potential(_resolve(path))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except PotentialSyntaxError as exc:
        raise InputError(f"{path}: {exc}") from exc
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _default_digits():
    v = os.environ.get("FROBCHECK_DIGITS")
    if v is None:
        return DEFAULT_DIGITS
    try:
        d = int(v)
    except ValueError:
        raise InputError(f"FROBCHECK_DIGITS must be an integer, got {v!r}") from None
    if d < 32:
        raise InputError("FROBCHECK_DIGITS must be at least 32")
    return d


def _dump(obj):
    print(json.dumps({"schema": SCHEMA, **obj}, sort_keys=True, indent=2))


def cmd_validate(args):
    t0 = time.perf_counter()
    bundle = _load(args.file)
    rep = validate(bundle)
    if args.json:
        _dump({"bundle": bundle.name, **rep.as_dict()})
    else:
        print(f"bundle {bundle.name}: dimension {bundle.dim}, {len(bundle.F)} F-terms")
        for sec, s in rep.degree_summary.items():
            print(f"  {sec}: {s['matching']}/{s['terms']} terms at weighted degree {s['target']}")
        for w in rep.warnings:
            print(f"warning [{w.code}]" + (f" line {w.line}" if w.line else "") + f": {w.message}")
        for e in rep.errors:
            print(f"error [{e.code}]" + (f" line {e.line}" if e.line else "") + f": {e.message}")
        print(f"{len(rep.errors)} error(s), {len(rep.warnings)} warning(s) in {time.perf_counter() - t0:.2f}s")
    return EXIT_OK if rep.ok else EXIT_FAIL


def _validated(args):
    bundle = _load(args.file)
    rep = validate(bundle)
    if not rep.ok:
        for e in rep.errors:
            print(f"error [{e.code}]" + (f" line {e.line}" if e.line else "") + f": {e.message}", file=sys.stderr)
        return bundle, False
    return bundle, True


def cmd_verify(args):
    bundle, ok = _validated(args)
    if not ok:
        print("validation failed; not verifying", file=sys.stderr)
        return EXIT_FAIL
    digits = args.digits if args.digits is not None else _default_digits()
    try:
        report = fr.verify(
            bundle,
            n_points=args.points,
            seed=args.seed,
            mode=args.mode,
            digits=digits,
            full_sweep=args.full_sweep,
            jobs=args.jobs,
            sampling=args.sampling,
        )
    except fr.DegeneratePoint as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.json:
        print(report.to_json(include_timings=args.timings))
    else:
        print("\n".join(report.summary_lines()))
        for idx, t, r in report.failures():
            print(f"FAIL point {idx + 1} (i,j,q,n)={t}: {r}")
    return EXIT_OK if report.passed else EXIT_FAIL


def _duality(bundle, eta):
    ws = bundle.weights
    want = 2 - ws.charge
    bad = []
    for i, row in enumerate(eta):
        for j, x in enumerate(row):
            if x and ws.weights[i] + ws.weights[j] != want:
                bad.append([i + 1, j + 1])
    return bad


def cmd_eta(args):
    bundle = _load(args.file)
    sampler = fr.PointSampler(bundle, args.seed, args.sampling)
    mats = []
    points = []
    tries = 0
    status = EXIT_OK
    problem = None
    while len(mats) < args.points and tries < fr.MAX_RESAMPLE:
        tries += 1
        qs, pt = sampler.draw()
        try:
            table = fr.third_derivatives(bundle, pt)
            mats.append(fr.metric(bundle, table=table))
            points.append([format_surd(x) for x in pt])
        except (fr.DegeneratePoint, fr.NotInvertible):
            continue
        except MetricDegenerate as exc:
            problem = str(exc)
            break
    if problem is None and not mats:
        problem = "no admissible point found"
    if problem is not None:
        if args.json:
            _dump({"bundle": bundle.name, "error": problem, "pass": False})
        else:
            print(f"error: {problem}")
        return EXIT_FAIL
    eta = mats[0].eta
    constant = all(m.eta == eta for m in mats)
    symmetric = all(eta[i][j] == eta[j][i] for i in range(len(eta)) for j in range(len(eta)))
    duality = _duality(bundle, eta)
    passed = constant and symmetric and not duality
    if not passed:
        status = EXIT_FAIL
    fmt = [[format_surd(x) for x in row] for row in eta]
    fmt_inv = [[format_surd(x) for x in row] for row in mats[0].inverse]
    if args.json:
        _dump(
            {
                "bundle": bundle.name,
                "eta": fmt,
                "inverse": fmt_inv,
                "points": points,
                "constant": constant,
                "symmetric": symmetric,
                "z_free": True,
                "duality_violations": duality,
                "support": [[i + 1, j + 1] for i, j in mats[0].nonzero()],
                "pass": passed,
            }
        )
    else:
        print(f"metric of {bundle.name} from {len(mats)} point(s) (Z-component zero at every point)")
        width = max(len(s) for row in fmt + fmt_inv for s in row)
        print("eta:")
        for row in fmt:
            print("  " + " ".join(s.rjust(width) for s in row))
        print("eta^-1:")
        for row in fmt_inv:
            print("  " + " ".join(s.rjust(width) for s in row))
        print("nonzero entries: " + ", ".join(f"({i + 1},{j + 1})" for i, j in mats[0].nonzero() if i <= j))
        print(f"constant across points: {constant}; symmetric: {symmetric}")
        print("duality d_i + d_j = 2 - charge: " + ("holds" if not duality else f"violated at {duality}"))
    return status


def cmd_residuals(args):
    bundle, ok = _validated(args)
    if not ok:
        return EXIT_FAIL
    report = fr.verify(bundle, n_points=args.points, seed=args.seed, mode="exact", full_sweep=args.full_sweep, sampling=args.sampling)
    reps, _ = fr.wdvv_orbits(bundle.dim)
    rows = []
    for p in report.points:
        failed = {tuple(f["tuple"]): f["residual"] for f in p.get("wdvv", {}).get("failures", [])}
        tuples = [tuple(x + 1 for x in t) for t in (fr.product(range(bundle.dim), repeat=4) if args.full_sweep else reps)]
        for t in tuples:
            if args.all or t in failed:
                rows.append({"point": p["index"] + 1, "tuple": list(t), "residual": failed.get(t, "0")})
    if args.json:
        _dump({"bundle": bundle.name, "residuals": rows, "verdict": report.verdict})
    else:
        for r in rows:
            print(f"point {r['point']} (i,j,q,n)={tuple(r['tuple'])}: {r['residual']}")
        print(f"{sum(1 for r in rows if r['residual'] != '0')} nonzero residual(s); verdict {report.verdict}")
    return EXIT_OK if report.passed else EXIT_FAIL


def build_parser():
    p = argparse.ArgumentParser(prog="frobcheck", description="Exact checks of WDVV potentials.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("file", help="potential file, or a built-in fixture name (e8a1, cubic-trivial, a3-poly)")
        sp.add_argument("--json", action="store_true", help="machine-readable report")

    def sampling(sp, points):
        sp.add_argument("--points", type=int, default=points, help="number of admissible sample points")
        sp.add_argument("--seed", type=int, default=1)
        sp.add_argument(
            "--sampling",
            choices=["graded", "rational"],
            default="graded",
            help="graded lifts t_i = q_i*sqrt(k_i) (default) or plain rationals",
        )

    sp = sub.add_parser("validate", help="parse and run term-wise checks")
    common(sp)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("verify", help="metric, unity, Euler and WDVV checks at sample points")
    common(sp)
    sampling(sp, 5)
    sp.add_argument("--mode", choices=["exact", "numeric"], default="exact")
    sp.add_argument("--digits", type=int, default=None, help=f"numeric precision (default $FROBCHECK_DIGITS or {DEFAULT_DIGITS})")
    sp.add_argument("--jobs", type=int, default=1, help="worker processes for point evaluation")
    sp.add_argument("--full-sweep", action="store_true", help="check all n^4 tuples instead of one per symmetry orbit")
    sp.add_argument("--timings", action="store_true", help="include wall-clock per phase in the JSON report")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("eta", help="print the metric and its inverse exactly")
    common(sp)
    sampling(sp, 3)
    sp.set_defaults(func=cmd_eta)

    sp = sub.add_parser("residuals", help="list WDVV residual records")
    common(sp)
    sampling(sp, 1)
    sp.add_argument("--full-sweep", action="store_true")
    sp.add_argument("--all", action="store_true", help="list zero residuals too")
    sp.set_defaults(func=cmd_residuals)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    for name in ("points", "jobs", "digits"):
        v = getattr(args, name, None)
        if v is not None and v < 1:
            parser.error(f"--{name} must be positive")
    if getattr(args, "digits", None) is not None and args.digits < 32:
        parser.error("--digits must be at least 32")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FrobcheckError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
