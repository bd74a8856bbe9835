"""Verification reports: a deterministic JSON form and a short human summary."""

from dataclasses import dataclass, field
import json

SCHEMA = 1


@dataclass
class VerificationReport:
    bundle: str
    mode: str
    seed: int
    digits: int
    sampling: str
    full_sweep: bool
    euler: dict
    points: list
    classes: list = None
    timings: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.euler["pass"] and bool(self.points) and all(p["pass"] for p in self.points)

    @property
    def verdict(self):
        return "pass" if self.passed else "fail"

    def failures(self):
        """ResidualRecords of every failing WDVV tuple, as (point index, (i, j, q, n), residual)."""
        out = []
        for p in self.points:
            for f in p.get("wdvv", {}).get("failures", []):
                out.append((p["index"], tuple(f["tuple"]), f["residual"]))
        return out

    def as_dict(self, include_timings=False):
        d = {
            "schema": SCHEMA,
            "bundle": self.bundle,
            "mode": self.mode,
            "seed": self.seed,
            "digits": self.digits,
            "sampling": self.sampling,
            "full_sweep": self.full_sweep,
            "grading_classes": self.classes,
            "euler": self.euler,
            "points": self.points,
            "verdict": self.verdict,
        }
        if self.mode == "numeric":
            d["max_relative_residual"] = self.max_residuals()
        if include_timings:
            d["timings"] = {k: round(v, 3) for k, v in self.timings.items()}
        return d

    def to_json(self, include_timings=False):
        return json.dumps(self.as_dict(include_timings), sort_keys=True, indent=2)

    def max_residuals(self):
        """Largest numeric relative residual per check over all points and branches."""
        best = {}
        for p in self.points:
            for br in p.get("branches", []):
                for key in ("wdvv", "unity", "metric_constancy"):
                    v = float(br[key])
                    best[key] = max(best.get(key, 0.0), v)
        return {k: f"{v:.3e}" for k, v in sorted(best.items())}

    def summary_lines(self, limit=20):
        lines = [f"bundle {self.bundle}: mode {self.mode}, seed {self.seed}, {len(self.points)} point(s), sampling {self.sampling}"]
        e = self.euler
        lines.append(f"euler identity: {'pass' if e['pass'] else 'FAIL'}")
        for sec, bad in sorted(e["offenders"].items()):
            for m in bad[:limit]:
                lines.append(f"  {sec}: monomial {m} off weighted degree")
        for p in self.points:
            tag = "pass" if p["pass"] else "FAIL"
            lines.append(f"point {p['index'] + 1}: {tag}  t = ({', '.join(p['point'])})")
            if "metric" in p:
                lines.append(f"  metric {p['metric']['hash']} constant={p['metric']['constant']}")
            if p.get("error"):
                lines.append(f"  error: {p['error']}")
            if "unity" in p:
                u = p["unity"]
                lines.append(f"  unity: {'pass' if u['pass'] else 'FAIL'}" + (f" witnesses {u['witnesses'][:limit]}" if u["witnesses"] else ""))
            if "wdvv" in p:
                w = p["wdvv"]
                lines.append(f"  wdvv: {w['passed']}/{w['checked']} tuples zero, symmetry re-check {'pass' if w['symmetry'] else 'FAIL'}")
                for f in w["failures"][:limit]:
                    lines.append(f"    residual at (i,j,q,n) = {tuple(f['tuple'])}: {f['residual']}")
            for br in p.get("branches", []):
                lines.append(
                    f"  branch {br['sign']:+d}: wdvv {br['wdvv']}  unity {br['unity']}  metric {br['metric_constancy']}"
                    f"  {'pass' if br['pass'] else 'FAIL'}"
                )
        if self.mode == "numeric":
            lines.append("max relative residual: " + ", ".join(f"{k} {v}" for k, v in self.max_residuals().items()))
        if self.timings:
            lines.append("timings: " + ", ".join(f"{k} {v:.2f}s" for k, v in self.timings.items()))
        lines.append(f"verdict: {self.verdict.upper()}")
        return lines
