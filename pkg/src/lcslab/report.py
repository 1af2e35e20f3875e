"""Check results and report assembly.

Every verification operation returns CheckResult entries. A Report is a
deterministic function of (scenario, seed): entries are sorted by check id
before serialization and no timestamps or environment details are written.
"""

import csv
import io
import json
import os

import numpy as np

PASS = "PASS"
FAIL = "FAIL"
FLAGGED = "FLAGGED"

SCHEMA_VERSION = 1
TOL_ENV_VAR = "LCSLAB_TOL_SCALE"


def tolerance_scale() -> float:
    raw = os.environ.get(TOL_ENV_VAR)
    if raw is None:
        return 1.0
    try:
        value = float(raw)
    except ValueError:
        return 1.0
    return value if value > 0 else 1.0


class CheckResult:
    """One verified quantity: residual against tolerance, plus context.

    direction records which side of the tolerance passes: "below" for
    residuals, "above" for floors such as non-degeneracy margins.
    """

    __slots__ = ("check_id", "status", "residual", "tolerance", "point",
                 "anchor", "notes", "direction")

    def __init__(self, check_id, status, residual, tolerance, point=None,
                 anchor="", notes="", direction="below"):
        self.check_id = str(check_id)
        self.status = status
        self.residual = float(residual)
        self.tolerance = float(tolerance)
        self.point = None if point is None else [float(v) for v in np.ravel(point)]
        self.anchor = str(anchor)
        self.notes = str(notes)
        self.direction = direction

    @property
    def passed(self) -> bool:
        return self.status != FAIL

    def __repr__(self):
        return (f"CheckResult({self.check_id!r}, {self.status}, "
                f"residual={self.residual:.3e}, tol={self.tolerance:.1e})")

    def to_dict(self) -> dict:
        return {
            "id": self.check_id,
            "status": self.status,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "direction": self.direction,
            "point": self.point,
            "anchor": self.anchor,
            "notes": self.notes,
        }


def make_result(check_id, residual, tolerance, anchor="", point=None, notes="",
                flagged: bool = False) -> CheckResult:
    """Grade a residual. The environment tolerance scale applies uniformly."""
    tol = float(tolerance) * tolerance_scale()
    residual = float(residual)
    if not np.isfinite(residual) or residual > tol:
        status = FAIL
    elif flagged:
        status = FLAGGED
    else:
        status = PASS
    return CheckResult(check_id, status, residual, tol, point=point, anchor=anchor, notes=notes)


def make_floor_result(check_id, value, floor, anchor="", point=None, notes="",
                      flagged: bool = False) -> CheckResult:
    """Grade a quantity that must stay ABOVE a floor (non-degeneracy margins).

    The environment scale loosens the floor the same way it loosens
    tolerances. The measured value is stored in the residual slot.
    """
    floor_eff = float(floor) / tolerance_scale()
    value = float(value)
    if not np.isfinite(value) and value > 0:
        status = FLAGGED if flagged else PASS
    elif not np.isfinite(value) or value < floor_eff:
        status = FAIL
    elif flagged:
        status = FLAGGED
    else:
        status = PASS
    note = f"lower bound {floor_eff:.1e}" + (f"; {notes}" if notes else "")
    return CheckResult(check_id, status, value, floor_eff, point=point,
                       anchor=anchor, notes=note, direction="above")


def with_tolerance(r: CheckResult, tolerance: float) -> CheckResult:
    """Regrade a result against an overridden base tolerance or floor."""
    if r.direction == "above":
        tol = float(tolerance) / tolerance_scale()
        ok = r.residual >= tol
    else:
        tol = float(tolerance) * tolerance_scale()
        ok = r.residual <= tol
    status = (FLAGGED if r.status == FLAGGED else PASS) if ok else FAIL
    return CheckResult(r.check_id, status, r.residual, tol, point=r.point,
                       anchor=r.anchor, notes=r.notes, direction=r.direction)


def attaining_point(points, residuals):
    """The sample at which a batch residual attains its maximum."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    res = np.asarray(residuals, dtype=float)
    if res.size == 0:
        return None
    return pts[int(np.argmax(res))]


class Report:
    """Ordered collection of check results for one scenario or a whole suite."""

    def __init__(self, scenario: str, seed: int, entries=None):
        self.scenario = str(scenario)
        self.seed = int(seed)
        self.entries = list(entries or [])

    def add(self, results):
        if isinstance(results, CheckResult):
            self.entries.append(results)
        else:
            self.entries.extend(results)

    def sorted_entries(self):
        return sorted(self.entries, key=lambda r: r.check_id)

    def counts(self) -> dict:
        out = {PASS: 0, FAIL: 0, FLAGGED: 0}
        for r in self.entries:
            out[r.status] += 1
        return out

    @property
    def exit_code(self) -> int:
        return 1 if self.counts()[FAIL] else 0

    def to_dict(self) -> dict:
        counts = self.counts()
        return {
            "version": SCHEMA_VERSION,
            "scenario": self.scenario,
            "seed": self.seed,
            "checks": [r.to_dict() for r in self.sorted_entries()],
            "summary": {"pass": counts[PASS], "fail": counts[FAIL],
                        "flagged": counts[FLAGGED]},
        }


def render_json(report: Report) -> str:
    return json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n"


def render_csv(report: Report) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["id", "status", "residual", "tolerance", "direction",
                     "anchor", "notes"])
    for r in report.sorted_entries():
        writer.writerow([r.check_id, r.status, f"{r.residual:.6e}",
                         f"{r.tolerance:.1e}", r.direction, r.anchor, r.notes])
    return buf.getvalue()


def render_text(report: Report) -> str:
    lines = [f"scenario {report.scenario} (seed {report.seed})"]
    modules = {}
    for r in report.sorted_entries():
        flag = "" if r.status == PASS else f"  [{r.status}]"
        bound = "<=" if r.direction == "below" else ">="
        lines.append(f"  {r.check_id:46s} {r.residual:11.3e} {bound} {r.tolerance:.1e}{flag}")
        module = r.check_id.split(".", 1)[0]
        tally = modules.setdefault(module, {PASS: 0, FAIL: 0, FLAGGED: 0})
        tally[r.status] += 1
    lines.append("")
    for module in sorted(modules):
        tally = modules[module]
        lines.append(f"  {module}: {tally[PASS]} pass, {tally[FAIL]} fail, "
                     f"{tally[FLAGGED]} flagged")
    counts = report.counts()
    verdict = "FAIL" if counts[FAIL] else "PASS"
    lines.append(f"{verdict}: {counts[PASS]} pass, {counts[FAIL]} fail, "
                 f"{counts[FLAGGED]} flagged")
    return "\n".join(lines) + "\n"


def suite_to_dict(reports) -> dict:
    ordered = sorted(reports, key=lambda rep: rep.scenario)
    totals = {PASS: 0, FAIL: 0, FLAGGED: 0}
    for rep in ordered:
        counts = rep.counts()
        for key in totals:
            totals[key] += counts[key]
    return {
        "version": SCHEMA_VERSION,
        "seed": ordered[0].seed if ordered else 0,
        "scenarios": [rep.to_dict() for rep in ordered],
        "summary": {"pass": totals[PASS], "fail": totals[FAIL],
                    "flagged": totals[FLAGGED]},
    }


def render_suite_json(reports) -> str:
    return json.dumps(suite_to_dict(reports), sort_keys=True, indent=2) + "\n"


def render_suite_csv(reports) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["scenario", "id", "status", "residual", "tolerance",
                     "direction", "anchor", "notes"])
    for rep in sorted(reports, key=lambda r: r.scenario):
        for r in rep.sorted_entries():
            writer.writerow([rep.scenario, r.check_id, r.status,
                             f"{r.residual:.6e}", f"{r.tolerance:.1e}",
                             r.direction, r.anchor, r.notes])
    return buf.getvalue()


def render_suite_text(reports) -> str:
    ordered = sorted(reports, key=lambda rep: rep.scenario)
    lines = []
    modules = {}
    totals = {PASS: 0, FAIL: 0, FLAGGED: 0}
    for rep in ordered:
        counts = rep.counts()
        for key in totals:
            totals[key] += counts[key]
        flag = "" if not counts[FAIL] else "  [FAIL]"
        lines.append(f"  {rep.scenario:22s} {counts[PASS]:3d} pass, "
                     f"{counts[FAIL]} fail, {counts[FLAGGED]} flagged{flag}")
        for r in rep.entries:
            module = r.check_id.split(".", 1)[0]
            tally = modules.setdefault(module, {PASS: 0, FAIL: 0, FLAGGED: 0})
            tally[r.status] += 1
    lines.append("")
    for module in sorted(modules):
        tally = modules[module]
        lines.append(f"  {module}: {tally[PASS]} pass, {tally[FAIL]} fail, "
                     f"{tally[FLAGGED]} flagged")
    verdict = "FAIL" if totals[FAIL] else "PASS"
    lines.append(f"{verdict}: {totals[PASS]} pass, {totals[FAIL]} fail, "
                 f"{totals[FLAGGED]} flagged")
    return "\n".join(lines) + "\n"
