"""Text and structured (JSON) rendering of scenario results.

Structured schema, version 1::

    {"schema_version": 1,
     "results": [{"name": str, "passed": bool, "stable": bool,
                  "checks": [{"label": str, "ok": bool, "detail": str}],
                  "reports": {label: {
                      "grading": [str], "stable": bool, "margin": int, "notes": [str],
                      "window": null | {"bounds": [[var, lo, hi]], "cap": int | null},
                      "algebra": null | {"even": [str], "odd": [str], "laurent": [str]},
                      "entries": [{"key": [int], "parity": "even" | "odd",
                                   "kernel": int, "image": int, "cohomology": int,
                                   "representatives": [expr]}]}}}]}
"""

from __future__ import annotations

import json

from .algebra import Presentation
from .cohomology import DegreeWindow, DSReport, KeyDims
from .parser import parse_expression, render
from .scenarios import ScenarioResult

SCHEMA_VERSION = 1
_PARITY = ("even", "odd")


def report_to_data(rep: DSReport) -> dict:
    pres = rep.presentation
    entries = []
    for (key, p), d in sorted(rep.dims.items()):
        entries.append({
            "key": list(key), "parity": _PARITY[p],
            "kernel": d.kernel, "image": d.image, "cohomology": d.cohomology,
            "representatives": [render(r) for r in rep.representatives.get((key, p), [])],
        })
    return {
        "grading": list(rep.grading),
        "stable": rep.stable,
        "margin": rep.margin,
        "notes": list(rep.notes),
        "window": None if rep.window is None else {
            "bounds": [list(b) for b in rep.window.bounds], "cap": rep.window.cap},
        "algebra": None if pres is None else {
            "even": list(pres.even_names), "odd": list(pres.odd_names),
            "laurent": [v.name for v in pres.even if v.laurent]},
        "entries": entries,
    }


def report_from_data(data: dict) -> DSReport:
    alg = data.get("algebra")
    pres = None if alg is None else Presentation.build(even=alg["even"], odd=alg["odd"], laurent=alg["laurent"])
    dims, reps = {}, {}
    for e in data["entries"]:
        k = (tuple(e["key"]), _PARITY.index(e["parity"]))
        dims[k] = KeyDims(e["kernel"], e["image"], e["cohomology"])
        if e["representatives"]:
            reps[k] = [parse_expression(r, pres) for r in e["representatives"]]
    w = data.get("window")
    window = None if w is None else DegreeWindow(tuple(tuple(b) for b in w["bounds"]), w["cap"])
    return DSReport(tuple(data["grading"]), dims, reps, data["stable"], window, data["margin"],
                    list(data["notes"]), pres)


def result_to_data(res: ScenarioResult) -> dict:
    return {
        "name": res.name,
        "passed": res.passed,
        "stable": res.stable,
        "checks": [{"label": l, "ok": ok, "detail": d} for l, ok, d in res.checks],
        "reports": {k: report_to_data(r) for k, r in res.reports.items()},
    }


def result_from_data(data: dict) -> ScenarioResult:
    res = ScenarioResult(data["name"])
    res.checks = [(c["label"], c["ok"], c["detail"]) for c in data["checks"]]
    res.reports = {k: report_from_data(v) for k, v in data["reports"].items()}
    return res


def emit_structured(results: list) -> str:
    return json.dumps({"schema_version": SCHEMA_VERSION,
                       "results": [result_to_data(r) for r in results]}, indent=2)


def parse_structured(text: str) -> list:
    data = json.loads(text)
    if data.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema_version {data.get('schema_version')!r}")
    return [result_from_data(r) for r in data["results"]]


def _table(rep: DSReport) -> list:
    labels = list(rep.grading) or ["key"]
    head = labels + ["parity", "ker", "im", "H", "representatives"]
    rows = []
    for (key, p), d in sorted(rep.dims.items()):
        keycells = [str(x) for x in key] if rep.grading else ["-"]
        reps = "; ".join(render(r) for r in rep.representatives.get((key, p), []))
        rows.append(keycells + [_PARITY[p], str(d.kernel), str(d.image), str(d.cohomology), reps])
    widths = [max([len(h)] + [len(r[i]) for r in rows]) for i, h in enumerate(head)]
    fmt = lambda cells: "  ".join(c.rjust(w) if i < len(head) - 1 else c
                                  for i, (c, w) in enumerate(zip(cells, widths))).rstrip()
    return [fmt(head)] + [fmt(r) for r in rows]


def emit_text(results: list) -> str:
    out = []
    for res in results:
        verdict = "PASS" if res.passed else "FAIL"
        out.append(f"== {res.name}: {verdict}" + ("" if res.stable else " (unstable)"))
        for label, ok, detail in res.checks:
            out.append(f"  [{'ok' if ok else 'FAIL'}] {label}" + (f" -- {detail}" if detail and not ok else ""))
        for label, rep in res.reports.items():
            e, o = rep.totals()
            out.append(f"  -- {label}: H = {e}|{o}, {'stable' if rep.stable else 'UNSTABLE'}")
            for note in rep.notes:
                out.append(f"     note: {note}")
            out += ["     " + line for line in _table(rep)]
        out.append("")
    return "\n".join(out)


def emit_report(results: list, fmt: str = "text") -> str:
    if fmt == "structured":
        return emit_structured(results)
    if fmt == "text":
        return emit_text(results)
    raise ValueError(f"unknown format {fmt!r}")
