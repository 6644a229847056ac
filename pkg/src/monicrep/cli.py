"""Command line front end.

Exit codes: 0 positive verdict, 1 negative verdict, 2 input or precondition
error, 3 verdict only up to the bound.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from importlib import resources
from pathlib import Path as FsPath
from typing import Any, Callable

from .algebra import AlgebraError, MissingIdempotents, bound_quiver_algebra, field_algebra, path_algebra, truncated_polynomial
from .exactlin import GF2
from .homological import DEFAULT_BOUND, Status, classify, is_projective
from .io import InputError, Workspace, load_workspace, relation_to_json
from .monic import (
    HypothesisViolated,
    NotMonic,
    PreconditionUnknown,
    PreconditionViolated,
    check_monic,
    coker_phi,
    gp_decide_by_split,
    gp_decide_path_algebra,
    perp_oracle,
    projectives_monic_bound_quiver,
    theorem_5_1_harness,
    theorem_5_4_harness,
)
from .quiver import BoundQuiverPresentation, CyclicQuiver, Quiver, RelationElement, tensor_hereditary_check, tensor_quiver
from .repmod import to_flat_module
from .sampling import DEFAULT_CAP, RepSampler
from .window import LiftFailed, WindowTooShort, complete_resolution_window, verify_window

EXIT_POSITIVE, EXIT_NEGATIVE, EXIT_INPUT, EXIT_BOUNDED = 0, 1, 2, 3
_STATUS_EXIT = {Status.GP: EXIT_POSITIVE, Status.NOT_GP: EXIT_NEGATIVE, Status.BOUNDED: EXIT_BOUNDED}
_PRECONDITION = (CyclicQuiver, NotMonic, HypothesisViolated, PreconditionUnknown, PreconditionViolated,
                 MissingIdempotents, WindowTooShort)


class Outcome:
    """A command result: report body plus exit code."""

    def __init__(self, result: dict, code: int) -> None:
        self.result = result
        self.code = code


# -- commands -----------------------------------------------------------------


def _workspace(path: str, inputs: list) -> Workspace:
    ws, digest = load_workspace(path)
    inputs.append({"file": FsPath(path).name, "sha256": digest})
    ws.resolve_all()
    return ws


def cmd_check_monic(ws: Workspace, rep: str | None) -> Outcome:
    name = ws.pick("representations", rep)
    report = check_monic(ws.representation(name))
    return Outcome({"representation": name, "monic": report.to_json()},
                   EXIT_POSITIVE if report.is_monic else EXIT_NEGATIVE)


def cmd_check_gp(ws: Workspace, rep: str | None, bound: int) -> Outcome:
    name = ws.pick("representations", rep)
    verdict = gp_decide_path_algebra(ws.representation(name), bound)
    return Outcome({"representation": name, "verdict": verdict.to_json()}, _STATUS_EXIT[verdict.status])


def cmd_algebra_info(ws: Workspace, alg: str | None, bound: int) -> Outcome:
    name = ws.pick("algebras", alg)
    a = ws.algebra(name, "algebras")
    return Outcome({"algebra": name, "dim": a.dim, "labels": list(a.labels), "class": classify(a, bound).to_json()},
                   EXIT_POSITIVE)


def cmd_coker_phi(ws: Workspace, rep: str | None) -> Outcome:
    name = ws.pick("representations", rep)
    c = coker_phi(ws.representation(name))
    return Outcome({"representation": name, "quiver": c.quiver.to_json(), "dims": c.dims, "coker_phi": c.to_json(),
                    "monic": check_monic(c).is_monic}, EXIT_POSITIVE)


def cmd_window(ws: Workspace, rep: str | None, n: int) -> Outcome:
    name = ws.pick("representations", rep)
    try:
        w = complete_resolution_window(ws.representation(name), n)
    except LiftFailed as exc:
        return Outcome({"representation": name, "window": None, "failed_stage": exc.stage, "detail": exc.detail},
                       EXIT_NEGATIVE)
    check = verify_window(w)
    return Outcome({"representation": name, "N": n, "term_dims": {str(i): d for i, d in w.dims().items()},
                    "levels": w.levels, "checks": check.to_json()}, EXIT_POSITIVE if check.ok else EXIT_NEGATIVE)


def _presentation_file(path: str, inputs: list) -> BoundQuiverPresentation:
    ws, digest = load_workspace(path)
    inputs.append({"file": FsPath(path).name, "sha256": digest})
    doc = ws.doc
    if "vertices" in doc or "quiver" in doc:
        return ws.presentation(doc, FsPath(path).name)
    names = ws.names("quivers")
    if len(names) != 1:
        raise InputError(FsPath(path).name, "expected a quiver, a presentation, or a workspace with one quiver")
    return ws.presentation(names[0], f"quivers.{names[0]}")


def cmd_quiver_tensor(p1: BoundQuiverPresentation, p2: BoundQuiverPresentation, out: str | None) -> Outcome:
    tq, rels = tensor_quiver(p1.quiver, p2.quiver, p1.relations, p2.relations)
    product = {"quiver": tq.to_json(), "relations": [relation_to_json(tq, r) for r in rels]}
    if out:
        FsPath(out).write_text(json.dumps(product, indent=1, sort_keys=True) + "\n")
    hered = tensor_hereditary_check(p1, p2)
    return Outcome({
        "vertices": tq.n,
        "arrows": len(tq.arrows),
        "relations": len(rels),
        "hereditary": hered,
        "product": product,
        "written_to": FsPath(out).name if out else None,
    }, EXIT_POSITIVE if hered else EXIT_NEGATIVE)


# -- suite --------------------------------------------------------------------


def fixture_dir() -> FsPath:
    return FsPath(str(resources.files("monicrep") / "fixtures"))


def _run_expectation(ws: Workspace, exp: dict, bound: int) -> tuple[bool, dict]:
    kind = exp["command"]
    rep = exp.get("representation")
    b = exp.get("bound", bound)
    if kind == "check-monic":
        out = cmd_check_monic(ws, rep)
    elif kind == "check-gp":
        out = cmd_check_gp(ws, rep, b)
    elif kind == "coker-phi":
        out = cmd_coker_phi(ws, rep)
    elif kind == "window":
        out = cmd_window(ws, rep, exp.get("N", 3))
    elif kind == "algebra-info":
        out = cmd_algebra_info(ws, exp.get("algebra"), b)
    elif kind == "projective":
        x = ws.representation(ws.pick("representations", rep))
        proj = is_projective(to_flat_module(x))
        out = Outcome({"projective": proj}, EXIT_POSITIVE if proj else EXIT_NEGATIVE)
    else:
        raise InputError("expected", f"unknown command {kind!r}")
    got = {"exit": out.code}
    ok = out.code == exp["exit"]
    for key, want in exp.get("fields", {}).items():
        have = _dig(out.result, key)
        got[key] = have
        ok = ok and have == want
    return ok, got


def _dig(doc: Any, dotted: str) -> Any:
    for part in dotted.split("."):
        if isinstance(doc, dict):
            doc = doc.get(part)
        elif isinstance(doc, list) and part.isdigit() and int(part) < len(doc):
            doc = doc[int(part)]
        else:
            return None
    return doc


def _harnesses(bound: int, seed: int, budget: int, jobs: int) -> list[dict]:
    items = []
    k2 = field_algebra(GF2)
    a = truncated_polynomial(GF2, 2)
    a2 = Quiver.linear(2)
    ka2 = path_algebra(a2, GF2)

    def item(name: str, ok: bool, detail: dict) -> None:
        items.append({"item": name, "ok": bool(ok), "detail": detail})

    # projectives of bound quiver algebras are monic exactly for hereditary algebras
    loop = Quiver.build(["1"], [("l", "1", "1")])
    sq = BoundQuiverPresentation(loop, (RelationElement(((1, loop.path_from_names(["l", "l"])),)),), 2)
    for label, alg in (("loop with square zero", bound_quiver_algebra(sq, GF2)), ("kA2", ka2),
                       ("kA3", path_algebra(Quiver.linear(3), GF2))):
        r = projectives_monic_bound_quiver(alg, bound)
        item(f"projectives monic vs hereditary: {label}", r.consistent, r.to_json())

    for label, alg in (("F2[x]/(x^2)", a), ("F2", k2), ("kA2", ka2)):
        r = theorem_5_1_harness(alg, a2, 2, budget, bound, seed, jobs)
        item(f"Mon = GP iff self-injective: {label}", r.consistent, r.to_json())
    for label, alg in (("F2", k2), ("F2[x]/(x^2)", a)):
        r = theorem_5_4_harness(alg, a2, 2, budget, bound, seed, jobs)
        item(f"P = Mon iff hereditary: {label}", r.consistent, r.to_json())

    sampler = RepSampler(a, a2, 2, seed)
    reps = sampler.sample(min(budget, 200))
    bad = 0
    for x in reps:
        v1 = gp_decide_path_algebra(x, bound)
        v2 = gp_decide_by_split(x, bound)
        v3 = perp_oracle(x, bound)
        exact = [v.status for v in (v1, v2, v3) if v.is_exact]
        bad += len(set(exact)) > 1
    item("monic criterion vs triangular criterion vs Ext oracle on T2(F2[x]/(x^2))", bad == 0,
         {"instances": len(reps), "disagreements": bad})
    return items


def cmd_suite(bound: int, seed: int, budget: int, jobs: int, fixtures: str | None, inputs: list) -> Outcome:
    root = FsPath(fixtures) if fixtures else fixture_dir()
    items = []
    for path in sorted(root.glob("*.json")):
        try:
            ws, digest = load_workspace(path)
            inputs.append({"file": path.name, "sha256": digest})
            ws.resolve_all()
            for exp in ws.doc.get("expected", []):
                ok, got = _run_expectation(ws, exp, bound)
                items.append({"item": f"{path.stem}: {exp['command']} {exp.get('representation', '')}".rstrip(),
                              "ok": ok, "detail": got})
        except (InputError, KeyError, TypeError) + _PRECONDITION as exc:
            items.append({"item": path.stem, "ok": False, "detail": {"error": str(exc)}})
    notes = []
    if budget > 0:
        items.extend(_harnesses(bound, seed, budget, jobs))
    else:
        notes.append("budget 0: harnesses skipped")
    passed = sum(i["ok"] for i in items)
    result = {"passed": passed, "failed": len(items) - passed, "items": items, "notes": notes}
    return Outcome(result, EXIT_POSITIVE if passed == len(items) else EXIT_NEGATIVE)


# -- rendering ----------------------------------------------------------------


def _text(report: dict) -> str:
    lines = [f"command: {report['command']}"]
    for inp in report["inputs"]:
        lines.append(f"input: {inp['file']} sha256={inp['sha256'][:16]}")
    res = report["result"]
    cmd = report["command"]
    if "error" in report:
        lines.append(f"error: {report['error']}")
    elif cmd == "check-monic":
        m = res["monic"]
        lines.append(f"monic: {'yes' if m['is_monic'] else 'no'}")
        for v in m["per_vertex"]:
            lines.append(f"  vertex {v['vertex']}: m1={v['m1']} m2={v['m2']} rank {v['collected_rank']}/{v['collected_cols']}")
        if m["first_failure"]:
            lines.append(f"first failure: {json.dumps(m['first_failure'], sort_keys=True)}")
    elif cmd == "check-gp":
        v = res["verdict"]
        lines.append(f"verdict: {v['status']} via {v['route']} (bound {v['bound']})")
        if v["witness"]:
            lines.append(f"witness: {json.dumps(v['witness'], sort_keys=True)}")
    elif cmd == "suite":
        for it in res["items"]:
            lines.append(f"{'PASS' if it['ok'] else 'FAIL'}  {it['item']}")
        for note in res["notes"]:
            lines.append(f"note: {note}")
        lines.append(f"passed {res['passed']}, failed {res['failed']}")
    else:
        for key, val in res.items():
            lines.append(f"{key}: {json.dumps(val, sort_keys=True) if isinstance(val, (dict, list)) else val}")
    if report.get("bound") is not None:
        lines.append(f"bound: {report['bound']}")
    if report.get("seed") is not None:
        lines.append(f"seed: {report['seed']}")
    if "wall_clock_s" in report:
        lines.append(f"wall clock: {report['wall_clock_s']:.3f} s")
    lines.append(f"exit: {report['exit_code']}")
    return "\n".join(lines)


# -- entry point --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="monicrep", description="Monic and Gorenstein-projective representations.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--report", choices=("json", "text"), default="text")
    common.add_argument("--timing", action="store_true", help="include wall-clock time (reports stop being byte-stable)")
    sub = parser.add_subparsers(dest="command", required=True)

    def rep_cmd(name: str, help_: str, bound: bool = False) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("file")
        p.add_argument("--rep", help="representation name when the file holds several")
        if bound:
            p.add_argument("--bound", type=int, default=DEFAULT_BOUND)
        return p

    rep_cmd("check-monic", "decide whether a representation is monic")
    rep_cmd("check-gp", "decide Gorenstein-projectivity over the path algebra", bound=True)
    rep_cmd("coker-phi", "cokernel of phi at the top vertex of a monic representation")
    w = rep_cmd("window", "assemble and verify a complete resolution window")
    w.add_argument("-N", type=int, default=3)
    ai = sub.add_parser("algebra-info", parents=[common], help="classification report of an algebra")
    ai.add_argument("file")
    ai.add_argument("--algebra")
    ai.add_argument("--bound", type=int, default=DEFAULT_BOUND)
    qt = sub.add_parser("quiver-tensor", parents=[common], help="tensor product of two quivers")
    qt.add_argument("q1")
    qt.add_argument("q2")
    qt.add_argument("--out", help="write the product quiver and relations to this file")
    su = sub.add_parser("suite", parents=[common], help="bundled fixtures and harnesses")
    su.add_argument("--bound", type=int, default=DEFAULT_BOUND)
    su.add_argument("--seed", type=int, default=0)
    su.add_argument("--budget", type=int, default=DEFAULT_CAP)
    su.add_argument("--jobs", type=int, default=1)
    su.add_argument("--fixtures", help="directory of fixture files (default: the bundled ones)")
    return parser


def run(argv: list[str] | None = None) -> tuple[dict, int]:
    args = build_parser().parse_args(argv)
    inputs: list = []
    start = time.perf_counter()
    bound = getattr(args, "bound", None)
    seed = getattr(args, "seed", None)
    report: dict[str, Any] = {"command": args.command, "inputs": inputs, "bound": bound, "seed": seed}
    dispatch: dict[str, Callable[[], Outcome]] = {
        "check-monic": lambda: cmd_check_monic(_workspace(args.file, inputs), args.rep),
        "check-gp": lambda: cmd_check_gp(_workspace(args.file, inputs), args.rep, args.bound),
        "coker-phi": lambda: cmd_coker_phi(_workspace(args.file, inputs), args.rep),
        "window": lambda: cmd_window(_workspace(args.file, inputs), args.rep, args.N),
        "algebra-info": lambda: cmd_algebra_info(_workspace(args.file, inputs), args.algebra, args.bound),
        "quiver-tensor": lambda: cmd_quiver_tensor(_presentation_file(args.q1, inputs),
                                                   _presentation_file(args.q2, inputs), args.out),
        "suite": lambda: cmd_suite(args.bound, args.seed, args.budget, args.jobs, args.fixtures, inputs),
    }
    try:
        out = dispatch[args.command]()
        report["result"] = out.result
        code = out.code
    except InputError as exc:
        report["result"] = {}
        report["error"] = {"where": exc.where, "message": exc.message}
        code = EXIT_INPUT
    except _PRECONDITION + (AlgebraError,) as exc:
        report["result"] = {}
        report["error"] = {"where": type(exc).__name__, "message": str(exc)}
        code = EXIT_INPUT
    report["exit_code"] = code
    if args.timing:
        report["wall_clock_s"] = round(time.perf_counter() - start, 6)
    report["_format"] = args.report
    return report, code


def main(argv: list[str] | None = None) -> int:
    report, code = run(argv)
    fmt = report.pop("_format")
    if fmt == "json":
        sys.stdout.write(json.dumps(report, sort_keys=True, indent=1) + "\n")
    else:
        if "error" in report:
            report["error"] = f"{report['error']['where']}: {report['error']['message']}"
        sys.stdout.write(_text(report) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
