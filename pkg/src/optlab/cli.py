"""Command-line front end: evaluate circuits, run tests, audit axioms.

Every command reads one workbench file, prints a single JSON report to
standard output, and signals its verdict through the exit code:

* 0 — success (circuit evaluated, axiom holds, objects indistinguishable)
* 1 — a witnessed failure (axiom violated, purification impossible,
  channels distinguished); the JSON carries the witness
* 2 — usage, parse, or load errors (including unphysical payloads)
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from itertools import combinations_with_replacement

from . import audit, tomography
from .backends.base import Channel, EffectVector, StateVector
from .diagram import SystemType, singleton_test
from .dsl import Workbench, load
from .errors import (
    BackendLacksDilationError,
    BackendLacksPurificationError,
    CausalityViolationError,
    DslParseError,
    OptlabError,
)
from .evaluator import evaluate, run_test_circuit
from .sampling import Sampler
from .serialize import dumps_canonical

__all__ = ["main", "build_parser"]

USAGE_ERROR = 2
VIOLATION = 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="optlab",
        description="evaluate circuits and audit axioms of operational theories",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def cmd(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("file", help="workbench file to load")
        p.add_argument("--tol", type=float, default=1e-9,
                       help="decision tolerance for verdicts (default 1e-9)")
        p.add_argument("--seed", type=int, default=0,
                       help="seed for randomized audits (default 0)")
        p.add_argument("--trials", type=int, default=100,
                       help="random instances per audit (default 100)")
        return p

    p = cmd("eval", "evaluate a deterministic circuit to its transfer matrix")
    p.add_argument("--circuit", required=True, help="circuit name")

    p = cmd("prob", "run a closed test circuit and print its distribution")
    p.add_argument("--test-circuit", required=True, dest="test_circuit",
                   help="name of a closed test or test circuit")

    p = cmd("audit", "check an axiom over the file's declarations")
    p.add_argument(
        "--axiom", required=True,
        choices=["causality", "purification", "faithfulness", "local-tomography", "niwd"],
    )

    p = cmd("purify", "purify a named state onto an auxiliary system")
    p.add_argument("--state", required=True, help="state name")

    p = cmd("dilate", "dilate a named box to a reversible interaction")
    p.add_argument("--box", required=True, help="box name")

    p = cmd("steer", "recover a state decomposition by measuring the extension")
    p.add_argument("--state", required=True, help="joint state name")
    p.add_argument("--test", required=True, dest="test",
                   help="preparation test providing the target decomposition")

    p = cmd("equiv", "decide whether two boxes are operationally equivalent")
    p.add_argument("--box", required=True, help="first box or circuit")
    p.add_argument("--box2", required=True, help="second box or circuit")

    return parser


# ---------------------------------------------------------------------------
# JSON shaping
# ---------------------------------------------------------------------------


def _plain(obj):
    """Flatten report objects into JSON-ready structures."""
    if isinstance(obj, SystemType):
        return str(obj)
    if isinstance(obj, Channel):
        return {
            "input": str(obj.input_type),
            "output": str(obj.output_type),
            "kernel": obj.kernel,
        }
    if isinstance(obj, (StateVector, EffectVector)):
        return {"system": str(obj.system), "coords": obj.coords}
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {
            f.name: _plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)
        }
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def _emit(report: dict) -> None:
    sys.stdout.write(dumps_canonical(report))


def _run_meta(args) -> dict:
    return {"seed": args.seed, "tolerance": args.tol}


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _cmd_eval(wb: Workbench, args) -> int:
    diagram = wb.diagram(args.circuit)
    t = evaluate(diagram, wb.backend, wb.bindings)
    _emit({
        "command": "eval",
        "circuit": args.circuit,
        "input": str(t.input_type),
        "output": str(t.output_type),
        "transfer": t.matrix,
    })
    return 0


def _cmd_prob(wb: Workbench, args) -> int:
    name = args.test_circuit
    if wb.kinds.get(name) == "circuit":
        test = singleton_test(wb.circuits[name])
    else:
        test = wb.test(name)
    first = test.branches[0]
    if not (first.input_type.is_unit and first.output_type.is_unit):
        raise OptlabError(
            f"test circuit {name!r} is not closed: it has type "
            f"{first.input_type} -> {first.output_type}"
        )
    dist = run_test_circuit(test, wb.backend, wb.bindings)
    _emit(dict(dist.probs))
    return 0


def _cmd_purify(wb: Workbench, args) -> int:
    result = audit.purify_state(wb.backend, wb.state_vector(args.state))
    _emit({"command": "purify", "state": args.state, **_run_meta(args),
           **_plain(result)})
    return 0 if result.verdict == "Purified" else VIOLATION


def _cmd_dilate(wb: Workbench, args) -> int:
    if wb.kinds.get(args.box) != "box":
        raise OptlabError(f"no box named {args.box!r}")
    try:
        result = audit.stinespring_dilate(wb.backend, wb.bindings[args.box])
    except BackendLacksDilationError as e:
        _emit({"command": "dilate", "box": args.box, **_run_meta(args),
               "verdict": "Failure", "witness": str(e)})
        return VIOLATION
    report = _plain(result)
    report.pop("channel", None)  # the input box, restated; keep the report lean
    _emit({"command": "dilate", "box": args.box, **_run_meta(args),
           "verdict": "Dilated", **report})
    return 0


def _cmd_steer(wb: Workbench, args) -> int:
    psi = wb.state_vector(args.state)
    test = wb.test(args.test)
    branch_channels = [
        (label, wb.bindings[box.name]) for label, box in test.items()
    ]
    base_word = branch_channels[0][1].output_type
    for _, ch in branch_channels:
        if not ch.input_type.is_unit:
            raise OptlabError(
                f"test {args.test!r} does not prepare states: branch input is "
                f"{ch.input_type}"
            )
    joint = psi.system.word
    base = base_word.word
    if len(base) >= len(joint) or joint[:len(base)] != base:
        raise OptlabError(
            f"state {args.state!r} on {psi.system} does not extend the "
            f"prepared system {base_word}"
        )
    branches = [wb.backend.channel_state(ch) for _, ch in branch_channels]
    labels = [label for label, _ in branch_channels]
    try:
        result = audit.steering_measurement(
            wb.backend, branches, psi, base_word, labels=labels, tol=args.tol,
        )
    except OptlabError as e:
        _emit({"command": "steer", "state": args.state, "test": args.test,
               **_run_meta(args), "verdict": "Failure", "witness": str(e)})
        return VIOLATION
    report = _plain(result)
    report.pop("effect_objects", None)
    _emit({"command": "steer", "state": args.state, "test": args.test,
           **_run_meta(args), "verdict": "Steered", **report})
    return 0


def _cmd_equiv(wb: Workbench, args) -> int:
    report = tomography.equivalent(
        wb.diagram(args.box), wb.diagram(args.box2), wb.backend,
        bindings=wb.bindings, tol=args.tol,
    )
    payload = {"command": "equiv", "box": args.box, "box2": args.box2,
               **_run_meta(args), **_plain(report)}
    if report.witness is not None:
        p1, p2 = tomography.replay_witness(
            wb.backend, wb.diagram(args.box), wb.diagram(args.box2),
            report.witness, wb.bindings,
        )
        payload["witness"]["replayed"] = [p1, p2]
    _emit(payload)
    return 0 if report.verdict == "Equivalent" else VIOLATION


# -- audit ------------------------------------------------------------------


def _audit_causality(wb: Workbench, args) -> int:
    checks = []
    code = 0
    if wb.tests:
        try:
            report = audit.check_causality(
                wb.backend, list(wb.tests.values()), wb.bindings, tol=args.tol
            )
            checks.append({"source": "declared tests", **_plain(report),
                           "verdict": "Holds"})
        except CausalityViolationError as e:
            checks.append({"source": "declared tests", "verdict": "Violated",
                           "witness": str(e)})
            code = VIOLATION
    sampler = Sampler(wb.backend, seed=args.seed)
    random_tests = [
        sampler.observation_channels(sampler.word(), int(sampler.rng.integers(2, 5)))
        for _ in range(args.trials)
    ]
    try:
        report = audit.check_causality(wb.backend, random_tests, tol=args.tol)
        checks.append({"source": f"{args.trials} random observation tests",
                       **_plain(report), "verdict": "Holds"})
    except CausalityViolationError as e:
        checks.append({"source": f"{args.trials} random observation tests",
                       "verdict": "Violated", "witness": str(e)})
        code = VIOLATION
    _emit({"command": "audit", "axiom": "causality", **_run_meta(args),
           "verdict": "Violated" if code else "Holds", "checks": checks})
    return code


def _audit_purification(wb: Workbench, args) -> int:
    subjects: list[tuple[str, StateVector]] = [
        (name, wb.state_vector(name))
        for name, kind in wb.kinds.items() if kind == "state"
    ]
    if not subjects:
        sampler = Sampler(wb.backend, seed=args.seed)
        subjects = [
            (f"random[{i}]", sampler.state(sampler.word(max_len=1)))
            for i in range(args.trials)
        ]
    results = []
    code = 0
    for name, state in subjects:
        try:
            r = audit.purify_state(wb.backend, state)
        except BackendLacksPurificationError as e:
            results.append({"state": name, "verdict": "Failure", "witness": str(e)})
            code = VIOLATION
            continue
        results.append({"state": name, **_plain(r)})
        if r.verdict != "Purified":
            code = VIOLATION
    _emit({"command": "audit", "axiom": "purification", **_run_meta(args),
           "verdict": "Violated" if code else "Holds", "states": results})
    return code


def _audit_faithfulness(wb: Workbench, args) -> int:
    reports = []
    code = 0
    for name in sorted(wb.backend.systems):
        r = tomography.verify_faithfulness(
            wb.backend, SystemType.of(name), trials=args.trials,
            seed=args.seed, tol=args.tol,
        )
        reports.append({"system": name, **_plain(r)})
        if r.verdict != "Confirmed":
            code = VIOLATION
    _emit({"command": "audit", "axiom": "faithfulness", **_run_meta(args),
           "verdict": "Violated" if code else "Holds", "systems": reports})
    return code


def _audit_local_tomography(wb: Workbench, args) -> int:
    reports = []
    code = 0
    for a, b in combinations_with_replacement(sorted(wb.backend.systems), 2):
        r = tomography.local_tomography_check(
            wb.backend, SystemType.of(a), SystemType.of(b)
        )
        reports.append({"left": a, "right": b, **_plain(r)})
        if r.verdict != "Holds":
            code = VIOLATION
    _emit({"command": "audit", "axiom": "local-tomography", **_run_meta(args),
           "verdict": "Fails" if code else "Holds", "pairs": reports})
    return code


def _audit_niwd(wb: Workbench, args) -> int:
    reports = []
    code = 0
    applicable = 0
    for name, test in sorted(wb.tests.items()):
        first = test.branches[0]
        if first.input_type != first.output_type or first.input_type.is_unit:
            continue
        try:
            r = audit.niwd_check(wb.backend, test, wb.bindings, tol=args.tol)
        except OptlabError as e:
            reports.append({"test": name, "verdict": "NotApplicable",
                            "reason": str(e)})
            continue
        applicable += 1
        reports.append({"test": name, **_plain(r)})
        if r.verdict != "Holds":
            code = VIOLATION
    if not applicable:
        raise OptlabError(
            "no identity-summing test on matching systems to audit; "
            "declare a test with equal input and output"
        )
    _emit({"command": "audit", "axiom": "niwd", **_run_meta(args),
           "verdict": "Violated" if code else "Holds", "tests": reports})
    return code


_AUDITS = {
    "causality": _audit_causality,
    "purification": _audit_purification,
    "faithfulness": _audit_faithfulness,
    "local-tomography": _audit_local_tomography,
    "niwd": _audit_niwd,
}


def _cmd_audit(wb: Workbench, args) -> int:
    return _AUDITS[args.axiom](wb, args)


_COMMANDS = {
    "eval": _cmd_eval,
    "prob": _cmd_prob,
    "audit": _cmd_audit,
    "purify": _cmd_purify,
    "dilate": _cmd_dilate,
    "steer": _cmd_steer,
    "equiv": _cmd_equiv,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.file, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        _emit({"error": f"cannot read {args.file!r}: {e.strerror}"})
        return USAGE_ERROR
    try:
        wb = load(text)
    except DslParseError as e:
        _emit({"error": str(e), "line": e.line, "column": e.column})
        return USAGE_ERROR
    except OptlabError as e:
        _emit({"error": str(e)})
        return USAGE_ERROR
    try:
        return _COMMANDS[args.command](wb, args)
    except OptlabError as e:
        _emit({"error": str(e)})
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
