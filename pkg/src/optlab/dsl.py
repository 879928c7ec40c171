"""Line-oriented text format for theories, named payloads, and circuits.

One statement per line, ``#`` starts a comment, and numeric payloads are
literal JSON arrays (complex scalars as two-element ``[re,im]`` pairs).
A file fixes the theory, declares primitive systems, defines named states,
effects, boxes, and outcome-labelled tests by payload, and wires names into
circuits with ``;`` (in sequence) and ``*`` (side by side)::

    theory quantum
    system Q dim=2
    state plus : Q = vec=[0.70710678118654752, 0.70710678118654752]
    box flip : Q -> Q = kraus=[[[0,1],[1,0]]]
    circuit readout = plus ; flip ; trace(Q)

Parsing, printing, and binding are separate stages: ``parse`` produces an
abstract document (or the first located error), ``print_document`` renders
it canonically so parse/print round-trips are exact, and ``bind`` compiles
every payload onto the declared backend, certifying physicality as it goes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .backends import get_backend
from .backends.base import Channel, EffectVector, Payload, StateVector, Tolerances, TheoryBackend
from .diagram import (
    Diagram,
    Identity,
    OutcomeSpace,
    PrimitiveBox,
    Swap,
    SystemType,
    Test,
    par,
    seq,
    singleton_test,
    test_par,
    test_seq,
)
from .errors import DslParseError, OptlabError, UnknownBoxError
from .evaluator import trace_box
from .serialize import format_float

__all__ = [
    "PayloadLiteral",
    "SystemDecl",
    "StateDef",
    "EffectDef",
    "BoxDef",
    "TestDef",
    "CircuitDef",
    "Ref",
    "IdExpr",
    "SwapExpr",
    "TraceExpr",
    "SeqExpr",
    "ParExpr",
    "Document",
    "Workbench",
    "parse",
    "print_document",
    "bind",
    "load",
]

THEORIES = ("quantum", "quantum-real", "classical")

_IDENT_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_IDENT_CONT = _IDENT_START | set("0123456789")
_LABEL_CHARS = _IDENT_CONT


# ---------------------------------------------------------------------------
# abstract document
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PayloadLiteral:
    """A payload kind plus its parsed numeric content (nested tuples)."""

    kind: str
    data: tuple

    def to_payload(self) -> Payload:
        return Payload(self.kind, _tuples_to_lists(self.data))


def _tuples_to_lists(x):
    if isinstance(x, tuple):
        return [_tuples_to_lists(v) for v in x]
    return x


@dataclass(frozen=True)
class SystemDecl:
    name: str
    dim: int
    line: int = field(compare=False, default=0)


@dataclass(frozen=True)
class StateDef:
    name: str
    system: tuple[str, ...]
    payload: PayloadLiteral
    line: int = field(compare=False, default=0)


@dataclass(frozen=True)
class EffectDef:
    name: str
    system: tuple[str, ...]
    payload: PayloadLiteral
    line: int = field(compare=False, default=0)


@dataclass(frozen=True)
class BoxDef:
    name: str
    input_word: tuple[str, ...]
    output_word: tuple[str, ...]
    payload: PayloadLiteral
    line: int = field(compare=False, default=0)


@dataclass(frozen=True)
class TestDef:
    name: str
    input_word: tuple[str, ...]
    output_word: tuple[str, ...]
    labels: tuple[str, ...]
    branches: tuple[PayloadLiteral, ...]
    line: int = field(compare=False, default=0)


# circuit expression terms


@dataclass(frozen=True)
class Ref:
    name: str


@dataclass(frozen=True)
class IdExpr:
    word: tuple[str, ...]


@dataclass(frozen=True)
class SwapExpr:
    left: tuple[str, ...]
    right: tuple[str, ...]


@dataclass(frozen=True)
class TraceExpr:
    word: tuple[str, ...]


@dataclass(frozen=True)
class SeqExpr:
    first: object
    second: object


@dataclass(frozen=True)
class ParExpr:
    left: object
    right: object


@dataclass(frozen=True)
class CircuitDef:
    name: str
    expr: object
    line: int = field(compare=False, default=0)


@dataclass(frozen=True)
class Document:
    theory: str
    statements: tuple

    @property
    def systems(self) -> dict[str, int]:
        return {s.name: s.dim for s in self.statements if isinstance(s, SystemDecl)}


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------


class _Cursor:
    """Single-line scanner with 1-based column reporting."""

    def __init__(self, text: str, line_no: int) -> None:
        self.text = text
        self.line = line_no
        self.pos = 0

    def fail(self, message: str, expected=None, col: int | None = None):
        raise DslParseError(message, self.line, self.pos + 1 if col is None else col, expected)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    @property
    def done(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def try_punct(self, token: str) -> bool:
        self.skip_ws()
        if self.text.startswith(token, self.pos):
            self.pos += len(token)
            return True
        return False

    def expect_punct(self, token: str) -> None:
        if not self.try_punct(token):
            self.fail(f"missing {token!r}", expected=[repr(token)])

    def word(self, chars_start=_IDENT_START, chars_cont=_IDENT_CONT) -> str | None:
        self.skip_ws()
        if self.pos >= len(self.text) or self.text[self.pos] not in chars_start:
            return None
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] in chars_cont:
            self.pos += 1
        return self.text[start:self.pos]

    def expect_name(self, what: str) -> str:
        w = self.word()
        if w is None:
            self.fail(f"missing {what}", expected=["name"])
        return w

    def expect_label(self, what: str = "outcome label") -> str:
        self.skip_ws()
        w = self.word(chars_start=_LABEL_CHARS, chars_cont=_LABEL_CHARS)
        if w is None:
            self.fail(f"missing {what}", expected=["label"])
        return w

    def expect_int(self, what: str) -> int:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start:
            self.fail(f"missing {what}", expected=["integer"])
        return int(self.text[start:self.pos])

    def expect_end(self) -> None:
        if not self.done:
            self.fail(f"unexpected trailing text {self.text[self.pos:]!r}",
                      expected=["end of line"])


def _parse_sysexpr(cur: _Cursor) -> tuple[str, ...]:
    labels: list[str] = []
    while True:
        name = cur.word()
        if name is None:
            cur.fail("missing system expression", expected=["system name", "I"])
        if name != "I":
            labels.append(name)
        if not cur.try_punct("*"):
            return tuple(labels)


_PAYLOAD_KINDS = ("choi", "kraus", "stoch", "vec", "dens")


def _scan_bracketed(cur: _Cursor) -> tuple[str, int]:
    """Take a balanced [...] span starting at the cursor; returns (span, col)."""
    cur.skip_ws()
    start = cur.pos
    if start >= len(cur.text) or cur.text[start] != "[":
        cur.fail("missing '[' opening a payload literal", expected=["'['"])
    depth = 0
    i = start
    while i < len(cur.text):
        c = cur.text[i]
        if c == "[":
            depth += 1
        elif c == "]":
            depth -= 1
            if depth == 0:
                cur.pos = i + 1
                return cur.text[start:i + 1], start + 1
        i += 1
    cur.fail("unbalanced brackets in payload literal", col=start + 1)


def _reject_constant(name: str):
    raise ValueError(f"non-finite number {name!r} is not allowed")


def _parse_payload(cur: _Cursor, theory: str) -> PayloadLiteral:
    kind = cur.word()
    if kind is None or kind not in _PAYLOAD_KINDS:
        cur.fail("missing payload kind", expected=list(_PAYLOAD_KINDS))
    cur.expect_punct("=")
    span, col = _scan_bracketed(cur)
    try:
        raw = json.loads(span, parse_constant=_reject_constant)
    except json.JSONDecodeError as e:
        cur.fail(f"bad payload literal: {e.msg}", col=col + e.pos)
    except ValueError as e:
        cur.fail(f"bad payload literal: {e}", col=col)
    complex_ok = theory != "classical" and kind != "stoch"
    try:
        data = _payload_tree(kind, raw, complex_ok)
    except ValueError as e:
        cur.fail(str(e), col=col)
    return PayloadLiteral(kind, data)


def _scalar(x, complex_ok: bool):
    if isinstance(x, bool):
        raise ValueError("payload entries must be numbers")
    if isinstance(x, (int, float)):
        return float(x)
    if (
        complex_ok
        and isinstance(x, list)
        and len(x) == 2
        and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in x)
    ):
        return complex(float(x[0]), float(x[1]))
    if isinstance(x, list) and not complex_ok:
        raise ValueError("complex [re,im] entries are not allowed here")
    raise ValueError(f"payload entry {x!r} is neither a number nor a [re,im] pair")


def _vector(x, complex_ok):
    if not isinstance(x, list) or not x:
        raise ValueError("expected a non-empty vector")
    return tuple(_scalar(v, complex_ok) for v in x)


def _matrix(x, complex_ok):
    if not isinstance(x, list) or not x or not all(isinstance(r, list) for r in x):
        raise ValueError("expected a non-empty matrix (list of rows)")
    rows = tuple(_vector(r, complex_ok) for r in x)
    if len({len(r) for r in rows}) != 1:
        raise ValueError("matrix rows have unequal lengths")
    return rows


def _payload_tree(kind: str, raw, complex_ok: bool) -> tuple:
    if kind == "vec":
        return _vector(raw, complex_ok)
    if kind in ("dens", "choi", "stoch"):
        return _matrix(raw, complex_ok)
    if kind == "kraus":
        if not isinstance(raw, list) or not raw:
            raise ValueError("expected a non-empty list of matrices")
        mats = tuple(_matrix(m, complex_ok) for m in raw)
        if len({(len(m), len(m[0])) for m in mats}) != 1:
            raise ValueError("kraus matrices have unequal shapes")
        return mats
    raise ValueError(f"unknown payload kind {kind!r}")


def _parse_expr(cur: _Cursor):
    term = _parse_par(cur)
    while cur.try_punct(";"):
        term = SeqExpr(term, _parse_par(cur))
    return term


def _parse_par(cur: _Cursor):
    term = _parse_atom(cur)
    while cur.try_punct("*"):
        term = ParExpr(term, _parse_atom(cur))
    return term


def _parse_atom(cur: _Cursor):
    if cur.try_punct("("):
        inner = _parse_expr(cur)
        cur.expect_punct(")")
        return inner
    name = cur.word()
    if name is None:
        cur.fail("missing circuit term", expected=["name", "id(", "swap(", "trace(", "("])
    if name == "id":
        cur.expect_punct("(")
        word = _parse_sysexpr(cur)
        cur.expect_punct(")")
        return IdExpr(word)
    if name == "swap":
        cur.expect_punct("(")
        left = _parse_sysexpr(cur)
        cur.expect_punct(",")
        right = _parse_sysexpr(cur)
        cur.expect_punct(")")
        return SwapExpr(left, right)
    if name == "trace":
        cur.expect_punct("(")
        word = _parse_sysexpr(cur)
        cur.expect_punct(")")
        return TraceExpr(word)
    return Ref(name)


_STATEMENT_WORDS = ("theory", "system", "state", "effect", "box", "test", "circuit")


def parse(text: str) -> Document:
    """Parse a workbench file; the first problem raises a located error."""
    theory: str | None = None
    statements: list = []
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        cur = _Cursor(line, line_no)
        head = cur.word(chars_start=_IDENT_START, chars_cont=_IDENT_CONT | {"-"})
        if head is None or head not in _STATEMENT_WORDS:
            cur.fail(
                f"unknown statement {head if head is not None else cur.peek()!r}",
                expected=list(_STATEMENT_WORDS), col=1,
            )
        if head == "theory":
            if theory is not None:
                cur.fail("duplicate theory declaration", col=1)
            if statements:
                cur.fail("the theory declaration must come first", col=1)
            name = cur.word(chars_start=_IDENT_START, chars_cont=_IDENT_CONT | {"-"})
            if name is None or name not in THEORIES:
                cur.fail("unknown theory", expected=list(THEORIES))
            theory = name
            cur.expect_end()
            continue
        if theory is None:
            cur.fail("file must start with a theory declaration", col=1,
                     expected=["theory"])
        if head == "system":
            name = cur.expect_name("system name")
            if name == "I":
                cur.fail("'I' names the trivial system and cannot be declared")
            w = cur.word()
            if w != "dim":
                cur.fail("missing 'dim='", expected=["dim"])
            cur.expect_punct("=")
            dim = cur.expect_int("system dimension")
            if dim < 1:
                cur.fail("system dimension must be at least 1")
            cur.expect_end()
            statements.append(SystemDecl(name, dim, line_no))
        elif head in ("state", "effect"):
            name = cur.expect_name(f"{head} name")
            cur.expect_punct(":")
            word = _parse_sysexpr(cur)
            cur.expect_punct("=")
            payload = _parse_payload(cur, theory)
            cur.expect_end()
            cls = StateDef if head == "state" else EffectDef
            statements.append(cls(name, word, payload, line_no))
        elif head == "box":
            name = cur.expect_name("box name")
            cur.expect_punct(":")
            win = _parse_sysexpr(cur)
            cur.expect_punct("->")
            wout = _parse_sysexpr(cur)
            cur.expect_punct("=")
            payload = _parse_payload(cur, theory)
            cur.expect_end()
            statements.append(BoxDef(name, win, wout, payload, line_no))
        elif head == "test":
            name = cur.expect_name("test name")
            cur.expect_punct(":")
            win = _parse_sysexpr(cur)
            cur.expect_punct("->")
            wout = _parse_sysexpr(cur)
            w = cur.word()
            if w != "outcomes":
                cur.fail("missing 'outcomes={...}'", expected=["outcomes"])
            cur.expect_punct("=")
            cur.expect_punct("{")
            labels = [cur.expect_label()]
            while cur.try_punct(","):
                labels.append(cur.expect_label())
            cur.expect_punct("}")
            if len(set(labels)) != len(labels):
                cur.fail("duplicate outcome label")
            cur.expect_punct("{")
            branch_map: dict[str, PayloadLiteral] = {}
            while True:
                label = cur.expect_label("branch label")
                if label not in labels:
                    cur.fail(f"branch label {label!r} is not in the outcome set",
                             expected=labels)
                if label in branch_map:
                    cur.fail(f"duplicate branch for outcome {label!r}")
                cur.expect_punct(":")
                branch_map[label] = _parse_payload(cur, theory)
                if cur.try_punct(";") and cur.peek() != "}":
                    continue
                cur.expect_punct("}")
                break
            missing = [l for l in labels if l not in branch_map]
            if missing:
                cur.fail(f"missing branch for outcome {missing[0]!r}")
            cur.expect_end()
            statements.append(TestDef(
                name, win, wout, tuple(labels),
                tuple(branch_map[l] for l in labels), line_no,
            ))
        elif head == "circuit":
            name = cur.expect_name("circuit name")
            cur.expect_punct("=")
            expr = _parse_expr(cur)
            cur.expect_end()
            statements.append(CircuitDef(name, expr, line_no))
    if theory is None:
        raise DslParseError("empty file: missing theory declaration", 1, 1,
                            expected=["theory"])
    return Document(theory, tuple(statements))


# ---------------------------------------------------------------------------
# canonical printing
# ---------------------------------------------------------------------------


def _print_scalar(x, pair_form: bool) -> str:
    if pair_form:
        z = complex(x)
        return f"[{format_float(z.real)},{format_float(z.imag)}]"
    return format_float(float(np.real(x)))


def _print_payload(p: PayloadLiteral, theory: str) -> str:
    pair_form = theory != "classical" and p.kind != "stoch"

    def render(node) -> str:
        if isinstance(node, tuple):
            return "[" + ",".join(render(v) for v in node) + "]"
        return _print_scalar(node, pair_form)

    return f"{p.kind}={render(p.data)}"


def _print_word(word: tuple[str, ...]) -> str:
    return " * ".join(word) if word else "I"


def _print_expr(e, inside_par: bool = False) -> str:
    if isinstance(e, Ref):
        return e.name
    if isinstance(e, IdExpr):
        return f"id({_print_word(e.word)})"
    if isinstance(e, SwapExpr):
        return f"swap({_print_word(e.left)}, {_print_word(e.right)})"
    if isinstance(e, TraceExpr):
        return f"trace({_print_word(e.word)})"
    if isinstance(e, SeqExpr):
        # ';' is left-associative, so only a right-nested chain needs parens.
        second = _print_expr(e.second)
        if isinstance(e.second, SeqExpr):
            second = f"({second})"
        text = f"{_print_expr(e.first)} ; {second}"
        return f"({text})" if inside_par else text
    if isinstance(e, ParExpr):
        right = _print_expr(e.right, inside_par=True)
        if isinstance(e.right, ParExpr):
            right = f"({right})"
        return f"{_print_expr(e.left, inside_par=True)} * {right}"
    raise OptlabError(f"cannot print expression node {type(e).__name__}")


def print_document(doc: Document) -> str:
    """Render canonically; parsing the result reproduces the document."""
    lines = [f"theory {doc.theory}"]
    for s in doc.statements:
        if isinstance(s, SystemDecl):
            lines.append(f"system {s.name} dim={s.dim}")
        elif isinstance(s, StateDef):
            lines.append(f"state {s.name} : {_print_word(s.system)} = "
                         f"{_print_payload(s.payload, doc.theory)}")
        elif isinstance(s, EffectDef):
            lines.append(f"effect {s.name} : {_print_word(s.system)} = "
                         f"{_print_payload(s.payload, doc.theory)}")
        elif isinstance(s, BoxDef):
            lines.append(f"box {s.name} : {_print_word(s.input_word)} -> "
                         f"{_print_word(s.output_word)} = "
                         f"{_print_payload(s.payload, doc.theory)}")
        elif isinstance(s, TestDef):
            branches = "; ".join(
                f"{label}: {_print_payload(p, doc.theory)}"
                for label, p in zip(s.labels, s.branches)
            )
            lines.append(
                f"test {s.name} : {_print_word(s.input_word)} -> "
                f"{_print_word(s.output_word)} "
                f"outcomes={{{','.join(s.labels)}}} {{ {branches} }}"
            )
        elif isinstance(s, CircuitDef):
            lines.append(f"circuit {s.name} = {_print_expr(s.expr)}")
        else:
            raise OptlabError(f"cannot print statement {type(s).__name__}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# binding
# ---------------------------------------------------------------------------


@dataclass
class Workbench:
    """A document compiled onto its backend: everything named, resolved."""

    document: Document
    backend: TheoryBackend
    bindings: dict[str, Channel]
    circuits: dict[str, Diagram]
    tests: dict[str, Test]
    kinds: dict[str, str]  # name -> state | effect | box | test | circuit

    def state_vector(self, name: str) -> StateVector:
        if self.kinds.get(name) != "state":
            raise UnknownBoxError(f"no state named {name!r}")
        return self.backend.channel_state(self.bindings[name])

    def effect_vector(self, name: str) -> EffectVector:
        if self.kinds.get(name) != "effect":
            raise UnknownBoxError(f"no effect named {name!r}")
        return self.backend.channel_effect(self.bindings[name])

    def diagram(self, name: str) -> Diagram:
        """Any named deterministic piece: box, state, effect, or circuit."""
        kind = self.kinds.get(name)
        if kind == "circuit":
            return self.circuits[name]
        if kind in ("state", "effect", "box"):
            ch = self.bindings[name]
            return PrimitiveBox(name, ch.input_type, ch.output_type)
        if kind == "test":
            raise UnknownBoxError(f"{name!r} is a test, not a deterministic circuit")
        raise UnknownBoxError(f"no circuit, box, state, or effect named {name!r}")

    def test(self, name: str) -> Test:
        """A declared test or a circuit that composes tests."""
        if self.kinds.get(name) != "test":
            raise UnknownBoxError(f"no test or test circuit named {name!r}")
        return self.tests[name]


def _as_test(piece) -> Test:
    return piece if isinstance(piece, Test) else singleton_test(piece)


def _compose_seq(a, b):
    if isinstance(a, Test) or isinstance(b, Test):
        return test_seq(_as_test(a), _as_test(b))
    return seq(a, b)


def _compose_par(a, b):
    if isinstance(a, Test) or isinstance(b, Test):
        return test_par(_as_test(a), _as_test(b))
    return par(a, b)


def _located(line: int):
    """Decorator-ish context: re-raise package errors with the source line."""
    class _Ctx:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc is not None and isinstance(exc, OptlabError) and not isinstance(exc, DslParseError):
                exc.args = (f"line {line}: {exc}",)
            return False

    return _Ctx()


def bind(doc: Document, tol: Tolerances | None = None) -> Workbench:
    """Compile a document onto its backend, certifying every payload."""
    backend = get_backend(doc.theory, doc.systems, tol=tol)
    bindings: dict[str, Channel] = {}
    circuits: dict[str, Diagram] = {}
    tests: dict[str, Test] = {}
    kinds: dict[str, str] = {}

    def claim(name: str, kind: str, line: int) -> None:
        if name in kinds:
            raise DslParseError(f"duplicate definition of {name!r}", line, 1)
        kinds[name] = kind

    def word_of(labels: tuple[str, ...], line: int) -> SystemType:
        for label in labels:
            if label not in backend.systems:
                raise DslParseError(f"undeclared system {label!r}", line, 1)
        return SystemType(labels)

    def to_piece(e, line: int):
        """A circuit expression is a Diagram, or a Test once any test is wired in."""
        if isinstance(e, Ref):
            kind = kinds.get(e.name)
            if kind == "circuit":
                return circuits[e.name]
            if kind == "test":
                return tests[e.name]
            if kind in ("state", "effect", "box"):
                ch = bindings[e.name]
                return PrimitiveBox(e.name, ch.input_type, ch.output_type)
            raise DslParseError(f"unknown name {e.name!r}", line, 1)
        if isinstance(e, IdExpr):
            return Identity(word_of(e.word, line))
        if isinstance(e, SwapExpr):
            return Swap(word_of(e.left, line), word_of(e.right, line))
        if isinstance(e, TraceExpr):
            return trace_box(word_of(e.word, line))
        if isinstance(e, SeqExpr):
            with _located(line):
                return _compose_seq(to_piece(e.first, line), to_piece(e.second, line))
        if isinstance(e, ParExpr):
            with _located(line):
                return _compose_par(to_piece(e.left, line), to_piece(e.right, line))
        raise OptlabError(f"cannot bind expression node {type(e).__name__}")

    for s in doc.statements:
        if isinstance(s, SystemDecl):
            continue
        if isinstance(s, StateDef):
            claim(s.name, "state", s.line)
            with _located(s.line):
                bindings[s.name] = backend.compile_payload(
                    s.payload.to_payload(), SystemType(()), word_of(s.system, s.line)
                )
        elif isinstance(s, EffectDef):
            claim(s.name, "effect", s.line)
            with _located(s.line):
                bindings[s.name] = backend.compile_payload(
                    s.payload.to_payload(), word_of(s.system, s.line), SystemType(())
                )
        elif isinstance(s, BoxDef):
            claim(s.name, "box", s.line)
            with _located(s.line):
                bindings[s.name] = backend.compile_payload(
                    s.payload.to_payload(),
                    word_of(s.input_word, s.line),
                    word_of(s.output_word, s.line),
                )
        elif isinstance(s, TestDef):
            claim(s.name, "test", s.line)
            win = word_of(s.input_word, s.line)
            wout = word_of(s.output_word, s.line)
            branch_boxes = []
            for label, payload in zip(s.labels, s.branches):
                branch_name = f"{s.name}.{label}"
                with _located(s.line):
                    bindings[branch_name] = backend.compile_payload(
                        payload.to_payload(), win, wout
                    )
                branch_boxes.append(PrimitiveBox(branch_name, win, wout))
            tests[s.name] = Test(OutcomeSpace(s.labels), tuple(branch_boxes))
        elif isinstance(s, CircuitDef):
            if s.name in kinds:
                raise DslParseError(f"duplicate definition of {s.name!r}", s.line, 1)
            piece = to_piece(s.expr, s.line)
            if isinstance(piece, Test):
                claim(s.name, "test", s.line)
                tests[s.name] = piece
            else:
                claim(s.name, "circuit", s.line)
                circuits[s.name] = piece
        else:
            raise OptlabError(f"cannot bind statement {type(s).__name__}")

    return Workbench(doc, backend, bindings, circuits, tests, kinds)


def load(text: str, tol: Tolerances | None = None) -> Workbench:
    """Parse and bind in one go."""
    return bind(parse(text), tol=tol)
