"""Circuit intermediate representation.

Systems are finite words of primitive labels; circuits are immutable terms
built from primitive boxes, identities, wire swaps, sequential composition
and parallel (side-by-side) composition.  Outcome-indexed families of
circuits ("tests") ride on top of plain circuits and compose the same way,
with outcome sets multiplying as Cartesian products.

Terms are plain frozen dataclasses: structural equality and hashing come for
free, and nothing mutates after construction, so sharing subterms across
threads or memo tables is safe.  The checked constructors :func:`seq` /
:func:`par` (also spelled ``>>`` and ``@``) are the intended way to build
composites; the raw dataclass constructors perform no wire checking, which
is what lets :func:`validate` exist as a separate diagnostic pass.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping

from .errors import TypeMismatchError, UnknownBoxError

__all__ = [
    "SystemType",
    "UNIT",
    "tensor_systems",
    "Diagram",
    "PrimitiveBox",
    "Identity",
    "Swap",
    "Seq",
    "Par",
    "seq",
    "par",
    "validate",
    "OutcomeSpace",
    "SINGLETON_OUTCOME",
    "Test",
    "singleton_test",
    "test_seq",
    "test_par",
]


# ---------------------------------------------------------------------------
# system types
# ---------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class SystemType:
    """A finite word of primitive system labels.

    The empty word is the trivial system (scalar wires live on it).  Tensoring
    is word concatenation, written ``a * b``.
    """

    word: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not isinstance(self.word, tuple):
            object.__setattr__(self, "word", tuple(self.word))
        for label in self.word:
            if not isinstance(label, str) or not label:
                raise ValueError(f"system labels must be non-empty strings, got {label!r}")

    @classmethod
    def of(cls, *labels: str) -> "SystemType":
        return cls(tuple(labels))

    def __mul__(self, other: "SystemType") -> "SystemType":
        if not isinstance(other, SystemType):
            return NotImplemented
        return SystemType(self.word + other.word)

    def __len__(self) -> int:
        return len(self.word)

    def __iter__(self) -> Iterator[str]:
        return iter(self.word)

    @property
    def is_unit(self) -> bool:
        return not self.word

    def __str__(self) -> str:
        return "*".join(self.word) if self.word else "I"

    def __repr__(self) -> str:
        return f"SystemType({self})"


#: The trivial (empty-word) system.
UNIT = SystemType(())


def tensor_systems(a: SystemType, b: SystemType) -> SystemType:
    """Concatenate two system words.  Associative with unit :data:`UNIT`."""
    return a * b


# ---------------------------------------------------------------------------
# circuit terms
# ---------------------------------------------------------------------------


class Diagram:
    """Base class for circuit terms.  Subclasses are frozen dataclasses."""

    input_type: SystemType
    output_type: SystemType

    # sugar shared by all terms; mirrors the usual string-diagram reading:
    # ``a >> b`` wires a's output into b, ``a @ b`` puts them side by side.
    def __rshift__(self, other: "Diagram") -> "Diagram":
        return seq(self, other)

    def __matmul__(self, other: "Diagram") -> "Diagram":
        return par(self, other)


@dataclass(frozen=True)
class PrimitiveBox(Diagram):
    """A named leaf with declared input and output wires."""

    name: str
    input_type: SystemType
    output_type: SystemType

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Identity(Diagram):
    """Do nothing on the given wires."""

    system: SystemType

    @property
    def input_type(self) -> SystemType:  # type: ignore[override]
        return self.system

    @property
    def output_type(self) -> SystemType:  # type: ignore[override]
        return self.system

    def __str__(self) -> str:
        return f"id({self.system})"


@dataclass(frozen=True)
class Swap(Diagram):
    """Exchange two adjacent blocks of wires.

    Any block exchange is a composite of adjacent wire transpositions; the
    term stores the block form and compiles to the corresponding index
    permutation in one go.
    """

    left: SystemType
    right: SystemType

    @property
    def input_type(self) -> SystemType:  # type: ignore[override]
        return self.left * self.right

    @property
    def output_type(self) -> SystemType:  # type: ignore[override]
        return self.right * self.left

    def __str__(self) -> str:
        return f"swap({self.left},{self.right})"


@dataclass(frozen=True)
class Seq(Diagram):
    """``second`` after ``first``.  Raw constructor does not check wires."""

    first: Diagram
    second: Diagram

    @property
    def input_type(self) -> SystemType:  # type: ignore[override]
        return self.first.input_type

    @property
    def output_type(self) -> SystemType:  # type: ignore[override]
        return self.second.output_type

    def __str__(self) -> str:
        return f"({self.first} ; {self.second})"


@dataclass(frozen=True)
class Par(Diagram):
    """``left`` beside ``right`` (left wires are the leading word)."""

    left: Diagram
    right: Diagram

    @property
    def input_type(self) -> SystemType:  # type: ignore[override]
        return self.left.input_type * self.right.input_type

    @property
    def output_type(self) -> SystemType:  # type: ignore[override]
        return self.left.output_type * self.right.output_type

    def __str__(self) -> str:
        return f"({self.left} * {self.right})"


def seq(first: Diagram, second: Diagram) -> Diagram:
    """Compose in time.  Raises :class:`TypeMismatchError` on wire mismatch."""
    if first.output_type != second.input_type:
        raise TypeMismatchError(
            f"cannot wire output {first.output_type} of {first} "
            f"into input {second.input_type} of {second}"
        )
    return Seq(first, second)


def par(left: Diagram, right: Diagram) -> Diagram:
    """Compose side by side.  Always well-typed."""
    return Par(left, right)


def validate(d: Diagram, backend=None, bindings: Mapping[str, object] | None = None) -> list[str]:
    """Walk a term and report structural problems instead of raising.

    Returns a list of human-readable findings; empty iff every sequential
    node is wire-compatible and (when ``backend`` or ``bindings`` is given)
    every primitive box name resolves.  Paths use ``first/second`` and
    ``left/right`` segments from the root.
    """
    findings: list[str] = []

    def visit(term: Diagram, path: str) -> None:
        if isinstance(term, Seq):
            if term.first.output_type != term.second.input_type:
                findings.append(
                    f"{path or 'root'}: sequential wires disagree "
                    f"({term.first.output_type} vs {term.second.input_type})"
                )
            visit(term.first, path + "/first" if path else "first")
            visit(term.second, path + "/second" if path else "second")
        elif isinstance(term, Par):
            visit(term.left, path + "/left" if path else "left")
            visit(term.right, path + "/right" if path else "right")
        elif isinstance(term, PrimitiveBox):
            if bindings is not None and term.name in bindings:
                return
            if backend is not None and not backend.resolves_box(term.name):
                findings.append(f"{path or 'root'}: unknown box {term.name!r}")
        # Identity and Swap are always well-formed

    visit(d, "")
    return findings


# ---------------------------------------------------------------------------
# outcome spaces and tests
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OutcomeSpace:
    """An ordered finite set of outcome labels (plain strings).

    The singleton space on the empty label is the unit of the product, so
    deterministic circuits compose with tests without inventing outcomes.
    Products pair labels as canonical parenthesized strings ``(x,y)``.
    """

    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        if not isinstance(self.labels, tuple):
            object.__setattr__(self, "labels", tuple(self.labels))
        if len(set(self.labels)) != len(self.labels):
            raise ValueError(f"outcome labels must be distinct, got {self.labels!r}")
        if not self.labels:
            raise ValueError("an outcome space needs at least one label")

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self) -> Iterator[str]:
        return iter(self.labels)

    def __contains__(self, label: str) -> bool:
        return label in self.labels

    @property
    def is_singleton_unit(self) -> bool:
        return self.labels == ("",)

    def product(self, other: "OutcomeSpace") -> "OutcomeSpace":
        if self.is_singleton_unit:
            return other
        if other.is_singleton_unit:
            return self
        return OutcomeSpace(tuple(f"({x},{y})" for x in self.labels for y in other.labels))


#: Outcome space of deterministic circuits: one branch, empty label.
SINGLETON_OUTCOME = OutcomeSpace(("",))


@dataclass(frozen=True)
class Test:
    """An outcome-indexed family of circuits with common wire types.

    ``branches`` is kept as a tuple aligned with ``outcomes.labels`` so the
    whole object stays hashable; lookup by label goes through ``__getitem__``.
    """

    __test__ = False  # not a test case, despite the name

    outcomes: OutcomeSpace
    branches: tuple[Diagram, ...]
    input_type: SystemType = field(init=False)
    output_type: SystemType = field(init=False)

    def __post_init__(self) -> None:
        if len(self.branches) != len(self.outcomes):
            raise ValueError(
                f"{len(self.outcomes)} outcome labels but {len(self.branches)} branches"
            )
        first = self.branches[0]
        for b in self.branches:
            if (b.input_type, b.output_type) != (first.input_type, first.output_type):
                raise TypeMismatchError(
                    f"branch {b} typed {b.input_type} -> {b.output_type}, "
                    f"expected {first.input_type} -> {first.output_type}"
                )
        object.__setattr__(self, "input_type", first.input_type)
        object.__setattr__(self, "output_type", first.output_type)

    @classmethod
    def from_dict(cls, branches: Mapping[str, Diagram]) -> "Test":
        labels = tuple(branches)
        return cls(OutcomeSpace(labels), tuple(branches[x] for x in labels))

    def __getitem__(self, label: str) -> Diagram:
        try:
            return self.branches[self.outcomes.labels.index(label)]
        except ValueError:
            raise KeyError(label) from None

    def items(self) -> Iterator[tuple[str, Diagram]]:
        return zip(self.outcomes.labels, self.branches)

    def __rshift__(self, other: "Test") -> "Test":
        return test_seq(self, other)

    def __matmul__(self, other: "Test") -> "Test":
        return test_par(self, other)


def singleton_test(d: Diagram) -> Test:
    """Lift a deterministic circuit to a one-branch test."""
    return Test(SINGLETON_OUTCOME, (d,))


def test_seq(first: Test, second: Test) -> Test:
    """Compose tests in time: branches pair up, outcomes multiply."""
    if first.output_type != second.input_type:
        raise TypeMismatchError(
            f"cannot wire test output {first.output_type} into test input {second.input_type}"
        )
    branches = tuple(
        Seq(bx, by) for bx in first.branches for by in second.branches
    )
    return Test(first.outcomes.product(second.outcomes), branches)


def test_par(left: Test, right: Test) -> Test:
    """Compose tests side by side: branches pair up, outcomes multiply."""
    branches = tuple(
        Par(bx, by) for bx in left.branches for by in right.branches
    )
    return Test(left.outcomes.product(right.outcomes), branches)
