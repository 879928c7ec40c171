"""Normalization-based audits: unique discard, completeness, readouts.

The theory is causal: there is exactly one deterministic effect per system,
so every complete observation test must have branches summing to the
discard effect, and discarding the output of a deterministic transformation
must equal discarding its input.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..backends.base import Channel, EffectVector, PhysicalityCertificate, StateVector, TheoryBackend, TransferMatrix
from ..diagram import Diagram, SystemType, Test
from ..errors import CausalityViolationError, IncompleteTestError, OptlabError, TypeMismatchError
from ..evaluator import evaluate_channel

__all__ = [
    "CausalityReport",
    "DeterminismReport",
    "ReadoutResult",
    "check_causality",
    "is_deterministic",
    "marginal",
    "physicalize_readout",
]


@dataclass
class CausalityReport:
    residuals: list[float]
    max_residual: float
    tolerance: float
    tests_checked: int


@dataclass
class DeterminismReport:
    deterministic: bool
    residual: float
    tolerance: float


@dataclass
class ReadoutResult:
    """A complete test folded into one deterministic box plus pointer effects."""

    pointer: SystemType
    channel: Channel
    transfer: TransferMatrix
    effects: list[EffectVector]
    labels: tuple[str, ...]
    branch_errors: list[float]
    certificate: PhysicalityCertificate


def _branch_channels(
    backend: TheoryBackend, test, bindings=None
) -> list[tuple[str, Channel]]:
    """Normalize the accepted input shapes to labelled channels."""
    if isinstance(test, Test):
        memo: dict = {}
        return [
            (label, evaluate_channel(branch, backend, bindings=bindings, memo=memo))
            for label, branch in test.items()
        ]
    out = []
    for i, item in enumerate(test):
        if isinstance(item, Channel):
            out.append((str(i), item))
        elif isinstance(item, Diagram):
            out.append((str(i), evaluate_channel(item, backend, bindings=bindings)))
        else:
            raise OptlabError(f"cannot interpret test branch of type {type(item).__name__}")
    return out


def check_causality(
    backend: TheoryBackend,
    tests: Sequence,
    bindings=None,
    tol: float | None = None,
) -> CausalityReport:
    """Verify each complete observation test sums to the discard effect.

    Branches may be effect vectors, effect-shaped channels, or a ``Test``
    whose branches are effect-typed diagrams.  Raises
    ``CausalityViolationError`` on the first failure.
    """
    tol = backend.tol.marginal if tol is None else tol
    residuals = []
    for idx, test in enumerate(tests):
        if isinstance(test, (list, tuple)) and test and isinstance(test[0], EffectVector):
            word = test[0].system
            coords = sum(np.asarray(e.coords) for e in test)
        else:
            branches = _branch_channels(backend, test, bindings)
            word = branches[0][1].input_type
            for _, ch in branches:
                if not ch.output_type.is_unit or ch.input_type != word:
                    raise TypeMismatchError(
                        "causality audit needs effect-shaped branches on a common system"
                    )
            coords = sum(
                np.asarray(backend.channel_effect(ch).coords) for _, ch in branches
            )
        target = backend.trace_effect(word).coords
        residual = float(np.max(np.abs(coords - target)))
        if residual > tol:
            raise CausalityViolationError(residual, f"test #{idx} on {word}")
        residuals.append(residual)
    return CausalityReport(
        residuals=residuals,
        max_residual=max(residuals, default=0.0),
        tolerance=tol,
        tests_checked=len(residuals),
    )


def is_deterministic(
    backend: TheoryBackend,
    m,
    bindings=None,
    tol: float | None = None,
) -> DeterminismReport:
    """Does discarding the output equal discarding the input?"""
    tol = backend.tol.marginal if tol is None else tol
    if isinstance(m, Diagram):
        m = evaluate_channel(m, backend, bindings=bindings)
    if isinstance(m, Channel):
        t = backend.transfer_of(m)
    elif isinstance(m, TransferMatrix):
        t = m
    else:
        raise OptlabError(f"cannot audit object of type {type(m).__name__}")
    eff_out = backend.trace_effect(t.output_type).coords
    eff_in = backend.trace_effect(t.input_type).coords
    residual = float(np.max(np.abs(eff_out @ t.matrix - eff_in)))
    return DeterminismReport(residual <= tol, residual, tol)


def marginal(backend: TheoryBackend, state: StateVector, keep) -> StateVector:
    """Discard the tensor factors not in ``keep`` (an index or index list)."""
    word = state.system
    if isinstance(keep, int):
        keep = [keep]
    keep = sorted(set(keep))
    if any(i < 0 or i >= len(word) for i in keep):
        raise OptlabError(f"marginal indices {keep} out of range for {word}")
    kept_word = SystemType(tuple(word.word[i] for i in keep))
    dims = list(backend.word_dims(word))
    if backend.name == "classical":
        tensor = np.asarray(state.coords).reshape(dims or [1])
        drop = tuple(i for i in range(len(dims)) if i not in keep)
        return StateVector(tensor.sum(axis=drop).reshape(-1), kept_word)
    from .. import linalg

    rho = backend.state_object(state.coords, word)
    reduced = linalg.partial_trace(rho, dims, keep)
    return StateVector(backend.state_coords(reduced, kept_word), kept_word)


def physicalize_readout(
    backend: TheoryBackend,
    test,
    bindings=None,
    tol: float | None = None,
) -> ReadoutResult:
    """Fold a complete test into one deterministic box writing to a pointer.

    The result couples each branch to a distinct pointer state; composing
    the box with the matching pointer effect returns the original branch.
    Raises ``IncompleteTestError`` when the branches do not sum to a
    deterministic transformation.
    """
    tol = backend.tol.marginal if tol is None else tol
    branches = _branch_channels(backend, test, bindings)
    labels = tuple(label for label, _ in branches)
    win = branches[0][1].input_type
    wout = branches[0][1].output_type
    for _, ch in branches:
        if (ch.input_type, ch.output_type) != (win, wout):
            raise TypeMismatchError("readout branches must share input and output systems")

    total = Channel(win, wout, sum(ch.kernel for _, ch in branches))
    residual = backend.deterministic_residual(total)
    if residual > tol:
        raise IncompleteTestError(
            f"branches sum to a non-deterministic transformation (residual {residual:.3e})"
        )

    k = len(branches)
    pointer = backend.scratch_system(k)
    if backend.name == "classical":
        pointer_states = [np.eye(k)[x] for x in range(k)]
        pointer_effects = pointer_states
    else:
        pointer_states = [np.outer(np.eye(k)[x], np.eye(k)[x]) for x in range(k)]
        pointer_effects = pointer_states

    joint_kernel = sum(
        backend.kernel_par(ch, backend.state_channel(pointer_states[x], pointer))
        for x, (_, ch) in enumerate(branches)
    )
    joint = Channel(win, wout * pointer, joint_kernel)
    certificate = backend.certify_channel(joint)

    ident_out = Channel(wout, wout, backend.kernel_identity(wout))
    effects = []
    branch_errors = []
    for x, (_, ch) in enumerate(branches):
        eff_ch = backend.effect_channel(pointer_effects[x], pointer)
        readback = backend.kernel_seq(joint, _par(backend, ident_out, eff_ch))
        branch_errors.append(float(np.max(np.abs(readback - ch.kernel))))
        effects.append(backend.channel_effect(eff_ch))

    return ReadoutResult(
        pointer=pointer,
        channel=joint,
        transfer=backend.transfer_of(joint),
        effects=effects,
        labels=labels,
        branch_errors=branch_errors,
        certificate=certificate,
    )


def _par(backend: TheoryBackend, left: Channel, right: Channel) -> Channel:
    return Channel(
        left.input_type * right.input_type,
        left.output_type * right.output_type,
        backend.kernel_par(left, right),
    )
