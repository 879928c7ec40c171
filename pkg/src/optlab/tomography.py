"""Process comparison done honestly: equality of circuits is probe-relative.

Two circuits of the same type are interchangeable only when they give the
same statistics in every context, and contexts include side systems the
circuit does not touch.  Where joint state spaces outgrow products of local
ones, skipping the side system gives wrong answers — so the comparison here
always quantifies over a reference policy, and a negative verdict comes
with a concrete state/effect pair exhibiting the gap.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .audit.purification import _state_kernel, purify_state
from .backends.base import Channel, EffectVector, StateVector, TheoryBackend
from .diagram import Diagram, SystemType, UNIT
from .errors import OptlabError, TypeMismatchError
from .evaluator import evaluate_channel
from .sampling import Sampler

__all__ = [
    "EquivalenceWitness",
    "EquivalenceReport",
    "LocalTomographyReport",
    "FaithfulStateResult",
    "FaithfulnessReport",
    "equivalent",
    "replay_witness",
    "local_tomography_check",
    "faithful_state",
    "verify_faithfulness",
]


@dataclass
class EquivalenceWitness:
    """A replayable separation: a probe pair with different statistics."""

    reference: SystemType
    state: StateVector
    effect: EffectVector
    p_first: float
    p_second: float

    @property
    def gap(self) -> float:
        return abs(self.p_first - self.p_second)


@dataclass
class EquivalenceReport:
    verdict: str  # "Equivalent" | "Distinguished"
    max_gap: float
    tolerance: float
    references: list[tuple[str, float]]
    witness: EquivalenceWitness | None = None


def _as_channel(backend: TheoryBackend, m, bindings) -> Channel:
    if isinstance(m, Diagram):
        return evaluate_channel(m, backend, bindings=bindings)
    if isinstance(m, Channel):
        return m
    raise OptlabError(f"cannot compare object of type {type(m).__name__}")


def _with_reference(backend: TheoryBackend, ch: Channel, ref: SystemType) -> Channel:
    ident = Channel(ref, ref, backend.kernel_identity(ref))
    return Channel(
        ch.input_type * ref, ch.output_type * ref, backend.kernel_par(ch, ident)
    )


def equivalent(
    m1,
    m2,
    backend: TheoryBackend,
    bindings=None,
    ref_policy: Sequence[SystemType] | None = None,
    tol: float | None = None,
) -> EquivalenceReport:
    """Compare two circuits over every reference in the policy.

    The default policy is the trivial system plus each declared primitive.
    The gap on a reference is the largest probability difference over a
    spanning family of joint probe states and effects, so a zero gap on a
    reference certifies equal statistics in every context using it.
    """
    tol = backend.tol.gap if tol is None else tol
    c1 = _as_channel(backend, m1, bindings)
    c2 = _as_channel(backend, m2, bindings)
    if (c1.input_type, c1.output_type) != (c2.input_type, c2.output_type):
        raise TypeMismatchError(
            f"cannot compare {c1.input_type} -> {c1.output_type} "
            f"with {c2.input_type} -> {c2.output_type}"
        )
    if ref_policy is None:
        ref_policy = [UNIT] + [SystemType.of(label) for label in backend.systems]

    references: list[tuple[str, float]] = []
    best: EquivalenceWitness | None = None
    max_gap = 0.0
    for ref in ref_policy:
        j1 = _with_reference(backend, c1, ref)
        j2 = _with_reference(backend, c2, ref)
        t1 = backend.transfer_of(j1).matrix
        t2 = backend.transfer_of(j2).matrix
        states = backend.spanning_states(j1.input_type)
        effects = backend.spanning_effects(j1.output_type)
        smat = np.stack([s.coords for s in states], axis=1)
        emat = np.stack([e.coords for e in effects], axis=0)
        gaps = np.abs(emat @ (t1 - t2) @ smat)
        gap = float(gaps.max(initial=0.0))
        references.append((str(ref), gap))
        if gap > max_gap:
            max_gap = gap
            e_idx, s_idx = np.unravel_index(int(np.argmax(gaps)), gaps.shape)
            p1 = float(emat[e_idx] @ t1 @ smat[:, s_idx])
            p2 = float(emat[e_idx] @ t2 @ smat[:, s_idx])
            best = EquivalenceWitness(ref, states[s_idx], effects[e_idx], p1, p2)

    verdict = "Distinguished" if max_gap > tol else "Equivalent"
    return EquivalenceReport(
        verdict=verdict,
        max_gap=max_gap,
        tolerance=tol,
        references=references,
        witness=best if verdict == "Distinguished" else None,
    )


def replay_witness(
    backend: TheoryBackend,
    m1,
    m2,
    witness: EquivalenceWitness,
    bindings=None,
) -> tuple[float, float]:
    """Run the witness probe against both circuits; returns both probabilities."""
    c1 = _as_channel(backend, m1, bindings)
    c2 = _as_channel(backend, m2, bindings)
    st_kernel = _state_kernel(backend, witness.state)
    eff_obj = backend.effect_object(witness.effect.coords, witness.effect.system)
    eff_kernel = backend.effect_channel(eff_obj, witness.effect.system).kernel
    out = []
    for ch in (c1, c2):
        joint = _with_reference(backend, ch, witness.reference)
        scalar = eff_kernel @ joint.kernel @ st_kernel
        out.append(backend.prob(float(np.real(scalar[0, 0]))))
    return out[0], out[1]


@dataclass
class LocalTomographyReport:
    verdict: str  # "Holds" | "Fails"
    left_dim: int
    right_dim: int
    product_dim: int
    joint_dim: int
    product_span_rank: int


def local_tomography_check(
    backend: TheoryBackend, left: SystemType, right: SystemType
) -> LocalTomographyReport:
    """Do product probes span the joint state space?

    Compares the product of component coordinate dimensions with the joint
    one, and independently ranks the span of actual product states.
    """
    na = backend.state_dim(left)
    nb = backend.state_dim(right)
    joint_word = left * right
    njoint = backend.state_dim(joint_word)
    rows = []
    for sa in backend.spanning_states(left):
        obj_a = backend.state_object(sa.coords, left)
        for sb in backend.spanning_states(right):
            obj_b = backend.state_object(sb.coords, right)
            rows.append(backend.state_coords(np.kron(obj_a, obj_b), joint_word))
    rank = int(np.linalg.matrix_rank(np.stack(rows, axis=0)))
    holds = (na * nb == njoint) and rank == njoint
    return LocalTomographyReport(
        verdict="Holds" if holds else "Fails",
        left_dim=na,
        right_dim=nb,
        product_dim=na * nb,
        joint_dim=njoint,
        product_span_rank=rank,
    )


@dataclass
class FaithfulStateResult:
    """An interior state: it responds to every transformation difference."""

    state: StateVector
    interior: bool
    margin: float
    diagnostics: dict


def faithful_state(backend: TheoryBackend, word: SystemType) -> FaithfulStateResult:
    state = backend.uniform_state(word)
    d = backend.hilbert_dim(word)
    margin = 1.0 / d
    if backend.name == "classical":
        diagnostics = {"min_entry": margin, "total": 1.0}
    else:
        diagnostics = {"min_spectral_weight": margin, "trace": 1.0}
    return FaithfulStateResult(state, margin > 0.0, margin, diagnostics)


@dataclass
class FaithfulnessReport:
    verdict: str  # "Confirmed" | "Refuted"
    trials: int
    min_gap: float
    tolerance: float
    failures: list[int]


def verify_faithfulness(
    backend: TheoryBackend,
    word: SystemType | None = None,
    trials: int = 100,
    seed: int = 0,
    tol: float | None = None,
) -> FaithfulnessReport:
    """Check the faithful state separates random pairs of transformations.

    The probe extension of the faithful state is its canonical pure
    extension where one exists; the classical theory, which purifies
    nothing mixed, uses the correlated-copy extension instead.  Each trial
    draws two independent random transformations and requires a spanning
    effect on the extended output to tell the two results apart.
    """
    tol = backend.tol.gap if tol is None else tol
    if word is None:
        labels = sorted(backend.systems)
        if not labels:
            raise OptlabError("no declared systems to probe")
        word = SystemType.of(labels[0])
    d = backend.hilbert_dim(word)

    if backend.name == "classical":
        ref = word
        sigma = np.zeros(d * d)
        sigma[:: d + 1] = 1.0 / d
        psi_kernel = backend.state_channel(sigma, word * ref).kernel
    else:
        pur = purify_state(backend, backend.uniform_state(word))
        ref = pur.purifying_system
        psi_kernel = _state_kernel(backend, pur.state)

    sampler = Sampler(backend, seed=seed)
    ident_ref = Channel(ref, ref, backend.kernel_identity(ref))
    joint_out = word * ref
    emat = np.stack([e.coords for e in backend.spanning_effects(joint_out)], axis=0)

    min_gap = np.inf
    failures: list[int] = []
    for trial in range(trials):
        a = sampler.channel(word, word)
        b = sampler.channel(word, word)
        coords = []
        for ch in (a, b):
            joint_kernel = backend.kernel_par(ch, ident_ref) @ psi_kernel
            coords.append(
                backend.channel_state(Channel(UNIT, joint_out, joint_kernel)).coords
            )
        gap = float(np.max(np.abs(emat @ (coords[0] - coords[1]))))
        min_gap = min(min_gap, gap)
        if gap <= tol:
            failures.append(trial)
    return FaithfulnessReport(
        verdict="Confirmed" if not failures else "Refuted",
        trials=trials,
        min_gap=float(min_gap),
        tolerance=tol,
        failures=failures,
    )
