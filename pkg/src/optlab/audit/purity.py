"""Extremality audits: pure states, pure maps, reversibility, transitivity.

Purity here is non-refinability: an object is pure when every way of
writing it as a sum of physical pieces uses pieces proportional to it.
For the matrix theories that is rank one (of the density matrix, or of the
transformation's positive representative); for the classical theory it is
support on a single entry.  Impure verdicts carry an explicit two-piece
refinement as a witness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import linalg
from ..backends.base import Channel, StateVector, TheoryBackend, TransferMatrix
from ..diagram import Diagram
from ..errors import NotPureError, OptlabError
from ..evaluator import evaluate_channel

__all__ = [
    "PurityReport",
    "ReversibilityReport",
    "TransitivityResult",
    "is_pure_state",
    "is_pure_transformation",
    "is_reversible",
    "transitivity_witness",
]


@dataclass
class PurityReport:
    pure: bool
    rank: int
    weights: list[float]
    witness: dict | None = None


@dataclass
class ReversibilityReport:
    reversible: bool
    inverse: Channel | None
    left_residual: float
    right_residual: float
    reason: str | None = None
    witness: dict | None = None


@dataclass
class TransitivityResult:
    """A reversible transformation carrying one pure normalized state to another."""

    channel: Channel
    transfer: TransferMatrix
    matrix: np.ndarray
    replay_error: float


def _as_channel(backend: TheoryBackend, m, bindings=None) -> Channel:
    if isinstance(m, Diagram):
        return evaluate_channel(m, backend, bindings=bindings)
    if isinstance(m, TransferMatrix):
        return backend.channel_from_transfer(m)
    if isinstance(m, Channel):
        return m
    raise OptlabError(f"cannot audit object of type {type(m).__name__}")


def is_pure_state(backend: TheoryBackend, state: StateVector,
                  rel_cutoff: float = linalg.RANK_CUTOFF) -> PurityReport:
    if backend.name == "classical":
        v = np.asarray(state.coords, dtype=float)
        top = float(np.max(np.abs(v), initial=0.0))
        support = np.flatnonzero(np.abs(v) > rel_cutoff * max(top, 1.0))
        weights = [float(v[i]) for i in support]
        if len(support) <= 1:
            return PurityReport(True, len(support), weights)
        i, j = support[0], support[1]
        a = np.zeros_like(v)
        a[i] = v[i]
        return PurityReport(
            False, len(support), weights,
            witness={"summands": [a, v - a], "support": support.tolist()},
        )
    rho = backend.state_object(state.coords, state.system)
    vals, vecs = linalg.sorted_eigh(rho)
    rank = linalg.rank_with_cutoff(vals, rel_cutoff)
    weights = [float(v) for v in vals[:rank]]
    if rank <= 1:
        return PurityReport(True, rank, weights)
    p0 = vals[0] * np.outer(vecs[:, 0], vecs[:, 0].conj())
    return PurityReport(
        False, rank, weights,
        witness={"summands": [p0, rho - p0], "spectrum": weights},
    )


def is_pure_transformation(backend: TheoryBackend, m, bindings=None,
                           rel_cutoff: float = linalg.RANK_CUTOFF) -> PurityReport:
    ch = _as_channel(backend, m, bindings)
    if backend.name == "classical":
        k = np.asarray(ch.kernel, dtype=float)
        top = float(np.max(np.abs(k), initial=0.0))
        mask = np.abs(k) > rel_cutoff * max(top, 1.0)
        entries = np.argwhere(mask)
        weights = [float(k[tuple(ij)]) for ij in entries]
        if len(entries) <= 1:
            return PurityReport(True, len(entries), weights)
        a = np.zeros_like(k)
        a[tuple(entries[0])] = k[tuple(entries[0])]
        return PurityReport(
            False, len(entries), weights,
            witness={"summands": [a, k - a], "entries": entries.tolist()},
        )
    j = backend.channel_choi(ch)
    vals, vecs = linalg.sorted_eigh(j)
    rank = linalg.rank_with_cutoff(vals, rel_cutoff)
    weights = [float(v) for v in vals[:rank]]
    if rank <= 1:
        return PurityReport(True, rank, weights)
    p0 = vals[0] * np.outer(vecs[:, 0], vecs[:, 0].conj())
    return PurityReport(
        False, rank, weights,
        witness={"summands": [p0, j - p0], "spectrum": weights},
    )


def is_reversible(backend: TheoryBackend, m, bindings=None,
                  tol: float | None = None) -> ReversibilityReport:
    """Is there a physical deterministic inverse?  Returns it when so."""
    tol = backend.tol.eigenvalue_floor if tol is None else tol
    ch = _as_channel(backend, m, bindings)
    cert = backend.certify_channel(ch)
    if not cert.physical:
        raise OptlabError(f"reversibility audit needs a physical input: {cert}")
    det = backend.deterministic_residual(ch)
    if det > backend.tol.marginal:
        raise OptlabError(
            f"reversibility audit needs a deterministic input (residual {det:.3e})"
        )
    k = np.asarray(ch.kernel)
    if k.shape[0] != k.shape[1]:
        return ReversibilityReport(False, None, np.inf, np.inf, reason="carrier dimensions differ")
    try:
        kinv = np.linalg.inv(k)
    except np.linalg.LinAlgError:
        return ReversibilityReport(False, None, np.inf, np.inf, reason="kernel is singular")
    cond = np.linalg.cond(k)
    if not np.isfinite(cond) or cond > 1.0 / max(tol, 1e-15):
        return ReversibilityReport(False, None, np.inf, np.inf, reason="kernel is singular")
    inverse = Channel(ch.output_type, ch.input_type, kinv)
    inv_cert = backend.certify_channel(inverse)
    left = float(np.max(np.abs(kinv @ k - np.eye(k.shape[0]))))
    right = float(np.max(np.abs(k @ kinv - np.eye(k.shape[0]))))
    if not inv_cert.physical:
        return ReversibilityReport(
            False, None, left, right,
            reason=f"inverse is not physical: {inv_cert.reason}",
            witness=inv_cert.witness,
        )
    return ReversibilityReport(True, inverse, left, right)


def transitivity_witness(backend: TheoryBackend, source: StateVector,
                         target: StateVector) -> TransitivityResult:
    """Reversible transformation mapping one pure normalized state to another.

    Raises ``NotPureError`` unless both states are pure and normalized.
    """
    if source.system != target.system:
        raise OptlabError("transitivity needs two states of the same system")
    word = source.system
    for which, st in (("source", source), ("target", target)):
        report = is_pure_state(backend, st)
        if not report.pure:
            raise NotPureError(f"{which} state is not pure (rank {report.rank})")
        total = sum(report.weights)
        if abs(total - 1.0) > backend.tol.marginal:
            raise OptlabError(f"{which} state is not normalized (total {total:.6f})")

    if backend.name == "classical":
        d = backend.hilbert_dim(word)
        i = int(np.argmax(source.coords))
        j = int(np.argmax(target.coords))
        u = np.eye(d)
        u[[i, j]] = u[[j, i]]
        ch = Channel(word, word, u)
    else:
        rho_s = backend.state_object(source.coords, word)
        rho_t = backend.state_object(target.coords, word)
        _, vecs_s = linalg.sorted_eigh(rho_s)
        _, vecs_t = linalg.sorted_eigh(rho_t)
        cs = linalg.complete_to_unitary(vecs_s[:, :1])
        ct = linalg.complete_to_unitary(vecs_t[:, :1])
        u = ct @ cs.conj().T
        ch = backend.conjugation_channel(u, word)

    replay = float(np.max(np.abs(ch.kernel @ _state_kernel(backend, source)
                                 - _state_kernel(backend, target))))
    return TransitivityResult(
        channel=ch,
        transfer=backend.transfer_of(ch),
        matrix=u,
        replay_error=replay,
    )


def _state_kernel(backend: TheoryBackend, state: StateVector) -> np.ndarray:
    obj = backend.state_object(state.coords, state.system)
    return backend.state_channel(obj, state.system).kernel
