"""Dilation audits: channel-state duality, disturbance, pure realizations.

These constructions hang off purification: fix the canonical pure extension
of the faithful state, and transformations on the input system correspond
one-to-one to states of output-plus-reference; deterministic
transformations acquire pure realizations on a larger output; and any
identity-summing test that extracts information must disturb.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import linalg
from ..backends.base import Channel, StateVector, TheoryBackend, TransferMatrix
from ..diagram import SystemType
from ..errors import (
    BackendLacksDilationError,
    BackendLacksPurificationError,
    BranchSumMismatchError,
    MarginalMismatchError,
    NotPureError,
    OptlabError,
    TypeMismatchError,
)
from .causality import _branch_channels
from .purification import ConnectionReport, _joint_with, purify_state

__all__ = [
    "ChoiCorrespondence",
    "NiwdReport",
    "DilationResult",
    "choi_correspondence",
    "niwd_check",
    "stinespring_dilate",
    "dilation_uniqueness",
]


@dataclass
class ChoiCorrespondence:
    """Linear bridge between transformations and extended states.

    Transformations from the input system to the output system map, via
    action on half of the canonical pure extension of the faithful state,
    to states on ``output * reference``; ``matrix`` is that linear map in
    coordinates, and ``rank == required`` certifies injectivity.
    """

    input_system: SystemType
    output_system: SystemType
    reference: SystemType
    pure_state: StateVector
    matrix: np.ndarray
    rank: int
    required: int
    _backend: TheoryBackend = field(repr=False)
    _choi_basis: np.ndarray = field(repr=False)
    _psi_kernel: np.ndarray = field(repr=False)

    @property
    def injective(self) -> bool:
        return self.rank == self.required

    def image_state(self, ch: Channel) -> StateVector:
        b = self._backend
        if (ch.input_type, ch.output_type) != (self.input_system, self.output_system):
            raise TypeMismatchError(
                f"correspondence is for {self.input_system} -> {self.output_system}"
            )
        joint = _joint_with_left(b, ch, self.reference)
        kernel = joint.kernel @ self._psi_kernel
        return b.channel_state(Channel(SystemType(()), joint.output_type, kernel))

    def recover(self, st: StateVector) -> tuple[Channel, float]:
        """Invert the correspondence; returns the channel and the residual."""
        b = self._backend
        coeffs, *_ = np.linalg.lstsq(self.matrix, np.asarray(st.coords, dtype=float), rcond=None)
        residual = float(np.max(np.abs(self.matrix @ coeffs - st.coords)))
        choi = np.einsum("k,kij->ij", coeffs, self._choi_basis)
        ch = b.channel_from_choi(choi, self.input_system, self.output_system)
        return ch, residual


def _joint_with_left(backend: TheoryBackend, ch: Channel, ref: SystemType) -> Channel:
    ident = Channel(ref, ref, backend.kernel_identity(ref))
    return Channel(
        ch.input_type * ref,
        ch.output_type * ref,
        backend.kernel_par(ch, ident),
    )


def choi_correspondence(
    backend: TheoryBackend,
    input_system: SystemType,
    output_system: SystemType,
) -> ChoiCorrespondence:
    """Build the transformation/state bridge over the faithful state.

    Needs a pure extension of the faithful state, so the classical theory
    raises ``BackendLacksPurificationError``.
    """
    if backend.name == "classical":
        raise BackendLacksPurificationError(
            "the classical theory has no pure extension of its faithful state, "
            "so the transformation/state correspondence is unavailable"
        )
    pur = purify_state(backend, backend.uniform_state(input_system))
    if pur.verdict != "Purified":
        raise BackendLacksPurificationError(str(pur.witness))
    psi = pur.state
    ref = pur.purifying_system
    psi_obj = backend.state_object(psi.coords, psi.system)
    psi_kernel = backend.state_channel(psi_obj, psi.system).kernel

    din = backend.hilbert_dim(input_system)
    dout = backend.hilbert_dim(output_system)
    if getattr(backend, "_complex_scalars", False):
        choi_basis = linalg.hermitian_basis(din * dout)
    else:
        choi_basis = linalg.symmetric_basis(din * dout)

    columns = []
    for elem in choi_basis:
        ch = backend.channel_from_choi(elem, input_system, output_system)
        joint = _joint_with_left(backend, ch, ref)
        kernel = joint.kernel @ psi_kernel
        columns.append(
            backend.channel_state(Channel(SystemType(()), joint.output_type, kernel)).coords
        )
    matrix = np.stack(columns, axis=1)
    rank = int(np.linalg.matrix_rank(matrix))
    return ChoiCorrespondence(
        input_system=input_system,
        output_system=output_system,
        reference=ref,
        pure_state=psi,
        matrix=matrix,
        rank=rank,
        required=choi_basis.shape[0],
        _backend=backend,
        _choi_basis=choi_basis,
        _psi_kernel=psi_kernel,
    )


@dataclass
class NiwdReport:
    """No information without disturbance, audited on one test."""

    verdict: str  # "Holds" | "Violated"
    weights: dict[str, float]
    weights_total: float
    max_deviation: float
    offending_label: str | None = None
    sum_residual: float = 0.0


def niwd_check(backend: TheoryBackend, test, bindings=None,
               tol: float | None = None) -> NiwdReport:
    """Check that a test summing to the identity has identity-proportional branches.

    Raises ``BranchSumMismatchError`` when the branches do not sum to the
    identity; otherwise reports Holds/Violated with per-branch weights.
    """
    tol = backend.tol.gap if tol is None else tol
    branches = _branch_channels(backend, test, bindings)
    word = branches[0][1].input_type
    for _, ch in branches:
        if ch.input_type != word or ch.output_type != word:
            raise TypeMismatchError("disturbance audit needs branches from a system to itself")
    ident = backend.kernel_identity(word)
    total = sum(ch.kernel for _, ch in branches)
    sum_residual = float(np.max(np.abs(total - ident)))
    if sum_residual > backend.tol.marginal:
        raise BranchSumMismatchError(
            f"branches sum to something other than the identity (residual {sum_residual:.3e})"
        )
    norm = float(np.real(np.trace(ident)))
    weights: dict[str, float] = {}
    max_dev = 0.0
    offender = None
    for label, ch in branches:
        w = float(np.real(np.trace(ch.kernel))) / norm
        weights[label] = w
        dev = float(np.max(np.abs(ch.kernel - w * ident)))
        if dev > max_dev:
            max_dev, offender = dev, label
    verdict = "Holds" if max_dev <= tol else "Violated"
    return NiwdReport(
        verdict=verdict,
        weights=weights,
        weights_total=float(sum(weights.values())),
        max_deviation=max_dev,
        offending_label=offender if verdict == "Violated" else None,
        sum_residual=sum_residual,
    )


@dataclass
class DilationResult:
    environment: SystemType
    environment_dim: int
    channel: Channel
    transfer: TransferMatrix
    isometry: np.ndarray
    kraus: list[np.ndarray]
    marginal_error: float
    isometry_residual: float


def stinespring_dilate(backend: TheoryBackend, m, bindings=None) -> DilationResult:
    """Pure realization of a deterministic transformation on a larger output.

    The environment is as small as the transformation's positive
    representative allows.  The classical theory only realizes point
    preparations purely and raises ``BackendLacksDilationError`` otherwise.
    """
    from .purity import _as_channel

    ch = _as_channel(backend, m, bindings)
    det = backend.deterministic_residual(ch)
    if det > backend.tol.marginal:
        raise OptlabError(
            f"dilation needs a deterministic transformation (residual {det:.3e})"
        )

    if backend.name == "classical":
        k = np.asarray(ch.kernel, dtype=float)
        nonzero = int(np.sum(np.abs(k) > backend.tol.eigenvalue_floor))
        if nonzero > 1:
            raise BackendLacksDilationError(
                f"no pure realization: the transformation has {nonzero} nonzero "
                "entries and only single-entry (point-preparation) maps are pure "
                "in the classical theory"
            )
        env = backend.scratch_system(1)
        pure = Channel(ch.input_type, ch.output_type * env, k.copy())
        return DilationResult(
            environment=env,
            environment_dim=1,
            channel=pure,
            transfer=backend.transfer_of(pure),
            isometry=k.copy(),
            kraus=[k.copy()],
            marginal_error=0.0,
            isometry_residual=0.0,
        )

    din = backend.hilbert_dim(ch.input_type)
    dout = backend.hilbert_dim(ch.output_type)
    kraus = backend.channel_kraus(ch)
    r = len(kraus)
    v = np.zeros((dout * r, din), dtype=complex)
    for c, kmat in enumerate(kraus):
        v[c::r, :] = kmat
    if not getattr(backend, "_complex_scalars", False):
        v = v.real
    isometry_residual = float(np.max(np.abs(v.conj().T @ v - np.eye(din))))

    env = backend.scratch_system(r)
    pure = backend.conjugation_channel(v, ch.input_type, ch.output_type * env)
    ident_out = Channel(ch.output_type, ch.output_type, backend.kernel_identity(ch.output_type))
    discard_env = backend.trace_channel(env)
    back = backend.kernel_par(ident_out, discard_env) @ pure.kernel
    marginal_error = float(np.max(np.abs(back - ch.kernel)))

    return DilationResult(
        environment=env,
        environment_dim=r,
        channel=pure,
        transfer=backend.transfer_of(pure),
        isometry=v,
        kraus=kraus,
        marginal_error=marginal_error,
        isometry_residual=isometry_residual,
    )


def dilation_uniqueness(
    backend: TheoryBackend,
    p1: Channel,
    p2: Channel,
    base_output: SystemType,
    tol: float | None = None,
) -> ConnectionReport:
    """Connect two pure realizations by a reversible map on the environment.

    Both inputs are pure channels into ``base_output * environment`` with
    the same marginal on ``base_output``.
    """
    tol = backend.tol.gap if tol is None else tol
    if backend.name == "classical":
        raise BackendLacksDilationError(
            "the classical theory has no nontrivial pure realizations to compare"
        )
    if (p1.input_type, p1.output_type) != (p2.input_type, p2.output_type):
        raise TypeMismatchError("the two realizations must share input and output systems")
    out = p1.output_type
    if out.word[: len(base_output)] != base_output.word:
        raise OptlabError(f"{base_output} is not a prefix of the output {out}")
    env = SystemType(out.word[len(base_output):])
    din = backend.hilbert_dim(p1.input_type)
    db = backend.hilbert_dim(base_output)
    dc = backend.hilbert_dim(env)

    vs = []
    for which, p in (("first", p1), ("second", p2)):
        j = backend.channel_choi(p)
        vals, _ = linalg.sorted_eigh(j)
        if linalg.rank_with_cutoff(vals) > 1:
            raise NotPureError(f"the {which} realization is not pure")
        ks = backend.channel_kraus(p)
        vs.append(ks[0])

    ident_b = Channel(base_output, base_output, backend.kernel_identity(base_output))
    discard = backend.trace_channel(env)
    marg = [backend.kernel_par(ident_b, discard) @ p.kernel for p in (p1, p2)]
    marginal_error = float(np.max(np.abs(marg[0] - marg[1])))
    if marginal_error > backend.tol.marginal:
        raise MarginalMismatchError(
            f"the two realizations have different marginals (deviation {marginal_error:.3e})"
        )

    stacks = [v.reshape(db, dc, din).transpose(1, 0, 2).reshape(dc, db * din) for v in vs]
    u = linalg.procrustes_unitary(stacks[0], stacks[1])
    if not getattr(backend, "_complex_scalars", False):
        u = u.real
    conn = backend.conjugation_channel(u, env)
    joint = _joint_with(backend, base_output, conn)
    replay = float(np.max(np.abs(joint.kernel @ p1.kernel - p2.kernel)))
    verdict = "Connected" if replay <= tol else "Unconnected"
    return ConnectionReport(
        verdict=verdict,
        channel=conn if verdict == "Connected" else None,
        matrix=(u if verdict == "Connected" else None),
        replay_error=replay,
        marginal_error=marginal_error,
    )
