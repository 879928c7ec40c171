"""Seeded random ensembles: states, channels, tests, and well-typed circuits.

Everything funnels through one ``Sampler`` per backend so that audits and
property tests are reproducible: trial k of a run seeded with s draws from
an independent stream spawned from s, and identical seeds give identical
objects byte for byte.
"""

from __future__ import annotations

import numpy as np

from .backends.base import Channel, EffectVector, StateVector, TheoryBackend
from .diagram import (
    Diagram,
    Identity,
    Par,
    PrimitiveBox,
    Seq,
    Swap,
    SystemType,
    Test,
    OutcomeSpace,
    singleton_test,
    test_par,
    test_seq,
)

__all__ = ["Sampler", "spawn_rngs"]


def spawn_rngs(seed: int, n: int) -> list[np.random.Generator]:
    """Independent per-trial generators derived from one root seed."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


class Sampler:
    """Random physical objects over a backend's declared systems."""

    def __init__(self, backend: TheoryBackend, seed: int | np.random.Generator = 0,
                 max_carrier: int = 8) -> None:
        self.backend = backend
        self.rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        self.max_carrier = max_carrier
        self.bindings: dict[str, Channel] = {}
        self._counter = 0

    # ------------------------------------------------------------------
    # raw matrix ensembles
    # ------------------------------------------------------------------

    @property
    def _complex(self) -> bool:
        return getattr(self.backend, "_complex_scalars", False)

    def _ginibre(self, rows: int, cols: int) -> np.ndarray:
        g = self.rng.normal(size=(rows, cols))
        if self._complex:
            g = g + 1j * self.rng.normal(size=(rows, cols))
        return g

    def random_unitary(self, d: int) -> np.ndarray:
        """Haar unitary (or orthogonal, on real-scalar backends) via QR."""
        q, r = np.linalg.qr(self._ginibre(d, d))
        phases = np.diagonal(r).copy()
        phases[np.abs(phases) == 0] = 1.0
        return q * (phases / np.abs(phases))

    def density_matrix(self, d: int, rank: int | None = None) -> np.ndarray:
        g = self._ginibre(d, rank or d)
        rho = g @ g.conj().T
        return rho / np.trace(rho).real

    def simplex_weights(self, k: int) -> np.ndarray:
        w = self.rng.exponential(size=k)
        return w / w.sum()

    # ------------------------------------------------------------------
    # states / effects / channels
    # ------------------------------------------------------------------

    def state(self, word: SystemType, rank: int | None = None) -> StateVector:
        b = self.backend
        if b.name == "classical":
            v = self.simplex_weights(b.hilbert_dim(word))
            return StateVector(v, word)
        rho = self.density_matrix(b.hilbert_dim(word), rank)
        return StateVector(b.state_coords(rho, word), word)

    def effect(self, word: SystemType) -> EffectVector:
        b = self.backend
        d = b.hilbert_dim(word)
        if b.name == "classical":
            return EffectVector(self.rng.uniform(size=d), word)
        u = self.random_unitary(d)
        e = u @ np.diag(self.rng.uniform(size=d)) @ u.conj().T
        return EffectVector(b.effect_coords(e, word), word)

    def channel(self, input_word: SystemType, output_word: SystemType,
                rank: int | None = None) -> Channel:
        """Random deterministic (normalization-preserving) transformation."""
        b = self.backend
        din, dout = b.hilbert_dim(input_word), b.hilbert_dim(output_word)
        if b.name == "classical":
            m = np.stack([self.simplex_weights(dout) for _ in range(din)], axis=1)
            return Channel(input_word, output_word, m)
        j = self._tp_choi(din, dout, rank)
        return b.channel_from_choi(j, input_word, output_word)

    def _tp_choi(self, din: int, dout: int, rank: int | None = None) -> np.ndarray:
        k = rank or din * dout
        k = max(k, int(np.ceil(din / dout)))  # reduced trace must stay invertible
        g = self._ginibre(din * dout, k)
        j0 = g @ g.conj().T
        red = np.einsum("ibjb->ij", j0.reshape(din, dout, din, dout))
        vals, vecs = np.linalg.eigh(red)
        rinv = vecs @ np.diag(vals ** -0.5) @ vecs.conj().T
        scale = np.kron(rinv, np.eye(dout))
        j = scale @ j0 @ scale.conj().T
        return j.real if not self._complex else j

    def unitary_channel(self, word: SystemType) -> Channel:
        b = self.backend
        if b.name == "classical":
            d = b.hilbert_dim(word)
            perm = self.rng.permutation(d)
            m = np.zeros((d, d))
            m[perm, np.arange(d)] = 1.0
            return Channel(word, word, m)
        return b.conjugation_channel(self.random_unitary(b.hilbert_dim(word)), word)

    # ------------------------------------------------------------------
    # tests
    # ------------------------------------------------------------------

    def povm(self, word: SystemType, k: int) -> list[np.ndarray]:
        """k effects summing to the unit effect (matrices or rows by backend)."""
        b = self.backend
        d = b.hilbert_dim(word)
        if b.name == "classical":
            rows = np.stack([self.simplex_weights(k) for _ in range(d)], axis=1)
            return [rows[x] for x in range(k)]
        raw = []
        for _ in range(k):
            g = self._ginibre(d, d)
            raw.append(g @ g.conj().T)
        total = sum(raw)
        vals, vecs = np.linalg.eigh(total)
        corr = vecs @ np.diag(vals ** -0.5) @ vecs.conj().T
        return [corr @ e @ corr.conj().T for e in raw]

    def observation_channels(self, word: SystemType, k: int) -> list[Channel]:
        b = self.backend
        return [b.effect_channel(e, word) for e in self.povm(word, k)]

    def preparation_branches(self, word: SystemType, k: int) -> list[np.ndarray]:
        """Subnormalized state objects summing to a normalized state."""
        b = self.backend
        d = b.hilbert_dim(word)
        if b.name == "classical":
            total = self.simplex_weights(d)
            split = np.stack([self.simplex_weights(k) for _ in range(d)], axis=1)
            return [split[x] * total for x in range(k)]
        rho = self.density_matrix(d)
        vals, vecs = np.linalg.eigh(rho)
        f = vecs @ np.diag(np.sqrt(np.clip(vals, 0.0, None)))
        branches = []
        for wx in np.stack([self.simplex_weights(k) for _ in range(d)], axis=1):
            branches.append(f @ np.diag(wx) @ f.conj().T)
        return branches

    def instrument(self, input_word: SystemType, output_word: SystemType,
                   k: int) -> list[Channel]:
        """k branches summing to a random deterministic transformation."""
        b = self.backend
        din, dout = b.hilbert_dim(input_word), b.hilbert_dim(output_word)
        if b.name == "classical":
            m = self.channel(input_word, output_word).kernel
            parts = []
            split = self.rng.dirichlet(np.ones(k), size=m.shape)
            for x in range(k):
                parts.append(Channel(input_word, output_word, m * split[:, :, x]))
            return parts
        j = self._tp_choi(din, dout)
        vals, vecs = np.linalg.eigh(j)
        a = vecs @ np.diag(np.sqrt(np.clip(vals, 0.0, None)))
        out = []
        for wx in np.stack([self.simplex_weights(k) for _ in range(din * dout)], axis=1):
            jx = a @ np.diag(wx) @ a.conj().T
            out.append(b.channel_from_choi(jx, input_word, output_word))
        return out

    def identity_instrument(self, word: SystemType, k: int) -> list[Channel]:
        """Branches proportional to the identity, summing to it exactly."""
        b = self.backend
        weights = self.simplex_weights(k)
        ident = b.kernel_identity(word)
        return [Channel(word, word, w * ident) for w in weights]

    # ------------------------------------------------------------------
    # words and typed circuits
    # ------------------------------------------------------------------

    def word(self, max_len: int = 2) -> SystemType:
        labels = sorted(self.backend.systems)
        if not labels:
            return SystemType(())
        for _ in range(20):
            n = int(self.rng.integers(0, max_len + 1))
            picks = [labels[int(self.rng.integers(len(labels)))] for _ in range(n)]
            w = SystemType(tuple(picks))
            if self.backend.hilbert_dim(w) <= self.max_carrier:
                return w
        return SystemType((min(labels, key=lambda l: self.backend.primitive_dim(l)),))

    def _fresh_box(self, input_word: SystemType, output_word: SystemType) -> PrimitiveBox:
        name = f"rbox{self._counter}"
        self._counter += 1
        self.bindings[name] = self.channel(input_word, output_word)
        return PrimitiveBox(name, input_word, output_word)

    def diagram(self, input_word: SystemType, output_word: SystemType,
                depth: int = 3) -> Diagram:
        """Random well-typed circuit of the given type; boxes go in bindings."""
        if depth <= 0:
            return self._fresh_box(input_word, output_word)
        options = ["box", "seq", "par"]
        if input_word == output_word:
            options.append("id")
        swap_cuts = [
            i for i in range(1, len(input_word))
            if output_word.word == input_word.word[i:] + input_word.word[:i]
        ]
        if swap_cuts:
            options.append("swap")
        pick = options[int(self.rng.integers(len(options)))]
        if pick == "id":
            return Identity(input_word)
        if pick == "swap":
            i = swap_cuts[int(self.rng.integers(len(swap_cuts)))]
            return Swap(SystemType(input_word.word[:i]), SystemType(input_word.word[i:]))
        if pick == "seq":
            mid = self.word()
            return Seq(
                self.diagram(input_word, mid, depth - 1),
                self.diagram(mid, output_word, depth - 1),
            )
        if pick == "par":
            i = int(self.rng.integers(0, len(input_word) + 1))
            j = int(self.rng.integers(0, len(output_word) + 1))
            left = self.diagram(
                SystemType(input_word.word[:i]), SystemType(output_word.word[:j]), depth - 1
            )
            right = self.diagram(
                SystemType(input_word.word[i:]), SystemType(output_word.word[j:]), depth - 1
            )
            return Par(left, right)
        return self._fresh_box(input_word, output_word)

    def closed_test_circuit(self, max_branches: int = 3, depth: int = 1) -> Test:
        """Scalar-typed test circuit assembled from complete tests.

        Preparation test, then a deterministic circuit, then an observation
        test; occasionally two such columns side by side.
        """
        b = self.backend

        def column() -> Test:
            win = self.word(1)
            if win.is_unit:
                win = self.word(1) * SystemType((sorted(b.systems)[0],))
            wout = self.word(1)
            if wout.is_unit:
                wout = win
            k1 = int(self.rng.integers(1, max_branches + 1))
            k2 = int(self.rng.integers(1, max_branches + 1))
            preps = []
            for obj in self.preparation_branches(win, k1):
                name = f"prep{self._counter}"
                self._counter += 1
                self.bindings[name] = b.state_channel(obj, win)
                preps.append(PrimitiveBox(name, SystemType(()), win))
            prep_test = Test(
                OutcomeSpace(tuple(f"p{i}" for i in range(k1))), tuple(preps)
            )
            middle = singleton_test(self.diagram(win, wout, depth))
            effs = []
            for ch in self.observation_channels(wout, k2):
                name = f"meas{self._counter}"
                self._counter += 1
                self.bindings[name] = ch
                effs.append(PrimitiveBox(name, wout, SystemType(())))
            obs_test = Test(
                OutcomeSpace(tuple(f"m{i}" for i in range(k2))), tuple(effs)
            )
            return test_seq(test_seq(prep_test, middle), obs_test)

        t = column()
        if self.rng.uniform() < 0.3:
            t = test_par(t, column())
        return t
