"""Random-instance generators: physicality, determinism, reproducibility."""

import numpy as np

from optlab import Channel, SystemType
from optlab.diagram import validate
from optlab.sampling import Sampler, spawn_rngs

A = SystemType.of("A")
B = SystemType.of("B")


def test_same_seed_same_stream(backend):
    a = Sampler(backend, seed=42)
    b = Sampler(backend, seed=42)
    for _ in range(3):
        ca = a.channel(A, B)
        cb = b.channel(A, B)
        np.testing.assert_array_equal(ca.kernel, cb.kernel)


def test_different_seeds_differ(backend):
    a = Sampler(backend, seed=1).channel(A, A)
    b = Sampler(backend, seed=2).channel(A, A)
    assert np.abs(a.kernel - b.kernel).max() > 1e-6


def test_spawned_rngs_are_independent():
    r1, r2 = spawn_rngs(9, 2)
    assert r1.integers(1 << 30) != r2.integers(1 << 30)


def test_states_are_normalized(backend):
    s = Sampler(backend, seed=0)
    for _ in range(5):
        st = s.state(A)
        np.testing.assert_allclose(backend.trace_effect(A).pair(st), 1.0,
                                   atol=1e-12)


def test_channels_are_deterministic_and_physical(backend):
    s = Sampler(backend, seed=5)
    for win, wout in [(A, A), (A, B), (B, A)]:
        ch = s.channel(win, wout)
        assert backend.certify_channel(ch).physical
        assert backend.deterministic_residual(ch) < 1e-10


def test_unitary_channels_are_reversible_kernels(backend):
    s = Sampler(backend, seed=7)
    ch = s.unitary_channel(A)
    k = ch.kernel
    np.testing.assert_allclose(k @ k.conj().T, np.eye(k.shape[0]), atol=1e-10)


def test_povm_completeness(backend):
    s = Sampler(backend, seed=9)
    effects = s.povm(A, 3)
    total = sum(np.asarray(e, dtype=complex) for e in effects)
    d = backend.hilbert_dim(A)
    if backend.name == "classical":
        np.testing.assert_allclose(total.real, np.ones(d), atol=1e-12)
    else:
        np.testing.assert_allclose(total, np.eye(d), atol=1e-12)


def test_observation_channels_sum_to_trace(backend):
    s = Sampler(backend, seed=11)
    chans = s.observation_channels(A, 4)
    total = sum(c.kernel for c in chans)
    np.testing.assert_allclose(total, backend.trace_channel(A).kernel,
                               atol=1e-12)


def test_instrument_sums_to_deterministic(backend):
    s = Sampler(backend, seed=13)
    branches = s.instrument(A, B, 3)
    total = Channel(A, B, sum(c.kernel for c in branches))
    assert backend.deterministic_residual(total) < 1e-10
    for c in branches:
        assert backend.certify_channel(c).physical


def test_identity_instrument_branches_scale_identity(backend):
    s = Sampler(backend, seed=15)
    branches = s.identity_instrument(A, 3)
    ident = backend.kernel_identity(A)
    weights = []
    for c in branches:
        w = np.trace(c.kernel).real / np.trace(ident).real
        weights.append(w)
        np.testing.assert_allclose(c.kernel, w * ident, atol=1e-12)
    np.testing.assert_allclose(sum(weights), 1.0, atol=1e-12)


def test_preparation_branches_sum_to_state(backend):
    s = Sampler(backend, seed=17)
    parts = s.preparation_branches(A, 3)
    total = sum(np.asarray(p, dtype=complex) for p in parts)
    if backend.name == "classical":
        np.testing.assert_allclose(total.real.sum(), 1.0, atol=1e-12)
    else:
        np.testing.assert_allclose(np.trace(total).real, 1.0, atol=1e-12)


def test_simplex_weights(backend):
    s = Sampler(backend, seed=19)
    w = s.simplex_weights(6)
    assert (w > 0).all()
    np.testing.assert_allclose(w.sum(), 1.0, atol=1e-12)


def test_sampled_diagrams_type_check(backend):
    s = Sampler(backend, seed=21)
    for _ in range(10):
        win = s.word()
        wout = s.word()
        d = s.diagram(win, wout, depth=3)
        assert d.input_type == win
        assert d.output_type == wout
        assert validate(d) == []
