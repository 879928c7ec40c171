"""Circuit evaluation against hand-computed values and structural laws."""

import numpy as np
import pytest

from optlab import Channel, Identity, Swap, SystemType, evaluate, par, run_test_circuit, seq, singleton_test
from optlab.diagram import PrimitiveBox, test_seq as chain_tests
from optlab.errors import OptlabError
from optlab.evaluator import evaluate_channel, trace_box
from optlab.sampling import Sampler

A = SystemType.of("A")
B = SystemType.of("B")


def box(backend, sampler, name, win, wout):
    ch = sampler.channel(win, wout)
    return PrimitiveBox(name, win, wout), {name: ch}


def test_identity_transfer_is_identity(backend):
    t = evaluate(Identity(A), backend)
    np.testing.assert_allclose(t.matrix, np.eye(backend.state_dim(A)),
                               atol=1e-12)


def test_swap_is_its_own_inverse(backend):
    d = evaluate_channel(seq(Swap(A, B), Swap(B, A)), backend)
    np.testing.assert_allclose(d.kernel,
                               backend.kernel_identity(A * B), atol=1e-12)


def test_swap_moves_product_states(backend):
    s = Sampler(backend, seed=2)
    sa, sb = s.state(A), s.state(B)
    joint = backend.kernel_par(backend.state_channel(backend.state_object(sa.coords, A), A),
                               backend.state_channel(backend.state_object(sb.coords, B), B))
    swapped = backend.kernel_swap(A, B) @ joint
    other = backend.kernel_par(backend.state_channel(backend.state_object(sb.coords, B), B),
                               backend.state_channel(backend.state_object(sa.coords, A), A))
    np.testing.assert_allclose(swapped, other, atol=1e-12)


def test_trace_box_discards(backend):
    s = Sampler(backend, seed=4)
    st = s.state(A)
    d = seq(PrimitiveBox("prep", SystemType(()), A), trace_box(A))
    t = evaluate(d, backend, {"prep": backend.state_channel(
        backend.state_object(st.coords, A), A)})
    np.testing.assert_allclose(t.matrix, [[1.0]], atol=1e-10)


def test_sequential_composition_matches_matrix_product(backend):
    s = Sampler(backend, seed=6)
    f, bf = box(backend, s, "f", A, B)
    g, bg = box(backend, s, "g", B, A)
    bindings = {**bf, **bg}
    t = evaluate(seq(f, g), backend, bindings)
    tf = evaluate(f, backend, bindings)
    tg = evaluate(g, backend, bindings)
    np.testing.assert_allclose(t.matrix, tg.matrix @ tf.matrix, atol=1e-12)


def test_interchange_law(backend):
    s = Sampler(backend, seed=8)
    f1, b1 = box(backend, s, "f1", A, A)
    f2, b2 = box(backend, s, "f2", A, B)
    g1, b3 = box(backend, s, "g1", B, B)
    g2, b4 = box(backend, s, "g2", B, A)
    bindings = {**b1, **b2, **b3, **b4}
    lhs = evaluate(seq(par(f1, g1), par(f2, g2)), backend, bindings)
    rhs = evaluate(par(seq(f1, f2), seq(g1, g2)), backend, bindings)
    np.testing.assert_allclose(lhs.matrix, rhs.matrix, atol=1e-12)


def test_swap_naturality(backend):
    s = Sampler(backend, seed=10)
    f, bf = box(backend, s, "f", A, B)
    g, bg = box(backend, s, "g", B, A)
    bindings = {**bf, **bg}
    lhs = evaluate(seq(par(f, g), Swap(B, A)), backend, bindings)
    rhs = evaluate(seq(Swap(A, B), par(g, f)), backend, bindings)
    np.testing.assert_allclose(lhs.matrix, rhs.matrix, atol=1e-12)


def test_unit_identity_laws(backend):
    s = Sampler(backend, seed=12)
    f, bf = box(backend, s, "f", A, B)
    base = evaluate(f, backend, bf)
    left = evaluate(seq(Identity(A), f), backend, bf)
    right = evaluate(seq(f, Identity(B)), backend, bf)
    np.testing.assert_allclose(left.matrix, base.matrix, atol=1e-13)
    np.testing.assert_allclose(right.matrix, base.matrix, atol=1e-13)


def test_type_errors_surface(backend):
    s = Sampler(backend, seed=14)
    f, bf = box(backend, s, "f", A, B)
    with pytest.raises(OptlabError):
        evaluate(seq(f, f), backend, bf)


def test_binding_must_match_declared_type(backend):
    s = Sampler(backend, seed=16)
    f = PrimitiveBox("f", A, B)
    wrong = s.channel(A, A)
    with pytest.raises(OptlabError):
        evaluate(f, backend, {"f": wrong})


def test_closed_test_circuit_distribution(backend):
    s = Sampler(backend, seed=18)
    for _ in range(5):
        t = s.closed_test_circuit()
        dist = run_test_circuit(t, backend, s.bindings)
        assert all(p >= -1e-12 for p in dist.probs.values())
        np.testing.assert_allclose(dist.total, 1.0, atol=1e-10)


def test_scalar_tests_factorize(backend):
    s = Sampler(backend, seed=20)
    t1 = s.closed_test_circuit(max_branches=2)
    t2 = s.closed_test_circuit(max_branches=2)
    d1 = run_test_circuit(t1, backend, s.bindings)
    d2 = run_test_circuit(t2, backend, s.bindings)
    from optlab import test_par as parallel_tests

    joint = run_test_circuit(parallel_tests(t1, t2), backend, s.bindings)
    for la, pa in d1.probs.items():
        for lb, pb in d2.probs.items():
            assert joint.probs[f"({la},{lb})"] == pa * pb  # exact float product


def test_deterministic_circuit_normalization_check(backend):
    s = Sampler(backend, seed=22)
    st = s.state(A)
    prep = backend.state_channel(backend.state_object(st.coords, A), A)
    d = seq(PrimitiveBox("prep", SystemType(()), A), trace_box(A))
    t = singleton_test(d)
    dist = run_test_circuit(t, backend, {"prep": prep})
    np.testing.assert_allclose(dist.total, 1.0, atol=1e-10)


def test_memoized_evaluation_is_consistent(backend):
    s = Sampler(backend, seed=24)
    f, bf = box(backend, s, "f", A, A)
    d = seq(seq(f, f), seq(f, f))
    memo = {}
    c1 = evaluate_channel(d, backend, bf, memo=memo)
    c2 = evaluate_channel(d, backend, bf)
    np.testing.assert_allclose(c1.kernel, c2.kernel, atol=0)
