import pytest
from hypothesis import given
from hypothesis import strategies as st

from optlab.diagram import Identity, OutcomeSpace, PrimitiveBox, Swap, SystemType, UNIT, par, seq, singleton_test
from optlab.diagram import Test as OutcomeTest
from optlab.diagram import test_par as parallel_tests
from optlab.diagram import test_seq as chain_tests
from optlab.errors import TypeMismatchError

A = SystemType.of("A")
B = SystemType.of("B")
C = SystemType.of("C")

words = st.lists(st.sampled_from(["A", "B", "C"]), max_size=4).map(
    lambda ls: SystemType(tuple(ls))
)


def test_system_words_concatenate():
    assert (A * B).word == ("A", "B")
    assert str(A * B * C) == "A*B*C"
    assert str(UNIT) == "I"
    assert UNIT.is_unit and not A.is_unit


@given(words, words, words)
def test_system_concat_monoid(x, y, z):
    assert (x * y) * z == x * (y * z)
    assert UNIT * x == x
    assert x * UNIT == x


def test_seq_checks_interfaces():
    f = PrimitiveBox("f", A, B)
    g = PrimitiveBox("g", B, C)
    wired = seq(f, g)
    assert wired.input_type == A and wired.output_type == C
    with pytest.raises(TypeMismatchError):
        seq(g, f)


def test_par_concatenates_interfaces():
    f = PrimitiveBox("f", A, B)
    g = PrimitiveBox("g", C, UNIT)
    side = par(f, g)
    assert side.input_type == A * C
    assert side.output_type == B


def test_operator_sugar_matches_functions():
    f = PrimitiveBox("f", A, B)
    g = PrimitiveBox("g", B, A)
    assert (f >> g).input_type == A
    assert (f @ g).output_type == B * A


def test_identity_and_swap_types():
    assert Identity(A * B).output_type == A * B
    s = Swap(A, B)
    assert s.input_type == A * B and s.output_type == B * A


def test_outcome_space_rejects_duplicates():
    with pytest.raises(Exception):
        OutcomeSpace(("x", "x"))
    with pytest.raises(Exception):
        OutcomeSpace(())


def test_outcome_product_drops_the_unit_label():
    coin = OutcomeSpace(("h", "t"))
    assert coin.product(OutcomeSpace(("",))).labels == ("h", "t")
    assert OutcomeSpace(("",)).product(coin).labels == ("h", "t")
    assert coin.product(coin).labels == ("(h,h)", "(h,t)", "(t,h)", "(t,t)")


def test_test_seq_pairs_branches_first_major():
    prep = OutcomeTest(OutcomeSpace(("p", "q")),
                (PrimitiveBox("sp", UNIT, A), PrimitiveBox("sq", UNIT, A)))
    meas = OutcomeTest(OutcomeSpace(("0", "1")),
                (PrimitiveBox("e0", A, UNIT), PrimitiveBox("e1", A, UNIT)))
    chained = chain_tests(prep, meas)
    assert chained.outcomes.labels == ("(p,0)", "(p,1)", "(q,0)", "(q,1)")
    assert len(chained.branches) == 4


def test_test_seq_checks_interfaces():
    prep = OutcomeTest(OutcomeSpace(("p",)), (PrimitiveBox("s", UNIT, A),))
    meas_b = OutcomeTest(OutcomeSpace(("0",)), (PrimitiveBox("e", B, UNIT),))
    with pytest.raises(TypeMismatchError):
        chain_tests(prep, meas_b)


def test_singleton_lift_keeps_branch():
    f = PrimitiveBox("f", A, B)
    t = singleton_test(f)
    assert len(t.branches) == 1
    assert t.branches[0] is f
    assert t.outcomes.is_singleton_unit


def test_test_par_types():
    ta = OutcomeTest(OutcomeSpace(("x", "y")),
              (PrimitiveBox("f", A, A), PrimitiveBox("g", A, A)))
    tb = singleton_test(PrimitiveBox("h", B, B))
    joint = parallel_tests(ta, tb)
    assert joint.outcomes.labels == ("x", "y")
    assert joint.branches[0].input_type == A * B


def test_test_mapping_interface():
    t = OutcomeTest(OutcomeSpace(("u", "d")),
             (PrimitiveBox("su", UNIT, A), PrimitiveBox("sd", UNIT, A)))
    assert t["u"].name == "su"
    assert [label for label, _ in t.items()] == ["u", "d"]
