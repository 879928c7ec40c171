"""Command surface: JSON reports, exit codes, and byte-stable output."""

import json

import pytest

from optlab.cli import main


@pytest.fixture
def run(capsys):
    def invoke(*argv):
        code = main([str(a) for a in argv])
        return code, capsys.readouterr().out
    return invoke


@pytest.fixture
def fx(fixture_dir):
    return lambda name: str(fixture_dir / name)


# ---------------------------------------------------------------------------
# evaluation and probabilities
# ---------------------------------------------------------------------------

def test_prob_output_is_byte_exact(run, fx):
    code, out = run("prob", fx("plus_born.opt"), "--test-circuit", "born")
    assert code == 0
    assert out == '{\n  "0": 0.5,\n  "1": 0.5\n}\n'


def test_eval_reports_the_transfer(run, fx):
    code, out = run("eval", fx("damping.opt"), "--circuit", "decay_twice")
    assert code == 0
    payload = json.loads(out)
    assert payload["command"] == "eval"
    assert payload["circuit"] == "decay_twice"
    assert payload["input"] == "Q" and payload["output"] == "Q"
    assert len(payload["transfer"]) == 4


def test_eval_refuses_test_valued_circuits(run, fx):
    code, out = run("eval", fx("plus_born.opt"), "--circuit", "born")
    assert code == 2
    assert "test" in json.loads(out)["error"]


def test_prob_requires_a_closed_circuit(run, fx):
    code, out = run("prob", fx("damping.opt"), "--test-circuit", "decay_twice")
    assert code == 2


# ---------------------------------------------------------------------------
# construction commands
# ---------------------------------------------------------------------------

def test_purify_splits_on_the_verdict(run, fx):
    code, out = run("purify", fx("classical_bits.opt"), "--state", "point")
    assert code == 0
    assert json.loads(out)["verdict"] == "Purified"

    code, out = run("purify", fx("classical_bits.opt"), "--state", "fair")
    assert code == 1
    payload = json.loads(out)
    assert payload["verdict"] == "Failure"
    assert set(payload["witness"]) == {"reason", "summands", "support"}


def test_dilate_reports_the_environment(run, fx):
    code, out = run("dilate", fx("damping.opt"), "--box", "damp")
    assert code == 0
    payload = json.loads(out)
    assert payload["verdict"] == "Dilated"
    assert payload["environment"] == "@2"
    assert payload["environment_dim"] == 2
    assert payload["marginal_error"] <= 1e-10
    assert payload["isometry_residual"] <= 1e-10


def test_steer_reproduces_the_ensemble(run, fx):
    code, out = run("steer", fx("bell_steering.opt"),
                    "--state", "bell", "--test", "ensemble")
    assert code == 0
    payload = json.loads(out)
    assert payload["verdict"] == "Steered"
    assert payload["labels"] == ["a", "b"]
    assert payload["completion_label"] == "a"
    assert payload["completeness_residual"] <= 1e-12
    assert max(payload["branch_errors"]) <= 1e-9


def test_equiv_agrees_up_to_global_sign(run, fx):
    code, out = run("equiv", fx("damping.opt"), "--box", "xgate", "--box2", "minusx")
    assert code == 0
    assert json.loads(out)["verdict"] == "Equivalent"


def test_equiv_distinguishes_with_a_replayed_witness(run, fx):
    code, out = run("equiv", fx("damping.opt"), "--box", "xgate", "--box2", "zgate")
    assert code == 1
    payload = json.loads(out)
    assert payload["verdict"] == "Distinguished"
    assert payload["max_gap"] == pytest.approx(1.0, abs=1e-9)
    w = payload["witness"]
    replayed = w["replayed"]
    assert replayed[0] == pytest.approx(w["p_first"], abs=1e-9)
    assert replayed[1] == pytest.approx(w["p_second"], abs=1e-9)


# ---------------------------------------------------------------------------
# audits
# ---------------------------------------------------------------------------

def test_audit_causality_holds(run, fx):
    code, out = run("audit", fx("plus_born.opt"), "--axiom", "causality",
                    "--trials", 3)
    assert code == 0
    payload = json.loads(out)
    assert payload["verdict"] == "Holds"
    assert payload["axiom"] == "causality"


def test_audit_purification_flags_the_classical_theory(run, fx):
    code, out = run("audit", fx("classical_bits.opt"), "--axiom", "purification")
    assert code == 1
    assert json.loads(out)["verdict"] == "Violated"


def test_audit_faithfulness(run, fx):
    code, out = run("audit", fx("plus_born.opt"), "--axiom", "faithfulness",
                    "--trials", 5, "--seed", 3)
    assert code == 0
    payload = json.loads(out)
    assert payload["verdict"] == "Holds"
    assert payload["seed"] == 3


def test_audit_local_tomography_fails_on_rebits(run, fx):
    code, out = run("audit", fx("rebit.opt"), "--axiom", "local-tomography")
    assert code == 1
    payload = json.loads(out)
    assert payload["verdict"] == "Fails"
    pair = payload["pairs"][0]
    assert (pair["product_dim"], pair["joint_dim"]) == (9, 10)
    assert pair["product_span_rank"] == 9


def test_audit_niwd_splits_on_the_verdict(run, fx):
    code, out = run("audit", fx("identity_instrument.opt"), "--axiom", "niwd")
    assert code == 0
    entry = json.loads(out)["tests"][0]
    assert entry["verdict"] == "Holds"
    assert sum(entry["weights"].values()) == pytest.approx(1.0, abs=1e-12)

    code, out = run("audit", fx("classical_bits.opt"), "--axiom", "niwd")
    assert code == 1
    entry = json.loads(out)["tests"][0]
    assert entry["verdict"] == "Violated"
    assert entry["weights"] == {"0": 0.5, "1": 0.5}
    assert entry["max_deviation"] == pytest.approx(0.5)


# ---------------------------------------------------------------------------
# failure modes and determinism
# ---------------------------------------------------------------------------

def test_unreadable_file(run):
    code, out = run("prob", "/nonexistent.opt", "--test-circuit", "x")
    assert code == 2
    assert "cannot read" in json.loads(out)["error"]


def test_parse_errors_carry_a_location(run, tmp_path):
    p = tmp_path / "bad.opt"
    p.write_text("theory quantum\nsystem Q dim=2\nstate s : Q = vec=[1, oops]\n")
    code, out = run("prob", p, "--test-circuit", "x")
    assert code == 2
    payload = json.loads(out)
    assert (payload["line"], payload["column"]) == (3, 23)
    assert "payload" in payload["error"]


def test_unknown_names_are_usage_errors(run, fx):
    code, out = run("purify", fx("classical_bits.opt"), "--state", "nosuch")
    assert code == 2
    assert "nosuch" in json.loads(out)["error"]


def test_unphysical_payloads_fail_at_load(run, tmp_path):
    p = tmp_path / "unphysical.opt"
    p.write_text(
        "theory quantum\nsystem Q dim=2\n"
        "state s : Q = dens=[[[2,0],[0,0]],[[0,0],[0,0]]]\n"
    )
    code, out = run("eval", p, "--circuit", "s")
    assert code == 2
    assert "line 3" in json.loads(out)["error"]


def test_output_is_byte_deterministic(run, fx):
    first = run("audit", fx("plus_born.opt"), "--axiom", "faithfulness",
                "--trials", 5)
    second = run("audit", fx("plus_born.opt"), "--axiom", "faithfulness",
                 "--trials", 5)
    assert first == second


def test_seed_changes_sampled_audits(run, fx):
    _, a = run("audit", fx("plus_born.opt"), "--axiom", "causality",
               "--trials", 4, "--seed", 1)
    _, b = run("audit", fx("plus_born.opt"), "--axiom", "causality",
               "--trials", 4, "--seed", 2)
    assert json.loads(a)["seed"] != json.loads(b)["seed"]
