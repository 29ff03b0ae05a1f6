import json
from pathlib import Path

import pytest

from extforge.cli import main

ROOT = Path(__file__).resolve().parent.parent
PARAMS = ROOT / "params"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def report(out):
    return json.loads(out)


# --- extract ---------------------------------------------------------------------


def test_extract_tre_deterministic(capsys):
    args = ("extract", "--algo", "tre", "--params", PARAMS / "tre.json", "--x", "16:1234", "--seed", "20:abcde")
    code, out, _ = run(capsys, *args)
    assert code == 0 and out.strip() == "2:8"
    assert run(capsys, *args)[1] == out
    # bare hex takes the declared length
    assert run(capsys, "extract", "--algo", "tre", "--params", PARAMS / "tre.json", "--x", "1234", "--y", "abcde")[1] == out


@pytest.mark.parametrize("x", ["16:12345", "zz", "16:12g4", "12"])
def test_extract_malformed_hex(capsys, x):
    code, _, err = run(capsys, "extract", "--algo", "tre", "--params", PARAMS / "tre.json", "--x", x, "--seed", "20:abcde")
    assert code == 2 and "error" in err


def test_extract_regime(capsys):
    base = ("extract", "--algo", "raz", "--params", PARAMS / "raz.json", "--x", "8:5a", "--seed", "16:1234")
    assert run(capsys, *base)[0] == 3
    code, out, _ = run(capsys, *base, "--allow-out-of-regime")
    assert code == 0 and out.strip() == "2:4"


# every output bit is a linear function of x, so the zero source maps to zero
@pytest.mark.parametrize("algo,x,y,want", [("crtre", "6:00", None, "5:00"), ("nmraz-toy", "8:00", "16:0000", "4:0"), ("rate-half-toy", "16:0000", "20:00000", "2:0")])
def test_extract_zero_source(capsys, algo, x, y, want):
    p = json.loads((PARAMS / f"{algo}.json").read_text())
    args = ["extract", "--algo", algo, "--params", PARAMS / f"{algo}.json", "--x", x, "--allow-out-of-regime"]
    if y is None:
        from extforge.trevisan import CrTreParams

        n = CrTreParams.from_dict(p).seed_len
        y = f"{n}:" + "0" * (-(-n // 4))
    code, out, _ = run(capsys, *args, "--seed", y)
    assert code == 0 and out.strip() == want


def test_extract_missing_params(capsys, tmp_path):
    assert run(capsys, "extract", "--algo", "tre", "--params", tmp_path / "none.json", "--x", "0", "--seed", "0")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    assert run(capsys, "extract", "--algo", "raz", "--params", bad, "--x", "0", "--seed", "0")[0] == 2


def test_unknown_algo_is_usage_error(capsys):
    with pytest.raises(SystemExit) as e:
        main(["extract", "--algo", "nope"])
    assert e.value.code == 2


# --- plan --------------------------------------------------------------------------


@pytest.mark.parametrize("name", ["plan-raz", "plan-compile", "plan-crtre", "plan-nmraz"])
def test_plan_satisfied(capsys, name):
    code, out, _ = run(capsys, "plan", "--params", PARAMS / f"{name}.json")
    rep = report(out)
    assert code == 0 and rep["ok"]
    assert all(set(r) >= {"predicate", "lhs", "rhs", "satisfied"} for r in rep["report"])


def test_plan_compile_derived_error(capsys):
    rep = report(run(capsys, "plan", "--params", PARAMS / "plan-compile.json")[1])
    d = rep["derived"]
    from fractions import Fraction

    tau, e = Fraction(1, 256), Fraction(1, 2**20)
    # sqrt of the 2^-40 collision bound is 2^-20
    assert Fraction(d["eps*"]) == 3 * tau + 3 * e + 2 * e + 2 * Fraction(1, 2**20) == Fraction(12295, 1048576)
    # log 1/tau + max(k4 + (n1 - n4), k1 + 2 n4) with k4 = 4, n1 = 128, n4 = 16, k1 = 32
    assert d["k2*"] == 8 + max(4 + 112, 32 + 32) == 124


def test_plan_one_violation(capsys):
    code, out, err = run(capsys, "plan", "--params", PARAMS / "plan-compile-violated.json")
    rep = report(out)
    bad = [r for r in rep["report"] if not r["satisfied"]]
    assert code == 3 and len(bad) == 1 and bad[0]["predicate"] == "k2* <= n1"
    assert "k2* <= n1" in err


def test_plan_bad_files(capsys, tmp_path):
    p = tmp_path / "p.json"
    p.write_text("{not json")
    assert run(capsys, "plan", "--params", p)[0] == 2
    p.write_text('{"kind": "bogus"}')
    assert run(capsys, "plan", "--params", p)[0] == 2


# --- verify ------------------------------------------------------------------------


@pytest.mark.parametrize(
    "argv,measured",
    [
        (("--campaign", "aghp-bias", "--t", "3"), "3/32"),
        (("--campaign", "mac-forgery", "--delta", "4"), "1/8"),
        (("--campaign", "crtre-collision", "--n", "6"), "20160657/536870912"),
        (("--campaign", "code-distance", "--n", "5"), None),
        (("--campaign", "rejection"), 0),
    ],
)
def test_verify_campaigns(capsys, argv, measured):
    code, out, _ = run(capsys, "verify", *argv)
    rep = report(out)
    assert code == 0 and rep["pass"] and rep["rng_seed"] == 0
    if measured is not None:
        assert rep["measured"] == measured


def test_verify_unknown_campaign(capsys):
    assert run(capsys, "verify", "--campaign", "nope")[0] == 2


def test_verify_cap(capsys, monkeypatch):
    assert run(capsys, "verify", "--campaign", "entropy-lowering", "--cap", "3")[0] == 4
    monkeypatch.setenv("EXTFORGE_CAP", "3")
    assert run(capsys, "verify", "--campaign", "entropy-lowering")[0] == 4


def test_cap_flag_does_not_leak(capsys, monkeypatch):
    monkeypatch.delenv("EXTFORGE_CAP", raising=False)
    run(capsys, "verify", "--campaign", "entropy-lowering", "--cap", "3")
    import os

    assert "EXTFORGE_CAP" not in os.environ


def test_verify_report_file_identical(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(capsys, "verify", "--campaign", "aghp-bias", "--t", "2", "--report", a)
    run(capsys, "verify", "--campaign", "aghp-bias", "--t", "2", "--report", b)
    assert a.read_bytes() == b.read_bytes()


# --- pa-sim ------------------------------------------------------------------


def test_pa_sim_passive(capsys):
    code, out, _ = run(capsys, "pa-sim", "--strategy", "passive", "--sessions", 1000)
    rep = report(out)
    assert code == 0 and rep["key_mismatches"] == 0 and rep["both_accept"] == 1000
    for k in ("sessions", "both_accept", "aborts", "key_mismatches", "measured_delta", "measured_key_sd"):
        assert k in rep


def test_pa_sim_flip_round3_alpha4(capsys):
    rep = report(run(capsys, "pa-sim", "--strategy", "flip-round-3", "--alpha", 4, "--sessions", 2000)[1])
    assert rep["both_accept"] / rep["sessions"] <= 2**-4 + rep["radius"]


def test_pa_sim_memory_tamper(capsys):
    rep = report(run(capsys, "pa-sim", "--strategy", "memory-tamper", "--sessions", 1000)[1])
    assert rep["within_budget"] and rep["measured_delta"] <= rep["budget"]["delta"] + rep["radius"]


def test_pa_sim_unknown_strategy(capsys):
    assert run(capsys, "pa-sim", "--strategy", "nope")[0] == 2


def test_pa_sim_strategy_file(capsys, tmp_path):
    f = tmp_path / "eve.json"
    f.write_text(json.dumps({"name": "script-w", "corrupt": {"party": "alice", "xor_w": "32:00000001"}, "xor": {"5": "16:0001"}}))
    tr = tmp_path / "t.jsonl"
    rep = report(run(capsys, "pa-sim", "--strategy-file", f, "--sessions", 50, "--transcripts", tr)[1])
    assert rep["strategy"] == "script-w" and rep["aborts"] == 50
    lines = tr.read_text().splitlines()
    assert "header" in json.loads(lines[0]) and len(lines) == 51
