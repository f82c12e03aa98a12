import io
import json

import pytest

from chorcheck.cli import EXIT_FAIL, EXIT_OK, EXIT_TIMEOUT, EXIT_USAGE, main

from conftest import CORPUS

GOLDEN = CORPUS.parent / "tests" / "golden"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in argv], out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def test_check_availability():
    code, out, _ = run("check", CORPUS / "ob.gc", "--formula", CORPUS / "ob.gl", "--name", "availability")
    assert code == EXIT_OK
    assert out == "availability: holds\n"


def test_check_all_formulas_in_file():
    code, out, _ = run("check", CORPUS / "ob.gc", "--formula", CORPUS / "ob.gl")
    assert code == EXIT_OK
    assert out.splitlines() == ["availability: holds", "usage: holds", "coupling: holds"]


def test_check_end_on_inaction():
    assert run("check", "0", "--formula", "end")[0] == EXIT_OK
    assert run("check", "0", "--formula", "~end")[0] == EXIT_FAIL


def test_connectedness_fails():
    code, out, _ = run("check", CORPUS / "ob.gc", "--formula", CORPUS / "connectedness.gl")
    assert code == EXIT_FAIL
    assert out == "connectedness: fails\n"


def test_response_with_chor_selection_and_witness():
    code, out, _ = run(
        "check", CORPUS / "response.gc", "--chor", "C2", "--formula", CORPUS / "response.gl", "--witness"
    )
    assert code == EXIT_OK
    assert "P_exists" in out and "P_may" in out


def test_check_json_mirrors_verdict():
    code, out, _ = run(
        "check", CORPUS / "response.gc", "--chor", "C1", "--formula", CORPUS / "response.gl",
        "--format", "json", "--witness",
    )
    data = json.loads(out)
    assert code == EXIT_OK
    (result,) = data["results"]
    assert result["holds"] is True and result["witness"]["rule"] == "P_exists"


def test_state_override():
    f = "x@D = 7@D"
    assert run("check", CORPUS / "response.gc", "--chor", "C1", "--formula", f)[0] == EXIT_FAIL
    assert run("check", CORPUS / "response.gc", "--chor", "C1", "--formula", f, "--state", "x@D = 7")[0] == EXIT_OK


def test_usage_errors():
    code, _, err = run("check", "A -> B : ", "--formula", "end")
    assert code == EXIT_USAGE and "<inline>:1:" in err
    code, _, err = run("check", CORPUS / "response.gc", "--formula", "end")
    assert code == EXIT_USAGE and "several" in err
    assert run("check", CORPUS / "ob.gc")[0] == EXIT_USAGE
    assert run("bogus")[0] == EXIT_USAGE


def test_check_rejects_recursion_by_name():
    code, _, err = run("check", CORPUS / "pcp" / "pcp_n1.gc", "--formula", "end")
    assert code == EXIT_USAGE
    assert "rec X" in err


def test_simulate_ob():
    code, out, _ = run("simulate", CORPUS / "ob.gc")
    lines = out.splitlines()
    assert code == EXIT_OK
    assert len([line for line in lines if line.strip()[:1].isdigit()]) == 7
    assert lines[-1] == "status: terminated after 7 steps"


def test_simulate_json_golden():
    _, out, _ = run("simulate", CORPUS / "ob.gc", "--format", "json")
    assert out == (GOLDEN / "simulate_ob.json").read_text()


def test_simulate_inaction():
    code, out, _ = run("simulate", "0", "--format", "json")
    data = json.loads(out)
    assert code == EXIT_OK and data["steps"] == [] and data["status"] == "terminated"


def test_simulate_pcp_budget():
    _, out, _ = run("simulate", CORPUS / "pcp" / "pcp_n1.gc", "--budget", "10", "--format", "json")
    data = json.loads(out)
    assert len(data["steps"]) == 10 and data["status"] == "budget exhausted"
    assert run("simulate", CORPUS / "pcp" / "pcp_n1.gc")[0] == EXIT_USAGE


def test_simulate_stuck():
    _, out, _ = run("simulate", "A -> B : k<x, y>. 0")
    assert "status: stuck" in out


def test_simulate_all_and_seed():
    _, out, _ = run("simulate", CORPUS / "ob.gc", "--all", "--format", "json")
    data = json.loads(out)
    assert len(data["nodes"]) == 8 and len(data["edges"]) == 7 and data["complete"]
    a = run("simulate", CORPUS / "pcp" / "pcp_n2.gc", "--budget", "15", "--seed", "3")[1]
    b = run("simulate", CORPUS / "pcp" / "pcp_n2.gc", "--budget", "15", "--seed", "3")[1]
    assert a == b


def test_pcp_solution():
    code, out, _ = run("pcp", "--pairs", "0:0", "--depth", "30")
    assert code == EXIT_OK
    assert "SOLUTION with sequence [1]" in out
    assert out == (GOLDEN / "pcp_0_0.txt").read_text()


def test_pcp_no_solution():
    code, out, _ = run("pcp", "--pairs", "0:1", "--depth", "30")
    assert code == EXIT_FAIL
    assert "NO SOLUTION FOUND (bound 30)" in out


def test_pcp_report_golden():
    _, out, _ = run("pcp", "--pairs", "01:0,1:101", "--depth", "12")
    assert out == (GOLDEN / "pcp_01_0_1_101.txt").read_text()


def test_pcp_malformed():
    assert run("pcp", "--pairs", "0:2")[0] == EXIT_USAGE
    assert run("pcp")[0] == EXIT_USAGE


def test_output_is_reproducible():
    args = ("simulate", CORPUS / "pcp" / "pcp_n3.gc", "--budget", "25")
    assert run(*args)[1] == run(*args)[1]


def test_timeout_exit_code():
    code, _, err = run("pcp", "--pairs", "1:101,10:00,011:11", "--depth", "200", "--timeout", "0.5")
    assert code == EXIT_TIMEOUT
    assert "timed out" in err and "progress" in err


@pytest.mark.parametrize("mode,colored", [("always", True), ("never", False)])
def test_color_env(monkeypatch, mode, colored):
    monkeypatch.setenv("CHORCHECK_COLOR", mode)
    _, out, _ = run("check", "0", "--formula", "end")
    assert ("\033[" in out) is colored
