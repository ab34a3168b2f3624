"""Command line and protocol surfaces."""

import json
import subprocess
import sys
import urllib.request

import pytest

from conftest import FIXTURE_DIR, GOLDEN_DIR

FILES = [str(FIXTURE_DIR / "base.cds"), str(FIXTURE_DIR / "algs.alg")]
ALL_FILES = FILES + [str(FIXTURE_DIR / "tables.tbl"), str(FIXTURE_DIR / "tasters.alg")]


def run_cli(*args, stdin=""):
    return subprocess.run(
        [sys.executable, "-m", "cdslab", *args],
        capture_output=True,
        text=True,
        input=stdin,
        timeout=120,
    )


def test_eval_trace_matches_golden_and_is_stable():
    args = ["eval", *FILES, "--alg", "A", "--arg", "{a=tt,b=tt}", "--request", "out", "--trace"]
    first = run_cli(*args)
    second = run_cli(*args)
    assert first.returncode == 0
    assert first.stdout == second.stdout
    assert first.stdout == (GOLDEN_DIR / "a_tt_tt.trace").read_text()


def test_eval_err_separation_golden():
    stuck = run_cli("eval", *FILES, "--alg", "A", "--arg", "{a=err}", "--request", "out", "--trace")
    err = run_cli("eval", *FILES, "--alg", "A'", "--arg", "{a=err}", "--request", "out", "--trace")
    assert stuck.stdout == (GOLDEN_DIR / "a_err_bottom.trace").read_text()
    assert err.stdout == (GOLDEN_DIR / "aprime_err_bottom.trace").read_text()


def test_eval_without_trace_prints_result_line():
    out = run_cli("eval", *FILES, "--alg", "A'", "--arg", "{a=err}", "--request", "out")
    assert out.stdout == "RESULT err\n"


def test_repl_and_eval_traces_byte_identical():
    eval_out = run_cli(
        "eval", *FILES, "--alg", "A", "--arg", "{a=tt,b=tt}", "--request", "out", "--trace"
    ).stdout
    repl = run_cli("repl", stdin=f"load {' '.join(FILES)}\nalg A arg {{a=tt,b=tt}}\nrequest out\nquit\n")
    assert eval_out in repl.stdout


def test_repl_manual_flow():
    script = (
        f"load {' '.join(FILES)}\n"
        "alg A arg manual\n"
        "request out\n"
        "answer tt\n"
        "answer err\n"
        "quit\n"
    )
    out = run_cli("repl", stdin=script).stdout
    assert "VALOF b\nRESULT stuck" in out
    assert "VALOF a\nRESULT stuck" in out.replace("ANS tt\n", "")
    assert "RESULT err" in out


def test_exit_codes():
    usage = run_cli("eval")
    assert usage.returncode == 2
    bad_file = run_cli("eval", "no_such_file.cds", "--alg", "A", "--arg", "{}", "--request", "out")
    assert bad_file.returncode == 1
    bad_name = run_cli("eval", *FILES, "--alg", "nope", "--arg", "{}", "--request", "out")
    assert bad_name.returncode == 1
    bad_literal = run_cli("eval", *FILES, "--alg", "A", "--arg", "{zz=1}", "--request", "out")
    assert bad_literal.returncode == 1


def test_classify_por():
    out = run_cli("classify", *ALL_FILES, "--table", "por")
    assert out.returncode == 0
    assert "monotone: yes" in out.stdout
    assert "stable: no" in out.stdout
    assert "sequential: no" in out.stdout


def test_enum_three_strategies():
    out = run_cli("enum", str(FIXTURE_DIR / "base.cds"), "--from", "oo", "--to", "o")
    assert out.returncode == 0
    assert out.stdout.startswith("3 algorithms")
    assert "ask 1.?" in out.stdout and "ask 2.?" in out.stdout


def test_repl_ortho_member_subtype_enum_classify():
    script = (
        f"load {' '.join(ALL_FILES)}\n"
        "enum oo o\n"
        "classify bk\n"
        "ortho T2 asks2\n"
        "member needs_second asks2\n"
        "subtype rec_ypc rec_yp\n"
        "quit\n"
    )
    out = run_cli("repl", stdin=script)
    assert "3 algorithms" in out.stdout
    assert "stable: yes" in out.stdout
    assert "sequential: no" in out.stdout
    assert "orthogonal: yes" in out.stdout
    assert "member: yes" in out.stdout
    assert "subtype: yes" in out.stdout


def test_repl_print_reproduces_workspace():
    out = run_cli("repl", stdin=f"load {' '.join(ALL_FILES)}\nprint\nquit\n")
    assert "alg A : B2 -> B {" in out.stdout
    assert "table por : B2 -> B {" in out.stdout
    assert "behaviour rec_yp : recexp { tests has_price has_year; }" in out.stdout


def test_eval_with_algorithm_argument():
    files = ALL_FILES
    out = run_cli("eval", *files, "--alg", "T2", "--arg", "alg:asks2", "--request", "ans")
    assert out.returncode == 0
    assert out.stdout == "RESULT value:err\n"
    mismatch = run_cli("eval", *files, "--alg", "T2", "--arg", "alg:has_year", "--request", "ans")
    assert mismatch.returncode == 1


def test_eval_with_higher_order_literal():
    files = ALL_FILES
    out = run_cli("eval", *files, "--alg", "T2", "--arg", "{<{}|-out>=valof 2.in}", "--request", "ans")
    assert out.stdout == "RESULT value:err\n"
    errd = run_cli("eval", *files, "--alg", "T2", "--arg", "{<{}|-out>=err}", "--request", "ans")
    assert errd.stdout == "RESULT err\n"


# --- protocol server ----------------------------------------------------------

@pytest.fixture(scope="module")
def server():
    proc = subprocess.Popen(
        [sys.executable, "-m", "cdslab", "serve", *ALL_FILES, "--listen", "127.0.0.1:0"],
        stdout=subprocess.PIPE,
        text=True,
    )
    banner = json.loads(proc.stdout.readline())
    yield banner["listening"]
    proc.terminate()
    proc.wait(timeout=10)


def send(addr, *messages):
    body = "\n".join(json.dumps(m) if isinstance(m, dict) else m for m in messages).encode()
    req = urllib.request.Request(f"http://{addr}/api", data=body, method="POST")
    with urllib.request.urlopen(req, timeout=30) as resp:
        lines = resp.read().decode().splitlines()
    return [json.loads(line) for line in lines]


def test_protocol_load_and_list(server):
    (reply,) = send(server, {"op": "load", "text": "cds tiny { cells t; values v; events t:v; }"})
    assert reply["ok"] and {"kind": "cds", "name": "tiny"} in reply["names"]
    (listing,) = send(server, {"op": "list"})
    assert {"kind": "alg", "name": "A"} in listing["names"]


def test_protocol_request_flow_matches_repl_example(server):
    (opened,) = send(server, {"op": "alg", "name": "A", "arg": "{a=err}"})
    sid = opened["session"]
    (requested,) = send(server, {"op": "request", "session": sid, "cell": "out"})
    assert requested["ok"] and requested["outcome"] == "stuck"
    assert requested["pending"]["valof"] == "b"
    assert requested["trace"] == ["REQ out", "VALOF b", "RESULT stuck"]


def test_protocol_manual_answer_flow(server):
    (opened,) = send(server, {"op": "alg", "name": "A", "arg": "manual"})
    sid = opened["session"]
    (r1,) = send(server, {"op": "request", "session": sid, "cell": "out"})
    assert r1["pending"]["valof"] == "b"
    assert "err" in r1["pending"]["values"]
    (r2,) = send(server, {"op": "answer", "session": sid, "value": "tt"})
    assert r2["pending"]["valof"] == "a"
    (r3,) = send(server, {"op": "answer", "session": sid, "value": "err"})
    assert r3["outcome"] == "err"
    (reset,) = send(server, {"op": "reset", "session": sid})
    assert reset["ok"]


def test_protocol_malformed_json(server):
    (reply,) = send(server, "this is not json")
    assert reply == {"ok": False, "error": "parse", "detail": reply["detail"]}


def test_protocol_wrong_phase_and_unknown(server):
    (opened,) = send(server, {"op": "alg", "name": "A", "arg": "{a=tt,b=tt}"})
    sid = opened["session"]
    (reply,) = send(server, {"op": "answer", "session": sid, "value": "tt"})
    assert not reply["ok"] and reply["error"] == "wrong-phase"
    (reply,) = send(server, {"op": "request", "session": 99999, "cell": "out"})
    assert not reply["ok"] and reply["error"] == "unknown-name"
    (reply,) = send(server, {"op": "frobnicate"})
    assert not reply["ok"] and reply["error"] == "unknown-op"


def test_protocol_value_outcome_and_table(server):
    (opened,) = send(server, {"op": "alg", "name": "A", "arg": "{a=tt,b=tt}"})
    sid = opened["session"]
    (reply,) = send(server, {"op": "request", "session": sid, "cell": "out"})
    assert reply["outcome"] == "value" and reply["value"] == "tt"
    assert reply["table"] == ["a=tt", "b=tt"]
    assert reply["trace"][-1] == "RESULT value:tt"


def test_protocol_concurrent_sessions(server):
    import concurrent.futures

    def run_one(i):
        literal = "{a=tt,b=tt}" if i % 2 == 0 else "{a=err}"
        (opened,) = send(server, {"op": "alg", "name": "A", "arg": literal})
        (reply,) = send(server, {"op": "request", "session": opened["session"], "cell": "out"})
        return literal, reply["outcome"]

    with concurrent.futures.ThreadPoolExecutor(max_workers=8) as pool:
        results = list(pool.map(run_one, range(16)))
    for literal, outcome in results:
        assert outcome == ("value" if literal == "{a=tt,b=tt}" else "stuck")
