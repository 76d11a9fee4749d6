import json
import shutil
import subprocess
import sys

import pytest

from klrbound.cli import main, run

NU = '{"0":2,"1":1}'
LAM = '{"0":2}'


def call(capsys, *argv):
    status = main(list(argv))
    out = capsys.readouterr()
    return status, out.out, out.err


def test_bound_json(capsys):
    status, out, _ = call(capsys, "bound", "--seq=0,1,2,3,2,1,0", "-r", "4",
                          "--weight", '{"0":1,"3":1}', "--format", "json")
    assert status == 0
    data = json.loads(out)
    assert data["seq"] == [0, 1, 2, 3, 2, 1, 0] and data["anchor"] == 4
    assert isinstance(data["bound"], int)


def test_stable_and_trace_text(capsys):
    status, out, _ = call(capsys, "stable", "--seq=0,0", "-r", "2")
    assert status == 0 and "survivors" in out
    status, out, _ = call(capsys, "trace", "--seq=0,1,0", "-r", "3", "--strategy", "random:7")
    assert status == 0 and "support" in out


def test_trace_strategies_agree_on_support():
    supports = set()
    for strat in ("default", "reverse", "random:1", "random:2"):
        _, out, _ = run(["trace", "--seq=0,1,2,1,0", "-r", "5", "--strategy", strat, "--format", "json"])
        supports.add(json.dumps(json.loads(out)["support"], sort_keys=True))
    assert len(supports) == 1


def test_reduce_and_mult(capsys):
    status, out, _ = call(capsys, "reduce", "x(1)*d(1)*e(0,0)", "--format", "json")
    assert status == 0 and len(json.loads(out)["terms"]) == 2
    status, out, _ = call(capsys, "mult", "d(1)*e(0,0)", "d(1)*e(0,0)")
    assert status == 0 and out.strip() == "0"


def test_verify_exit_codes_and_determinism(capsys):
    status, out1, _ = call(capsys, "verify", "--nu", NU, "--weight", LAM, "--format", "json",
                           "--workers", "1")
    assert status == 0
    status, out2, _ = call(capsys, "verify", "--nu", NU, "--weight", LAM, "--format", "json",
                           "--workers", "2")
    assert status == 0 and out1 == out2
    data = json.loads(out1)
    assert data["timing_ms"] is None and all(c["pass"] for c in data["checks"])
    assert {c["kind"] for c in data["checks"]} >= {"theorem", "corollary"}


def test_verify_single_check_with_nilpotency(capsys):
    status, out, _ = call(capsys, "verify", "--nu", '{"0":1,"1":1}', "--weight", '{"0":1,"1":1}',
                          "--seq=0,1", "-r", "2", "--nilpotency", "--format", "json", "--timing")
    assert status == 0
    data = json.loads(out)
    assert data["timing_ms"] is not None
    theorem = [c for c in data["checks"] if c["kind"] == "theorem"]
    assert theorem == [{"kind": "theorem", "seq": [0, 1], "r": 2, "bound": 2,
                        "nilpotency": 2, "pass": True}]


def test_nilpotency_and_dims(capsys):
    status, out, _ = call(capsys, "nilpotency", "--seq=0,1", "-r", "2", "--weight", '{"0":1,"1":1}',
                          "--format", "json")
    assert status == 0 and json.loads(out)["nilpotency"] == 2
    status, out, _ = call(capsys, "dims", "--nu", '{"0":2}', "--weight", '{"0":2}', "--format", "json")
    assert status == 0
    data = json.loads(out)
    assert data["total"] == 4 and sum(data["graded"].values()) == 4


def test_components_and_tightness(capsys):
    status, out, _ = call(capsys, "components", "--nu", '{"0":1,"2":1}', "--format", "json")
    assert status == 0 and len(json.loads(out)["components"]) == 1
    status, out, _ = call(capsys, "tightness", "--nu", NU, "--weight", LAM, "--format", "json")
    assert status == 0 and "gaps" in json.loads(out)


@pytest.mark.parametrize("argv", [
    ["bound", "--seq=0,1", "-r", "5"],                       # anchor out of range
    ["reduce", "x(1)*"],                                     # parse error
    ["reduce", "e(0,1)*e(1,0)"],                             # idempotent mismatch
    ["bound", "--seq=0,1", "-r", "1", "--format", "svg"],    # svg only for render/trace
    ["verify", "--nu", '{"0":6}', "--weight", '{"0":1}'],    # over the |nu| cap
    ["verify", "--nu", NU, "--weight", LAM, "--seq=1,1,0"],  # seq not of nu
])
def test_usage_errors_exit_2(capsys, argv):
    status, _, err = call(capsys, *argv)
    assert status == 2 and "error" in err


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["bound", "--seq", "x,y", "-r", "1"])
    assert exc.value.code == 2


def test_output_file_and_plots(tmp_path, capsys):
    target = tmp_path / "bound.json"
    assert main(["bound", "--seq=0,0", "-r", "2", "--format", "json", "-o", str(target)]) == 0
    assert json.loads(target.read_text())["anchor"] == 2
    for argv, name in [(["trace", "--seq=0,1,0", "-r", "3"], "trace.svg"),
                       (["render", "--seq=0,1,0"], "render.svg"),
                       (["verify", "--nu", NU, "--weight", LAM, "--nilpotency", "--workers", "1"],
                        "verify.svg"),
                       (["dims", "--nu", '{"0":2}', "--weight", '{"0":2}'], "dims.png")]:
        first, second = tmp_path / ("a-" + name), tmp_path / ("b-" + name)
        assert main(argv + ["--plot", str(first)]) == 0
        assert main(argv + ["--plot", str(second)]) == 0
        assert first.stat().st_size > 0
        if name.endswith(".svg"):
            assert first.read_bytes() == second.read_bytes()
    capsys.readouterr()


def test_render_svg_stdout(capsys):
    status, out, _ = call(capsys, "render", "--seq=0,1,0", "-r", "3", "--format", "svg")
    assert status == 0 and out.lstrip().startswith("<")


def test_cache_dir_env(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("KLR_CACHE_DIR", str(tmp_path))
    assert main(["dims", "--nu", '{"0":1,"1":1}', "--weight", '{"0":1,"1":1}']) == 0
    assert list(tmp_path.glob("*.json"))
    capsys.readouterr()


@pytest.mark.skipif(shutil.which("klrbound") is None, reason="console script not installed")
def test_console_script():
    argv = ["bound", "--seq=0,0", "-r", "2", "--weight", '{"0":2}', "--format", "json"]
    proc = subprocess.run(["klrbound", *argv], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == run(argv)[1]
    proc = subprocess.run([sys.executable, "-m", "klrbound.cli", "reduce", "e(0"],
                          capture_output=True, text=True)
    assert proc.returncode == 2
