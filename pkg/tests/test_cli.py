import json
from pathlib import Path

import pytest

from kronloc.cli import EXIT_CAP, EXIT_INPUT, EXIT_OK, main

DATA = Path(__file__).resolve().parent.parent / "examples" / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("d,e,value", [(2, 3, "13"), (3, 4, "68"), (1, 2, "3"), (3, 5, "68"),
                                       (1, 3, "1"), (1, 4, "0"), (2, 5, "3")])
def test_euler(capsys, d, e, value):
    code, out, _ = run(capsys, "euler", "--m", 3, "--d", d, "--e", e)
    assert code == EXIT_OK and out.splitlines()[0] == value


def test_euler_json_and_coprimality(capsys):
    code, out, _ = run(capsys, "euler", "--m", 3, "--d", 3, "--e", 4, "--format", "json")
    obj = json.loads(out)
    assert obj["value"] == "68" and obj["status"] == "exact"
    code, _, err = run(capsys, "euler", "--m", 3, "--d", 2, "--e", 2)
    assert code == EXIT_INPUT and "coprime" in err


def test_euler_census_route_and_cap(capsys):
    # (3,5) for K(4) is in no closed-form orbit; its census has positive-dimensional data
    code, out, _ = run(capsys, "euler", "--m", 4, "--d", 3, "--e", 5, "--format", "json")
    obj = json.loads(out)
    assert code == EXIT_OK and obj["route"].startswith("census") and obj["cap"] == 10**7
    assert obj["status"] == "flagged" and obj["value"] is None
    code, out, _ = run(capsys, "euler", "--m", 4, "--d", 3, "--e", 5, "--cap", 3)
    assert code == EXIT_CAP and json.loads(out)["status"] == "partial"


def test_enumerate(capsys, tmp_path):
    code, out, _ = run(capsys, "enumerate", "--m", 3, "--d", 1, "--e", 3)
    assert code == EXIT_OK and out.startswith("data: 1\n")
    code, out, _ = run(capsys, "enumerate", "--m", 3, "--d", 2, "--e", 4)
    assert out.startswith("data: 0\n")
    outdir = tmp_path / "dots"
    code, out, _ = run(capsys, "enumerate", "--m", 3, "--d", 1, "--e", 2, "--emit", "dot",
                       "--out", outdir)
    files = sorted(outdir.glob("*.dot"))
    assert len(files) == 3
    for f in files:
        text = f.read_text()
        assert text.startswith("digraph") and text.rstrip().endswith("}")
    first = {f.name: f.read_bytes() for f in files}
    run(capsys, "enumerate", "--m", 3, "--d", 1, "--e", 2, "--emit", "dot", "--out", outdir,
        "--threads", 1)
    assert {f.name: f.read_bytes() for f in sorted(outdir.glob("*.dot"))} == first


def test_enumerate_cap(capsys):
    code, out, _ = run(capsys, "enumerate", "--m", 3, "--d", 3, "--e", 7, "--cap", 10)
    assert code == EXIT_CAP and json.loads(out)["status"] == "cap exceeded"


def test_decompose(capsys):
    code, out, _ = run(capsys, "decompose", "--d", 8, "--e", 13, "--format", "json")
    assert json.loads(out)["tuple"] == [1, 2, 2]
    code, out, _ = run(capsys, "decompose", "--d", 5, "--e", 8, "--format", "json")
    assert json.loads(out)["startingVector"] == [3, 5]
    code, out, _ = run(capsys, "decompose", "--d", 1, "--e", 2, "--format", "json")
    chain = json.loads(out)["chain"]
    assert len(chain) == 1 and (chain[0]["ds"], chain[0]["es"]) == (0, 1)
    code, _, _ = run(capsys, "decompose", "--d", 4, "--e", 6)
    assert code == EXIT_INPUT


def test_lowerbound(capsys):
    code, out, _ = run(capsys, "lowerbound", "--m", 3, "--d", 5, "--e", 8)
    assert code == EXIT_OK and "a=1664" in out and "K=12" in out
    L = float(out.split("L=")[1].split()[0])
    assert abs(L - 2.1719) < 1e-3
    code, _, _ = run(capsys, "lowerbound", "--m", 3, "--d", 2, "--e", 4)
    assert code == EXIT_INPUT


def test_series(capsys):
    assert run(capsys, "series", "coeff", "--a", 2, "--b", 2, "--m", 1, "--n", 5)[1].strip() == "8"
    out = run(capsys, "series", "solve", "--phi", "1+x^2", "--order", 9)[1]
    assert out.split() == ["0", "1", "0", "1", "0", "2", "0", "5", "0", "14"]
    out = run(capsys, "series", "x0", "--a", 1, "--b", 2)[1]
    assert out.splitlines()[0] == "0.5"
    code, _, _ = run(capsys, "series", "solve", "--phi", "1+y", "--order", 3)
    assert code == EXIT_INPUT


def test_stability_files(capsys):
    code, out, _ = run(capsys, "stability", DATA / "tree_8_13.json")
    assert code == EXIT_OK and out.strip() == "stable"
    assert run(capsys, "stability", DATA / "star_1_3.json")[1].strip() == "stable"
    out = run(capsys, "stability", DATA / "disconnected.json")[1]
    assert out.startswith("unstable\ndestabilizing sub-dimension:")


def test_stability_schema_error(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"m": 3, "sources": [{"id": "a"}]}')
    assert run(capsys, "stability", bad)[0] == EXIT_INPUT


def test_conjecture_f(capsys):
    code, out, _ = run(capsys, "conjecture-f", "--m", 3, "--r", 1)
    assert "conjectural" in out
    f, k = out.splitlines()[0], out.splitlines()[1].split("= ")[1]
    assert f == k
    assert run(capsys, "conjecture-f", "--m", 3, "--r", 3)[0] == EXIT_INPUT


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# batch settings\nformat = json\ncap = 5\n")
    code, out, _ = run(capsys, "enumerate", "--m", 3, "--d", 3, "--e", 7, "--config", cfg)
    assert code == EXIT_CAP
    code, out, _ = run(capsys, "enumerate", "--m", 3, "--d", 1, "--e", 3, "--config", cfg,
                       "--cap", 1000)
    assert code == EXIT_OK and json.loads(out)["totalChi"] == "1"
    cfg.write_text("colour = 3\n")
    assert run(capsys, "euler", "--m", 3, "--d", 2, "--e", 3, "--config", cfg)[0] == EXIT_INPUT


def test_bad_arguments(capsys):
    assert run(capsys, "euler", "--m", 3)[0] == EXIT_INPUT
    assert run(capsys, "nonsense")[0] == EXIT_INPUT
