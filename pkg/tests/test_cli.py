import json

import pytest

from padicweil.cli import main, parse_fibers
from padicweil.reports import ModuleSpecFile, SpecError


def run(tmp_path, argv):
    out = tmp_path / "out.json"
    code = main(argv + ["--out", str(out)])
    return code, (json.loads(out.read_text()) if out.exists() else None), out


def spec(tmp_path, doc, name="spec.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def test_lfunction_gauss(tmp_path):
    code, doc, _ = run(tmp_path, ["lfunction", "--spec", spec(tmp_path, {"p": 3, "P": [0, 0, 1]}), "--n-max", "4"])
    assert code == 0 and doc["status"] == "pass"
    assert doc["oracle"]["l_polynomial"] == [["1", "0"], ["1", "2"]]
    assert doc["newton_slopes"] == ["1/2"]
    assert doc["weights"]["status"] == "pass"
    assert doc["oracle"]["sums"][0]["squared_modulus"] == "3"


def test_lfunction_trivial(tmp_path):
    code, doc, _ = run(tmp_path, ["lfunction", "--spec", spec(tmp_path, {"p": 3, "P": [0]}), "--n-max", "3"])
    assert code == 0
    assert doc["cohomology"]["dim_h1"] == 0 and doc["oracle"]["h2c_factor"] == [["1", "0"], ["-3", "0"]]
    assert doc["newton_slopes"]["h2c"] == ["1"]


def test_regime_exit(tmp_path):
    code, doc, _ = run(tmp_path, ["lfunction", "--spec", spec(tmp_path, {"p": 3, "P": [0, 0, 0, 1]}), "--n-max", "2"])
    assert code == 3 and doc is None


@pytest.mark.parametrize("bad", [
    {"p": 3, "P": [0, 0, 1], "extra": 1},
    {"p": 4, "P": [0, 1]},
    {"p": 17, "P": [0, 1]},
    {"p": 3, "P": [0] * 9 + [1]},
    {"p": 3, "q": 6, "P": [0, 1]},
    {"p": 3, "P": [0, 0, 1], "base": {"twists": [[0]] * 5}},
    {"p": 3, "P": [0, 0, 1], "base": {"twists": [[0]], "frobenius": "other"}},
    {"p": 3, "P": "x^2"},
])
def test_spec_errors(tmp_path, bad):
    code, _, _ = run(tmp_path, ["lfunction", "--spec", spec(tmp_path, bad), "--n-max", "2"])
    assert code == 2


def test_connection_must_match_twists():
    ok = {"p": 5, "P": [0, 0, 0, 1], "base": {"twists": [[0], [0, 1]],
                                              "connection": [[[], []], [[], [[[-1, 1]]]]]}}
    assert ModuleSpecFile.from_json(ok).summands == [[0, 0, 0, 1], [0, 1, 0, 1]]
    bad = json.loads(json.dumps(ok))
    bad["base"]["connection"][1][1] = [[[1, 1]]]
    with pytest.raises(SpecError):
        ModuleSpecFile.from_json(bad)


def test_fourier_command(tmp_path):
    s = spec(tmp_path, {"p": 5, "P": [0, 0, 0, 1]})
    code, doc, _ = run(tmp_path, ["fourier", "--spec", s, "--fibers", "0,1,0:1"])
    assert code == 0 and doc["dimensions"] == [2] and doc["constant_dimension"]
    code, doc, _ = run(tmp_path, ["fourier", "--spec", s, "--fibers", ""])
    assert code == 0 and doc["fibers"] == []
    code, doc, _ = run(tmp_path, ["fourier", "--spec", spec(tmp_path, {"p": 3, "P": [0]}), "--fibers", "1"])
    assert code == 0 and doc["dimensions"] == [0]


def test_parse_fibers():
    assert parse_fibers("0, 3,1:2", 5) == [0, 3, [1, 2]]
    with pytest.raises(SpecError):
        parse_fibers("a", 5)


def test_verify_and_determinism(tmp_path):
    code, doc, out = run(tmp_path, ["verify", "--suite", "weyl", "--seed", "3"])
    assert code == 0 and doc["summary"]["status"] == "pass"
    first = out.read_bytes()
    run(tmp_path, ["verify", "--suite", "weyl", "--seed", "3"])
    assert out.read_bytes() == first


def test_lfunction_byte_identical(tmp_path):
    s = spec(tmp_path, {"p": 5, "P": [0, 1, 0, 1]})
    _, _, out = run(tmp_path, ["lfunction", "--spec", s, "--n-max", "3"])
    first = out.read_bytes()
    run(tmp_path, ["lfunction", "--spec", s, "--n-max", "3"])
    assert out.read_bytes() == first


def test_verify_failure_exit(tmp_path):
    # an impossible precision target makes the Gauss suite fail rather than crash
    code, doc, _ = run(tmp_path, ["verify", "--suite", "weights", "--precision", "1000"])
    assert code == 4 and doc["summary"]["failed"]
