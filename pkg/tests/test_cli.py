import json

import pytest

from qsg import cli


def run(capsys, argv):
    try:
        code = cli.main(argv)
    except SystemExit as exc:
        code = exc.code
    out = capsys.readouterr().out
    return (0 if code is None else code), out


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


@pytest.fixture
def pencil_file(tmp_path, capsys):
    code, out = run(capsys, ["gen", "--template", "case-i", "--k", "3",
                             "--n", "6", "--seed", "0"])
    assert code == 0
    return write(tmp_path, "pencil.json", json.loads(out))


def test_gen_verify_roundtrip(pencil_file, capsys):
    code, out = run(capsys, ["verify-psg", pencil_file])
    assert code == 0
    data = json.loads(out)
    assert data["delta_actual"] == "1/1"
    assert data["neighbor_counts"] == [2, 2, 2]


def test_verify_delta_gate(tmp_path, capsys):
    code, out = run(capsys, ["gen", "--template", "case-ii", "--k", "1",
                             "--n", "6", "--seed", "2"])
    assert code == 0
    cfg = write(tmp_path, "c2.json", json.loads(out))
    code, _ = run(capsys, ["verify-psg", cfg, "--delta", "1/2"])
    assert code == 2
    code, _ = run(capsys, ["verify-psg", cfg, "--delta", "0/1"])
    assert code == 0


def test_radical_square_fast_path(tmp_path, capsys):
    code, out = run(capsys, ["gen", "--template", "case-ii", "--k", "1",
                             "--n", "6", "--seed", "2"])
    cfg = json.loads(out)
    triple = write(tmp_path, "triple.json",
                   {"n": cfg["n"], "A": cfg["forms"][0],
                    "B": cfg["forms"][1], "C": cfg["forms"][2]})
    code, out = run(capsys, ["radical", triple])
    assert code == 0
    data = json.loads(out)
    assert data["result"] == "yes" and data["method"] == "square_pencil"


def test_decompose_certificate_and_trace(pencil_file, tmp_path, capsys):
    trace = str(tmp_path / "trace.json")
    code, out = run(capsys, ["decompose", pencil_file, "--delta", "1/1",
                             "--trace", trace])
    assert code == 0
    cert = json.loads(out)
    assert cert["J"] == [0, 1]
    assert cert["independent_dimension"] <= cert["bound"]
    assert json.loads(open(trace).read())[0]["stage"] == "verify"


def test_decompose_rejects_float_delta(pencil_file, capsys):
    code, _ = run(capsys, ["decompose", pencil_file, "--delta", "0.5"])
    assert code == 1


def test_decompose_delta_above_actual(pencil_file, tmp_path, capsys):
    code, out = run(capsys, ["gen", "--template", "case-ii", "--k", "1",
                             "--n", "6", "--seed", "2"])
    cfg = write(tmp_path, "c2.json", json.loads(out))
    code, _ = run(capsys, ["decompose", cfg, "--delta", "1/2"])
    assert code == 2


def test_malformed_config_pointer_paths(tmp_path, capsys):
    bad = write(tmp_path, "bad.json", {"n": 4, "forms": [{"oops": 1}]})
    code, out = run(capsys, ["verify-psg", bad])
    assert code == 1
    errs = json.loads(out)["errors"]
    assert any(e.startswith("/forms/0") for e in errs)
    nofile = str(tmp_path / "absent.json")
    code, _ = run(capsys, ["verify-psg", nofile])
    assert code == 1


def test_gen_n_too_small(capsys):
    code, out = run(capsys, ["gen", "--template", "case-iii", "--k", "2",
                             "--n", "5"])
    assert code == 1


def test_linear_sg(tmp_path, capsys):
    pts = write(tmp_path, "pts.json",
                {"dim": 2, "points": [["1/1", "0/1"], ["0/1", "1/1"],
                                      ["1/1", "1/1"]]})
    code, out = run(capsys, ["linear-sg", pts])
    assert code == 0
    data = json.loads(out)
    assert data["delta"] == "1/1" and data["dimension"] == 2
    assert data["dsw"] is True
    code, out = run(capsys, ["linear-sg", pts, "--mode", "affine"])
    assert json.loads(out)["delta"] == "0/1"


def test_graph_exports(pencil_file, tmp_path, capsys):
    code, out = run(capsys, ["graph", pencil_file, "--format", "csv"])
    assert code == 0
    assert out.splitlines()[0] == "i,j,cases,witness"
    assert "0,1,i,2" in out
    code, dot = run(capsys, ["graph", pencil_file, "--format", "dot"])
    assert code == 0
    assert 'n0 -- n1 [label="i"];' in dot
    # colored by the four-set partition when a certificate is supplied
    code, cert_out = run(capsys, ["decompose", pencil_file, "--delta",
                                  "1/1"])
    cert = write(tmp_path, "cert.json", json.loads(cert_out))
    code, dot2 = run(capsys, ["graph", pencil_file, "--format", "dot",
                              "--certificate", cert])
    assert code == 0
    assert "fillcolor=palegreen" in dot2


def test_byte_identical_determinism(pencil_file, capsys):
    outs = []
    for _ in range(2):
        code, out = run(capsys, ["decompose", pencil_file, "--delta", "1/1",
                                 "--seed", "3"])
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1]
    gens = []
    for _ in range(2):
        code, out = run(capsys, ["gen", "--template", "case-iii", "--k", "2",
                                 "--n", "6", "--seed", "4"])
        assert code == 0
        gens.append(out)
    assert gens[0] == gens[1]
