import json

import pytest

from milnork.cli import run


def cli(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out.strip(), err.strip()


def test_bounds(capsys):
    assert cli(capsys, "bounds", "--theorem", "t4") == (0, "46", "")
    assert cli(capsys, "bounds", "--theorem", "t2", "--n", "3", "--i", "2")[:2] == (0, "10")
    assert cli(capsys, "bounds", "--theorem", "t2", "--n", "3", "--i", "9")[0] == 4


def test_hilbert(capsys):
    assert cli(capsys, "hilbert", "-a", "-1", "-b", "-1", "-p", "inf")[:2] == (0, "-1")
    assert cli(capsys, "hilbert", "-a", "2", "-b", "7", "-p", "7")[:2] == (0, "1")


def test_isotropy(capsys):
    assert cli(capsys, "isotropy", "--form", "1,1,1")[1] == "anisotropic"
    assert cli(capsys, "isotropy", "--form", "1,-1", "--search-height", "1")[1] == "isotropic 1,1"


def test_normalize(capsys):
    assert cli(capsys, "normalize", "--class", "{4,3}@2^2")[1] == "2*{2,3}@2^2"


def test_bad_flags(capsys):
    assert cli(capsys, "frobnicate")[0] == 4
    assert cli(capsys, "generate", "--theorem", "t1", "--n", "1")[0] == 4


def test_parse_error(capsys):
    assert cli(capsys, "normalize", "--class", "{4,3")[0] == 3


@pytest.mark.parametrize("theorem,n", [("t1", 3), ("t2", 2), ("corollary", 2), ("t3", 2), ("t4", 2), ("t5", 3)])
def test_pipeline(capsys, tmp_path, theorem, n):
    inst, dec = tmp_path / "inst.json", tmp_path / "dec.json"
    assert cli(capsys, "generate", "--theorem", theorem, "--n", str(n), "--seed", "7", "--out", str(inst))[0] == 0
    assert cli(capsys, "decompose", "--theorem", theorem, "--input", str(inst), "--out", str(dec))[0] == 0
    assert cli(capsys, "verify", "--cert", str(dec))[:2] == (0, "valid")


def test_generate_deterministic_and_seed_env(capsys, tmp_path, monkeypatch):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    cli(capsys, "generate", "--theorem", "t1", "--n", "3", "--seed", "7", "--out", str(a))
    monkeypatch.setenv("MILNOR_SEED", "7")
    cli(capsys, "generate", "--theorem", "t1", "--n", "3", "--seed", "99", "--out", str(b))
    assert a.read_text() == b.read_text()


def test_missing_witness_exit_code(capsys, tmp_path):
    inst, empty = tmp_path / "inst.json", tmp_path / "w.json"
    cli(capsys, "generate", "--theorem", "t1", "--n", "3", "--out", str(inst))
    empty.write_text(json.dumps({"witnesses": []}))
    code, _, err = cli(capsys, "decompose", "--theorem", "t1", "--input", str(inst), "--witnesses", str(empty))
    assert code == 2
    assert json.loads(err)["missing"]["kind"] == "T1Representation"


def test_plan_ignores_witness_files(capsys, tmp_path):
    inst = tmp_path / "inst.json"
    cli(capsys, "generate", "--theorem", "t2", "--n", "3", "--i", "2", "--out", str(inst))
    code, out, _ = cli(capsys, "decompose", "--theorem", "t2", "--input", str(inst), "--plan",
                       "--witnesses", str(tmp_path / "does-not-exist.json"))
    assert code == 0 and out.splitlines()[0].endswith("10")


def test_tampered_certificate_rejected(capsys, tmp_path):
    inst, dec = tmp_path / "inst.json", tmp_path / "dec.json"
    cli(capsys, "generate", "--theorem", "t1", "--n", "2", "--seed", "1", "--out", str(inst))
    cli(capsys, "decompose", "--theorem", "t1", "--input", str(inst), "--out", str(dec))
    doc = json.loads(dec.read_text())
    cert = doc["certificate"]
    cert["end"][0][0] = 3 if cert["end"][0][0] != 3 else 1
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(cert))
    assert cli(capsys, "verify", "--cert", str(bad))[0] == 1


def test_emitted_json_roundtrips(capsys, tmp_path):
    from milnork.decompose import CertifiedDecomposition
    from milnork.milnor import dumps

    inst, dec = tmp_path / "inst.json", tmp_path / "dec.json"
    cli(capsys, "generate", "--theorem", "t4", "--seed", "2", "--out", str(inst))
    cli(capsys, "decompose", "--theorem", "t4", "--input", str(inst), "--out", str(dec))
    text = dec.read_text().strip()
    assert dumps(CertifiedDecomposition.from_json(json.loads(text)).to_json()) == text
