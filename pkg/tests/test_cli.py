import json
import subprocess
import sys

import pytest

from conftest import FIXTURES
from twistalex.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out.strip(), err


def test_splice_examples(capsys):
    assert run(capsys, "splice", "k.splice", "--alexander")[:2] == (0, "t^2 - t + 1")
    assert run(capsys, "splice", "l_beta.splice", "--norm", "1,1")[:2] == (0, "2")
    assert run(capsys, "splice", "k.splice", "--fibered", "1")[:2] == (0, "not fibered")
    assert run(capsys, "splice", "k.splice", "--genus")[:2] == (0, "1")
    assert run(capsys, "splice", "trefoil.splice", "--fibered", "1")[:2] == (0, "fibered")


def test_group_examples(capsys):
    code, out, _ = run(capsys, "group", "pi1_k.grp", "--abelianize")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "rank 1"
    images = dict(l.split(": ") for l in lines[2:])
    assert images == {"x": "0", "y": "0", "s": "0", "t": "1", "b": "1"}
    code, out, _ = run(capsys, "group", "trefoil.grp", "--fox", "xyxY X Y", "x")
    assert code == 0 and out.replace(" ", "") == "1+xy-xyxYX"
    code, out, _ = run(capsys, "group", "free2.grp", "--abelianize", "--json")
    data = json.loads(out)
    assert data["rank"] == 2 and data["torsion"] == []
    assert data["images"] == {"x": [1, 0], "y": [0, 1]}
    assert run(capsys, "group", "pi1_k.grp", "--check", "alpha_k.rep")[0] == 0


def test_twisted_examples(capsys):
    code, out, _ = run(capsys, "twisted", "pi1_k.grp", "alpha_k.rep", "--primes", "5,7,11,13")
    assert code == 0
    assert [l.split(": ")[1] for l in out.splitlines()[:4]] == ["0"] * 4
    assert out.splitlines()[-1] == "monic: no"
    code, out, _ = run(capsys, "twisted", "trefoil.grp", "trivial.rep", "--phi", "1,1", "--primes", "7")
    assert out.splitlines()[0] == "p=7: 1 - t + t^2"
    code, out, _ = run(capsys, "twisted", "pi1_l_beta.grp", "trivial.rep", "--phi", "0,1", "--primes", "13",
                       "--tilde")
    assert out.splitlines()[0] == "p=13: 1 - t + t^2"


def test_search_examples(capsys, tmp_path):
    code, out, _ = run(capsys, "search", "pi1_k.grp", "--phi", "0,0,0,1,1", "--degree", "5", "--primes", "5",
                       "--first", "--out", str(tmp_path))
    assert code == 0
    certs = list(tmp_path.glob("*.cert"))
    assert len(certs) == 1 and out.startswith("vanishes at p=5")
    code, out, _ = run(capsys, "verify", "--cert", str(certs[0]), "--group", "pi1_k.grp")
    assert (code, out) == (0, "verified")
    code, out, _ = run(capsys, "search", "trefoil.grp", "--degree", "1", "--out", str(tmp_path / "t"))
    assert code == 0 and out.startswith("no certificates")
    assert not (tmp_path / "t").exists()


def test_exit_codes(capsys, tmp_path):
    assert run(capsys, "search", "trefoil.grp", "--degree", "0")[0] == 2
    bad = tmp_path / "bad.grp"
    bad.write_text("gens: x\nrel: x q\n")
    assert run(capsys, "group", str(bad), "--abelianize")[0] == 2
    assert run(capsys, "splice", str(tmp_path / "missing.splice"), "--alexander")[0] == 2
    # character that does not kill the relators
    assert run(capsys, "twisted", "trefoil.grp", "trivial.rep", "--phi", "1,2", "--primes", "7")[0] == 3
    code, _, err = run(capsys, "search", "pi1_k.grp", "--degree", "5", "--budget", "10", "--out", str(tmp_path))
    assert code == 4 and "budget" in err
    rep = tmp_path / "bad.rep"
    rep.write_text("degree: 3\ngen x: 2 1 3\ngen y: 1 2 3\n")
    assert run(capsys, "group", "trefoil.grp", "--check", str(rep))[0] == 3


def test_verify_manifest(capsys):
    code, out, _ = run(capsys, "verify")
    assert code == 0 and "FAIL" not in out


def test_json_round_trip(capsys):
    cases = [
        ("splice", "l_alpha.splice", "--alexander", "--norm", "1,-1", "--json"),
        ("group", "pi1_l_alpha.grp", "--abelianize", "--json"),
        ("twisted", "trefoil.grp", "trivial.rep", "--phi", "1,1", "--primes", "5,7", "--norm", "1", "--json"),
        ("verify", "--json"),
    ]
    for argv in cases:
        _, out, _ = run(capsys, *argv)
        data = json.loads(out)
        assert json.dumps(data, sort_keys=True, ensure_ascii=False) == out
        # deterministic
        _, again, _ = run(capsys, *argv)
        if argv[0] != "verify":
            assert again == out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "twistalex", "splice", str(FIXTURES / "splice" / "k.splice"),
                           "--alexander"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "t^2 - t + 1"
