import re

import pytest

from adual import cli, core, textio, zoo


@pytest.fixture()
def files(tmp_path):
    paths = {}
    for A in (
        zoo.cyclic_group(2),
        zoo.cyclic_group(4),
        zoo.cyclic_group(12),
        zoo.two_element_semilattice(),
    ):
        p = tmp_path / f"{A.name}.alg"
        p.write_text(textio.serialize_algebra(A))
        paths[A.name] = str(p)
    return paths, tmp_path


def run(capsys, argv):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_bound_verb(files, capsys):
    paths, _ = files
    code, out, _ = run(capsys, ["bound", paths["z4"]])
    assert code == 0
    assert "N = 9" in out
    code, out, _ = run(capsys, ["bound", paths["z12"]])
    assert "N = 9" in out


def test_check_abelian_verb(files, capsys):
    paths, _ = files
    code, out, _ = run(capsys, ["check-abelian", paths["meet2"]])
    assert code == 1
    assert "no affine term" in out
    code, out, _ = run(capsys, ["check-abelian", paths["z4"]])
    assert code == 0
    assert "op t 3" in out


def test_sub_verb(files, capsys):
    paths, _ = files
    code, out, _ = run(capsys, ["sub", paths["z2"], "--max-power", "2"])
    assert code == 0
    assert "count 5" in out


def test_galois_verb(files, capsys):
    paths, _ = files
    code, out, _ = run(capsys, ["galois", paths["z4"]])
    assert code == 0
    assert "GALOIS PASS" in out
    code, out, _ = run(capsys, ["galois", paths["z4"], "--carrier", "0,2"])
    assert code == 0


def test_hom_and_hk_verbs(files, capsys):
    paths, _ = files
    code, out, _ = run(capsys, ["hom", paths["z2"], paths["z4"]])
    assert code == 0
    assert "count 2" in out and "verdict: PASS" in out
    code, out, _ = run(capsys, ["hk", paths["z4"]])
    assert code == 0
    assert "group order 4" in out


def test_factorize_entail_replay_refute(files, capsys, tmp_path):
    paths, _ = files
    z2 = zoo.cyclic_group(2)
    P3 = core.power_algebra(z2, 3)
    f = core.Homomorphism(P3, z2, [bin(c).count("1") % 2 for c in range(8)])
    hom_file = tmp_path / "parity.hom"
    hom_file.write_text(textio.serialize_algebra(z2) + textio.serialize_hom(f, "parity"))
    code, out, _ = run(capsys, ["factorize", str(hom_file)])
    assert code == 0 and "FACTORIZE PASS" in out

    rel_file = tmp_path / "diag3.rel"
    rel_file.write_text(
        textio.serialize_relation(core.diagonal_relation(2, 3), "diag3", "z2")
    )
    code, out, _ = run(capsys, ["entail", paths["z2"], str(rel_file), "--arity", "3"])
    assert code == 0 and "ENTAIL PASS" in out
    cert_text = "\n".join(
        line for line in out.splitlines() if not line.startswith(("#", "premises", "ENTAIL"))
    )
    cert_file = tmp_path / "diag3.cert"
    cert_file.write_text(cert_text + "\n")
    code, out, _ = run(capsys, ["replay", str(cert_file)])
    assert code == 0 and "PASS" in out

    prem_file = tmp_path / "prem.rel"
    prem_file.write_text(
        textio.serialize_relation(core.diagonal_relation(2, 2), "diag2", "z2")
    )
    target_file = tmp_path / "target.rel"
    target_file.write_text(
        textio.serialize_relation(core.graph_relation(z2.op("add")), "gadd", "z2")
    )
    code, out, _ = run(
        capsys,
        [
            "refute",
            paths["z2"],
            "--premises",
            str(prem_file),
            "--target",
            str(target_file),
            "--arity",
            "2",
        ],
    )
    assert code == 0 and "REFUTED" in out


def test_duality_verb_and_determinism(files, capsys):
    paths, _ = files
    code, out1, _ = run(capsys, ["duality", paths["z2"], "--max-power", "2"])
    assert code == 0
    assert re.search(r"DUALITY PASS k_max=2 relations=67 time=\S+", out1)
    code, out2, _ = run(capsys, ["duality", paths["z2"], "--max-power", "2"])
    scrub = lambda s: re.sub(r"time=\S+", "time=_", s)
    assert scrub(out1) == scrub(out2)


def test_exit_codes_for_bad_input(files, capsys, tmp_path):
    paths, _ = files
    bad = tmp_path / "bad.alg"
    bad.write_text("algebra x\nsize nope\n")
    code, _, err = run(capsys, ["bound", str(bad)])
    assert code == 2
    assert "bad.alg" in err

    code, _, err = run(capsys, ["sub", paths["z4"], "--max-power", "12"])
    assert code == 3
    assert "budget" in err


def test_header_line(files, capsys):
    paths, _ = files
    _, out, _ = run(capsys, ["bound", paths["z4"], "--seed", "5", "--budget", "999"])
    assert out.splitlines()[0] == "# adual bound seed=5 budget=999"


def test_duality_power_three_prints_cost_estimate(files, capsys):
    paths, _ = files
    code, out, err = run(
        capsys, ["duality", paths["z2"], "--max-power", "3"]
    )
    assert code == 0
    assert "cost estimate" in err
    assert "DUALITY PASS k_max=3" in out
