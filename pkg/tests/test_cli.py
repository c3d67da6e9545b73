import io as _io
import json
import os

import numpy as np
import pytest

from choicorr import interchange as io
from choicorr.basis import pauli_basis
from choicorr.cli import main
from choicorr.harness import random_cp_map
from choicorr.maps import KrausSet, LinearMap, choi_from_kraus, choi_of_map, identity_map, transpose_map

from conftest import omega_projector, swap_by_loop


def write(path, obj):
    path.write_text(io.dumps(obj))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_choi_of_identity(tmp_path, capsys):
    f = write(tmp_path / "id.json", io.map_to_obj(identity_map(2)))
    code, out, _ = run(capsys, "choi", f)
    assert code == 0
    c = io.choi_from_obj(json.loads(out))
    assert (c.n, c.m) == (2, 2)
    np.testing.assert_array_equal(c.matrix, omega_projector(2))


def test_map_of_swap_is_transpose(tmp_path, capsys):
    f = write(tmp_path / "swap.json", io.matrix_to_obj(swap_by_loop(2), bipartite=(2, 2)))
    code, out, _ = run(capsys, "map", f)
    assert code == 0
    phi = io.map_from_obj(json.loads(out))
    np.testing.assert_array_equal(phi.transfer, transpose_map(2).transfer)
    e12 = np.array([[0, 1], [0, 0]])
    np.testing.assert_array_equal(phi(e12), e12.T)


def test_rectangular_map_round_trip(tmp_path, capsys, rng):
    phi = LinearMap(2, 3, rng.standard_normal((9, 4)))
    f = write(tmp_path / "phi.json", io.map_to_obj(phi))
    out_c = tmp_path / "c.json"
    assert main(["choi", f, "--out", str(out_c)]) == 0
    code, out, _ = run(capsys, "map", str(out_c))
    assert code == 0
    back = io.map_from_obj(json.loads(out))
    assert (back.n, back.m) == (2, 3)
    np.testing.assert_array_equal(back.transfer, phi.transfer)


@pytest.mark.parametrize("text", [
    "{not json",
    '{"rows": 2, "cols": 2, "data": [[1, 0]]}',
    '{"rows": 2, "cols": 2, "data": [[1, 0], [0, 0], [0, 0], ["x", 1]]}',
    '[1, 2, 3]',
    '{"rows": 3, "cols": 3, "data": [1,0,0,0,1,0,0,0,1]}',
])
def test_malformed_input_exits_2(tmp_path, capsys, text):
    f = tmp_path / "bad.json"
    f.write_text(text)
    code, out, err = run(capsys, "choi", str(f))
    assert code == 2 and out == "" and "error" in err


def test_missing_file_exits_2(tmp_path, capsys):
    code, _, err = run(capsys, "cp-check", str(tmp_path / "absent.json"))
    assert code == 2 and err


def test_cp_check_exit_codes(tmp_path, capsys):
    code, out, _ = run(capsys, "cp-check", write(tmp_path / "id.json", io.map_to_obj(identity_map(2))))
    report = json.loads(out)
    assert code == 0 and report["is_cp"] is True
    assert abs(report["min_eigenvalue"]) <= 1e-15

    code, out, _ = run(capsys, "cp-check", write(tmp_path / "t.json", io.map_to_obj(transpose_map(2))))
    report = json.loads(out)
    assert code == 1 and report["is_cp"] is False
    assert report["min_eigenvalue"] == pytest.approx(-1.0, abs=1e-12)


def test_kraus_dump_round_trips(tmp_path, capsys, rng):
    phi = random_cp_map(2, 3, rng, kraus_count=3)
    kdir = tmp_path / "kraus"
    code, out, _ = run(capsys, "cp-check", write(tmp_path / "phi.json", io.map_to_obj(phi)), "--kraus", str(kdir))
    assert code == 0
    files = sorted(os.listdir(kdir))
    assert len(files) == json.loads(out)["kraus_count"] == 3
    ops = [io.matrix_from_obj(json.loads((kdir / f).read_text())) for f in files]
    c = choi_from_kraus(KrausSet.of(ops)).matrix
    assert np.linalg.norm(c - choi_of_map(phi).matrix) <= 1e-10 * np.linalg.norm(c)


def test_kraus_dir_untouched_when_not_cp(tmp_path, capsys):
    kdir = tmp_path / "kraus"
    code, _, _ = run(capsys, "cp-check", write(tmp_path / "t.json", io.map_to_obj(transpose_map(2))), "--kraus", str(kdir))
    assert code == 1 and not kdir.exists()


def test_sigma_check_omega(tmp_path, capsys):
    f = write(tmp_path / "omega.json", io.matrix_to_obj(omega_projector(2), bipartite=(2, 2)))
    code, out, _ = run(capsys, "sigma-check", f)
    report = json.loads(out)
    assert code == 0 and report["verdict"] is True
    np.testing.assert_allclose(io.matrix_from_obj(report["certificate_s"]), np.eye(2), atol=1e-12)


def test_sigma_check_swap_with_witness(tmp_path, capsys):
    f = write(tmp_path / "swap.json", io.matrix_to_obj(swap_by_loop(2), bipartite=(2, 2)))
    code, out, _ = run(capsys, "sigma-check", f, "--witness", "--seed", "3")
    report = json.loads(out)
    assert code == 1 and report["verdict"] is False
    assert report["witness"]["validated"] is True
    np.testing.assert_array_equal(io.map_from_obj(report["witness"]["map"]).transfer, np.eye(4))


def test_sigma_check_non_hermitian_exits_2(tmp_path, capsys):
    f = write(tmp_path / "tri.json", io.matrix_to_obj(np.triu(np.ones((4, 4)))))
    code, _, err = run(capsys, "sigma-check", f)
    assert code == 2 and "Hermitian" in err


def test_basis_check_pauli(tmp_path, capsys):
    f = write(tmp_path / "pauli.json", io.basis_to_obj(pauli_basis()))
    code, out, _ = run(capsys, "basis-check", f)
    report = json.loads(out)
    assert code == 1 and report["verdict"] is False
    np.testing.assert_allclose(sorted(report["sigma_b_eigenvalues"]), [-1, 1, 1, 1], atol=1e-10)


def test_basis_check_rejects_wrong_count(tmp_path, capsys):
    obj = io.basis_to_obj(pauli_basis())
    obj["elements"] = obj["elements"][:3]
    code, _, _ = run(capsys, "basis-check", write(tmp_path / "b.json", obj))
    assert code == 2


def test_schmidt_of_omega(tmp_path, capsys):
    w = np.eye(3).reshape(-1)
    f = write(tmp_path / "w.json", io.matrix_to_obj(w.reshape(-1, 1)))
    code, out, _ = run(capsys, "schmidt", f)
    report = json.loads(out)
    assert code == 0 and report["schmidt_rank"] == 3
    np.testing.assert_allclose(report["coefficients"], [1, 1, 1], atol=1e-12)


def test_stdin_input(monkeypatch, capsys):
    monkeypatch.setattr("sys.stdin", _io.StringIO(io.dumps(io.map_to_obj(identity_map(2)))))
    code, out, _ = run(capsys, "choi", "-")
    assert code == 0
    np.testing.assert_array_equal(io.matrix_from_obj(json.loads(out)), omega_projector(2))


def test_emitted_floats_round_trip_bit_exactly(tmp_path, capsys, rng):
    a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    a[0, 0] = complex(-0.0, 1e-300)
    a[1, 1] = complex(1 / 3, np.nextafter(1.0, 2.0))
    text = io.dumps(io.matrix_to_obj(a, bipartite=(2, 2)))
    back = io.matrix_from_obj(json.loads(text))
    assert back.tobytes() == a.tobytes()
    assert io.dumps(io.matrix_to_obj(back, bipartite=(2, 2))) == text

    f = write(tmp_path / "a.json", io.matrix_to_obj(a, bipartite=(2, 2)))
    out_m = tmp_path / "m.json"
    assert main(["map", f, "--out", str(out_m)]) == 0
    assert main(["choi", str(out_m), "--out", str(tmp_path / "c.json")]) == 0
    again = io.matrix_from_obj(json.loads((tmp_path / "c.json").read_text()))
    assert again.tobytes() == a.tobytes()


def test_tol_flag_changes_decision(tmp_path, capsys):
    # eigenvalue -1e-8 is negative at the default tolerance but within a loose one
    c = omega_projector(2) - 1e-8 * np.diag([0, 1, 0, 0])
    f = write(tmp_path / "c.json", io.matrix_to_obj(c, bipartite=(2, 2)))
    m = tmp_path / "m.json"
    assert main(["map", f, "--out", str(m)]) == 0
    assert run(capsys, "cp-check", str(m))[0] == 1
    assert run(capsys, "cp-check", str(m), "--tol", "1e-4")[0] == 0


@pytest.mark.parametrize("argv", [
    [],
    ["bogus"],
    ["selftest", "--trials", "0"],
    ["selftest", "--seed", "-1"],
    ["cp-check", "x.json", "--tol", "2"],
])
def test_bad_arguments_exit_2(capsys, argv):
    assert main(argv) == 2


def test_selftest_is_byte_identical(tmp_path, capsys):
    code_a, out_a, _ = run(capsys, "selftest", "--seed", "42", "--trials", "10")
    code_b, out_b, _ = run(capsys, "selftest", "--seed", "42", "--trials", "10")
    assert code_a == code_b == 0 and out_a == out_b
    report = json.loads(out_a)
    assert report["clean"] is True and report["seed"] == 42


def test_writes_only_named_files(tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    f = write(tmp_path / "id.json", io.map_to_obj(identity_map(2)))
    before = set(os.listdir(tmp_path))
    for argv in (["choi", f], ["cp-check", f], ["selftest", "--trials", "4"], ["sigma-check", f]):
        main(argv)
        capsys.readouterr()
    assert set(os.listdir(tmp_path)) == before
    main(["choi", f, "--out", "c.json"])
    assert set(os.listdir(tmp_path)) == before | {"c.json"}


def test_module_entry_point():
    import subprocess
    import sys

    proc = subprocess.run([sys.executable, "-m", "choicorr", "selftest", "--trials", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["clean"] is True
