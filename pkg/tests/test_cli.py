import json
import subprocess
import sys

import pytest

from ekrcodes.cli import main
from ekrcodes.config import CONFIG


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


def test_module_check_example(capsys):
    code, data = run_json(capsys, "ekr", "--q", "4", "--k", "2", "check", "module")
    assert code == 0
    assert data["module"] is False and data["witness"] == "(0:1:0)"
    assert data["schema_version"] == 1


def test_ekr_all_and_json_flag(capsys):
    code, data = run_json(capsys, "ekr", "--q", "5", "--k", "2", "check", "all", "--json")
    assert code == 0 and data["weak"] == "Holds" and data["module"] is True
    code, data = run_json(capsys, "ekr", "--q", "7", "--k", "3", "check", "strict")
    assert code == 0 and data["no_three_collinear"] is True


def test_bounds_example(capsys):
    code, data = run_json(capsys, "bounds", "--q", "9", "--k", "3", "--t", "3")
    assert code == 0 and data["bound"] == 25 and data["strict"] is True
    code, data = run_json(capsys, "bounds", "--q", "5", "--k", "3", "--t", "2")
    assert data["bound"] == 25 and data["strict"] is False


def test_field_and_code(capsys):
    code, data = run_json(capsys, "field", "--p", "3", "--h", "2")
    assert code == 0 and data["modulus"] == [1, 0, 1]
    code, data = run_json(capsys, "code", "ers", "--q", "5", "--k", "2", "--wdist")
    assert code == 0 and data["weight_distribution"] == [1, 0, 0, 0, 60, 24, 40]
    assert data["weight_distribution_matches"] is True and data["code"]["k"] == 3


def test_nrc_and_stability(capsys):
    code, data = run_json(capsys, "nrc", "--q", "5", "--k", "2", "profile")
    assert code == 0 and {int(k): v for k, v in data["counts"].items()} == {0: 10, 1: 6, 2: 15}
    code, data = run_json(capsys, "stability", "--q", "7", "--k", "3")
    assert code == 0 and data["avoid_count"] == 112


def test_spectrum_round_trip(capsys, tmp_path):
    code, out, _ = run(capsys, "spectrum", "--q", "5", "--k", "2")
    data = json.loads(out)
    assert code == 0
    assert {e["value"]: e["mult"] for e in data["eigenvalues"]} == {40: 1, 5: 40, 0: 60, -10: 24}
    path = tmp_path / "spec.json"
    path.write_text(out)
    assert run_json(capsys, "verify", "--spectrum", str(path)) == (0, {"schema_version": 1, "verified": True})
    data["eigenvalues"][-1]["mult"] -= 1
    path.write_text(json.dumps(data))
    code, res = run_json(capsys, "verify", "--spectrum", str(path))
    assert code == 1 and res["verified"] is False


def test_b_graph_spectrum_round_trip(capsys, tmp_path):
    code, out, _ = run(capsys, "spectrum", "--q", "4", "--k", "2", "--graph", "b", "--i", "1", "--verify")
    assert code == 0 and json.loads(out)["verified"] is True
    path = tmp_path / "b.json"
    path.write_text(out)
    assert run_json(capsys, "verify", "--spectrum", str(path))[0] == 0


def test_certificate_round_trip_and_tamper(capsys, tmp_path):
    cert = tmp_path / "fam.json"
    code, data = run_json(capsys, "search", "--q", "4", "--k", "2", "--cert", str(cert))
    assert code == 0 and data["max_size"] == 16
    code, data = run_json(capsys, "verify", "--cert", str(cert))
    assert code == 0 and data["verified"] is True and data["size"] == 16
    raw = json.loads(cert.read_text())
    raw["family"][1] = raw["family"][0]
    cert.write_text(json.dumps(raw))
    code, _, err = run(capsys, "verify", "--cert", str(cert))
    assert code == 1 and err
    cert.write_text("{not json")
    assert run(capsys, "verify", "--cert", str(cert))[0] == 1


def test_search_census(capsys):
    code, data = run_json(capsys, "search", "--q", "4", "--k", "2", "--census")
    assert code == 0
    assert data["census"] == {"families": 24, "tags": {"b_line": 4, "star": 20}}
    assert data["witness_checks"]["few_or_many"] is True


def test_scheme_command(capsys):
    code, data = run_json(capsys, "scheme", "--family", "hom3", "--q", "9", "--verify", "--bounds", "R3")
    assert code == 0
    assert data["matched_table"] == "hom3_3_divides_q" and data["clique_bound"]["bound"] == 25


def test_exit_codes(capsys):
    assert run(capsys, "ekr", "--q", "6", "--k", "2", "check", "weak")[0] == 2
    assert run(capsys, "nosuch")[0] == 2
    assert run(capsys, "bounds", "--q", "5", "--k", "5", "--t", "1")[0] == 2
    assert run(capsys, "verify")[0] == 2
    assert run(capsys, "search", "--q", "5", "--k", "3", "--search-cap", "100")[0] == 3
    assert run(capsys, "field", "--p", "2", "--h", "40")[0] == 3
    assert run(capsys, "ekr", "--q", "5", "--k", "2", "--enum-cap", "0", "check", "weak")[0] == 2


def test_config_restored(capsys):
    before = (CONFIG.search_cap, CONFIG.enum_cap)
    run(capsys, "search", "--q", "3", "--k", "2", "--search-cap", "50")
    assert (CONFIG.search_cap, CONFIG.enum_cap) == before


def test_table_format(capsys):
    code, out, _ = run(capsys, "--format", "table", "bounds", "--q", "9", "--k", "3", "--t", "3")
    assert code == 0 and "bound" in out and "25" in out
    with pytest.raises(json.JSONDecodeError):
        json.loads(out)


def test_cache_gives_identical_output(capsys, tmp_path):
    argv = ["--cache-dir", str(tmp_path), "spectrum", "--q", "7", "--k", "3"]
    first = run(capsys, *argv)
    assert any(tmp_path.iterdir())
    second = run(capsys, *argv)
    no_cache = run(capsys, "spectrum", "--q", "7", "--k", "3")
    assert first[0] == 0 and first[1] == second[1] == no_cache[1]


def test_repeated_search_is_byte_identical(capsys):
    a = run(capsys, "search", "--q", "4", "--k", "3")[1]
    b = run(capsys, "search", "--q", "4", "--k", "3")[1]
    assert a == b and json.loads(a)["max_size"] == 64


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ekrcodes", "bounds", "--q", "9", "--k", "3", "--t", "3"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["bound"] == 25
