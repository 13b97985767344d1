import json

from clgeom.cli import main
from clgeom.geometry import set_cache_enabled


def run(capsys, *argv):
    rc = main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


def test_bounds_paper_example(capsys):
    rc, out, _ = run(capsys, "bounds", "-n", "8", "-k", "1", "-q", "7")
    assert rc == 0
    assert "840700.125" in out
    line = next(l for l in out.splitlines() if l.startswith("improved-lift"))
    assert abs(float(line.split()[1]) - 5476.998) < 0.5
    line = next(l for l in out.splitlines()
                if l.startswith("hyperplane-average"))
    assert abs(float(line.split()[1]) - 5482.9585) < 0.5


def test_bounds_guard_not_met(capsys):
    rc, out, _ = run(capsys, "bounds", "-n", "3", "-k", "1", "-q", "2")
    assert rc == 0
    assert "guard not met" in out
    assert any(l.startswith("ihringer") and "guard not met" not in l
               for l in out.splitlines())


def test_sieve_json_and_schema(capsys, tmp_path):
    import jsonschema
    from importlib import resources
    path = tmp_path / "r.json"
    rc, _, _ = run(capsys, "sieve", "--space", "pg", "-n", "3", "-k", "1",
                   "-q", "3", "--json", str(path))
    assert rc == 0
    d = json.loads(path.read_text())
    schema = json.loads(resources.files("clgeom")
                        .joinpath("schemas/report.schema.json").read_text())
    jsonschema.validate(d, schema)
    by_x = {e["x"]: e for e in d["entries"]}
    assert by_x[3]["status"] == "EXCLUDED"
    assert by_x[5]["status"] == "OPEN"


def test_sieve_csv_stdout(capsys):
    rc, out, _ = run(capsys, "sieve", "--space", "ag", "-n", "3", "-k", "1",
                     "-q", "2")
    assert rc == 0
    lines = out.splitlines()
    assert lines[0] == "x,status,rules"
    assert "2,EXCLUDED,affine-modular" in lines


def test_construct_verify_roundtrip(capsys, tmp_path):
    path = tmp_path / "f.json"
    rc, _, _ = run(capsys, "construct", "--kind", "point-pencil", "--space",
                   "pg", "-n", "3", "-k", "1", "-q", "2", "-o", str(path))
    assert rc == 0
    rc, out, _ = run(capsys, "verify", str(path), "--checks",
                     "cl,disjoint,spread")
    assert rc == 0
    assert out.count("pass") == 3
    # byte-identical member list after a write-read-write cycle
    from clgeom.clcore import load_family, save_family
    fam = load_family(str(path))
    path2 = tmp_path / "f2.json"
    save_family(fam, str(path2))
    assert path.read_bytes() == path2.read_bytes()


def test_verify_corrupted_family_exits_1(capsys, tmp_path):
    path = tmp_path / "f.json"
    run(capsys, "construct", "--kind", "point-pencil", "--space", "pg",
        "-n", "3", "-k", "1", "-q", "2", "-o", str(path))
    d = json.loads(path.read_text())
    # swap one member for a line avoiding the anchor point
    d["members"][0] = [[0, 1, 0, 0], [0, 0, 1, 0]]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(d))
    rc, out, err = run(capsys, "verify", str(bad), "--checks", "cl,disjoint")
    assert rc == 1
    assert "FAIL" in out
    assert "K=" in err  # violating spaces listed on stderr


def test_verify_default_checks_and_json(capsys, tmp_path):
    path = tmp_path / "f.json"
    run(capsys, "construct", "--kind", "hyperplane-class", "--space", "pg",
        "-n", "3", "-k", "1", "-q", "2", "-o", str(path))
    report = tmp_path / "v.json"
    rc, out, _ = run(capsys, "verify", str(path), "--json", str(report))
    assert rc == 0
    d = json.loads(report.read_text())
    assert all(r["ok"] for r in d["results"])
    assert {"cl", "disjoint", "profile", "spread", "drudge", "aid"} >= \
        {r["check"] for r in d["results"]}


def test_project_command(capsys, tmp_path):
    path = tmp_path / "pen.json"
    run(capsys, "construct", "--kind", "point-pencil", "--space", "pg",
        "-n", "5", "-k", "2", "-q", "2", "--point", "0,1,0,0,0,0",
        "-o", str(path))
    out_path = tmp_path / "img.json"
    rc, out, _ = run(capsys, "project", str(path), "--pi",
                     "[[1,0,0,0,0,0]]", "-o", str(out_path))
    assert rc == 0
    rc, _, _ = run(capsys, "verify", str(out_path), "--checks", "cl")
    assert rc == 0
    d = json.loads(out_path.read_text())
    assert d["n"] == 4 and d["k"] == 1 and len(d["members"]) == 15


def test_project_rejects_non_rref(capsys, tmp_path):
    path = tmp_path / "pen.json"
    run(capsys, "construct", "--kind", "point-pencil", "--space", "pg",
        "-n", "3", "-k", "1", "-q", "2", "-o", str(path))
    rc, _, err = run(capsys, "project", str(path), "--pi", "[[0,0,0,2]]")
    assert rc == 2
    assert "error" in err


def test_enumerate(capsys):
    rc, out, _ = run(capsys, "enumerate", "--space", "pg", "-n", "3", "-k",
                     "1", "-q", "2", "--count-only")
    assert rc == 0 and out.strip() == "35"
    rc, out, _ = run(capsys, "enumerate", "--space", "ag", "-n", "3", "-k",
                     "1", "-q", "2")
    rows = [json.loads(l) for l in out.splitlines()]
    assert len(rows) == 28


def test_usage_errors(capsys):
    rc, _, _ = run(capsys, "sieve", "--space", "pg", "-n", "3", "-k", "1",
                   "-q", "6")
    assert rc == 2
    rc, _, _ = run(capsys, "verify", "/nonexistent/family.json")
    assert rc == 2
    rc, _, _ = run(capsys, "verify", __file__, "--checks", "nonsense")
    assert rc == 2


def test_cache_toggle_same_output(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("CLGEOM_CACHE", str(tmp_path))
    try:
        rc1, out1, _ = run(capsys, "enumerate", "--space", "pg", "-n", "2",
                           "-k", "1", "-q", "3")
        rc2, out2, _ = run(capsys, "--no-cache", "enumerate", "--space", "pg",
                           "-n", "2", "-k", "1", "-q", "3")
        assert rc1 == rc2 == 0
        assert out1 == out2
    finally:
        set_cache_enabled(True)
