import json

import pytest

from kmcrystal.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_enumerate_counts_and_determinism(capsys, tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    code, out, _ = run(capsys, "enumerate", "--family", "A", "--rank", "2", "--max-height", "4", "--out", str(a))
    assert code == 0
    # sum of KPF over heights <= 4 for A2
    assert "elements=22" in out
    run(capsys, "enumerate", "--family", "A", "--rank", "2", "--max-height", "4", "--out", str(b))
    assert a.read_bytes() == b.read_bytes()
    head = json.loads(a.read_text().splitlines()[0])
    assert head["count"] == 22 and head["max_height"] == 4


def test_enumerate_height_zero(capsys):
    code, out, _ = run(capsys, "enumerate", "--family", "A", "--rank", "1", "--max-height", "0", "--format", "json")
    assert code == 0 and json.loads(out)["elements"] == 1


def test_unwritable_path(capsys):
    code, _, err = run(capsys, "enumerate", "--family", "A", "--rank", "1", "--out", "/proc/no/such/file")
    assert code == 2 and "cannot write" in err


@pytest.mark.parametrize("extra", [[], ["--affine"]])
def test_verify_passes(capsys, extra):
    rank, height = ("2", "6") if not extra else ("1", "4")
    code, out, _ = run(capsys, "verify", "--family", "A", "--rank", rank, "--max-height", height, "--format", "json", *extra)
    report = json.loads(out)
    assert code == 0 and report["ok"]
    names = {s["name"] for s in report["suites"]}
    assert {"kpf-identity", "crystal-axioms", "commutation", "psi-morphism", "highest-weight"} <= names


def test_cache_reuse_and_corruption(capsys, tmp_path):
    cache = tmp_path / "cache"
    args = ["verify", "--family", "A", "--rank", "2", "--max-height", "5", "--cache", str(cache), "--format", "json"]
    code, cold, _ = run(capsys, *args)
    assert code == 0
    (path,) = cache.iterdir()
    code, warm, _ = run(capsys, *args)
    warm_report = json.loads(warm)
    assert code == 0 and warm_report["suites"][0]["name"] == "table-consistency"
    assert warm_report["suites"][1:] == json.loads(cold)["suites"]
    lines = path.read_text().splitlines()
    rec = json.loads(lines[7])
    rec["phiStar"]["2"] += 1
    lines[7] = json.dumps(rec, sort_keys=True)
    path.write_text("\n".join(lines) + "\n")
    code, out, _ = run(capsys, *args)
    report = json.loads(out)
    assert code == 1
    assert report["suites"][0]["violations"][0]["element"] == rec["id"]
    lines[7] = "{not json"
    path.write_text("\n".join(lines) + "\n")
    code, out, _ = run(capsys, *args)
    assert code == 1 and json.loads(out)["suites"][0]["violations"][0]["element"] == 6
    # enumerate recomputes over a corrupt cache, after which verify is clean again
    assert run(capsys, "enumerate", "--family", "A", "--rank", "2", "--max-height", "5", "--cache", str(cache))[0] == 0
    assert run(capsys, *args)[0] == 0


def test_header_mismatch_forces_recompute(capsys, tmp_path):
    cache = tmp_path / "c"
    run(capsys, "enumerate", "--family", "A", "--rank", "2", "--max-height", "3", "--cache", str(cache))
    (path,) = cache.iterdir()
    lines = path.read_text().splitlines()
    head = json.loads(lines[0])
    head["fingerprint"] = "something else"
    lines[0] = json.dumps(head)
    path.write_text("\n".join(lines) + "\n")
    code, out, _ = run(capsys, "verify", "--family", "A", "--rank", "2", "--max-height", "3", "--cache", str(cache),
                       "--format", "json")
    assert code == 0
    assert json.loads(path.read_text().splitlines()[0])["fingerprint"] != "something else"


def test_parabolic_table(capsys, tmp_path):
    out_path = tmp_path / "p.json"
    code, out, _ = run(capsys, "parabolic", "--family", "A", "--rank", "2", "--levi", "1", "--max-height", "6",
                       "--out", str(out_path))
    assert code == 0
    rows = json.loads(out_path.read_text())["rows"]
    assert all(r["status"] in ("ok", "ok-truncated") for r in rows)
    assert out.splitlines()[0].split("\t") == ["m", "nu", "mult_graph", "mult_char", "mult_cnu", "status"]


def test_stalk(capsys):
    code, out, _ = run(capsys, "stalk", "--family", "A", "--rank", "2", "--partition", "1:1")
    assert code == 0 and "1 + q^2" in out
    code, out, _ = run(capsys, "stalk", "--family", "A", "--rank", "1", "--partition", "1:2", "--format", "json")
    assert json.loads(out)["raw"] == [[4, 1]]
    code, out, _ = run(capsys, "stalk", "--family", "A", "--rank", "1", "--partition", "2:1", "--format", "json")
    assert json.loads(out)["raw_text"] == "q^2 + q^4"
    code, _, err = run(capsys, "stalk", "--family", "B", "--rank", "2")
    assert code == 2 and "dual-twist" in err


def test_dims(capsys):
    code, out, _ = run(capsys, "dims", "--family", "D", "--rank", "4", "--affine", "--format", "json")
    rows = {r["quantity"]: r["value"] for r in json.loads(out)["rows"]}
    assert code == 0 and rows["|delta|"] == rows["dual_coxeter"] == 6
    code, out, _ = run(capsys, "dims", "--family", "A", "--rank", "1", "--format", "json")
    rows = {r["quantity"]: r["value"] for r in json.loads(out)["rows"]}
    assert rows["bundle_dim(a=1)"] == 4 and rows["borel_zastava(alpha_1)"] == 2


def _write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def test_adhm(capsys, tmp_path):
    f = _write(tmp_path, "s.json", {"a": 1, "n": 1, "B1": [["2"]], "B2": [["1/3"]], "i": [["1"]], "j": [["0"]]})
    code, out, _ = run(capsys, "adhm", f, "--format", "json")
    rep = json.loads(out)
    assert code == 0 and rep["stable"] and rep["charpoly_B1"] == "x - 2" and rep["charpoly_B2"] == "x - 1/3"
    f = _write(tmp_path, "v.json", {"a": 1, "n": 1, "B1": [["2"]], "B2": [["1"]], "i": [["1"]], "j": [["5"]]})
    code, out, _ = run(capsys, "adhm", f)
    assert code == 0 and "z0^2 coefficient of b.d\t((5))" in out
    f = _write(tmp_path, "bad.json", {"a": 2, "n": 1, "B1": [["2"]], "B2": [["1"]], "i": [["1"]], "j": [["5"]]})
    assert run(capsys, "adhm", f)[0] == 2


def test_adhm_conjugated_files_agree(capsys, tmp_path):
    import random

    from kmcrystal import adhm

    rng = random.Random(21)
    x = adhm.random_datum(rng, 3, 2)
    y = x.conjugate(adhm.random_invertible(rng, 3))
    outs = []
    for name, d in (("x.json", x), ("y.json", y)):
        code, out, _ = run(capsys, "adhm", _write(tmp_path, name, d.to_json()), "--format", "json")
        outs.append(json.loads(out)["invariants"])
    assert outs[0] == outs[1]


def test_bad_inputs(capsys):
    assert run(capsys, "verify", "--family", "Q", "--rank", "2")[0] == 2
    assert run(capsys, "verify")[0] == 2
    assert run(capsys, "verify", "--family", "A", "--rank", "2", "--word", "1,7")[0] == 2
    assert run(capsys, "verify", "--family", "A", "--rank", "2", "--max-height", "-1")[0] == 2
