import csv
import json
import os

from starsep.cli import BENCH_HEADER, main

CROSS2 = '{"version": 1, "segments": [{"id": 0, "p": [0, 0], "q": [4, 0]}, {"id": 1, "p": [2, -1], "q": [2, 1]}]}'


def test_separate_and_validate(tmp_path):
    inp = tmp_path / "cross2.json"
    inp.write_text(CROSS2)
    out = tmp_path / "sep.json"
    svg = tmp_path / "sep.svg"
    assert main(["separate", str(inp), "-o", str(out), "--svg", str(svg)]) == 0
    assert main(["validate", str(inp), str(out)]) == 0
    assert svg.read_text().startswith("<?xml")
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"version": 1, "stars": [], "A": [0], "B": [1]}))
    assert main(["validate", str(inp), str(bad)]) == 1


def test_input_errors(tmp_path):
    assert main(["separate", str(tmp_path / "missing.json")]) == 2
    z = tmp_path / "z.json"
    z.write_text('{"version": 1, "segments": [{"p": [0, 0], "q": [0, 0]}]}')
    assert main(["separate", str(z)]) == 2
    assert main(["nosuch"]) == 2


def test_generate_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for f in (a, b):
        assert main(["generate", "--kind", "random-cdir", "--n", "100", "--c", "3", "--seed", "7", "-o", str(f)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_perturb_path(tmp_path):
    inp = tmp_path / "ov.json"
    inp.write_text('{"version": 1, "segments": [{"p": [0, 0], "q": [4, 0]}, {"p": [2, 0], "q": [6, 0]}, '
                   '{"p": [3, -1], "q": [3, 5]}, {"p": [10, 0], "q": [12, 0]}]}')
    out = tmp_path / "sep.json"
    assert main(["separate", str(inp), "-o", str(out)]) == 2
    assert main(["separate", str(inp), "--perturb", "-o", str(out)]) == 0
    assert main(["validate", str(inp), str(out)]) == 0


def test_polygons_and_strings(tmp_path):
    p = tmp_path / "p.json"
    assert main(["generate", "--kind", "nested-polygons", "--n", "40", "--seed", "1", "-o", str(p)]) == 0
    assert main(["separate", str(p), "-o", str(tmp_path / "ps.json")]) == 0
    g = tmp_path / "g.json"
    assert main(["generate", "--kind", "random-strings", "--n", "200", "--seed", "1", "-o", str(g)]) == 0
    assert main(["separate", str(g), "--stage2", "bfs-fm", "-o", str(tmp_path / "gs.json")]) == 0
    assert main(["validate", str(g), str(tmp_path / "gs.json")]) == 0


def test_oracle_commands(tmp_path, capsys):
    inp = tmp_path / "a.json"
    main(["generate", "--kind", "random-cdir", "--n", "80", "--seed", "2", "-o", str(inp)])
    o = tmp_path / "o.json"
    assert main(["oracle", "build", str(inp), "-o", str(o)]) == 0
    capsys.readouterr()
    assert main(["oracle", "query", str(o), "0", "0"]) == 0
    assert capsys.readouterr().out.strip() == "0"
    assert main(["oracle", "verify", str(o), str(inp)]) == 0
    stats = json.loads(capsys.readouterr().out)
    assert stats["max_error"] <= 2
    assert main(["oracle", "query", str(o), "0", "999"]) == 2


def test_bench_csv_and_env_seed(tmp_path, monkeypatch):
    out = tmp_path / "b.csv"
    args = ["bench", "--kind", "random-cdir", "--sizes", "100,200", "--c", "2", "--seed", "3", "--repeats", "1",
            "-o", str(out)]
    assert main(args) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == BENCH_HEADER and len(rows) == 3
    assert all(r[7] == "1" for r in rows[1:])
    monkeypatch.setenv("STARSEP_SEED", "3")
    out2 = tmp_path / "b2.csv"
    args2 = list(args)
    args2[args2.index("--seed") + 1] = "99"
    args2[-1] = str(out2)
    assert main(args2) == 0
    strip = lambda rows: [r[:6] + r[7:] for r in rows]
    assert strip(list(csv.reader(out2.open()))) == strip(rows)
