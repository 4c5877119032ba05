import csv
import json
import subprocess
import sys

import pytest

from dirwalk.cli import character_from_record, character_record, run
from dirwalk.characters import build_table

from oracles import CLASSIC_MOD7


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    doc = json.loads(out.out) if out.out.strip() else None
    return code, doc, out.err


def test_chars_json(capsys, tmp_path):
    code, doc, _ = call(capsys, "chars", "--q", "7")
    assert code == 0
    recs = doc["results"]["characters"]
    assert len(recs) == 6
    assert {tuple(r["values"]) for r in recs} == {tuple(row) + (None,) for row in CLASSIC_MOD7}
    meta = doc["meta"]
    assert meta["command"] == "chars" and "wall_time_s" in meta and "version" in meta
    assert meta["config"]["q"] == 7


def test_chars_csv(capsys, tmp_path):
    path = tmp_path / "c.csv"
    assert call(capsys, "chars", "--q", "5", "--csv", str(path))[0] == 0
    rows = list(csv.DictReader(path.open()))
    assert [r["j"] for r in rows] == ["0", "1", "2", "3"]
    assert rows[0]["values"].endswith("Z")


def test_character_record_roundtrip():
    for c in build_table(11):
        assert character_from_record(character_record(c)) == c
    bad = character_record(build_table(7)[1])
    bad["values"][0] = 3
    with pytest.raises(ValueError):
        character_from_record(bad)


def test_walk_empty(capsys):
    code, doc, _ = call(capsys, "walk", "--q", "7", "--char", "1", "--n", "0")
    assert code == 0
    assert doc["results"]["points"] == 0 and doc["results"]["C"] == []


def test_walk_csv(capsys, tmp_path):
    path = tmp_path / "w.csv"
    code, _, _ = call(capsys, "walk", "--q", "7", "--char", "3", "--n", "5", "--csv", str(path))
    assert code == 0
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["n", "C_n"]
    assert [float(r[1]) for r in rows[1:]] == [1.0, 0.0, -1.0, -1.0, 0.0]
    path2 = tmp_path / "wc.csv"
    call(capsys, "walk", "--q", "7", "--char", "1", "--n", "1e4", "--mode", "complex",
         "--checkpoints", "10,100,1e4", "--csv", str(path2))
    rows = list(csv.reader(path2.open()))
    assert rows[0] == ["n", "C_re", "C_im"] and [r[0] for r in rows[1:]] == ["10", "100", "10000"]


def test_primes(capsys):
    assert call(capsys, "primes", "--upto", "1e6", "--count-only")[1]["results"]["pi"] == 78498
    assert call(capsys, "primes", "--nth", "4")[1]["results"]["p"] == 7
    assert call(capsys, "primes", "--upto", "11")[1]["results"]["primes"] == [2, 3, 5, 7]


def test_pairs_csv(capsys, tmp_path):
    path = tmp_path / "p.csv"
    code, doc, _ = call(capsys, "pairs", "--q", "3", "--k", "1", "--upto", "20", "--los", "--csv", str(path))
    assert code == 0
    assert doc["results"]["counts"] == [[0, 3], [3, 0]]
    lines = path.read_text().splitlines()
    assert lines[0] == "a,b,count,f_emp,f_los,residual"
    assert path.read_bytes().count(b"\r\n") == 5


def test_freq(capsys):
    code, doc, _ = call(capsys, "freq", "--q", "7", "--char", "3", "--upto", "1e4")
    assert code == 0 and doc["results"]["r"] == 2


def test_ensemble_char_file_roundtrip(capsys, tmp_path):
    chars = tmp_path / "chars.json"
    call(capsys, "chars", "--q", "7", "--json", str(chars))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    common = ["--N", "500", "--M", "40", "--n1", "1000", "--spacing", "rand:5:50", "--seed", "11"]
    call(capsys, "ensemble", "--q", "7", "--char", "2", "--csv", str(a), *common)
    call(capsys, "ensemble", "--q", "7", "--char", "2", "--char-file", str(chars), "--csv", str(b), *common)
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().splitlines()[0] == "block_index,start,C_N,normalized"


def test_ensemble_histogram(capsys, tmp_path):
    h = tmp_path / "h.csv"
    code, doc, _ = call(capsys, "ensemble", "--q", "7", "--char", "1", "--N", "100", "--M", "300",
                        "--hist-bins", "12", "--hist-csv", str(h))
    assert code == 0
    assert h.read_text().splitlines()[0] == "bin_center,count,normal_pdf_reference"
    assert "ks_pvalue" in doc["results"]


def test_ensemble_principal_has_no_normalization(capsys):
    code, doc, _ = call(capsys, "ensemble", "--q", "7", "--char", "0", "--N", "50", "--M", "10")
    assert code == 0 and doc["results"]["variance"] == 0


def test_lfunc(capsys):
    code, doc, _ = call(capsys, "lfunc", "--q", "7", "--char", "1", "--s", "0.75,2", "--fe-check",
                        "--residue", "--euler-n", "1000")
    r = doc["results"]
    assert code == 0
    assert r["fe_residual"] < 1e-8 and abs(r["residue_at_1"]) < 1e-6
    assert set(r["value"]) == {"re", "im"} and "euler" in r
    code, doc, _ = call(capsys, "lfunc", "--q", "7", "--char", "1", "--s", "2", "--euler-n", "1000")
    assert doc["results"]["euler"]["residual"] <= doc["results"]["euler"]["tail_bound"]


@pytest.mark.parametrize("argv", [
    ["walk", "--q", "8", "--char", "1", "--n", "5"],
    ["walk", "--q", "7", "--char", "9", "--n", "5"],
    ["chars"],
    ["nope"],
    ["ensemble", "--q", "7", "--char", "1", "--N", "10", "--spacing", "fixed"],
    ["lfunc", "--q", "7", "--char", "0", "--s", "1"],
    ["primes", "--threads", "0", "--nth", "3"],
])
def test_flag_errors_exit_2(argv, capsys):
    try:
        code = run(argv)
    except SystemExit as e:
        code = e.code
    assert code == 2
    assert "usage" in capsys.readouterr().err


CHEAP = [
    ["chars", "--q", "11"],
    ["primes", "--upto", "3e5", "--count-only"],
    ["pairs", "--q", "5", "--k", "2", "--upto", "3e5", "--los"],
    ["freq", "--q", "7", "--char", "1", "--upto", "3e5"],
    ["walk", "--q", "7", "--char", "1", "--n", "2e4", "--checkpoints", "1,100,2e4"],
    ["ensemble", "--q", "7", "--char", "1", "--N", "200", "--M", "50", "--n1", "1e5"],
    ["lfunc", "--q", "7", "--char", "2", "--s", "1.5,1", "--euler-n", "2000"],
]


@pytest.mark.parametrize("argv", CHEAP, ids=lambda a: a[0])
def test_threads_do_not_change_results(argv, capsys):
    _, one, _ = call(capsys, *argv, "--threads", "1")
    _, many, _ = call(capsys, *argv, "--threads", "3")
    assert one["results"] == many["results"]
    _, again, _ = call(capsys, *argv, "--threads", "1", "--no-cache")
    assert json.dumps(one["results"]) == json.dumps(again["results"])


def test_check_subset(capsys):
    code, doc, err = call(capsys, "check", "--level", "desk", "--only", "1,2,3,11,12")
    assert code == 0 and doc["results"]["all_passed"]
    assert err.count("[PASS]") == 5


def test_entry_point_module():
    out = subprocess.run([sys.executable, "-m", "dirwalk", "primes", "--nth", "10"],
                         capture_output=True, text=True, check=True)
    assert json.loads(out.stdout)["results"]["p"] == 29
