import json
import subprocess
import sys

import pytest

from magictri.cli import THREADS_ENV, default_threads, main
from magictri.formats import parse_tri

P16_TEXT = "4\n2 15 4 7 11 16 12\n14 9 3 8 13\n5 10 6\n1\n"
I9_TEXT = "3\n1 2 3 4 5\n6 7 8\n9\n"


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, text in (("p16", P16_TEXT), ("i9", I9_TEXT), ("bad", "2\n1 2 2\n4\n")):
        p = tmp_path / f"{name}.tri"
        p.write_text(text)
        paths[name] = str(p)
    return paths


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestVerify:
    def test_magic(self, capsys, files):
        code, out, _ = run(capsys, "verify", files["p16"])
        assert code == 0
        assert "magic constant M = 68" in out and out.rstrip().endswith("magic")
        assert "h1 = 68" in out and "q2 = 68" in out

    def test_not_magic(self, capsys, files):
        code, out, _ = run(capsys, "verify", files["i9"])
        assert code == 1
        assert "h1 = 24 (target 30)" in out
        assert "row sums:          15 21 9" in out

    def test_json(self, capsys, files):
        code, out, _ = run(capsys, "verify", files["i9"], "--format", "json")
        doc = json.loads(out)
        assert code == 1 and doc["result"]["h"] == [24, 42] and not doc["result"]["magic"]

    def test_parse_error(self, capsys, files):
        code, out, err = run(capsys, "verify", files["bad"])
        assert code == 2 and out == ""
        assert err.startswith("magictri: error:") and "duplicate value 2" in err
        assert "line 2, column 5" in err
        assert len(err.strip().splitlines()) == 1

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "verify", str(tmp_path / "nope.tri"))
        assert code == 2 and err.startswith("magictri: error: cannot read")


def test_canon(capsys, tmp_path):
    p = tmp_path / "t.tri"
    p.write_text("2\n4 2 1\n3\n")
    code, out, _ = run(capsys, "canon", str(p))
    assert code == 0 and out == "2\n1 2 3\n4\n"


class TestCount:
    @pytest.mark.parametrize("n, t_n", [(1, 1), (2, 4), (3, 96), (4, 238536576)])
    def test_counts(self, capsys, n, t_n):
        code, out, _ = run(capsys, "count", "--levels", str(n), "--threads", "1")
        assert code == 0
        doc = json.loads(out)
        assert doc["result"]["t_n"] == t_n
        assert doc["metadata"]["subcommand"] == "count"
        assert doc["metadata"]["flags"]["levels"] == n

    def test_text(self, capsys):
        code, out, _ = run(capsys, "count", "--levels", "3", "--format", "text")
        assert code == 0 and out.startswith("T_3 = 96")

    def test_infeasible(self, capsys):
        code, _, err = run(capsys, "count", "--levels", "5")
        assert code == 2 and err.startswith("magictri: error:")


class TestEnumerate:
    def test_two(self, capsys):
        from magictri.formats import iter_tri

        code, out, _ = run(capsys, "enumerate", "--levels", "2")
        assert code == 0
        assert [t.entries for t in iter_tri(out)] == [(1, 2, 3, 4), (1, 3, 2, 4), (1, 4, 2, 3), (2, 1, 3, 4)]

    def test_limit_and_out(self, capsys, tmp_path):
        from magictri.formats import iter_tri
        from magictri.triangle import is_magic

        dest = tmp_path / "four.tri"
        code, out, _ = run(capsys, "enumerate", "--levels", "4", "--limit", "25", "--out", str(dest), "-q")
        assert code == 0 and out == ""
        ts = list(iter_tri(dest.read_text()))
        assert len(ts) == 25 and all(is_magic(t) for t in ts)

    def test_three_count(self, capsys):
        from magictri.formats import iter_tri

        _, out, _ = run(capsys, "enumerate", "--levels", "3")
        assert len(list(iter_tri(out))) == 96


class TestStats:
    def test_three(self, capsys):
        code, out, _ = run(capsys, "stats", "--levels", "3")
        assert code == 0 and "5,0,72,24,0,96" in out.splitlines()

    def test_json_out(self, capsys, tmp_path):
        dest = tmp_path / "d.json"
        code, out, _ = run(capsys, "stats", "--levels", "3", "--format", "json", "--out", str(dest))
        assert code == 0 and out == ""
        assert json.loads(dest.read_text())["result"]["t_n"] == 96

    def test_rejects(self, capsys):
        code, _, _ = run(capsys, "stats", "--levels", "5")
        assert code == 2


class TestSolve:
    def test_text_writes_triangle(self, capsys):
        code, out, _ = run(capsys, "solve", "--levels", "4", "--seed", "3")
        assert code == 0
        head, _, tri = out.partition("energy: 0\n")
        assert head.startswith("steps: ")
        from magictri.triangle import is_magic

        assert is_magic(parse_tri(tri))

    def test_out_file_and_json(self, capsys, tmp_path):
        dest = tmp_path / "s.tri"
        code, out, _ = run(capsys, "solve", "--levels", "5", "--seed", "1", "--out", str(dest), "--format", "json")
        doc = json.loads(out)
        assert code == 0 and doc["result"]["success"]
        assert list(parse_tri(dest.read_text()).entries) == doc["result"]["entries"]
        assert doc["metadata"]["seeds"] == {"seed": 1}

    def test_budget_exhausted(self, capsys):
        code, out, err = run(capsys, "solve", "--levels", "7", "--max-steps", "10", "--t0", "0.01")
        assert code == 1 and "steps: 10" in out
        assert "no magic triangle" in err

    def test_retries(self, capsys):
        code, out, _ = run(capsys, "solve", "--levels", "5", "--max-steps", "2000", "--retries", "50", "--format", "json")
        doc = json.loads(out)["result"]
        assert doc["total_steps"] >= doc["steps"]
        assert code == (0 if doc["success"] else 1)

    @pytest.mark.parametrize(
        "argv",
        [
            ["solve", "--levels", "4", "--alpha", "1.5"],
            ["solve", "--levels", "1"],
        ],
    )
    def test_bad_config(self, capsys, argv):
        code, _, err = run(capsys, *argv)
        assert code == 2 and err.startswith("magictri: error:")


def test_experiment(capsys, tmp_path):
    dest = tmp_path / "e.csv"
    code, out, _ = run(capsys, "experiment", "--levels", "3", "--trials", "20", "--seed", "4", "--out", str(dest))
    doc = json.loads(out)
    assert code == 0 and doc["result"]["trials"] == 20
    lines = dest.read_text().splitlines()
    assert lines[0] == "trial,seed,steps,success" and len(lines) == 1 + 20 + 1 + 2


def test_sample(capsys):
    code, out, _ = run(capsys, "sample", "--levels", "2", "--trials", "500")
    doc = json.loads(out)["result"]
    assert code == 0 and doc["hits"] == doc["trials"] == 500
    assert set(doc) >= {"trials", "hits", "estimate", "interval"}


class TestParsing:
    @pytest.mark.parametrize(
        "argv",
        [
            [],
            ["frobnicate"],
            ["count"],
            ["count", "--levels", "x"],
            ["count", "--levels", "3", "--bogus"],
            ["sample", "--levels", "3", "--trials", "0"],
            ["solve", "--levels", "3", "--seed", "-1"],
        ],
    )
    def test_rejected_before_work(self, capsys, argv):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == 2
        err = capsys.readouterr().err
        assert err.strip().splitlines()[-1].startswith("magictri: error:")

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0
        out = capsys.readouterr().out
        assert out.startswith("magictri 0.1.0") and "tri-1" in out

    def test_threads_env(self, monkeypatch):
        monkeypatch.setenv(THREADS_ENV, "3")
        assert default_threads() == 3
        monkeypatch.setenv(THREADS_ENV, "junk")
        assert default_threads() >= 1


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "magictri", "count", "--levels", "2", "-q"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert res.returncode == 0 and json.loads(res.stdout)["result"]["t_n"] == 4
    assert res.stderr == ""
