import pytest

from metricvote import conjectures
from metricvote.cli import main
from metricvote.profile import parse_metric, parse_profile


@pytest.fixture
def split_file(tmp_path):
    path = tmp_path / "split.profile"
    path.write_text("2 2\n0 1\n1 0\n")
    return str(path)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_winners(capsys, split_file, tmp_path):
    assert run(capsys, "winners", split_file, "--rule", "copeland")[:2] == (0, "0\n")
    dump = tmp_path / "d.txt"
    code, out, _ = run(capsys, "winners", split_file, "--rule", "lp-optimal", "--dump", dump)
    assert code == 0 and "distortion bound 3" in out
    assert "distortion=3" in dump.read_text()


def test_distortion_and_metric_dump(capsys, split_file, tmp_path):
    metric = tmp_path / "w.metric"
    code, out, _ = run(capsys, "distortion", split_file, "--winner", 0, "--opt", 1, "--dump", metric)
    assert (code, out) == (0, "3\n")
    assert parse_metric(metric.read_text()).n == 2
    code, out, _ = run(capsys, "metric-check", split_file, metric)
    assert code == 0 and "costs 3 1" in out


def test_unbounded_distortion_is_reported(capsys, tmp_path):
    path = tmp_path / "u.profile"
    path.write_text("2 2\n0 1\n0 1\n")
    code, out, _ = run(capsys, "distortion", path, "--winner", 1, "--opt", 0)
    assert code == 0 and out.strip() == "inf"


def test_certificates_roundtrip(capsys, split_file, tmp_path):
    cert = tmp_path / "c.txt"
    code, out, _ = run(capsys, "certificate", split_file, "--kind", "matching", "--winner", 0, "--opt", 1, "--out", cert)
    assert code == 0 and "max per-voter cost 3" in out
    assert run(capsys, "certificate", split_file, "--verify", cert)[0] == 0
    # tampering with an amount breaks conservation
    lines = cert.read_text().splitlines()
    lines[1] = lines[1].rsplit(" ", 1)[0] + " 7"
    cert.write_text("\n".join(lines) + "\n")
    code, out, _ = run(capsys, "certificate", split_file, "--verify", cert)
    assert code == 2 and "certificate invalid" in out


def test_chain_certificate(capsys, tmp_path):
    path = tmp_path / "f.profile"
    path.write_text("4 4\n0 1 3 2\n1 2 3 0\n2 3 1 0\n2 1 0 3\n")
    code, out, _ = run(capsys, "certificate", path, "--kind", "chain", "--path", "0,1,2,3")
    assert code == 0 and "construction bound 29/3" in out


def test_compg(capsys, split_file, tmp_path):
    dot = tmp_path / "g.dot"
    code, out, _ = run(capsys, "compg", split_file, "--dot", dot)
    assert code == 0 and "acyclic" in out
    assert dot.read_text().startswith("digraph")
    code, out, _ = run(capsys, "compg", "--batch", 20, "--n", 4, "--m", 5, "--seed", 3)
    assert code == 0 and out.startswith("profiles 20 acyclic 20")


def test_conjecture(capsys):
    code, out, _ = run(capsys, "conjecture", "--n", 4)
    assert code == 0 and "256 graphs, 0 violations" in out
    code, out, _ = run(capsys, "conjecture", "--n", 3, "--graph", 5)
    assert code == 0 and out.startswith("graph 5: witness S =")


def test_conjecture_violation_exit_code(capsys, monkeypatch):
    real = conjectures.check_ccg

    def broken(g, literal=False):
        res = real(g, literal)
        res.witness = None
        return res

    monkeypatch.setattr(conjectures, "check_ccg", broken)
    code, out, _ = run(capsys, "conjecture", "--n", 3, "--graph", 0)
    assert code == 3 and "ccg-violation" in out and "metricvote conjecture --n 3 --graph 0" in out


def test_gen(capsys, tmp_path):
    prefix = tmp_path / "lb"
    code, out, _ = run(capsys, "gen", "lowerbound", "--m", 4, "--out", prefix)
    assert code == 0 and "predicted costs 22, 8" in out
    profile = parse_profile((tmp_path / "lb.profile").read_text())
    assert profile.n == 8 and profile.m == 6
    assert run(capsys, "winners", tmp_path / "lb.profile", "--rule", "ranked-pairs")[1] == "0\n"
    assert run(capsys, "winners", tmp_path / "lb.profile", "--rule", "schulze")[1] == "0\n"
    assert run(capsys, "gen", "random", "--n", 3, "--m", 4, "--seed", 1, "--out", tmp_path / "r")[0] == 0
    assert run(capsys, "gen", "euclidean", "--n", 3, "--m", 4, "--seed", 1, "--out", tmp_path / "e")[0] == 0
    assert run(capsys, "metric-check", tmp_path / "e.profile", tmp_path / "e.metric")[0] == 0


def test_usage_errors(capsys, split_file, tmp_path):
    assert run(capsys, "winners", tmp_path / "missing", "--rule", "copeland")[0] == 1
    assert run(capsys, "distortion", split_file, "--winner", 9)[0] == 1
    assert run(capsys, "gen", "lowerbound", "--m", 3, "--out", tmp_path / "x")[0] == 1
    bad = tmp_path / "bad.profile"
    bad.write_text("2 1\n0 0\n")
    assert run(capsys, "winners", bad, "--rule", "copeland")[0] == 1
    with pytest.raises(SystemExit) as exc:
        main(["winners", split_file, "--rule", "plurality"])
    assert exc.value.code == 1


def test_metric_check_detects_inconsistency(capsys, split_file, tmp_path):
    metric = tmp_path / "bad.metric"
    metric.write_text("2 1\n1 2\n")
    code, out, _ = run(capsys, "metric-check", split_file, metric)
    assert code == 2 and "consistency FAIL" in out
