import numpy as np
import pytest

from specorder import bench
from specorder.cli import main
from specorder.errors import InvalidParameter
from specorder.io import load_matrix, load_permutation, read_results, save_matrix, save_permutation


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_gen_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert run(capsys, "gen", "--kind", "banded", "--n", 10, "--param", 3, "--noise", 0,
                   "--seed", 5, "--out", path, "--perm-out", tmp_path / "t.txt")[0] == 0
    assert a.read_bytes() == b.read_bytes()
    A = load_matrix(a)
    assert sorted(np.diag(A)) == [3.0] * 10


def test_gen_golden(tmp_path, capsys):
    out = tmp_path / "g.csv"
    run(capsys, "gen", "--kind", "banded", "--n", 4, "--param", 2, "--no-permute", "--out", out)
    assert out.read_text() == ("2.0,1.0,0.0,0.0\n1.0,2.0,1.0,0.0\n"
                               "0.0,1.0,2.0,1.0\n0.0,0.0,1.0,2.0\n")


def test_bad_kind_is_usage_error(tmp_path, capsys):
    with pytest.raises(SystemExit) as info:
        main(["gen", "--kind", "nope", "--n", "5", "--param", "2", "--out", str(tmp_path / "x")])
    assert info.value.code == 2
    code, _, err = run(capsys, "gen", "--kind", "banded", "--n", 5, "--param", -1,
                       "--out", tmp_path / "x")
    assert code == 2 and "c must be > 0" in err


@pytest.mark.parametrize("method", ["baseline", "mdso"])
def test_order_recovers_ground_truth(tmp_path, capsys, method):
    m, t, o = tmp_path / "m.csv", tmp_path / "t.txt", tmp_path / "o.txt"
    run(capsys, "gen", "--kind", "banded", "--n", 40, "--param", 5, "--seed", 2,
        "--out", m, "--perm-out", t)
    assert run(capsys, "order", m, "--method", method, "--out", o)[0] == 0
    code, out, _ = run(capsys, "eval", o, t)
    assert code == 0 and out.strip() == "1.0"


def test_order_circular_to_stdout(tmp_path, capsys):
    m, t, o = tmp_path / "m.coo", tmp_path / "t.txt", tmp_path / "o.txt"
    run(capsys, "gen", "--kind", "circular_banded", "--n", 30, "--param", 4, "--out", m,
        "--perm-out", t)
    code, out, _ = run(capsys, "order", m, "--method", "baseline", "--kind", "circular")
    assert code == 0
    o.write_text(out)
    assert run(capsys, "eval", "--circular", o, t)[1].strip() == "1.0"


def test_order_disconnected(tmp_path, capsys):
    m = tmp_path / "d.coo"
    m.write_text("0 1 1\n1 2 1\n3 4 1\n4 5 1\n5 3 1\n")
    code, _, err = run(capsys, "order", m, "--method", "baseline")
    assert code == 3
    assert "2 connected components" in err and "0 1 2" in err and "3 4 5" in err
    code, out, _ = run(capsys, "order", m, "--method", "baseline", "--merge")
    assert code == 0
    assert sorted(int(x) for x in out.split()) == list(range(6))


def test_order_missing_file(tmp_path, capsys):
    assert run(capsys, "order", tmp_path / "missing.csv")[0] == 3


def test_order_parse_error(tmp_path, capsys):
    m = tmp_path / "bad.csv"
    m.write_text("1,2\n2,zz\n")
    code, _, err = run(capsys, "order", m)
    assert code == 3 and "line 2" in err


def test_eval(tmp_path, capsys):
    p, q, r = tmp_path / "p", tmp_path / "q", tmp_path / "r"
    save_permutation([0, 1, 2, 3, 4], p)
    save_permutation([4, 3, 2, 1, 0], q)
    save_permutation([0, 1, 2], r)
    assert run(capsys, "eval", p, p)[1].strip() == "1.0"
    assert run(capsys, "eval", "--circular", p, q)[1].strip() == "1.0"
    assert run(capsys, "eval", "--signed", p, q)[1].strip() == "-1.0"
    assert run(capsys, "eval", p, r)[0] == 2


def test_spectra(capsys):
    code, out, _ = run(capsys, "spectra", "--kind", "circulant", "--b", "2,1,0", "--n", 5, "--check")
    assert code == 0
    lines = out.splitlines()
    assert lines[1] == "0,4,1"
    assert float(lines[2].split(",")[1]) == pytest.approx(2.618033988749895)
    code, out, _ = run(capsys, "spectra", "--kind", "tridiag", "--b0", 2, "--b1", 1, "--n", 3)
    vals = sorted(float(line.split(",")[1]) for line in out.splitlines()[1:])
    assert vals == pytest.approx([2 - 2 ** 0.5, 2, 2 + 2 ** 0.5])
    code, out, _ = run(capsys, "spectra", "--kind", "kms", "--rho", 0.5, "--n", 11, "--check")
    assert code == 0 and len(out.splitlines()) == 13
    assert run(capsys, "spectra", "--kind", "kms")[0] == 2


def test_bench_cli(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("# small sweep\nkind = banded\nn = 40\nparam = 5\namplitudes = 0, 2\n"
                   "trials = 3\nmethods = baseline, mdso(k=8;d=4)\n")
    monkeypatch.setenv("MDSO_THREADS", "1")
    out = tmp_path / "r.csv"
    code, text, _ = run(capsys, "bench", cfg, "--out", out, "--sem")
    assert code == 0
    rows = read_results(out)
    assert len(rows) == 3 * 2 * 2
    assert [r.seed for r in rows[:4]] == [0, 0, 1, 1]
    assert all(r.score == 1.0 for r in rows if r.noise == 0)
    assert "sem" in text.splitlines()[0]


def test_bench_bad_config(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("kind = banded\ncolour = blue\n")
    assert run(capsys, "bench", cfg, "--out", tmp_path / "r.csv")[0] == 2


def test_parse_config_and_methods():
    cfg = bench.parse_config("n = 30\nmethods = baseline, mdso, mdso(k=4; scaling=diffusion:2)\n"
                             "k = 12\nscaling = ctd\n")
    assert cfg.methods == (bench.Method("baseline"), bench.Method("mdso", 12, 10, "ctd"),
                           bench.Method("mdso", 4, 10, "diffusion:2"))
    with pytest.raises(InvalidParameter):
        bench.parse_config("trials = 0\n")
    with pytest.raises(InvalidParameter):
        bench.parse_config("methods = spectral\n")


def test_failed_trials_become_nan(monkeypatch):
    def boom(*args, **kw):
        raise InvalidParameter("forced")

    monkeypatch.setattr(bench, "run_method", boom)
    cfg = bench.ExperimentConfig(n=20, param=3, amplitudes=(0.0,), trials=2)
    rows = bench.run_sweep(cfg, workers=1)
    assert len(rows) == 4 and all(np.isnan(r.score) for r in rows)
    summary = bench.summarize(rows)
    assert all(s.failures == 2 for s in summary)


def test_worker_count(monkeypatch):
    monkeypatch.setenv("MDSO_THREADS", "3")
    assert bench.worker_count() == 3
    monkeypatch.setenv("MDSO_THREADS", "zero")
    with pytest.raises(InvalidParameter):
        bench.worker_count()


def test_sparse_ingestion_smoke(tmp_path, capsys):
    from specorder.matgen import gen_linear_banded, inverse_permutation, permute_matrix, random_permutation

    p = random_permutation(50, 1)
    m = tmp_path / "reads.coo"
    save_matrix(permute_matrix(gen_linear_banded(50, 6), p), m, "coo")
    t = tmp_path / "t.txt"
    save_permutation(inverse_permutation(p), t)
    o = tmp_path / "o.txt"
    assert run(capsys, "order", m, "--k", 8, "--d", 5, "--out", o)[0] == 0
    assert (load_permutation(o) >= 0).all()
    assert run(capsys, "eval", o, t)[1].strip() == "1.0"
