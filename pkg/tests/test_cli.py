import numpy as np
import pytest

from idpsieve.binning import hib, relevant_set
from idpsieve.cli import main
from idpsieve.hilbert import is_idp
from idpsieve.neuralnet import NetSpec, Params, init_params, save_params
from idpsieve.sieve import grid, scan
from idpsieve.trainer import Dataset, generate_dataset, label, save_dataset


def constant_model(d, value):
    k = len(relevant_set(d))
    return Params((np.zeros((2, d)), np.zeros((k, 2))), (np.zeros(2), np.full(k, value)))


class TestExact:
    def test_example(self, capsys):
        assert main(["exact", "2,1"]) == 0
        out = capsys.readouterr().out
        assert "N: 4" in out and "h*: 1,2,1" in out
        assert out.count("height=1 ") == 2 and "height=2" not in out
        assert "idp_height: true" in out and "idp_bins: true" in out

    @pytest.mark.parametrize("q, verdict", [("1,1,1,1", "true"), ("2,3,4,7", "false")])
    def test_verdicts(self, capsys, q, verdict):
        assert main(["exact", q]) == 0
        out = capsys.readouterr().out
        assert f"idp_height: {verdict}" in out and f"idp_bins: {verdict}" in out

    def test_parse_error(self, capsys):
        assert main(["exact", "1,a"]) != 0
        assert "error" in capsys.readouterr().err

    def test_overflow_error(self, capsys):
        assert main(["exact", str(2**40)]) != 0


class TestScan:
    def test_grid_order(self):
        assert list(grid(2, 2)) == [(1, 1), (1, 2), (2, 1), (2, 2)]

    def test_single_point(self, tmp_path):
        report, pos = scan(constant_model(4, -5.0), 4, 1, eta=0.5, tau=10**6, verify=True,
                           positives_out=tmp_path / "p.txt")
        assert (report.scanned, report.predicted_positive, report.verified_positive) == (1, 1, 1)
        assert pos == [(1, 1, 1, 1)]
        assert (tmp_path / "p.txt").read_text() == "1,1,1,1\n"

    def test_eta_one_accepts_everything(self):
        report, _ = scan(constant_model(3, 50.0), 3, 4, eta=1.0, tau=0)
        assert report.predicted_positive == report.scanned == 64

    def test_exhaustive_and_verify(self):
        model = init_params(NetSpec((3, 5, len(relevant_set(3))), seed=1))
        report, pos = scan(model, 3, 5, eta=0.5, tau=40, verify=True, exhaustive=True)
        truth = [q for q in grid(3, 5) if is_idp(q)]
        assert report.exhaustive_positive == len(truth)
        assert report.verified_positive == sum(is_idp(q) for q in pos)
        assert report.verified_positive <= report.predicted_positive <= report.scanned
        assert report.caught_positive == report.verified_positive

    def test_jobs_do_not_change_result(self):
        model = init_params(NetSpec((3, 5, len(relevant_set(3))), seed=2))
        a, pa = scan(model, 3, 7, eta=0.5, tau=60, verify=True, jobs=1)
        b, pb = scan(model, 3, 7, eta=0.5, tau=60, verify=True, jobs=2)
        assert pa == pb and a.verified_positive == b.verified_positive

    def test_width_mismatch(self):
        with pytest.raises(ValueError):
            scan(constant_model(3, 0.0), 4, 2, 0.5, 0)


def test_pipeline(tmp_path, capsys):
    data, model = tmp_path / "data.txt", tmp_path / "model.txt"
    assert main(["gen", "--d", "3", "--bound", "6", "--count", "120", "--seed", "3", "--out", str(data)]) == 0
    assert main(["train", "--data", str(data), "--out", str(model), "--hidden", "8,8",
                 "--epsilon", "0.02", "--updates", "60", "--eval-every", "20", "--seed", "3"]) == 0
    assert model.read_text().startswith("idpnet 1\n3 8 8 ")
    assert (tmp_path / "model.txt.json").exists()
    capsys.readouterr()

    assert main(["eval", "--model", str(model), "--data", str(data), "--eta", "0.1"]) == 0
    out = capsys.readouterr().out
    assert "PREDICTED 0" in out and "specificity:" in out

    csv = tmp_path / "sweep.csv"
    assert main(["sweep", "--model", str(model), "--data", str(data), "--etas", "0.1,0.5",
                 "--taus", "0,1,2", "--out", str(csv)]) == 0
    lines = csv.read_text().splitlines()
    assert lines[0] == "eta,tau,predicted,true_pos,precision,sensitivity"
    assert len(lines) == 1 + 6

    pos = tmp_path / "pos.txt"
    assert main(["scan", "--model", str(model), "--d", "3", "--bound", "4", "--eta", "0.5",
                 "--tau", "5", "--verify", "--out", str(pos)]) == 0
    out = capsys.readouterr().out
    assert "scanned: 64" in out
    for line in pos.read_text().splitlines():
        assert main(["exact", line]) == 0


def test_eval_reproduces_table_arithmetic(tmp_path, capsys):
    """A perfect single-example model yields the expected table and ratios."""
    q = (4, 10, 14, 14)
    h = hib(q).dense()
    k = len(h)
    p = Params((np.zeros((2, 4)), np.zeros((k, 2))), (np.zeros(2), np.where(h > 0, 9.0, -9.0)))
    save_params(p, tmp_path / "m.txt")
    save_dataset(Dataset(4, 25, 0, [label(q)]), tmp_path / "d.txt")
    assert main(["eval", "--model", str(tmp_path / "m.txt"), "--data", str(tmp_path / "d.txt")]) == 0
    out = capsys.readouterr().out
    assert "2,864" in out and "14" in out
    assert "specificity: 1.000" in out and "sensitivity: 1.000" in out


def test_gen_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for path in (a, b):
        assert main(["gen", "--d", "2", "--bound", "9", "--count", "30", "--seed", "11", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_missing_model_file(tmp_path, capsys):
    assert main(["scan", "--model", str(tmp_path / "none"), "--d", "2", "--bound", "2"]) != 0
