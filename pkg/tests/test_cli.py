import numpy as np
import pytest

from deepvekua.cli import run
from deepvekua.render import palette, read_ppm
from deepvekua.serialization import read_samples
from deepvekua.training import read_metrics


def _config(path, **kw):
    base = dict(benchmark="sdf_square", seed=7, blocks=2, freqs=4, hidden=8)
    base.update(kw)
    path.write_text("".join(f"{k} = {v}\n" for k, v in base.items()))
    return str(path)


def _grid_mse(capsys):
    out = capsys.readouterr().out
    return float(out.strip().split()[-1])


def test_generate_defaults(tmp_path):
    assert run(["generate", "--benchmark", "sdf_square", "--seed", "7", "--out", str(tmp_path / "d")]) == 0
    x, y, header = read_samples(tmp_path / "d" / "train.csv")
    assert header == ["x0", "x1", "y"] and x.shape == (256, 2)
    gx, gy, gheader = read_samples(tmp_path / "d" / "grid.csv")
    assert gheader == ["x0", "x1", "y_true"] and gx.shape == (64 * 64, 2)


def test_generate_1d(tmp_path):
    assert run(["generate", "--benchmark", "chirp1d", "--seed", "1", "--out", str(tmp_path)]) == 0
    x, _, header = read_samples(tmp_path / "grid.csv")
    assert header == ["x0", "y_true"] and x.shape == (512, 1)


def test_train_zero_iters_then_eval_matches_metrics(tmp_path, capsys):
    run(["generate", "--benchmark", "sdf_square", "--seed", "7", "--out", str(tmp_path / "d")])
    cfg = _config(tmp_path / "c.txt", iters=0, out=tmp_path / "r")
    assert run(["train", "--config", cfg]) == 0
    metrics = read_metrics(tmp_path / "r" / "metrics.csv")
    capsys.readouterr()
    assert run(["eval", "--checkpoint", str(tmp_path / "r" / "checkpoint.txt"), "--grid", str(tmp_path / "d" / "train.csv")]) == 0
    assert _grid_mse(capsys) == metrics[0].train_mse


def test_eval_on_training_points_reproduces_final_mse(tmp_path, capsys):
    run(["generate", "--benchmark", "advected_gaussian", "--seed", "3", "--out", str(tmp_path / "d")])
    cfg = _config(tmp_path / "c.txt", benchmark="advected_gaussian", seed=3, iters=25, out=tmp_path / "r")
    assert run(["train", "--config", cfg]) == 0
    final = read_metrics(tmp_path / "r" / "metrics.csv")[-1]
    assert final.iter == 25
    capsys.readouterr()
    run(["eval", "--checkpoint", str(tmp_path / "r" / "checkpoint.txt"), "--grid", str(tmp_path / "d" / "train.csv")])
    assert abs(_grid_mse(capsys) - final.train_mse) <= 1e-12
    assert (tmp_path / "r" / "eval.csv").read_text().startswith("method,seed,grid_mse\ndeepvekua,3,")
    run(["eval", "--checkpoint", str(tmp_path / "r" / "checkpoint.txt"), "--grid", str(tmp_path / "d" / "grid.csv")])
    px, _, header = read_samples(tmp_path / "r" / "pred.csv")
    assert header == ["x0", "x1", "y_pred"] and px.shape == (4096, 2)


def test_train_outputs_are_byte_identical(tmp_path):
    for name in ("a", "b"):
        cfg = _config(tmp_path / f"{name}.txt", iters=10, out=tmp_path / "r", method="gridmlp")
        assert run(["train", "--config", cfg, "--out", str(tmp_path / name)]) == 0
    for f in ("checkpoint.txt", "metrics.csv"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_train_from_csv_data(tmp_path):
    run(["generate", "--benchmark", "chirp1d", "--seed", "2", "--out", str(tmp_path / "d")])
    cfg = _config(tmp_path / "c.txt", benchmark="chirp1d", iters=2, data=tmp_path / "d" / "train.csv", out=tmp_path / "r")
    assert run(["train", "--config", cfg]) == 0
    assert len(read_metrics(tmp_path / "r" / "metrics.csv")) == 3


@pytest.mark.parametrize(
    "argv",
    [
        ["bogus"],
        ["generate", "--benchmark", "sdf_square"],
        ["generate", "--benchmark", "navier_stokes", "--seed", "1", "--out", "x"],
        ["train", "--config", "/nonexistent/config.txt"],
        ["compare", "--benchmark", "sdf_square", "--seeds"],
    ],
)
def test_usage_errors_exit_1(argv, capsys):
    assert run(argv) == 1
    assert capsys.readouterr().err


def test_bad_config_exits_1(tmp_path, capsys):
    (tmp_path / "c.txt").write_text("lambda = -1\n")
    assert run(["train", "--config", str(tmp_path / "c.txt")]) == 1
    assert "lambda" in capsys.readouterr().err


def test_runtime_failure_exits_2(tmp_path, monkeypatch, capsys):
    from deepvekua import model
    from deepvekua.errors import SolveFailed

    def fail(*a, **k):
        raise SolveFailed("forced")

    monkeypatch.setattr(model.linalg, "ridge_solve", fail)
    cfg = _config(tmp_path / "c.txt", iters=3, out=tmp_path / "r")
    assert run(["train", "--config", cfg]) == 2
    assert "forced" in capsys.readouterr().err
    assert (tmp_path / "r" / "metrics.csv").read_text() == "iter,train_mse,wall_ms\n"


def test_render_heatmap(tmp_path):
    run(["generate", "--benchmark", "sdf_square", "--seed", "1", "--out", str(tmp_path)])
    assert run(["render", "--field", str(tmp_path / "grid.csv"), "--out", str(tmp_path / "g.ppm")]) == 0
    img = read_ppm(tmp_path / "g.ppm")
    assert img.shape == (256, 256, 3)
    pal = palette()
    # the centre of the square is the minimum of the SDF, the corners the maximum
    np.testing.assert_array_equal(img[128, 128], pal[0])
    np.testing.assert_array_equal(img[0, 0], pal[255])


def test_render_line_plot(tmp_path):
    run(["generate", "--benchmark", "chirp1d", "--seed", "1", "--out", str(tmp_path)])
    assert run(["render", "--field", str(tmp_path / "grid.csv"), "--out", str(tmp_path / "c.ppm")]) == 0
    img = read_ppm(tmp_path / "c.ppm")
    assert img.shape == (240, 640, 3)
    assert (img != 255).any()


def test_render_bad_column(tmp_path):
    run(["generate", "--benchmark", "chirp1d", "--seed", "1", "--out", str(tmp_path)])
    assert run(["render", "--field", str(tmp_path / "grid.csv"), "--out", str(tmp_path / "c.ppm"), "--column", "nope"]) == 1


def test_compare_writes_results(tmp_path, capsys):
    cfg = _config(tmp_path / "base.txt", iters=3)
    argv = ["compare", "--benchmark", "chirp1d", "--seeds", "1", "2", "--config", cfg, "--out", str(tmp_path / "cmp")]
    assert run(argv) == 0
    lines = (tmp_path / "cmp" / "results.csv").read_text().splitlines()
    assert lines[0] == "method,seed,grid_mse"
    rows = [ln.split(",") for ln in lines[1:]]
    assert [r[0] for r in rows] == [m for m in ("deepvekua", "siren", "gridmlp", "cascade") for _ in range(3)]
    assert [r[1] for r in rows[:3]] == ["1", "2", "median"]
    assert all(np.isfinite(float(r[2])) for r in rows)
    assert "median" in capsys.readouterr().out
    assert (tmp_path / "cmp" / "cells" / "siren-2" / "checkpoint.txt").exists()
