"""Training loop, checkpointing, inference, and the CLI wrapper."""

from __future__ import annotations

import numpy as np
import pytest
import torch

import fpn_rectify as fr
from fpn_rectify.cli import main


def quick_config(toy_dataset, tmp_path, **overrides) -> fr.TrainConfig:
    base = dict(manifest=str(toy_dataset["manifest"]),
                checkpoint=str(tmp_path / "model.pt"),
                epochs=2, batch_size=3, max_depth=4000, seed=0)
    base.update(overrides)
    return fr.TrainConfig(**base)


def test_overfitting_a_tiny_set_drives_the_loss_down(toy_dataset, tmp_path):
    cfg = quick_config(toy_dataset, tmp_path, epochs=300)
    summary = fr.train(cfg)
    history = summary["loss_history"]
    assert len(history) == 300
    assert min(history) < history[0] / 10.0
    assert summary["parameters"] == fr.count_parameters(fr.make_model())


def test_zero_scale_loss_leaves_parameters_untouched(toy_dataset, tmp_path):
    torch.manual_seed(7)
    reference = {k: v.clone() for k, v in fr.make_model().state_dict().items()}

    cfg = quick_config(toy_dataset, tmp_path, epochs=3, seed=7, scale_s=0.0)
    summary = fr.train(cfg)
    assert summary["loss_history"] == [0.0, 0.0, 0.0]

    model, _ = fr.load_checkpoint(cfg.checkpoint)
    for key, value in model.state_dict().items():
        assert torch.equal(value, reference[key])


def test_checkpoint_is_atomic_and_self_describing(toy_dataset, tmp_path):
    cfg = quick_config(toy_dataset, tmp_path)
    fr.train(cfg)
    assert (tmp_path / "model.pt").exists()
    assert list(tmp_path.glob("*.tmp")) == []

    model, payload = fr.load_checkpoint(cfg.checkpoint)
    assert not model.training  # ready for inference
    assert payload["max_depth"] == 4000
    assert payload["config"]["epochs"] == 2
    assert len(payload["loss_history"]) == 2


def test_train_config_validation(toy_dataset, tmp_path):
    with pytest.raises(ValueError):
        quick_config(toy_dataset, tmp_path, epochs=0)
    with pytest.raises(ValueError):
        quick_config(toy_dataset, tmp_path, max_depth=0)
    with pytest.raises(ValueError):
        quick_config(toy_dataset, tmp_path, max_depth=70000)
    with pytest.raises(ValueError):
        quick_config(toy_dataset, tmp_path, learning_rate=0.0)


def test_training_needs_usable_pairs(tmp_path):
    manifest = tmp_path / "m.jsonl"
    manifest.write_text('{"version": 1}\n{"status": "failed"}\n')
    cfg = fr.TrainConfig(manifest=str(manifest),
                         checkpoint=str(tmp_path / "m.pt"))
    with pytest.raises(ValueError, match="no usable pairs"):
        fr.train(cfg)


def test_limit_caps_the_pair_count(toy_dataset, tmp_path):
    cfg = quick_config(toy_dataset, tmp_path, limit=2)
    assert fr.train(cfg)["pairs"] == 2


def test_predict_writes_dataset_format(toy_dataset, tmp_path):
    cfg = quick_config(toy_dataset, tmp_path)
    fr.train(cfg)

    # a stray simulator sidecar must not be treated as a frame
    fr.write_depth_png(toy_dataset["raw"] / "toy_0.mask.png",
                       np.zeros((32, 32), dtype=np.uint16))
    out_a = tmp_path / "pred_a"
    names = fr.predict(cfg.checkpoint, toy_dataset["raw"], out_a)
    assert names == toy_dataset["names"]
    assert (out_a / "intrinsics.json").exists()
    assert not (out_a / "toy_0.mask.png").exists()

    pred = fr.read_depth_png(out_a / "toy_0.png")
    assert pred.shape == (32, 32) and pred.dtype == np.uint16
    assert pred.max() <= 4000

    out_b = tmp_path / "pred_b"
    fr.predict(cfg.checkpoint, toy_dataset["raw"], out_b)
    for name in names:
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()


def test_predict_error_contracts(toy_dataset, tmp_path):
    with pytest.raises(FileNotFoundError):
        fr.predict(tmp_path / "missing.pt", toy_dataset["raw"], tmp_path / "o")
    cfg = quick_config(toy_dataset, tmp_path)
    fr.train(cfg)
    empty = tmp_path / "empty"
    empty.mkdir()
    with pytest.raises(ValueError, match="no depth images"):
        fr.predict(cfg.checkpoint, empty, tmp_path / "o")


def test_cli_train_and_predict(toy_dataset, tmp_path, capsys):
    ckpt = tmp_path / "cli.pt"
    code = main(["train", "--manifest", str(toy_dataset["manifest"]),
                 "--checkpoint", str(ckpt), "--epochs", "2",
                 "--batch-size", "3", "--max-depth", "4000"])
    out = capsys.readouterr().out
    assert code == 0 and ckpt.exists()
    assert "model parameters:" in out
    assert "trained on 3 pairs" in out

    code = main(["predict", "--checkpoint", str(ckpt),
                 "--input", str(toy_dataset["raw"]),
                 "--output", str(tmp_path / "cli_pred")])
    assert code == 0
    assert "predicted 3 frames" in capsys.readouterr().out


def test_cli_reports_usage_failures(tmp_path, capsys):
    assert main(["train", "--manifest", str(tmp_path / "none.jsonl"),
                 "--checkpoint", str(tmp_path / "x.pt")]) == 2
    assert "error:" in capsys.readouterr().err
    assert main(["predict", "--checkpoint", str(tmp_path / "none.pt"),
                 "--input", str(tmp_path), "--output", str(tmp_path / "o")]) == 2
    with pytest.raises(SystemExit):
        main([])
