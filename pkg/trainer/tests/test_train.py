import json

import pytest

from hamtrain.data import FlowDataset, Vocab
from hamtrain.train import (TrainConfig, evaluate_loss, load_checkpoint,
                            train, _loader)


@pytest.fixture(scope="module")
def short_run(b1_dataset, tmp_path_factory):
    out = tmp_path_factory.mktemp("run")
    cfg = TrainConfig(dataset_dir=str(b1_dataset), out_dir=str(out),
                      epochs=5, hidden=64, embed=32, seed=0)
    log = train(cfg)
    return out, cfg, log


class TestTraining:
    def test_loss_strictly_decreases_first_five_epochs(self, short_run):
        _, _, log = short_run
        losses = [e["eval_loss"] for e in log]
        assert len(losses) == 5
        assert all(a > b for a, b in zip(losses, losses[1:])), losses

    def test_log_file_matches_returned_log(self, short_run):
        out, _, log = short_run
        lines = [json.loads(l) for l in
                 (out / "training_log.jsonl").read_text().splitlines()]
        assert lines == log

    def test_checkpoint_reproduces_logged_loss(self, short_run, b1_dataset):
        out, cfg, log = short_run
        model, cfg2, ckpt = load_checkpoint(out / "checkpoint.pt",
                                            str(b1_dataset))
        assert ckpt["epoch"] == 5
        ds = FlowDataset(str(b1_dataset), "train")
        loader = _loader(ds, cfg2, shuffle=False)
        loss = evaluate_loss(model, loader, ds.vocab)
        assert abs(loss - log[-1]["eval_loss"]) <= 1e-4

    def test_resume_continues_epoch_numbering(self, short_run, b1_dataset,
                                              tmp_path):
        out, _, _ = short_run
        cfg = TrainConfig(dataset_dir=str(b1_dataset),
                          out_dir=str(tmp_path / "resumed"), epochs=1,
                          hidden=64, embed=32, seed=0,
                          resume=str(out / "checkpoint.pt"))
        log = train(cfg)
        assert log[0]["epoch"] == 6

    def test_missing_dataset_errors(self, tmp_path):
        from hamtrain.data import TrainerDataError
        cfg = TrainConfig(dataset_dir=str(tmp_path / "nope"),
                          out_dir=str(tmp_path / "out"), epochs=1)
        with pytest.raises(TrainerDataError):
            train(cfg)
