"""Training loop: Adam + teacher-forced cross-entropy, with checkpointing.

Per-epoch entries are appended to training_log.jsonl; `loss` is the mean
minibatch training loss and `eval_loss` is a fixed-weights pass over the
train split (this is the value a resumed checkpoint must reproduce).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, asdict

import torch
import torch.nn as nn
from torch.utils.data import DataLoader

from .data import FlowDataset, Vocab, collate
from .model import CaptionModel


@dataclass
class TrainConfig:
    dataset_dir: str
    out_dir: str
    epochs: int = 50
    learning_rate: float = 1e-4
    batch_size: int = 32
    hidden: int = 128
    embed: int = 64
    seed: int = 0
    limit: int | None = None
    resume: str | None = None
    num_workers: int = 0


def _loader(ds, cfg, shuffle):
    gen = torch.Generator()
    gen.manual_seed(cfg.seed)
    return DataLoader(ds, batch_size=cfg.batch_size, shuffle=shuffle,
                      generator=gen if shuffle else None,
                      num_workers=cfg.num_workers,
                      collate_fn=lambda b: collate(b, ds.vocab))


@torch.no_grad()
def evaluate_loss(model: CaptionModel, loader, vocab: Vocab) -> float:
    model.eval()
    crit = nn.CrossEntropyLoss(ignore_index=vocab.pad, reduction="sum")
    total = 0.0
    n_tokens = 0
    for images, inp, tgt, _ in loader:
        logits = model(images, inp)
        total += float(crit(logits.transpose(1, 2), tgt))
        n_tokens += int((tgt != vocab.pad).sum())
    return total / n_tokens


def save_checkpoint(path, model, optimizer, epoch, cfg):
    torch.save({
        "model_state": model.state_dict(),
        "optimizer_state": optimizer.state_dict(),
        "epoch": epoch,
        "config": asdict(cfg),
    }, path)


def load_checkpoint(path, dataset_dir=None):
    """Rebuild the model (and config) recorded in a checkpoint."""
    ckpt = torch.load(path, map_location="cpu", weights_only=False)
    cfg = TrainConfig(**ckpt["config"])
    if dataset_dir is not None:
        cfg.dataset_dir = dataset_dir
    vocab = Vocab.load(os.path.join(cfg.dataset_dir, "vocab.json"))
    model = CaptionModel(vocab, hidden=cfg.hidden, embed=cfg.embed)
    model.load_state_dict(ckpt["model_state"])
    return model, cfg, ckpt


def train(cfg: TrainConfig) -> list[dict]:
    torch.manual_seed(cfg.seed)
    os.makedirs(cfg.out_dir, exist_ok=True)
    ds = FlowDataset(cfg.dataset_dir, split="train", limit=cfg.limit)
    vocab = ds.vocab
    loader = _loader(ds, cfg, shuffle=True)
    eval_loader = _loader(ds, cfg, shuffle=False)

    start_epoch = 0
    model = CaptionModel(vocab, hidden=cfg.hidden, embed=cfg.embed)
    optimizer = torch.optim.Adam(model.parameters(), lr=cfg.learning_rate)
    if cfg.resume:
        model, _, ckpt = load_checkpoint(cfg.resume, cfg.dataset_dir)
        optimizer = torch.optim.Adam(model.parameters(), lr=cfg.learning_rate)
        optimizer.load_state_dict(ckpt["optimizer_state"])
        start_epoch = ckpt["epoch"]

    crit = nn.CrossEntropyLoss(ignore_index=vocab.pad)
    log_path = os.path.join(cfg.out_dir, "training_log.jsonl")
    ckpt_path = os.path.join(cfg.out_dir, "checkpoint.pt")
    log = []
    with open(log_path, "a", encoding="utf-8") as lf:
        for epoch in range(start_epoch, start_epoch + cfg.epochs):
            model.train()
            total = 0.0
            n_batches = 0
            for images, inp, tgt, _ in loader:
                optimizer.zero_grad()
                logits = model(images, inp)
                loss = crit(logits.transpose(1, 2), tgt)
                loss.backward()
                optimizer.step()
                total += float(loss.detach())
                n_batches += 1
            entry = {
                "epoch": epoch + 1,
                "loss": total / n_batches,
                "eval_loss": evaluate_loss(model, eval_loader, vocab),
            }
            log.append(entry)
            lf.write(json.dumps(entry) + "\n")
            lf.flush()
            save_checkpoint(ckpt_path, model, optimizer, epoch + 1, cfg)
    return log
