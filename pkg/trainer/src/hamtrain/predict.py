"""Greedy decoding of a trained checkpoint into a predictions file.

Output is JSON Lines of {sample_id, predicted, flagged}; the first two
fields are exactly the schema the generator's `score` command consumes.
A sequence that repeats a term shape is emitted verbatim with
flagged = true.
"""

from __future__ import annotations

import json

import torch
from torch.utils.data import DataLoader

from .data import FlowDataset, collate
from .train import load_checkpoint


def predict(checkpoint_path, dataset_dir, out_path, split="test",
            batch_size=64, limit=None) -> dict:
    model, cfg, _ = load_checkpoint(checkpoint_path, dataset_dir)
    model.eval()
    ds = FlowDataset(dataset_dir, split=split, limit=limit)
    vocab = ds.vocab
    loader = DataLoader(ds, batch_size=batch_size, shuffle=False,
                        collate_fn=lambda b: collate(b, vocab))
    n = n_flagged = 0
    with open(out_path, "w", encoding="utf-8") as f:
        with torch.no_grad():
            for images, _, _, ids in loader:
                for seq, sid in zip(model.greedy_decode(images), ids):
                    shapes = [vocab.token_shape(t) for t in seq]
                    flagged = len(shapes) != len(set(shapes)) or not seq
                    f.write(json.dumps({
                        "sample_id": sid,
                        "predicted": vocab.to_string(seq),
                        "flagged": flagged,
                    }) + "\n")
                    n += 1
                    n_flagged += flagged
    return {"n_predictions": n, "n_flagged": n_flagged, "split": split,
            "output": str(out_path)}
