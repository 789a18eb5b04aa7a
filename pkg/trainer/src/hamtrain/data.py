"""Dataset access: SYMF tensors, manifest records and the token vocabulary.

Everything here reads the documented on-disk formats directly; the
generator package is not imported.
"""

from __future__ import annotations

import json
import os
import struct
from dataclasses import dataclass

import numpy as np
import torch
from torch.utils.data import Dataset

SYMF_MAGIC = b"SYMF"
SYMF_VERSION = 1


class TrainerDataError(ValueError):
    pass


def read_symf(path) -> np.ndarray:
    """Read one SYMF tensor file into a (C, H, W) float32 array."""
    with open(path, "rb") as f:
        blob = f.read()
    if len(blob) < 20 or blob[:4] != SYMF_MAGIC:
        raise TrainerDataError(f"{path}: not a SYMF tensor file")
    version, h, w, c = struct.unpack("<IIII", blob[4:20])
    if version != SYMF_VERSION:
        raise TrainerDataError(f"{path}: unsupported SYMF version {version}")
    if len(blob) != 20 + 4 * c * h * w:
        raise TrainerDataError(f"{path}: truncated SYMF payload")
    return np.frombuffer(blob, dtype="<f4", offset=20).reshape(c, h, w).copy()


def _shape_key(shape: dict) -> tuple:
    if shape["kind"] == "monomial":
        return ("monomial", shape["h"], shape["k"])
    return ("trig", shape["fn"], shape["var"])


def _shape_text(shape: dict) -> str:
    if shape["kind"] == "trig":
        return f"{shape['fn']}({shape['var']})"
    h, k = shape["h"], shape["k"]
    parts = []
    if h:
        parts.append("x" if h == 1 else f"x^{h}")
    if k:
        parts.append("y" if k == 1 else f"y^{k}")
    return "*".join(parts) if parts else "1"


@dataclass(frozen=True)
class Vocab:
    """Ordered token vocabulary plus the decoder's special symbols."""

    entries: tuple  # of (coeff_str, shape_dict)

    @classmethod
    def load(cls, path) -> "Vocab":
        with open(path, encoding="utf-8") as f:
            raw = json.load(f)
        return cls(tuple((d["coeff"], d["shape"]) for d in raw))

    @property
    def size(self) -> int:
        return len(self.entries)

    @property
    def n_shapes(self) -> int:
        return len({_shape_key(s) for _, s in self.entries})

    # special decoder symbols live after the real tokens
    @property
    def pad(self) -> int:
        return self.size

    @property
    def start(self) -> int:
        return self.size + 1

    @property
    def end(self) -> int:
        return self.size + 2

    @property
    def decoder_size(self) -> int:
        return self.size + 3

    @property
    def max_seq_len(self) -> int:
        """Longest decoder sequence: every shape once, plus START and END."""
        return self.n_shapes + 2

    def token_text(self, idx: int) -> str:
        coeff, shape = self.entries[idx]
        return f"{coeff}*{_shape_text(shape)}"

    def token_shape(self, idx: int) -> tuple:
        return _shape_key(self.entries[idx][1])

    def to_string(self, token_ids) -> str:
        """Join token texts with sign folding into a parseable expression."""
        out = ""
        for i, idx in enumerate(token_ids):
            text = self.token_text(idx)
            if i == 0:
                out = text
            elif text.startswith("-"):
                out += f" - {text[1:]}"
            else:
                out += f" + {text}"
        return out


def load_meta(dataset_dir) -> dict:
    path = os.path.join(dataset_dir, "meta.json")
    if not os.path.exists(path):
        raise TrainerDataError(f"{dataset_dir}: no meta.json (not a dataset?)")
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def load_records(dataset_dir, split=None) -> list[dict]:
    records = []
    with open(os.path.join(dataset_dir, "manifest.jsonl"), encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            if split is None or rec["split"] == split:
                records.append(rec)
    return records


class FlowDataset(Dataset):
    """(raster tensor, token id sequence) pairs for one manifest split."""

    def __init__(self, dataset_dir, split="train", limit=None):
        self.dataset_dir = dataset_dir
        self.meta = load_meta(dataset_dir)
        self.resolution = self.meta["render"]["resolution"]
        self.vocab = Vocab.load(os.path.join(dataset_dir,
                                             self.meta["vocabulary"]))
        self.records = load_records(dataset_dir, split)
        if limit is not None:
            self.records = self.records[:limit]
        if not self.records:
            raise TrainerDataError(
                f"{dataset_dir}: no records in split {split!r}")

    def __len__(self):
        return len(self.records)

    def __getitem__(self, i):
        rec = self.records[i]
        arr = read_symf(os.path.join(self.dataset_dir, rec["tensor_path"]))
        c, h, w = arr.shape
        if h != self.resolution or w != self.resolution:
            raise TrainerDataError(
                f"{rec['tensor_path']}: tensor is {h}x{w} but the manifest "
                f"render config says {self.resolution}")
        return (torch.from_numpy(arr),
                torch.tensor(rec["token_indices"], dtype=torch.long),
                rec["sample_id"])


def collate(batch, vocab: Vocab):
    """Stack images; frame token sequences with START/END and pad.

    Returns (images, decoder_input, decoder_target, sample_ids) where
    input/target are the teacher-forcing pair shifted by one position.
    """
    images = torch.stack([b[0] for b in batch])
    seqs = [b[1] for b in batch]
    ids = [b[2] for b in batch]
    max_len = max(len(s) for s in seqs) + 1  # room for START or END
    inp = torch.full((len(batch), max_len), vocab.pad, dtype=torch.long)
    tgt = torch.full((len(batch), max_len), vocab.pad, dtype=torch.long)
    for row, s in enumerate(seqs):
        inp[row, 0] = vocab.start
        inp[row, 1:1 + len(s)] = s
        tgt[row, :len(s)] = s
        tgt[row, len(s)] = vocab.end
    return images, inp, tgt, ids
