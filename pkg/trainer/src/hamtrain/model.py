"""Small from-scratch CNN encoder and LSTM token decoder."""

from __future__ import annotations

import torch
import torch.nn as nn

from .data import Vocab


class Encoder(nn.Module):
    """Four conv blocks over the 3-channel raster.

    The feature map is pooled to a fixed 4x4 grid (not 1x1: arrow
    direction in the quiver channel is a spatial signal that global
    averaging destroys) and projected to the decoder width.
    """

    def __init__(self, hidden: int):
        super().__init__()
        chans = [3, 16, 32, 64, 64]
        blocks = []
        for cin, cout in zip(chans, chans[1:]):
            blocks += [nn.Conv2d(cin, cout, 3, padding=1),
                       nn.BatchNorm2d(cout),
                       nn.ReLU(inplace=True),
                       nn.MaxPool2d(2)]
        self.conv = nn.Sequential(*blocks)
        self.pool = nn.AdaptiveAvgPool2d(4)
        self.proj = nn.Linear(chans[-1] * 16, hidden)

    def forward(self, images):
        z = self.pool(self.conv(images)).flatten(1)
        return torch.tanh(self.proj(z))


class CaptionModel(nn.Module):
    """Encoder feature initializes the LSTM state; decoder predicts the
    next token id at every position."""

    def __init__(self, vocab: Vocab, hidden: int = 128, embed: int = 64):
        super().__init__()
        self.vocab = vocab
        self.encoder = Encoder(hidden)
        self.embed = nn.Embedding(vocab.decoder_size, embed,
                                  padding_idx=vocab.pad)
        self.lstm = nn.LSTM(embed, hidden, batch_first=True)
        self.head = nn.Linear(hidden, vocab.decoder_size)

    def forward(self, images, input_ids):
        h0 = self.encoder(images).unsqueeze(0)
        c0 = torch.zeros_like(h0)
        out, _ = self.lstm(self.embed(input_ids), (h0, c0))
        return self.head(out)

    @torch.no_grad()
    def greedy_decode(self, images, max_len=None):
        """Greedy decoding until END or max length; PAD and START are
        masked out so they can never be emitted."""
        v = self.vocab
        if max_len is None:
            max_len = v.max_seq_len
        n = images.shape[0]
        h = self.encoder(images).unsqueeze(0)
        c = torch.zeros_like(h)
        tok = torch.full((n, 1), v.start, dtype=torch.long,
                         device=images.device)
        done = torch.zeros(n, dtype=torch.bool, device=images.device)
        seqs = [[] for _ in range(n)]
        for _ in range(max_len):
            out, (h, c) = self.lstm(self.embed(tok), (h, c))
            logits = self.head(out[:, -1])
            logits[:, v.pad] = float("-inf")
            logits[:, v.start] = float("-inf")
            tok = logits.argmax(dim=1, keepdim=True)
            for row in range(n):
                t = int(tok[row, 0])
                if done[row]:
                    continue
                if t == v.end:
                    done[row] = True
                else:
                    seqs[row].append(t)
            if bool(done.all()):
                break
        return seqs
