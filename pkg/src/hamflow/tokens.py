"""Tokenization of corpus functions and the three evaluation measures.

A token is a (nonzero coefficient, shape) pair; a function is a multi-hot
vector over the ordered token vocabulary.  Signed variants of a monomial
are distinct tokens.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .corpus import BasisSpec
from .expr import HamFunction, Monomial, TermShape, Trig, format_coeff

__all__ = [
    "Token",
    "TokenVocab",
    "build_vocab",
    "vectorize",
    "detokenize",
    "token_sequence",
    "distance_euclid",
    "distance_jaccard",
    "distance_levenshtein",
]

Token = tuple[Fraction, TermShape]


def _shape_to_json(s: TermShape) -> dict:
    if isinstance(s, Monomial):
        return {"kind": "monomial", "h": s.h, "k": s.k}
    return {"kind": "trig", "fn": s.fn, "var": s.var}


def _shape_from_json(d: dict) -> TermShape:
    if d["kind"] == "monomial":
        return Monomial(d["h"], d["k"])
    return Trig(d["fn"], d["var"])


@dataclass(frozen=True)
class TokenVocab:
    tokens: tuple[Token, ...]

    @property
    def size(self) -> int:
        return len(self.tokens)

    def index_of(self, token: Token) -> int:
        try:
            return self._index()[token]
        except KeyError:
            raise KeyError(f"token {format_coeff(token[0])}*{token[1]} "
                           "not in vocabulary") from None

    def _index(self) -> dict:
        # lazy cache on the instance; frozen dataclass so go through __dict__
        idx = self.__dict__.get("_idx")
        if idx is None:
            idx = {t: i for i, t in enumerate(self.tokens)}
            self.__dict__["_idx"] = idx
        return idx

    def to_json(self) -> list[dict]:
        return [{"coeff": format_coeff(c), "shape": _shape_to_json(s)}
                for c, s in self.tokens]

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_json(), f, indent=1)

    @classmethod
    def load(cls, path) -> "TokenVocab":
        with open(path, encoding="utf-8") as f:
            raw = json.load(f)
        return cls(tuple((Fraction(d["coeff"]), _shape_from_json(d["shape"]))
                         for d in raw))


def build_vocab(spec: BasisSpec) -> TokenVocab:
    """Deterministic vocabulary: shapes in canonical order, coefficients
    ascending within each shape; size (l-1) * S."""
    nonzero = tuple(d for d in spec.delta if d != 0)
    tokens = tuple((c, s) for s in spec.shapes for c in nonzero)
    return TokenVocab(tokens)


def vectorize(f: HamFunction, vocab: TokenVocab) -> list[int]:
    """Multi-hot indicator over the vocabulary; raises on foreign tokens."""
    bits = [0] * vocab.size
    for c, s in f.terms:
        bits[vocab.index_of((c, s))] = 1
    return bits


def detokenize(bits: Sequence[int], vocab: TokenVocab) -> HamFunction:
    return HamFunction.from_terms(vocab.tokens[i]
                                  for i, b in enumerate(bits) if b)


def token_sequence(f: HamFunction, vocab: TokenVocab) -> list[int]:
    """Function tokens as vocabulary indices, in vocabulary order."""
    return sorted(vocab.index_of((c, s)) for c, s in f.terms)


def distance_euclid(a: Sequence[float], b: Sequence[float]) -> float:
    """Euclidean distance between token vectors; sqrt of the Hamming count
    for binary inputs."""
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    return math.sqrt(sum((float(ai) - float(bi)) ** 2 for ai, bi in zip(a, b)))


def distance_jaccard(a, b) -> float:
    """1 - |A&B| / |A|B|; two empty sets are at distance 0 by convention."""
    a, b = set(a), set(b)
    union = a | b
    if not union:
        return 0.0
    return 1.0 - len(a & b) / len(union)


def distance_levenshtein(a: Sequence, b: Sequence) -> int:
    """Edit distance with unit insert/delete/substitute costs."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ai in enumerate(a, start=1):
        cur = [i]
        for j, bj in enumerate(b, start=1):
            cur.append(min(prev[j] + 1,
                           cur[j - 1] + 1,
                           prev[j - 1] + (ai != bj)))
        prev = cur
    return prev[-1]
