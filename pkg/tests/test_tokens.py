import math
import random
from fractions import Fraction

import pytest

from corpus_sampling import random_functions
from hamflow.corpus import BUILTIN_DELTAS, BasisSpec, cardinality, enumerate_range
from hamflow.expr import Monomial, Trig, parse_ham, parse_term_sequence
from hamflow.tokens import (TokenVocab, build_vocab, detokenize,
                            distance_euclid, distance_jaccard,
                            distance_levenshtein, token_sequence, vectorize)


class TestVocab:
    def test_sizes(self, b1d3, b2d3, b2d5):
        assert build_vocab(b1d3).size == 4
        assert build_vocab(b2d3).size == 10
        assert build_vocab(b2d5).size == 20
        assert build_vocab(BasisSpec(2, True, BUILTIN_DELTAS["d3"])).size == 18

    def test_order_shape_major_coeff_ascending(self, b1d3):
        v = build_vocab(b1d3)
        assert v.tokens == (
            (Fraction(-1), Monomial(1, 0)), (Fraction(1), Monomial(1, 0)),
            (Fraction(-1), Monomial(0, 1)), (Fraction(1), Monomial(0, 1)),
        )

    def test_union_over_corpus_equals_vocab(self, b2d3):
        seen = set()
        for f in enumerate_range(b2d3, 0, cardinality(b2d3)):
            seen.update(f.terms)
        assert seen == set(build_vocab(b2d3).tokens)

    def test_json_roundtrip(self, tmp_path, b2d5):
        v = build_vocab(BasisSpec(2, True, BUILTIN_DELTAS["d5"]))
        p = tmp_path / "vocab.json"
        v.save(p)
        assert TokenVocab.load(p) == v

    def test_trig_tokens_present(self):
        v = build_vocab(BasisSpec(1, True, BUILTIN_DELTAS["d3"]))
        assert (Fraction(1), Trig("sin", "x")) in v.tokens
        assert (Fraction(-1), Trig("cos", "y")) in v.tokens


class TestVectorize:
    def test_popcount_equals_term_count(self, b2d5):
        v = build_vocab(b2d5)
        for f in random_functions(b2d5, 200, seed=31):
            bits = vectorize(f, v)
            assert len(bits) == v.size
            assert sum(bits) == len(f.terms)

    def test_detokenize_roundtrip_exhaustive(self, b2d3):
        v = build_vocab(b2d3)
        for f in enumerate_range(b2d3, 0, cardinality(b2d3)):
            assert detokenize(vectorize(f, v), v) == f

    def test_injective_on_corpus(self, b2d3):
        v = build_vocab(b2d3)
        images = {tuple(vectorize(f, v))
                  for f in enumerate_range(b2d3, 0, cardinality(b2d3))}
        assert len(images) == cardinality(b2d3)

    def test_foreign_token_raises(self, b2d3):
        v = build_vocab(b2d3)
        with pytest.raises(KeyError, match="not in vocabulary"):
            vectorize(parse_ham("1/2*x"), v)

    def test_token_sequence_sorted(self, b2d5):
        v = build_vocab(b2d5)
        f = parse_ham("1/2*x^2 + 1/2*y^2")
        seq = token_sequence(f, v)
        assert seq == sorted(seq) and len(seq) == 2


class TestMetrics:
    def test_euclid_is_sqrt_symmetric_difference(self, b2d5):
        v = build_vocab(b2d5)
        fs = random_functions(b2d5, 40, seed=37)
        for f, g in zip(fs[::2], fs[1::2]):
            d = distance_euclid(vectorize(f, v), vectorize(g, v))
            sym = len(set(f.terms) ^ set(g.terms))
            assert d == pytest.approx(math.sqrt(sym), abs=1e-12)

    def test_euclid_length_mismatch(self):
        with pytest.raises(ValueError, match="length mismatch"):
            distance_euclid([0, 1], [0, 1, 0])

    def test_jaccard_edge_cases(self):
        assert distance_jaccard([], []) == 0.0
        assert distance_jaccard([1], []) == 1.0
        assert distance_jaccard([1, 2], [2, 3]) == pytest.approx(2 / 3)

    def test_reordered_pair(self):
        """Same term multiset in different written order: set metrics see no
        difference, the sequence metric does."""
        h1 = "x^3 + x*y^2 + x^2*y + y^3"
        h2 = "y^3 + x*y^2 + x^2*y + x^3"
        f1, f2 = parse_ham(h1), parse_ham(h2)
        assert distance_jaccard(f1.terms, f2.terms) == 0.0
        s1 = [str(s) + str(c) for c, s in parse_term_sequence(h1)]
        s2 = [str(s) + str(c) for c, s in parse_term_sequence(h2)]
        assert distance_levenshtein(s1, s2) > 0

    def test_levenshtein_known_values(self):
        assert distance_levenshtein("kitten", "sitting") == 3
        assert distance_levenshtein([], [1, 2]) == 2
        assert distance_levenshtein([1, 2, 3], [1, 2, 3]) == 0

    def test_metric_axioms(self, b2d5):
        v = build_vocab(b2d5)
        rng = random.Random(41)
        fs = random_functions(b2d5, 60, seed=43)
        metrics = [
            lambda f, g: distance_euclid(vectorize(f, v), vectorize(g, v)),
            lambda f, g: distance_jaccard(f.terms, g.terms),
            lambda f, g: distance_levenshtein(token_sequence(f, v),
                                              token_sequence(g, v)),
        ]
        for _ in range(1000):
            f, g, h = (rng.choice(fs) for _ in range(3))
            for d in metrics:
                assert d(f, f) == 0
                assert d(f, g) == d(g, f)
                assert d(f, g) >= 0
                assert d(f, h) <= d(f, g) + d(g, h) + 1e-12

    def test_identity_of_indiscernibles(self, b2d3):
        v = build_vocab(b2d3)
        fs = random_functions(b2d3, 30, seed=47)
        for f in fs:
            for g in fs:
                if f != g:
                    assert distance_euclid(vectorize(f, v), vectorize(g, v)) > 0
