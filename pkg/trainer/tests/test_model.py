import torch

from hamtrain.data import FlowDataset, collate
from hamtrain.model import CaptionModel


def small_batch(dataset_dir, n=3):
    ds = FlowDataset(dataset_dir, "train")
    return ds.vocab, collate([ds[i] for i in range(n)], ds.vocab)


class TestForward:
    def test_logit_shape(self, b1_dataset):
        vocab, (images, inp, tgt, _) = small_batch(b1_dataset)
        model = CaptionModel(vocab, hidden=32, embed=16)
        logits = model(images, inp)
        assert logits.shape == (3, inp.shape[1], vocab.decoder_size)

    def test_deterministic_given_seed(self, b1_dataset):
        vocab, (images, inp, _, _) = small_batch(b1_dataset)
        outs = []
        for _ in range(2):
            torch.manual_seed(7)
            model = CaptionModel(vocab, hidden=32, embed=16)
            outs.append(model(images, inp).detach())
        assert torch.equal(outs[0], outs[1])


class TestDecode:
    def test_bounded_and_no_specials(self, b1_dataset):
        vocab, (images, _, _, _) = small_batch(b1_dataset)
        torch.manual_seed(0)
        model = CaptionModel(vocab, hidden=32, embed=16)
        seqs = model.greedy_decode(images)
        for seq in seqs:
            assert len(seq) <= vocab.max_seq_len
            assert all(0 <= t < vocab.size for t in seq)  # no PAD/START/END

    def test_custom_max_len(self, b1_dataset):
        vocab, (images, _, _, _) = small_batch(b1_dataset)
        torch.manual_seed(0)
        model = CaptionModel(vocab, hidden=32, embed=16)
        seqs = model.greedy_decode(images, max_len=1)
        assert all(len(s) <= 1 for s in seqs)
