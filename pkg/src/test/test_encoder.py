import unittest

import torch

from driftwic.errors import ConfigError
from driftwic.model.encoder import EncoderConfig, ReferenceEncoder
from test.gradients import module_parameters, sampled_gradient_errors


class TestReferenceEncoder(unittest.TestCase):
    VOCAB_SIZE = 20

    def _encoder(self, d=8, n_layers=2, seed=0):
        return ReferenceEncoder(EncoderConfig(self.VOCAB_SIZE, d, n_layers, seed))

    def test_shape(self):
        output = self._encoder(d=32).encode(torch.tensor([0, 5, 6, 7, 1]))
        self.assertEqual((5, 32), tuple(output.hidden.shape))
        self.assertEqual((32,), tuple(output.e_cls.shape))
        self.assertTrue(torch.equal(output.hidden[0], output.e_cls))

    def test_deterministic(self):
        ids = torch.tensor([0, 4, 9, 11, 1])
        self.assertTrue(torch.equal(self._encoder(seed=3).encode(ids).hidden, self._encoder(seed=3).encode(ids).hidden))

    def test_position_sensitive(self):
        generator = torch.Generator().manual_seed(1)
        ids = torch.randint(4, self.VOCAB_SIZE, (6,), generator=generator)
        ids[1], ids[4] = 5, 12
        swapped = ids.clone()
        swapped[1], swapped[4] = ids[4], ids[1]
        encoder = self._encoder()
        hidden = encoder.encode(ids).hidden
        swapped_hidden = encoder.encode(swapped).hidden
        self.assertFalse(torch.allclose(hidden, swapped_hidden[[0, 4, 2, 3, 1, 5]]))

    def test_id_out_of_range(self):
        self.assertRaisesRegex(ValueError, "out of range", self._encoder().encode, torch.tensor([0, self.VOCAB_SIZE]))

    def test_invalid_config(self):
        self.assertRaisesRegex(ConfigError, "even", EncoderConfig, 10, 7)
        self.assertRaisesRegex(ConfigError, "n_layers", EncoderConfig, 10, 8, 0)

    def test_batched_matches_single(self):
        encoder = self._encoder()
        first = torch.tensor([0, 5, 6, 1])
        second = torch.tensor([0, 7, 1])
        ids = torch.tensor([[0, 5, 6, 1], [0, 7, 1, 2]])
        mask = torch.tensor([[1, 1, 1, 1], [1, 1, 1, 0]])
        batched = encoder.encode(ids, mask).hidden
        self.assertTrue(torch.allclose(encoder.encode(first).hidden, batched[0], atol=1e-6))
        self.assertTrue(torch.allclose(encoder.encode(second).hidden, batched[1, :3], atol=1e-6))
        self.assertTrue(torch.equal(torch.zeros(8), batched[1, 3]))

    def test_embedding_table(self):
        encoder = self._encoder()
        table = encoder.embedding_table()
        self.assertEqual((self.VOCAB_SIZE, 8), tuple(table.shape))
        encoder.encode(torch.tensor([0, 5, 1])).hidden.sum().backward()
        self.assertIsNotNone(table.grad)
        self.assertGreater(float(table.grad[5].abs().sum()), 0.0)
        self.assertEqual(0.0, float(table.grad[6].abs().sum()))

    def test_gradients(self):
        encoder = self._encoder().double()
        ids = torch.tensor([[0, 5, 6, 7, 1], [0, 8, 9, 1, 2]])
        mask = torch.tensor([[1, 1, 1, 1, 1], [1, 1, 1, 1, 0]])
        weights = torch.randn(2, 5, 8, generator=torch.Generator().manual_seed(0), dtype=torch.float64)

        def loss_fn():
            return (encoder.encode(ids, mask).hidden * weights).sum()

        self.assertEqual([], sampled_gradient_errors(loss_fn, module_parameters(encoder)))


if __name__ == '__main__':
    unittest.main()
