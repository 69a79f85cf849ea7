import os
import tempfile
import unittest
from unittest import mock

import torch

from driftwic.errors import DataError
from driftwic.model.experts import (BiLstmExpert, ExpertBundle, LexiconTagger, OovPolicy, load_static_embeddings,
                                    pos_tag, target_word_index)
from driftwic.model.moe import GateVariant
from driftwic.model.wic_model import ModelConfig, WiCModel
from driftwic.tokenization.representation import ReprMode
from test.gradients import module_parameters, sampled_gradient_errors


class TestPosTagger(unittest.TestCase):
    def test_lexicon(self):
        self.assertEqual(["DET", "NOUN"], pos_tag(["the", "bank"]).names())

    def test_unknown_word(self):
        self.assertEqual(["X"], pos_tag(["zzqx"]).names())

    def test_rules(self):
        self.assertEqual(["PROPN", "NUM", "PUNCT"], pos_tag(["@user", "2020", "!!"]).names())

    def test_empty(self):
        self.assertRaises(ValueError, pos_tag, [])

    def test_unknown_lexicon_tag(self):
        self.assertRaisesRegex(ValueError, "Unknown POS tags", LexiconTagger, {"bank": "NN"})


class TestStaticEmbeddings(unittest.TestCase):
    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.path = os.path.join(self.directory.name, "vectors.txt")

    def tearDown(self):
        self.directory.cleanup()

    def _write(self, text):
        with open(self.path, "w", encoding="utf-8") as f:
            f.write(text)

    def test_load(self):
        self._write("bank 0.1 0.2\nriver 0.3 0.4\n")
        table = load_static_embeddings(self.path, 2)
        self.assertEqual(2, len(table))
        self.assertEqual([0.1, 0.2], table.lookup("bank").tolist())
        self.assertEqual([0.0, 0.0], table.lookup("zzqx").tolist())

    def test_word2vec_header(self):
        self._write("2 2\nbank 0.1 0.2\nriver 0.3 0.4\n")
        self.assertEqual(2, len(load_static_embeddings(self.path, 2)))

    def test_dimension_mismatch(self):
        self._write("bank 0.1 0.2\nriver 0.3\n")
        self.assertRaisesRegex(DataError, "vectors.txt:2", load_static_embeddings, self.path, 2)

    def test_malformed_lines_are_skipped(self):
        self._write("bank 0.1 0.2\nriver abc def\n")
        with mock.patch("driftwic.logger.warning") as warning:
            table = load_static_embeddings(self.path, 2)
        self.assertEqual(1, len(table))
        warning.assert_called_once()

    def test_random_oov_is_stable(self):
        self._write("bank 0.1 0.2\n")
        table = load_static_embeddings(self.path, 2, OovPolicy.RANDOM, seed=4)
        self.assertEqual(table.lookup("zzqx").tolist(), table.lookup("zzqx").tolist())
        self.assertNotEqual([0.0, 0.0], table.lookup("zzqx").tolist())

    def test_matrix_for(self):
        self._write("bank 0.1 0.2\n")
        matrix = load_static_embeddings(self.path, 2).matrix_for(["[CLS]", "[SEP]", "[PAD]", "[OOV]", "bank", "x"])
        self.assertEqual((6, 2), tuple(matrix.shape))
        self.assertTrue(torch.allclose(torch.tensor([0.1, 0.2]), matrix[4]))
        self.assertEqual([0.0, 0.0], matrix[5].tolist())


class TestBiLstmExpert(unittest.TestCase):
    def setUp(self):
        torch.manual_seed(0)

    def test_output_dimension(self):
        expert = BiLstmExpert(10, 6, 8, 128)
        output = expert.bilstm_encode(torch.randn(4, 6), 2)
        self.assertEqual((128,), tuple(output.shape))

    def test_single_word_ignores_padding(self):
        expert = BiLstmExpert(10, 6, 8, 5)
        vector = torch.randn(6)
        padded = torch.stack([torch.stack([vector, torch.randn(6), torch.randn(6)]), torch.randn(3, 6)])
        batched = expert.encode(padded, torch.tensor([1, 3]), torch.tensor([0, 1]))
        self.assertTrue(torch.allclose(expert.bilstm_encode(vector.unsqueeze(0), 0), batched[0], atol=1e-6))

    def test_earlier_word_changes_forward_component_only(self):
        expert = BiLstmExpert(10, 6, 8, 5)
        inputs = torch.randn(1, 4, 6)
        changed = inputs.clone()
        changed[0, 0] += 1.0
        lengths, target = torch.tensor([4]), torch.tensor([2])
        before = expert.target_states(inputs, lengths, target)[0]
        after = expert.target_states(changed, lengths, target)[0]
        self.assertFalse(torch.allclose(before[:8], after[:8]))
        self.assertTrue(torch.allclose(before[8:], after[8:], atol=1e-6))

    def test_reversal_swaps_directions_with_tied_weights(self):
        expert = BiLstmExpert(10, 6, 8, 5)
        with torch.no_grad():
            for name in ("weight_ih_l0", "weight_hh_l0", "bias_ih_l0", "bias_hh_l0"):
                getattr(expert.lstm, name + "_reverse").copy_(getattr(expert.lstm, name))
        inputs = torch.randn(1, 5, 6)
        states = expert.target_states(inputs, torch.tensor([5]), torch.tensor([1]))[0]
        reversed_states = expert.target_states(inputs.flip(1), torch.tensor([5]), torch.tensor([3]))[0]
        self.assertTrue(torch.allclose(states[:8], reversed_states[8:], atol=1e-6))
        self.assertTrue(torch.allclose(states[8:], reversed_states[:8], atol=1e-6))

    def test_target_index_out_of_range(self):
        expert = BiLstmExpert(10, 6, 8, 5)
        self.assertRaises(ValueError, expert.bilstm_encode, torch.randn(3, 6), 3)

    def test_gradients(self):
        expert = BiLstmExpert(10, 4, 3, 5).double()
        inputs = torch.randn(4, 4, dtype=torch.float64)
        weights = torch.randn(5, dtype=torch.float64)
        parameters = {name: parameter for name, parameter in module_parameters(expert).items()
                      if not name.startswith("embedding")}

        def loss_fn():
            return (expert.bilstm_encode(inputs, 2) * weights).sum()

        self.assertEqual([], sampled_gradient_errors(loss_fn, parameters))

    def test_target_word_index(self):
        self.assertEqual(1, target_word_index([(0, 3), (4, 8), (9, 11)], (4, 8)))
        self.assertEqual(1, target_word_index([(0, 3), (4, 8), (9, 11)], (5, 11)))
        self.assertRaises(DataError, target_word_index, [(0, 3)], (4, 8))


class TestExpertBundle(unittest.TestCase):
    def test_names_and_stack(self):
        bundle = ExpertBundle(torch.zeros(2, 4), None, torch.ones(2, 4))
        self.assertEqual(["ctx", "glove"], bundle.names())
        self.assertEqual((2, 2, 4), tuple(bundle.stacked().shape))

    def test_dimension_mismatch(self):
        self.assertRaises(ValueError, ExpertBundle(torch.zeros(2, 4), torch.zeros(2, 3)).stacked)

    def test_experts_match_target_dimension(self):
        for mode in ReprMode:
            with self.subTest(mode=mode):
                config = ModelConfig(repr_mode=mode, d=8, variant=GateVariant.J_GATE, pos_dim=4, glove_dim=4,
                                     bilstm_hidden=4, mlp_hidden=8)
                model = WiCModel(config, vocab_size=12, n_words=12)
                self.assertEqual(config.target_dim, model.pos_expert.output_dim)
                self.assertEqual(config.target_dim, model.glove_expert.output_dim)


if __name__ == '__main__':
    unittest.main()
