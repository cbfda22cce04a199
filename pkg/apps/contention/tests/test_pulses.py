import numpy as np
from django.test import SimpleTestCase

from apps.contention.pulses import (
    Contender,
    ContentionConfig,
    code_bits,
    encode_progress,
    make_contenders,
    run_contention,
)
from core.exceptions import ConfigurationError, ContractViolation


class EncodeProgressTests(SimpleTestCase):
    def test_full_range_is_all_ones(self):
        cfg = ContentionConfig(bits=6, d_max=1.5)
        self.assertEqual(encode_progress(1.5, cfg), 63)
        self.assertEqual(code_bits(63, 6), "111111")

    def test_beyond_range_is_clamped(self):
        self.assertEqual(encode_progress(10.0, ContentionConfig(bits=6, d_max=1.0)), 63)

    def test_tiny_progress_is_all_zeros(self):
        self.assertEqual(encode_progress(1e-12, ContentionConfig(bits=6, d_max=1.0)), 0)

    def test_nonpositive_progress_does_not_contend(self):
        cfg = ContentionConfig(bits=6, d_max=1.0)
        for progress in (0.0, -0.3):
            with self.assertRaises(ContractViolation):
                encode_progress(progress, cfg)

    def test_bit_vector_is_msb_first(self):
        self.assertEqual(code_bits(6, 6), "000110")
        self.assertEqual(code_bits(40, 6), "101000")

    def test_monotone(self):
        cfg = ContentionConfig(bits=7, d_max=2.0)
        progress = np.sort(np.random.default_rng(0).uniform(1e-6, 3.0, size=500))
        codes = [encode_progress(float(value), cfg) for value in progress]
        self.assertTrue(all(a <= b for a, b in zip(codes, codes[1:])))

    def test_invalid_config(self):
        with self.assertRaises(ConfigurationError):
            ContentionConfig(bits=0, d_max=1.0)
        with self.assertRaises(ConfigurationError):
            ContentionConfig(bits=4, d_max=0.0)


class RunContentionTests(SimpleTestCase):
    def test_larger_code_wins(self):
        cfg = ContentionConfig(bits=6, d_max=1.0)
        outcome = run_contention([Contender(3, 0.1, 6), Contender(8, 0.65, 40)], cfg)
        self.assertEqual(outcome.winner, 8)
        self.assertEqual(outcome.survivors, 1)
        self.assertEqual(outcome.slots_used, 6)

    def test_single_contender_wins(self):
        cfg = ContentionConfig(bits=4, d_max=1.0)
        for code in (0, 5, 15):
            self.assertEqual(run_contention([Contender(2, 0.5, code)], cfg).winner, 2)

    def test_equal_codes_collide(self):
        cfg = ContentionConfig(bits=6, d_max=1.0)
        outcome = run_contention([Contender(9, 0.1, 5), Contender(4, 0.1, 5)], cfg)
        self.assertEqual(outcome.winner, 4)
        self.assertEqual(outcome.survivors, 2)
        self.assertTrue(outcome.collided)

    def test_empty_contention(self):
        outcome = run_contention([], ContentionConfig(bits=3, d_max=1.0))
        self.assertIsNone(outcome.winner)
        self.assertEqual((outcome.survivors, outcome.slots_used), (0, 3))

    def test_losers_are_deactivated(self):
        contenders = [Contender(0, 0.1, 1), Contender(1, 0.9, 6)]
        run_contention(contenders, ContentionConfig(bits=3, d_max=1.0))
        self.assertEqual([c.active for c in contenders], [False, True])

    def test_inactive_contender_rejected(self):
        with self.assertRaises(ContractViolation):
            run_contention([Contender(0, 0.1, 1, active=False)], ContentionConfig(bits=3, d_max=1.0))

    def test_winner_always_holds_maximum_code(self):
        rng = np.random.default_rng(2024)
        for _ in range(10_000):
            bits = int(rng.integers(1, 11))
            size = int(rng.integers(1, 9))
            codes = rng.integers(0, 2 ** bits, size=size)
            nodes = rng.permutation(100)[:size]
            contenders = [Contender(int(n), 1.0, int(c)) for n, c in zip(nodes, codes)]
            outcome = run_contention(contenders, ContentionConfig(bits=bits, d_max=1.0))
            best = codes.max()
            self.assertEqual(codes[list(nodes).index(outcome.winner)], best)
            self.assertEqual(outcome.survivors, int((codes == best).sum()))
            self.assertEqual(outcome.winner, int(nodes[codes == best].min()))

    def test_selection_error_limited_to_one_code_step(self):
        rng = np.random.default_rng(7)
        cfg = ContentionConfig(bits=8, d_max=2.0)
        for _ in range(2000):
            progress = rng.uniform(1e-3, 2.0, size=int(rng.integers(2, 7)))
            contenders = make_contenders(range(progress.size), progress, cfg)
            winner = run_contention(contenders, cfg).winner
            best = int(np.argmax(progress))
            if winner != best:
                self.assertLess(progress[best] - progress[winner], cfg.resolution)
