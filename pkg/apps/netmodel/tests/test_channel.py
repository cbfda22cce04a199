import math

import numpy as np
from django.test import SimpleTestCase

from apps.netmodel.channel import (
    accumulate_metric,
    block_contribution,
    compute_sir,
    decode_mask,
    mutual_information,
    sir_field,
)
from apps.netmodel.network import NetworkConfig, NetworkRealization, Scheme, SlotState, draw_slot, sample_network
from core.exceptions import ContractViolation


def fixed_slot(points, transmit, listeners, fading, forced_tx):
    real = NetworkRealization(points=np.asarray(points, dtype=float), source_index=len(points) - 1)
    slot = SlotState(
        transmit=np.asarray(transmit, dtype=bool),
        forced_tx=forced_tx,
        listeners=np.asarray(listeners, dtype=np.intp),
        fading=np.asarray(fading, dtype=float),
    )
    return real, slot


class ComputeSirTests(SimpleTestCase):
    def test_symmetric_interferer_gives_unit_sir(self):
        # Receiver 0 at the origin side, desired tx 2 and interferer 1 both at distance 1.
        real, slot = fixed_slot(
            points=[[1.0, 0.0], [2.0, 0.0], [0.0, 0.0]],
            transmit=[False, True, True],
            listeners=[0],
            fading=[[1.0], [1.0]],
            forced_tx=2,
        )
        for alpha in (3.0, 4.0):
            self.assertAlmostEqual(compute_sir(0, 2, slot, real, alpha), 1.0)

    def test_stronger_nearer_desired_link(self):
        real, slot = fixed_slot(
            points=[[1.0, 0.0], [3.0, 0.0], [0.0, 0.0]],
            transmit=[False, True, True],
            listeners=[0],
            fading=[[1.0], [2.0]],
            forced_tx=2,
        )
        self.assertAlmostEqual(compute_sir(0, 2, slot, real, 4.0), 32.0)

    def test_no_interferer_is_infinite(self):
        real, slot = fixed_slot(
            points=[[1.0, 0.0], [3.0, 0.0], [0.0, 0.0]],
            transmit=[False, False, True],
            listeners=[0, 1],
            fading=[[0.7, 1.3]],
            forced_tx=2,
        )
        self.assertEqual(compute_sir(0, 2, slot, real, 4.0), math.inf)
        np.testing.assert_array_equal(sir_field(slot, real, 4.0, 2), [math.inf, math.inf])

    def test_receiver_equal_to_transmitter(self):
        real, slot = fixed_slot(
            points=[[1.0, 0.0], [0.0, 0.0]],
            transmit=[False, True],
            listeners=[0],
            fading=[[1.0]],
            forced_tx=1,
        )
        with self.assertRaises(ContractViolation):
            compute_sir(1, 1, slot, real, 4.0)

    def test_coincident_interferer_is_floored(self):
        real, slot = fixed_slot(
            points=[[1.0, 0.0], [1.0, 0.0], [0.0, 0.0]],
            transmit=[False, True, True],
            listeners=[0],
            fading=[[1.0], [1.0]],
            forced_tx=2,
        )
        sir = compute_sir(0, 2, slot, real, 4.0)
        self.assertTrue(math.isfinite(sir))
        self.assertLess(sir, 1e-30)

    def test_field_matches_pointwise(self):
        config = NetworkConfig(intensity=1.0, map_p=0.3, alpha=4.0, rate=3.0)
        real = sample_network(config, np.random.default_rng(5), probes=[[0.5, 0.0]])
        slot = draw_slot(real, config, real.source_index, np.random.default_rng(6))
        field = sir_field(slot, real, config.alpha, real.source_index)
        for column in (0, 10, slot.listeners.size - 1):
            rx = int(slot.listeners[column])
            pointwise = compute_sir(rx, real.source_index, slot, real, config.alpha)
            self.assertTrue(math.isclose(field[column], pointwise, rel_tol=1e-9))

    def test_scale_covariance(self):
        config = NetworkConfig(intensity=1.0, map_p=0.3, alpha=3.5, rate=3.0)
        real = sample_network(config, np.random.default_rng(8))
        slot = draw_slot(real, config, real.source_index, np.random.default_rng(9))
        scaled = NetworkRealization(points=real.points * 3.7, source_index=real.source_index)
        np.testing.assert_allclose(
            sir_field(slot, real, config.alpha, real.source_index),
            sir_field(slot, scaled, config.alpha, real.source_index),
            rtol=1e-9,
        )

    def test_reproducible(self):
        config = NetworkConfig(intensity=1.0, map_p=0.3, alpha=4.0, rate=3.0)
        results = []
        for _ in range(2):
            rng = np.random.default_rng([3, 1])
            real = sample_network(config, rng)
            slot = draw_slot(real, config, real.source_index, rng)
            results.append(sir_field(slot, real, config.alpha, real.source_index))
        np.testing.assert_array_equal(results[0], results[1])


class MutualInformationTests(SimpleTestCase):
    def test_examples(self):
        self.assertEqual(mutual_information(1.0), 1.0)
        self.assertEqual(mutual_information(7.0), 3.0)
        self.assertEqual(mutual_information(0.0), 0.0)
        self.assertEqual(mutual_information(math.inf), math.inf)

    def test_vectorized(self):
        np.testing.assert_allclose(mutual_information(np.array([0.0, 1.0, 3.0])), [0.0, 1.0, 2.0])

    def test_negative_sir(self):
        with self.assertRaises(ContractViolation):
            mutual_information(-0.5)

    def test_block_contribution_depends_on_scheme(self):
        self.assertEqual(block_contribution(7.0, Scheme.IRC), 3.0)
        self.assertEqual(block_contribution(7.0, Scheme.RC), 7.0)
        self.assertEqual(block_contribution(7.0, Scheme.NC), 7.0)


class AccumulateMetricTests(SimpleTestCase):
    def test_examples(self):
        self.assertTrue(accumulate_metric([1.5, 1.6], Scheme.IRC, 3.0, diversity=2))
        self.assertFalse(accumulate_metric([3.0, 3.0], Scheme.RC, 3.0, diversity=2))
        self.assertTrue(accumulate_metric([7.0], Scheme.NC, 3.0))

    def test_too_many_contributions(self):
        with self.assertRaises(ContractViolation):
            accumulate_metric([1.0, 1.0, 1.0], Scheme.IRC, 3.0, diversity=2)
        with self.assertRaises(ContractViolation):
            accumulate_metric([7.0, 1.0], Scheme.NC, 3.0)

    def test_diversity_required_for_combining(self):
        with self.assertRaises(ContractViolation):
            accumulate_metric([1.0], Scheme.RC, 3.0)

    def test_infinite_contribution_decodes(self):
        self.assertTrue(accumulate_metric([math.inf], Scheme.RC, 3.0, diversity=1))

    def test_monotone_in_contributions(self):
        rng = np.random.default_rng(0)
        for scheme in (Scheme.IRC, Scheme.RC):
            for _ in range(200):
                base = list(rng.exponential(1.0, size=2))
                extra = float(rng.exponential(1.0))
                if accumulate_metric(base, scheme, 2.0, diversity=3):
                    self.assertTrue(accumulate_metric(base + [extra], scheme, 2.0, diversity=3))

    def test_decode_mask_matches_scalar_rule(self):
        blocks = np.array([[1.5, 1.6], [3.0, 0.0], [2.9, 0.0]])
        np.testing.assert_array_equal(decode_mask(blocks, Scheme.IRC, 3.0), [True, True, False])
        np.testing.assert_array_equal(decode_mask(np.array([[3.0, 3.0], [7.0, 0.0]]), Scheme.RC, 3.0), [False, True])
