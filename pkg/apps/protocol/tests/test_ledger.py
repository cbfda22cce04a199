import numpy as np
from django.test import SimpleTestCase

from apps.netmodel.network import NetworkRealization, Scheme
from apps.protocol.ledger import NodeLedger, block_index, select_relay
from core.exceptions import ContractViolation


def ledger_for(progress, scheme=Scheme.IRC, diversity=2, rate=3.0):
    points = np.column_stack([np.asarray(progress, dtype=float), np.zeros(len(progress))])
    points = np.vstack([points, [0.0, 0.0]])
    real = NetworkRealization(points=points, source_index=len(progress))
    return NodeLedger.empty(real, diversity, scheme, rate)


class BlockIndexTests(SimpleTestCase):
    def test_examples(self):
        self.assertEqual(block_index(0, 1), 1)
        self.assertEqual(block_index(0, 5), 1)
        self.assertEqual(block_index(4, 3), 2)
        self.assertEqual(block_index(8, 3), 3)

    def test_negative_hop(self):
        with self.assertRaises(ContractViolation):
            block_index(-1, 2)


class NodeLedgerTests(SimpleTestCase):
    def test_repeated_block_keeps_best_contribution(self):
        ledger = ledger_for([1.0, 2.0])
        nodes = np.array([0, 1])
        ledger.receive(1, nodes, np.array([1.0, 0.5]))
        ledger.receive(1, nodes, np.array([0.4, 2.5]))
        self.assertEqual(ledger.blocks_of(0), {1: 1.0})
        self.assertEqual(ledger.blocks_of(1), {1: 2.5})

    def test_distinct_blocks_combine(self):
        ledger = ledger_for([1.0])
        node = np.array([0])
        ledger.receive(1, node, np.array([1.5]))
        ledger.refresh(node)
        self.assertFalse(ledger.decoded[0])
        ledger.receive(2, node, np.array([1.6]))
        ledger.refresh(node)
        self.assertTrue(ledger.decoded[0])

    def test_decoded_is_sticky(self):
        ledger = ledger_for([1.0])
        node = np.array([0])
        ledger.receive(1, node, np.array([3.5]))
        ledger.refresh()
        ledger.blocks[:] = 0.0
        ledger.refresh()
        self.assertTrue(ledger.decoded[0])

    def test_block_out_of_range(self):
        ledger = ledger_for([1.0], diversity=2)
        with self.assertRaises(ContractViolation):
            ledger.receive(3, np.array([0]), np.array([1.0]))

    def test_reached_progress_never_negative(self):
        ledger = ledger_for([-0.5, -1.0])
        ledger.decoded[:] = True
        self.assertEqual(ledger.reached_progress(), 0.0)


class SelectRelayTests(SimpleTestCase):
    def test_picks_largest_progress(self):
        ledger = ledger_for([2.1, 3.7, -0.5])
        ledger.decoded[:3] = True
        self.assertEqual(select_relay(ledger, set()), 1)

    def test_nobody_decoded(self):
        ledger = ledger_for([2.1, 3.7])
        self.assertIsNone(select_relay(ledger, set()))

    def test_equal_progress_goes_to_lower_index(self):
        ledger = ledger_for([1.0, 2.5, 2.5])
        ledger.decoded[:3] = True
        self.assertEqual(select_relay(ledger, set()), 1)

    def test_excluded_nodes_are_skipped(self):
        ledger = ledger_for([2.1, 3.7])
        ledger.decoded[:2] = True
        self.assertEqual(select_relay(ledger, {1}), 0)
        self.assertIsNone(select_relay(ledger, {0, 1}))

    def test_negative_progress_never_selected(self):
        ledger = ledger_for([-2.0, -0.1])
        ledger.decoded[:2] = True
        self.assertIsNone(select_relay(ledger, set()))
