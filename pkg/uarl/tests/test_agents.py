import os
import tempfile
import unittest

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from uarl.agents import (
    ExplicitMdp,
    MdpOutcome,
    PolicyAgent,
    QLearningAgent,
    QTable,
    RandomAgent,
    Transition,
    optimal_q_values,
    value_iteration,
)

transitions = st.builds(
    Transition,
    st.integers(0, 5),
    st.integers(0, 3),
    st.sampled_from([5.0, -1.0, -3.0, -5.0, 0.0]),
    st.integers(0, 5),
    st.booleans(),
)


class QUpdateTest(unittest.TestCase):
    def test_terminal_updates(self):
        table = QTable(6, 4)
        transition = Transition(1, 2, 5.0, 0, True)
        table.update(transition)
        self.assertAlmostEqual(table.values[1, 2], 2.0)
        table.update(transition)
        self.assertAlmostEqual(table.values[1, 2], 3.2)

    def test_bootstrapped_update(self):
        table = QTable(6, 4)
        table.values[1, 2] = 5.0
        delta = table.update(Transition(0, 0, 0.0, 1, False))
        self.assertAlmostEqual(table.values[0, 0], 1.8)
        self.assertAlmostEqual(delta, 4.5)

    def test_terminal_does_not_bootstrap(self):
        table = QTable(6, 4)
        table.values[1] = 5.0
        table.update(Transition(0, 0, 0.0, 1, True))
        self.assertEqual(table.values[0, 0], 0.0)

    @given(st.lists(transitions, min_size=1, max_size=50))
    def test_one_entry_per_update(self, stream):
        table = QTable(6, 4)
        for transition in stream:
            before = table.values.copy()
            table.update(transition)
            changed = before != table.values
            changed[transition.state, transition.action] = False
            self.assertFalse(changed.any())
            self.assertTrue(np.isfinite(table.values).all())
            self.assertLessEqual(np.abs(table.values).max(), 5 / (1 - table.gamma))

    def test_invalid_parameters(self):
        for kwargs in (dict(alpha=0), dict(gamma=1.0), dict(epsilon=1.5)):
            with self.subTest(**kwargs):
                with self.assertRaises(ValueError):
                    QTable(2, 2, **kwargs)
        with self.assertRaises(ValueError):
            QTable(2, 2, values=np.zeros((3, 2)))


class SelectionTest(unittest.TestCase):
    def test_argmax(self):
        table = QTable(1, 4, epsilon=0.0, values=[[0, 1, 0, 0]])
        self.assertEqual(table.select_action(0), 1)

    def test_ties_to_lowest_index(self):
        table = QTable(1, 4, epsilon=0.0)
        self.assertEqual(table.select_action(0), 0)
        table.values[0] = [1, 3, 3, 2]
        self.assertEqual(table.select_action(0), 1)

    def test_uniform_exploration(self):
        table = QTable(1, 4, epsilon=1.0, seed=3, values=[[0, 9, 0, 0]])
        draws = np.array([table.select_action(0) for _ in range(100000)])
        frequencies = np.bincount(draws, minlength=4) / len(draws)
        np.testing.assert_allclose(frequencies, 0.25, atol=0.01)

    def test_seeded(self):
        first = QTable(1, 4, seed=9)
        second = QTable(1, 4, seed=9)
        self.assertEqual(
            [first.select_action(0) for _ in range(200)],
            [second.select_action(0) for _ in range(200)],
        )

    def test_greedy_policy(self):
        self.assertEqual(QTable(3, 4).greedy_policy(), (0, 0, 0))
        table = QTable(3, 4, values=[[0, 0, 1, 0], [0, 0, 0, 2], [-1, 4, 0, 0]])
        self.assertEqual(table.greedy_policy(), (2, 3, 1))


class PersistenceTest(unittest.TestCase):
    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.addCleanup(self.directory.cleanup)
        self.path = os.path.join(self.directory.name, "qtable.csv")

    def test_save_and_load(self):
        table = QTable(2, 2, values=[[0.1, -3.25], [1 / 3, 5.0]])
        table.save(self.path, ["s=0", "s=1"], ["a=0", "a=1"])
        loaded, states, actions = QTable.load(self.path, epsilon=0.0)
        self.assertEqual(states, ["s=0", "s=1"])
        self.assertEqual(actions, ["a=0", "a=1"])
        np.testing.assert_array_equal(loaded.values, table.values)
        self.assertEqual(loaded.epsilon, 0.0)

    def test_default_labels(self):
        QTable(2, 3).save(self.path)
        _, states, actions = QTable.load(self.path)
        self.assertEqual((states, actions), (["0", "1"], ["0", "1", "2"]))

    def write(self, text):
        with open(self.path, "w") as fh:
            fh.write(text)

    def test_invalid_files(self):
        cases = [
            "",
            "foo,a\n0,1\n",
            "state\\action,a,b\n0,1\n",
            "state\\action,a\n0,x\n",
            "state\\action,a\n0,nan\n",
            "\nstate\\action,a\n0,1\n",
            "state\\action,a\n\n0,1\n",
        ]
        for text in cases:
            with self.subTest(text=text):
                self.write(text)
                with self.assertRaises(ValueError):
                    QTable.load(self.path)


class AgentTest(unittest.TestCase):
    def test_learning_agent(self):
        agent = QLearningAgent(QTable(2, 2, epsilon=0.0))
        self.assertEqual(agent.n_actions, 2)
        agent.observe(Transition(0, 1, 5.0, 1, True))
        self.assertEqual(agent.select_action(0), 1)

    def test_frozen_agent(self):
        table = QTable(2, 2, epsilon=1.0, values=[[0, 1], [0, 0]])
        agent = QLearningAgent(table, learning=False)
        agent.observe(Transition(0, 0, 5.0, 1, True))
        self.assertEqual(table.values[0, 0], 0.0)
        self.assertEqual({agent.select_action(0) for _ in range(20)}, {1})

    def test_random_agent(self):
        first, second = RandomAgent(4, seed=1), RandomAgent(4, seed=1)
        actions = [first.select_action(0) for _ in range(100)]
        self.assertEqual(actions, [second.select_action(0) for _ in range(100)])
        self.assertEqual(set(actions), {0, 1, 2, 3})

    def test_policy_agent(self):
        agent = PolicyAgent([0, 2, 3], 4)
        self.assertEqual([agent.select_action(s) for s in range(3)], [0, 2, 3])
        with self.assertRaises(ValueError):
            PolicyAgent([4], 4)


def chain_mdp():
    """
    Two states: state 0 moves to state 1 for free or ends with 1, state 1 ends
    with 10 or 0.
    """
    return ExplicitMdp(
        2,
        2,
        {
            (0, 0): [MdpOutcome(1.0, 1, 0.0)],
            (0, 1): [MdpOutcome(1.0, 0, 1.0, True)],
            (1, 0): [MdpOutcome(1.0, 1, 10.0, True)],
            (1, 1): [MdpOutcome(0.5, 1, 0.0, True), MdpOutcome(0.5, 0, 0.0, True)],
        },
    )


class MdpTest(unittest.TestCase):
    def test_value_iteration(self):
        values, policy = value_iteration(chain_mdp(), 0.5)
        np.testing.assert_allclose(values, [5.0, 10.0])
        self.assertEqual(list(policy), [0, 0])

    def test_myopic(self):
        values, policy = value_iteration(chain_mdp(), 0.0)
        np.testing.assert_allclose(values, [1.0, 10.0])
        self.assertEqual(list(policy), [1, 0])

    def test_optimal_q_values(self):
        q_values = optimal_q_values(chain_mdp(), 0.5)
        np.testing.assert_allclose(q_values, [[5.0, 1.0], [10.0, 0.0]])

    def test_validation(self):
        with self.assertRaises(ValueError):
            ExplicitMdp(1, 1, {(0, 0): [MdpOutcome(0.5, 0, 0.0, True)]})
        with self.assertRaises(ValueError):
            ExplicitMdp(1, 1, {})
        with self.assertRaises(ValueError):
            ExplicitMdp(1, 1, {(0, 0): [MdpOutcome(1.0, 3, 0.0)]})
        with self.assertRaises(ValueError):
            value_iteration(chain_mdp(), 0.9, tol=0)

    def test_outcomes(self):
        mdp = chain_mdp()
        self.assertEqual(len(mdp.outcomes(1, 1)), 2)
        self.assertEqual(mdp.termination[1, 1], 1.0)
        self.assertEqual(mdp.transitions[0, 0, 1], 1.0)
