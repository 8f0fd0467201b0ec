import csv
import os
import tempfile
import time
import unittest

import numpy as np

from uarl.agents import (
    QLearningAgent,
    QTable,
    RandomAgent,
    optimal_q_values,
    value_iteration,
)
from uarl.mapper import (
    Environment,
    EpisodeLog,
    EpisodeResult,
    RewardRules,
    RunReport,
    run_episodes,
)
from uarl.plant import (
    PlantSettings,
    build_mdp,
    default_reward_rules,
    serve_plant,
)

from .util import LOCALHOST

EPISODES = 150
GAMMA = 0.9
#: Largest magnitude a value can reach with rewards in [-5, 5]
VALUE_BOUND = 5 / (1 - GAMMA)
#: States whose optimal action is unique, plus the initial state
CHECKED_STATES = (0, 1, 2)


def train_over_tcp(endpoint, seed, episodes=EPISODES):
    """
    Trains a Q-table against a served plant through the environment, with the
    plant reseeded on the first reset.
    """
    rules = RewardRules.from_data(default_reward_rules())
    with Environment([endpoint], rules, plant_seed=seed) as environment:
        environment.discover()
        table = QTable(6, 4, alpha=0.4, gamma=GAMMA, epsilon=0.1, seed=seed)
        run_episodes(environment, QLearningAgent(table), episodes)
    return table


class ConvergenceTest(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        mdp = build_mdp()
        q_values = optimal_q_values(mdp, GAMMA)
        _, policy = value_iteration(mdp, GAMMA)
        cls.oracle = policy
        #: The optimal actions of every checked state, ties included
        cls.optimal_actions = [
            set(np.flatnonzero(np.isclose(q_values[s], q_values[s].max())))
            for s in CHECKED_STATES
        ]
        cls.handle = serve_plant(LOCALHOST, PlantSettings(seed=0))
        cls.endpoint = cls.handle.endpoint

    @classmethod
    def tearDownClass(cls):
        cls.handle.stop()

    def matches_oracle(self, table):
        policy = table.greedy_policy()
        return all(
            policy[s] in self.optimal_actions[i] for i, s in enumerate(CHECKED_STATES)
        )

    def test_oracle(self):
        self.assertEqual(self.optimal_actions, [{0, 1}, {2}, {3}])
        self.assertEqual(list(self.oracle[:3]), [0, 2, 3])

    def test_policy_learned_within_budget(self):
        matched = 0
        for seed in range(50):
            start = time.monotonic()
            table = train_over_tcp(self.endpoint, seed)
            self.assertLess(time.monotonic() - start, 30)
            self.assertLessEqual(np.abs(table.values).max(), VALUE_BOUND)
            if not self.matches_oracle(table):
                continue
            matched += 1
            with self.subTest(seed=seed):
                self.assertLessEqual(abs(table.values[1, 2] - 5.0), 0.5)
                self.assertLessEqual(abs(table.values[0, :2].max() - 4.5), 0.7)
        self.assertGreaterEqual(matched, 47)

    def test_deterministic(self):
        first = train_over_tcp(self.endpoint, 4, 30)
        second = train_over_tcp(self.endpoint, 4, 30)
        np.testing.assert_array_equal(first.values, second.values)


class ReportTest(unittest.TestCase):
    def test_report(self):
        report = RunReport()
        self.assertEqual((report.episodes, report.mean_return), (0, 0.0))
        report.results.extend(
            [
                EpisodeResult(5.0, 2, "correct"),
                EpisodeResult(-3.0, 3, "dropped"),
                EpisodeResult(5.0, 2, "correct"),
            ]
        )
        self.assertEqual(report.episodes, 3)
        self.assertAlmostEqual(report.mean_return, 7 / 3)
        self.assertEqual(report.outcome_counts, {"correct": 2, "dropped": 1})


class TcpTrainingTest(unittest.TestCase):
    def setUp(self):
        self.handle = serve_plant(LOCALHOST, PlantSettings(seed=1))
        self.addCleanup(self.handle.stop)
        self.environment = Environment(
            [self.handle.endpoint],
            RewardRules.from_data(default_reward_rules()),
            plant_seed=1,
        )
        self.environment.connect()
        self.addCleanup(self.environment.close)
        self.environment.discover()
        directory = tempfile.TemporaryDirectory()
        self.addCleanup(directory.cleanup)
        self.log_path = os.path.join(directory.name, "episodes.csv")

    def test_accelerated_training(self):
        agent = QLearningAgent(QTable(6, 4, seed=1))
        start = time.monotonic()
        with EpisodeLog(self.log_path) as log:
            report = run_episodes(self.environment, agent, EPISODES, log=log)
        self.assertLess(time.monotonic() - start, 30)
        self.assertEqual(report.episodes, EPISODES)
        self.assertLessEqual(np.abs(agent.table.values).max(), VALUE_BOUND)
        with open(self.log_path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        self.assertEqual(len(rows), EPISODES)
        self.assertEqual([int(row["episode"]) for row in rows][:3], [1, 2, 3])
        returns = [float(row["return"]) for row in rows]
        self.assertEqual(returns, [r.episode_return for r in report.results])
        self.assertLessEqual(
            {row["outcome"] for row in rows},
            {"correct", "wrong", "dropped", "stuck", "truncated"},
        )

    def test_agents_share_environment(self):
        learner = QLearningAgent(QTable(6, 4, seed=2))
        run_episodes(self.environment, learner, 20)
        baseline = run_episodes(self.environment, RandomAgent(4, seed=2), 20)
        self.assertEqual(baseline.episodes, 20)
        self.assertTrue(
            all(r.episode_return in (5.0, -1.0, -3.0, -5.0) for r in baseline.results)
        )
