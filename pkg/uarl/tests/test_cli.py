import contextlib
import csv
import io
import os
import socket
import tempfile
import unittest
from unittest import mock

from uarl import cli
from uarl.address_space import (
    MARKER_TYPE_IDS,
    OBJECTS_FOLDER,
    AddressSpace,
    MarkerKind,
    Node,
    NodeClass,
    NodeId,
    ReferenceType,
    Value,
)
from uarl.agents import QTable
from uarl.plant import PlantSettings, serve_plant
from uarl.server import serve

from .util import LOCALHOST


def unused_endpoint():
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return f"127.0.0.1:{sock.getsockname()[1]}"


def unresolvable_marker_space():
    """
    Returns a space whose only variable has a marker property without bounds.
    """
    space = AddressSpace.create()
    device, level = NodeId(2, 1), NodeId(2, 2)
    kind = MarkerKind.INT_OBSERVATION
    space.add_node(
        Node.object(device, "Device"), OBJECTS_FOLDER, ReferenceType.ORGANIZES
    )
    space.add_node(Node.variable(level, "Level", Value.int32(0)), device)
    type_id = MARKER_TYPE_IDS[kind]
    space.add_node(Node(type_id, kind.type_name, NodeClass.OBJECT_TYPE))
    prop = Node(NodeId(2, 3), kind.property_name, NodeClass.PROPERTY, type_id)
    space.add_node(prop, level, ReferenceType.HAS_PROPERTY)
    return space


class CliTestCase(unittest.TestCase):
    settings = PlantSettings(seed=1)

    def setUp(self):
        self.handle = serve_plant(LOCALHOST, self.settings)
        self.addCleanup(self.handle.stop)
        self.endpoint = str(self.handle.endpoint)
        directory = tempfile.TemporaryDirectory()
        self.addCleanup(directory.cleanup)
        self.directory = directory.name
        patcher = mock.patch.dict(os.environ, clear=True)
        patcher.start()
        self.addCleanup(patcher.stop)

    def path(self, name):
        return os.path.join(self.directory, name)

    def run_main(self, *argv):
        """
        Runs the command line, returning the exit code and the captured output.
        """
        out, err = io.StringIO(), io.StringIO()
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            code = cli.main(list(argv))
        return code, out.getvalue(), err.getvalue()


class InspectTest(CliTestCase):
    def test_plant(self):
        code, out, _ = self.run_main("inspect", self.endpoint)
        self.assertEqual(code, cli.EXIT_OK)
        lines = out.splitlines()
        self.assertEqual(lines[0], f"Server 0: 'sorting-plant' at {self.endpoint}")
        self.assertIn("Action space: 4 (RotateTable×BeltDirection)", lines)
        self.assertIn("Observation space: 6 (LightBarrier×ColorInspection)", lines)
        self.assertTrue(any("RotateTable [Variable]" in line for line in lines))

    def test_unreachable(self):
        code, _, err = self.run_main("inspect", unused_endpoint(), "--timeout", "1")
        self.assertEqual(code, cli.EXIT_UNREACHABLE)
        self.assertIn("uarl: cannot inspect", err)

    def test_empty_space(self):
        handle = serve(LOCALHOST, AddressSpace.create())
        self.addCleanup(handle.stop)
        code, _, _ = self.run_main("inspect", str(handle.endpoint))
        self.assertEqual(code, cli.EXIT_EMPTY_SPACE)


class TrainTest(CliTestCase):
    def test_train(self):
        log, qtable = self.path("episodes.csv"), self.path("qtable.csv")
        code, out, _ = self.run_main(
            "train",
            "--endpoint",
            self.endpoint,
            "--episodes",
            "30",
            "--seed",
            "1",
            "--plant-seed",
            "1",
            "--log",
            log,
            "--qtable",
            qtable,
        )
        self.assertEqual(code, cli.EXIT_OK)
        self.assertIn("Trained 30 episodes", out)
        self.assertIn("Greedy policy:", out)
        self.assertIn("  LightBarrier=0;ColorInspection=0 -> ", out)
        with open(log, newline="") as fh:
            self.assertEqual(len(list(csv.DictReader(fh))), 30)
        table, states, actions = QTable.load(qtable)
        self.assertEqual(table.values.shape, (6, 4))
        self.assertEqual(actions[2], "RotateTable=1;BeltDirection=0")
        self.assertEqual(states[1], "LightBarrier=0;ColorInspection=1")

    def test_config_file(self):
        config = self.path("train.yaml")
        with open(config, "w") as fh:
            fh.write(f"endpoints: ['{self.endpoint}']\n")
            fh.write("episodes: 5\nagent: {type: random}\n")
        code, out, _ = self.run_main(
            "train", "--config", config, "--log", self.path("log.csv")
        )
        self.assertEqual(code, cli.EXIT_OK)
        self.assertIn("Trained 5 episodes", out)
        self.assertNotIn("Greedy policy:", out)

    def test_invalid_config(self):
        code, _, err = self.run_main("train", "--config", self.path("missing.yaml"))
        self.assertEqual(code, cli.EXIT_INVALID_CONFIG)
        self.assertIn("invalid configuration", err)

    def test_invalid_gamma(self):
        config = self.path("train.json")
        with open(config, "w") as fh:
            fh.write('{"agent": {"gamma": 1.5}}')
        code, _, _ = self.run_main("train", "--config", config)
        self.assertEqual(code, cli.EXIT_INVALID_CONFIG)

    def test_reproducible_logs(self):
        logs = []
        for run in range(2):
            log = self.path(f"episodes-{run}.csv")
            code, _, _ = self.run_main(
                "train",
                "--endpoint",
                self.endpoint,
                "--episodes",
                "20",
                "--seed",
                "4",
                "--plant-seed",
                "4",
                "--log",
                log,
                "--qtable",
                self.path(f"qtable-{run}.csv"),
            )
            self.assertEqual(code, cli.EXIT_OK)
            with open(log, "rb") as fh:
                logs.append(fh.read())
        self.assertEqual(logs[0], logs[1])

    def test_unreachable(self):
        code, _, _ = self.run_main(
            "train", "--endpoint", unused_endpoint(), "--log", self.path("log.csv")
        )
        self.assertEqual(code, cli.EXIT_UNREACHABLE)

    def test_unknown_tick_method(self):
        config = self.path("train.yaml")
        with open(config, "w") as fh:
            fh.write("tick_method: Advance\n")
        code, _, err = self.run_main(
            "train", "--config", config, "--endpoint", self.endpoint
        )
        self.assertEqual(code, cli.EXIT_INVALID_CONFIG)
        self.assertIn("invalid configuration", err)
        self.assertIn("Advance", err)

    def test_browse_failure(self):
        handle = serve(LOCALHOST, unresolvable_marker_space())
        self.addCleanup(handle.stop)
        code, _, err = self.run_main("train", "--endpoint", str(handle.endpoint))
        self.assertEqual(code, cli.EXIT_UNREACHABLE)
        self.assertIn("cannot browse", err)


class AbortTest(CliTestCase):
    settings = PlantSettings(seed=1, manual_clock=True)

    def test_step_timeout_aborts(self):
        config = self.path("train.yaml")
        with open(config, "w") as fh:
            fh.write("step_timeout: 0.2\nagent: {type: random, seed: 0}\n")
        code, _, err = self.run_main(
            "train",
            "--config",
            config,
            "--endpoint",
            self.endpoint,
            "--log",
            self.path("log.csv"),
        )
        self.assertEqual(code, cli.EXIT_ABORTED)
        self.assertIn("aborted", err)


class EvalTest(CliTestCase):
    def run_eval(self, *argv):
        return self.run_main("eval", "--endpoint", self.endpoint, *argv)

    def test_oracle_table(self):
        qtable = self.path("qtable.csv")
        values = [[0.0] * 4 for _ in range(6)]
        values[1][2] = values[2][3] = 5.0
        QTable(6, 4, values=values).save(qtable)
        code, out, _ = self.run_eval("--qtable", qtable, "--plant-seed", "2")
        self.assertEqual(code, cli.EXIT_OK)
        lines = out.splitlines()
        self.assertEqual(lines[0], "Evaluated 100 episodes")
        self.assertEqual(lines[1], "Mean return: 5.000")
        self.assertEqual(lines[2:], ["  correct: 100"])

    def test_trained_table(self):
        qtable = self.path("qtable.csv")
        code, _, _ = self.run_main(
            "train",
            "--endpoint",
            self.endpoint,
            "--episodes",
            "150",
            "--seed",
            "1",
            "--plant-seed",
            "1",
            "--log",
            self.path("episodes.csv"),
            "--qtable",
            qtable,
        )
        self.assertEqual(code, cli.EXIT_OK)
        code, out, _ = self.run_eval("--qtable", qtable, "--plant-seed", "3")
        self.assertEqual(code, cli.EXIT_OK)
        lines = out.splitlines()
        self.assertEqual(lines[:2], ["Evaluated 100 episodes", "Mean return: 5.000"])
        self.assertEqual(lines[2:], ["  correct: 100"])

    def test_random(self):
        code, out, _ = self.run_eval("--agent", "random", "--seed", "5")
        self.assertEqual(code, cli.EXIT_OK)
        lines = out.splitlines()
        self.assertEqual(lines[0], "Evaluated 100 episodes")
        self.assertLess(float(lines[1].split(": ")[1]), 0)

    def test_zero_table(self):
        qtable = self.path("qtable.csv")
        QTable(6, 4).save(qtable)
        code, out, _ = self.run_eval("--qtable", qtable, "--episodes", "10")
        self.assertEqual(code, cli.EXIT_OK)
        self.assertIn("Mean return: -3.000", out)

    def test_invalid_table(self):
        qtable = self.path("qtable.csv")
        QTable(3, 4).save(qtable)
        blank = self.path("blank.csv")
        with open(blank, "w") as fh:
            fh.write("\nstate\\action,a\n0,1\n")
        cases = [
            ("--qtable", qtable),
            ("--qtable", blank),
            ("--qtable", self.path("missing.csv")),
            ("--episodes", "0"),
        ]
        for argv in cases:
            with self.subTest(argv=argv):
                code, _, _ = self.run_eval(*argv)
                self.assertEqual(code, cli.EXIT_INVALID_CONFIG)


class ServePlantTest(CliTestCase):
    def test_bind_failure(self):
        code, _, _ = self.run_main("serve-plant", "--endpoint", self.endpoint)
        self.assertEqual(code, cli.EXIT_BIND_FAILURE)

    def test_invalid_settings(self):
        code, _, _ = self.run_main(
            "serve-plant", "--endpoint", unused_endpoint(), "--stuck-timeout", "0"
        )
        self.assertEqual(code, cli.EXIT_INVALID_CONFIG)
