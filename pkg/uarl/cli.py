import argparse
import asyncio
import contextlib
import logging
import os
import secrets
import sys

from .agents import QLearningAgent, QTable, RandomAgent
from .client import ClientError, SyncSession
from .config import DEFAULT_ENDPOINT, ConfigurationError, TrainConfig
from .mapper import (
    EmptySpace,
    EpisodeLog,
    MapperError,
    MissingMethod,
    discover_spaces,
    run_episodes,
)
from .plant import PlantServer, PlantSettings, Side
from .server import BindFailure

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_BIND_FAILURE = 2
EXIT_UNREACHABLE = 3
EXIT_EMPTY_SPACE = 4
EXIT_INVALID_CONFIG = 5
EXIT_ABORTED = 6

#: Episodes run by eval unless told otherwise
DEFAULT_EVAL_EPISODES = 100


class CommandFailed(Exception):  # noqa: N818
    """
    Raised by a command to exit with the given code and message.
    """

    def __init__(self, message, exit_code):
        super().__init__(message)
        self.exit_code = exit_code


def configure_logging():
    """
    Configures the root logger from the UARL_LOG environment variable.
    """
    name = os.environ.get("UARL_LOG", "WARNING").upper()
    level = logging.getLevelName(name)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(
        level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s"
    )


def serve_plant(args):
    seed = args.seed if args.seed is not None else secrets.randbelow(2**31)
    try:
        settings = PlantSettings(
            seed=seed,
            stuck_timeout=args.stuck_timeout,
            green_side=Side[args.green_side.upper()],
            realtime=args.realtime,
            manual_clock=args.manual_clock,
        )
        server = PlantServer(settings)
    except ValueError as exc:
        raise CommandFailed(str(exc), EXIT_INVALID_CONFIG)

    async def run():
        await server.start(args.endpoint)
        print(f"sorting plant serving on {server.endpoint} (seed {seed})", flush=True)
        try:
            await server.serve_forever()
        finally:
            await server.close()

    try:
        asyncio.run(run())
    except (BindFailure, ValueError) as exc:
        raise CommandFailed(str(exc), EXIT_BIND_FAILURE)
    except KeyboardInterrupt:
        pass
    return EXIT_OK


def _print_tree(catalog, out):
    visited = set()

    def walk(node_id, depth):
        entry = catalog.get(node_id)
        line = f"{'  ' * depth}{entry.browse_name} [{entry.node_class.name.title()}]"
        line += f" {entry.node_id}"
        if entry.marker is not None:
            line += f" {entry.marker}"
        print(line, file=out)
        visited.add(node_id)
        for child in entry.children:
            if child not in visited:
                walk(child, depth + 1)

    walk(catalog.root, 0)


def inspect(args, out=None):
    out = out or sys.stdout
    catalogs = []
    for index, endpoint in enumerate(args.endpoint):
        try:
            with SyncSession(endpoint, timeout=args.timeout) as session:
                catalogs.append(session.browse_all())
                server_name = session.server_name
        except (ClientError, ValueError) as exc:
            raise CommandFailed(f"cannot inspect {endpoint}: {exc}", EXIT_UNREACHABLE)
        print(f"Server {index}: '{server_name}' at {endpoint}", file=out)
        _print_tree(catalogs[-1], out)
    try:
        actions, observations = discover_spaces(catalogs)
    except EmptySpace as exc:
        raise CommandFailed(str(exc), EXIT_EMPTY_SPACE)
    print(f"Action space: {actions.size} ({actions.describe()})", file=out)
    print(
        f"Observation space: {observations.size} ({observations.describe()})",
        file=out,
    )
    return EXIT_OK


def load_config(args):
    """
    Loads the configuration named by the arguments, applying flag overrides.
    """
    overrides = dict(
        endpoints=args.endpoint,
        episodes=getattr(args, "episodes", None),
        plant_seed=args.plant_seed,
        log_path=args.log,
        qtable_path=args.qtable,
        agent=dict(type=args.agent, seed=args.seed),
    )
    try:
        if args.config:
            return TrainConfig.from_file(args.config, **overrides)
        return TrainConfig.from_environment(**overrides)
    except ConfigurationError as exc:
        raise CommandFailed(f"invalid configuration: {exc}", EXIT_INVALID_CONFIG)


@contextlib.contextmanager
def _environment(config):
    environment = config.create_environment()
    try:
        environment.connect()
    except (ClientError, ValueError) as exc:
        raise CommandFailed(f"cannot connect: {exc}", EXIT_UNREACHABLE)
    try:
        try:
            environment.discover()
        except EmptySpace as exc:
            raise CommandFailed(str(exc), EXIT_EMPTY_SPACE)
        except MissingMethod as exc:
            raise CommandFailed(f"invalid configuration: {exc}", EXIT_INVALID_CONFIG)
        except ClientError as exc:
            raise CommandFailed(f"cannot browse: {exc}", EXIT_UNREACHABLE)
        except (MapperError, ValueError) as exc:
            raise CommandFailed(f"aborted: {exc}", EXIT_ABORTED)
        try:
            yield environment
        except (ClientError, MapperError) as exc:
            raise CommandFailed(f"aborted: {exc}", EXIT_ABORTED)
    finally:
        environment.close()


def _episode_log(path):
    return EpisodeLog(path) if path else contextlib.nullcontext()


def train(args, out=None):
    out = out or sys.stdout
    config = load_config(args)
    with _environment(config) as environment:
        actions, observations = environment.action_space, environment.observation_space
        agent = config.agent.create(observations.size, actions.size)
        with _episode_log(config.log_path) as log:
            report = run_episodes(
                environment, agent, config.episodes, config.max_steps, log
            )
    print(
        f"Trained {report.episodes} episodes, mean return {report.mean_return:.3f}",
        file=out,
    )
    if isinstance(agent, QLearningAgent):
        state_labels, action_labels = observations.labels(), actions.labels()
        if config.qtable_path:
            agent.table.save(config.qtable_path, state_labels, action_labels)
        print("Greedy policy:", file=out)
        for state, action in enumerate(agent.table.greedy_policy()):
            print(f"  {state_labels[state]} -> {action_labels[action]}", file=out)
    return EXIT_OK


def evaluate(args, out=None):
    out = out or sys.stdout
    if args.eval_episodes < 1:
        raise CommandFailed("episodes must be at least 1", EXIT_INVALID_CONFIG)
    config = load_config(args)
    with _environment(config) as environment:
        actions, observations = environment.action_space, environment.observation_space
        if config.agent.kind == "random":
            agent = RandomAgent(actions.size, config.agent.seed)
        else:
            if not config.qtable_path:
                raise CommandFailed("no Q-table given", EXIT_INVALID_CONFIG)
            try:
                table, _, _ = QTable.load(config.qtable_path, epsilon=0.0)
            except (OSError, ValueError) as exc:
                raise CommandFailed(f"cannot load Q-table: {exc}", EXIT_INVALID_CONFIG)
            if (table.n_states, table.n_actions) != (observations.size, actions.size):
                raise CommandFailed(
                    f"Q-table is {table.n_states}x{table.n_actions}, spaces are "
                    f"{observations.size}x{actions.size}",
                    EXIT_INVALID_CONFIG,
                )
            agent = QLearningAgent(table, learning=False)
        with _episode_log(args.log) as log:
            report = run_episodes(
                environment, agent, args.eval_episodes, config.max_steps, log
            )
    print(f"Evaluated {report.episodes} episodes", file=out)
    print(f"Mean return: {report.mean_return:.3f}", file=out)
    for outcome, count in sorted(report.outcome_counts.items()):
        print(f"  {outcome}: {count}", file=out)
    return EXIT_OK


def _add_run_arguments(parser):
    parser.add_argument("--config", help="Path to a YAML or JSON configuration file")
    parser.add_argument(
        "--endpoint",
        action="append",
        help="Server endpoint as host:port, repeat for several servers",
    )
    parser.add_argument("--agent", choices=["qlearning", "random"], help="Agent type")
    parser.add_argument("--seed", type=int, help="Agent seed")
    parser.add_argument("--plant-seed", type=int, help="Seed passed to the first reset")
    parser.add_argument("--qtable", help="Path of the Q-table CSV")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="uarl", description="Reinforcement learning agents against node servers."
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    serve = subparsers.add_parser("serve-plant", help="Serve the simulated plant")
    serve.add_argument("--endpoint", default=DEFAULT_ENDPOINT, help="host:port")
    serve.add_argument("--seed", type=int, help="Seed for the material colors")
    serve.add_argument(
        "--stuck-timeout", type=int, default=10, help="Time units before a jam is stuck"
    )
    serve.add_argument(
        "--green-side",
        choices=["left", "right"],
        default="left",
        help="Station side for green materials",
    )
    serve.add_argument(
        "--realtime", action="store_true", help="One second per simulated time unit"
    )
    serve.add_argument(
        "--manual-clock",
        action="store_true",
        help="Only advance simulated time through the Tick method",
    )
    serve.set_defaults(handler=serve_plant)

    insp = subparsers.add_parser("inspect", help="Show address spaces and spaces")
    insp.add_argument("endpoint", nargs="+", help="Server endpoints as host:port")
    insp.add_argument("--timeout", type=float, default=5.0, help="Request timeout")
    insp.set_defaults(handler=inspect)

    trn = subparsers.add_parser("train", help="Train an agent")
    _add_run_arguments(trn)
    trn.add_argument("--episodes", type=int, help="Number of training episodes")
    trn.add_argument("--log", help="Path of the episode CSV")
    trn.set_defaults(handler=train)

    evl = subparsers.add_parser("eval", help="Evaluate a saved Q-table")
    _add_run_arguments(evl)
    evl.add_argument(
        "--episodes",
        dest="eval_episodes",
        type=int,
        default=DEFAULT_EVAL_EPISODES,
        help="Number of evaluation episodes",
    )
    evl.add_argument("--log", help="Path of the episode CSV")
    evl.set_defaults(handler=evaluate)
    return parser


def main(argv=None):
    configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except CommandFailed as exc:
        print(f"uarl: {exc}", file=sys.stderr)
        return exc.exit_code
