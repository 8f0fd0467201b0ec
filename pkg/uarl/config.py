import dataclasses
import json
import logging
import os
import pathlib

import yaml

from .agents import QLearningAgent, QTable, RandomAgent
from .endpoint import Endpoint
from .mapper import Environment, RewardRules
from .plant import default_reward_rules

logger = logging.getLogger(__name__)

#: Endpoint used when none is configured
DEFAULT_ENDPOINT = "127.0.0.1:4850"

AGENT_TYPES = ("qlearning", "random")


class ConfigurationError(Exception):
    """
    Raised when there is an error with the configuration.
    """


def _parse_document(text):
    """
    Parses the text of a JSON or YAML configuration document.
    """
    # PyYAML implements YAML 1.1, which reads some JSON numbers as strings
    try:
        return json.loads(text)
    except ValueError:
        pass
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"cannot parse configuration: {exc}")


def _integer(data, key, default, minimum=None, optional=False):
    value = data.get(key, default)
    if value is None and optional:
        return None
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigurationError(f"{key} must be an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigurationError(f"{key} must be at least {minimum}, got {value}")
    return value


def _number(data, key, default, optional=False):
    value = data.get(key, default)
    if value is None and optional:
        return None
    if isinstance(value, bool) or not isinstance(value, int | float):
        raise ConfigurationError(f"{key} must be a number, got {value!r}")
    return float(value)


def _check_keys(data, allowed, section):
    if not isinstance(data, dict):
        raise ConfigurationError(f"{section} must be a mapping")
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise ConfigurationError(f"unknown {section} keys: {', '.join(unknown)}")


@dataclasses.dataclass(frozen=True)
class AgentConfig:
    """
    Configuration of the agent to train or evaluate.
    """

    #: Either "qlearning" or "random", given as "type" in configuration data
    kind: str = "qlearning"
    alpha: float = 0.4
    gamma: float = 0.9
    epsilon: float = 0.1
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in AGENT_TYPES:
            raise ConfigurationError(
                f"agent type must be one of {', '.join(AGENT_TYPES)}, "
                f"got {self.kind!r}"
            )
        if not 0 < self.alpha <= 1:
            raise ConfigurationError(f"alpha must be in (0, 1], got {self.alpha}")
        if not 0 < self.gamma < 1:
            raise ConfigurationError(f"gamma must be in (0, 1), got {self.gamma}")
        if not 0 <= self.epsilon <= 1:
            raise ConfigurationError(f"epsilon must be in [0, 1], got {self.epsilon}")

    @classmethod
    def from_data(cls, data):
        _check_keys(data, ("type", "alpha", "gamma", "epsilon", "seed"), "agent")
        return cls(
            str(data.get("type", cls.kind)),
            _number(data, "alpha", cls.alpha),
            _number(data, "gamma", cls.gamma),
            _number(data, "epsilon", cls.epsilon),
            _integer(data, "seed", None, minimum=0, optional=True),
        )

    def create_table(self, n_states, n_actions, values=None):
        return QTable(
            n_states,
            n_actions,
            alpha=self.alpha,
            gamma=self.gamma,
            epsilon=self.epsilon,
            seed=self.seed,
            values=values,
        )

    def create(self, n_states, n_actions):
        """
        Returns a new agent for spaces of the given sizes.
        """
        if self.kind == "random":
            return RandomAgent(n_actions, self.seed)
        return QLearningAgent(self.create_table(n_states, n_actions))


@dataclasses.dataclass(frozen=True)
class TrainConfig:
    """
    Configuration of a training or evaluation run.
    """

    endpoints: tuple[str, ...] = (DEFAULT_ENDPOINT,)
    agent: AgentConfig = dataclasses.field(default_factory=AgentConfig)
    episodes: int = 150
    max_steps: int = 20
    step_timeout: float = 5.0
    reward_rules: RewardRules = dataclasses.field(
        default_factory=lambda: RewardRules.from_data(default_reward_rules())
    )
    log_path: str | None = "episodes.csv"
    qtable_path: str | None = "qtable.csv"
    #: Seed passed to the plant's reset on the first episode
    plant_seed: int | None = None
    reset_method: str = "Reset"
    tick_method: str | None = None
    tick_interval: float | None = None

    def __post_init__(self):
        if not self.endpoints:
            raise ConfigurationError("at least one endpoint is required")
        for endpoint in self.endpoints:
            try:
                Endpoint.parse(endpoint)
            except ValueError as exc:
                raise ConfigurationError(str(exc))
        if self.episodes < 1:
            raise ConfigurationError(
                f"episodes must be at least 1, got {self.episodes}"
            )
        if self.max_steps < 1:
            raise ConfigurationError(
                f"max_steps must be at least 1, got {self.max_steps}"
            )
        if self.step_timeout <= 0:
            raise ConfigurationError("step_timeout must be positive")
        if self.tick_interval is not None and self.tick_interval <= 0:
            raise ConfigurationError("tick_interval must be positive")
        for rule in self.reward_rules:
            if not 0 <= rule.server_index < len(self.endpoints):
                raise ConfigurationError(
                    f"reward rule for {rule.node} names unknown server "
                    f"{rule.server_index}"
                )

    @classmethod
    def from_data(cls, data, **overrides):
        """
        Returns a configuration for the given data, which may be a mapping or the
        text of a YAML or JSON document.

        Overrides that are not None take precedence over the data. An "agent"
        override is merged into the agent section.
        """
        if isinstance(data, str | bytes):
            data = _parse_document(data)
        data = data or {}
        if not isinstance(data, dict):
            raise ConfigurationError("configuration must be a mapping")
        data = dict(data)
        _check_keys(data, [f.name for f in dataclasses.fields(cls)], "configuration")
        agent_overrides = overrides.pop("agent", None) or {}
        data.update({k: v for k, v in overrides.items() if v is not None})
        agent = data.get("agent") or {}
        if not isinstance(agent, dict):
            raise ConfigurationError("agent must be a mapping")
        agent = dict(agent)
        agent.update({k: v for k, v in agent_overrides.items() if v is not None})
        endpoints = data.get("endpoints", cls.endpoints)
        if isinstance(endpoints, str):
            endpoints = [endpoints]
        if not isinstance(endpoints, list | tuple):
            raise ConfigurationError("endpoints must be a list")
        rules = data.get("reward_rules")
        if rules is None:
            rules = default_reward_rules()
        if not isinstance(rules, list | tuple):
            raise ConfigurationError("reward_rules must be a list")
        try:
            reward_rules = RewardRules.from_data(rules)
        except ValueError as exc:
            raise ConfigurationError(str(exc))
        return cls(
            tuple(str(endpoint) for endpoint in endpoints),
            AgentConfig.from_data(agent),
            _integer(data, "episodes", cls.episodes),
            _integer(data, "max_steps", cls.max_steps),
            _number(data, "step_timeout", cls.step_timeout),
            reward_rules,
            data.get("log_path", cls.log_path),
            data.get("qtable_path", cls.qtable_path),
            _integer(data, "plant_seed", None, minimum=0, optional=True),
            str(data.get("reset_method", cls.reset_method)),
            data.get("tick_method"),
            _number(data, "tick_interval", None, optional=True),
        )

    @classmethod
    def from_file(cls, path, **overrides):
        """
        Returns a configuration for the given file.
        """
        try:
            with pathlib.Path(path).open() as fh:
                data = fh.read()
        except OSError as exc:
            raise ConfigurationError(f"cannot read {path}: {exc}")
        return cls.from_data(data, **overrides)

    @classmethod
    def from_environment(cls, **overrides):
        """
        Returns a configuration for the file named by UARL_CONFIG, or the defaults
        if it is not set.
        """
        path = os.environ.get("UARL_CONFIG")
        if path:
            logger.info("loading configuration from %s", path)
            return cls.from_file(path, **overrides)
        return cls.from_data({}, **overrides)

    def create_environment(self):
        """
        Returns a new, unconnected environment using the configuration.
        """
        return Environment(
            self.endpoints,
            self.reward_rules,
            step_timeout=self.step_timeout,
            reset_method=self.reset_method,
            tick_method=self.tick_method,
            tick_interval=self.tick_interval,
            plant_seed=self.plant_seed,
        )
