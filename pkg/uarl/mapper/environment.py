import dataclasses
import logging
import queue
import time

from .. import wire  # noqa: TID252
from ..address_space import NodeClass, Value  # noqa: TID252
from ..agents import Transition  # noqa: TID252
from ..client import SyncSession, next_notification  # noqa: TID252
from ..endpoint import Endpoint  # noqa: TID252
from .errors import ActuationRejected, EpisodeNotActive, MissingMethod, StepTimeout
from .rewards import RewardRules
from .spaces import discover_spaces

logger = logging.getLogger(__name__)

#: Outcome recorded for episodes cut off by the step limit
TRUNCATED = "truncated"
#: Outcome recorded for episodes ended by a rule without an outcome label
TERMINAL = "terminal"

#: Seconds between injected clock ticks when no interval is configured
DEFAULT_TICK_INTERVAL = 0.01


@dataclasses.dataclass(frozen=True)
class EpisodeResult:
    """
    Summary of one episode.
    """

    #: The undiscounted sum of the rewards received
    episode_return: float
    steps: int
    outcome: str
    truncated: bool = False


class Environment:
    """
    RL environment backed by one or more node servers.

    Actions are applied by writing the action nodes in binding order. The state is
    assembled from the cached values of the observation nodes, kept current by
    their change notifications, and the reward comes from the first reward rule
    matched by the notifications caused by an action.
    """

    def __init__(
        self,
        endpoints,
        reward_rules,
        /,
        step_timeout=5.0,
        reset_method="Reset",
        tick_method=None,
        tick_interval=None,
        plant_seed=None,
        request_timeout=5.0,
    ):
        self.endpoints = [Endpoint.parse(endpoint) for endpoint in endpoints]
        if not isinstance(reward_rules, RewardRules):
            reward_rules = RewardRules(reward_rules)
        self.reward_rules = reward_rules
        self.step_timeout = step_timeout
        self.reset_method = reset_method
        self.tick_method = tick_method
        self.tick_interval = tick_interval or DEFAULT_TICK_INTERVAL
        self.request_timeout = request_timeout
        #: Notifications of every session, tagged with the server index
        self.notifications = queue.Queue()
        self.sessions = []
        self.catalogs = []
        self.action_space = None
        self.observation_space = None
        #: The outcome of the last step that ended an episode
        self.outcome = None
        self._cache = {}
        self._observed = set()
        self._reset_methods = ()
        self._tick_methods = ()
        self._pending_seed = plant_seed
        self._state = None
        self._active = False

    @property
    def state(self):
        return self._state

    @property
    def cache(self):
        """
        The last known value of every observation node, by (server index, node).
        """
        return dict(self._cache)

    def connect(self):
        """
        Opens a session to every endpoint.
        """
        for index, endpoint in enumerate(self.endpoints):
            session = SyncSession(
                endpoint,
                timeout=self.request_timeout,
                source=index,
                notifications=self.notifications,
            )
            try:
                session.open()
            except BaseException:
                self.close()
                raise
            self.sessions.append(session)
        return self

    def _find_methods(self, browse_name):
        found = []
        for index, catalog in enumerate(self.catalogs):
            entry = catalog.find(browse_name, NodeClass.METHOD)
            if entry is not None:
                found.append((index, entry.node_id))
        return tuple(found)

    def discover(self):
        """
        Browses every server, derives the spaces and subscribes to the observation
        nodes and the nodes watched by the reward rules.
        """
        self.catalogs = [session.browse_all() for session in self.sessions]
        self.action_space, self.observation_space = discover_spaces(self.catalogs)
        self._reset_methods = self._find_methods(self.reset_method)
        if self.tick_method:
            self._tick_methods = self._find_methods(self.tick_method)
            if not self._tick_methods:
                raise MissingMethod(f"no server exposes a '{self.tick_method}' method")
        self._observed = {b.key for b in self.observation_space.bindings}
        for index, session in enumerate(self.sessions):
            watched = dict.fromkeys(
                binding.node
                for binding in self.observation_space.bindings
                if binding.server_index == index
            )
            watched.update(dict.fromkeys(self.reward_rules.nodes(index)))
            if watched:
                session.subscribe(tuple(watched))
        return self.action_space, self.observation_space

    def _call(self, server_index, method, args=()):
        status, results = self.sessions[server_index].call(method, args)
        if status != wire.StatusCode.GOOD:
            detail = results[0].data if results else ""
            raise ActuationRejected(
                f"call of {method} on server {server_index} failed with status "
                f"{int(status)}: {detail}",
                status,
            )
        return results

    def _drain(self):
        while next_notification(self.notifications, 0) is not None:
            pass

    def reset(self):
        """
        Resets every resettable server and returns the initial state.

        The first reset passes the configured plant seed, if any.
        """
        if not self._reset_methods:
            raise MissingMethod(f"no server exposes a '{self.reset_method}' method")
        args = () if self._pending_seed is None else (Value.int32(self._pending_seed),)
        for server_index, method in self._reset_methods:
            self._call(server_index, method, args)
        self._pending_seed = None
        # Changes made by the reset are superseded by the reads below
        self._drain()
        for binding in self.observation_space.bindings:
            session = self.sessions[binding.server_index]
            self._cache[binding.key] = session.read(binding.node)
        self._state = self.observation_space.values_to_index(self._cache)
        self.outcome = None
        self._active = True
        return self._state

    def _tick(self):
        for server_index, method in self._tick_methods:
            self._call(server_index, method, (Value.int32(1),))

    def _next_batch(self, deadline):
        while True:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                raise StepTimeout(f"no sensor change within {self.step_timeout}s")
            wait = remaining
            if self._tick_methods:
                wait = min(remaining, self.tick_interval)
            first = next_notification(self.notifications, wait)
            if first is not None:
                break
            if self._tick_methods:
                self._tick()
        batch = [first]
        while (item := next_notification(self.notifications, 0)) is not None:
            batch.append(item)
        return batch

    def _await_effect(self):
        deadline = time.monotonic() + self.step_timeout
        while True:
            rule, changed = None, False
            for notification in self._next_batch(deadline):
                key = (notification.source, notification.node)
                if key in self._observed:
                    self._cache[key] = notification.value
                    changed = True
                if rule is None:
                    rule = self.reward_rules.match(*key, notification.value)
                    if rule is not None:
                        logger.debug(
                            "rule matched: %s = %s -> %s",
                            notification.node,
                            notification.value,
                            rule.reward,
                        )
            if rule is not None:
                return rule.reward, rule.terminal, rule.outcome or TERMINAL
            if changed:
                return 0.0, False, None

    def step(self, action):
        """
        Applies the action and returns the resulting transition.
        """
        if not self._active:
            raise EpisodeNotActive("reset must be called before stepping")
        state = self._state
        for server_index, node, value in self.action_space.index_to_values(action):
            status = self.sessions[server_index].write(node, value)
            if status != wire.StatusCode.GOOD:
                raise ActuationRejected(
                    f"write of {value} to {node} on server {server_index} failed "
                    f"with status {int(status)}",
                    status,
                )
        reward, terminal, outcome = self._await_effect()
        self._state = self.observation_space.values_to_index(self._cache)
        if terminal:
            self._active = False
            self.outcome = outcome
        return Transition(state, action, reward, self._state, terminal)

    def run_episode(self, agent, max_steps=20):
        """
        Runs one episode with the agent, feeding it every transition.

        When the step limit cuts the episode off, the last transition is handed to
        the agent as terminal.
        """
        if max_steps < 1:
            raise ValueError("an episode needs at least one step")
        state = self.reset()
        agent.begin_episode()
        total = 0.0
        for steps in range(1, max_steps + 1):
            transition = self.step(agent.select_action(state))
            total += transition.reward
            truncated = not transition.terminal and steps == max_steps
            if truncated:
                transition = dataclasses.replace(transition, terminal=True)
                self._active = False
                self.outcome = TRUNCATED
            agent.observe(transition)
            state = transition.next_state
            if transition.terminal:
                break
        result = EpisodeResult(total, steps, self.outcome, truncated)
        logger.info(
            "episode finished: %s after %d steps, return %s",
            result.outcome,
            result.steps,
            result.episode_return,
        )
        return result

    def close(self):
        for session in self.sessions:
            session.close()
        self.sessions.clear()

    def __enter__(self):
        if not self.sessions:
            self.connect()
        return self

    def __exit__(self, exc_type, exc_value, traceback):
        self.close()
