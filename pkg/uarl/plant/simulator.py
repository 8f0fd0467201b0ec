import dataclasses
import enum
import logging

import numpy as np

from .. import wire  # noqa: TID252
from ..address_space import Value, ValueType  # noqa: TID252
from ..server import MethodHandler  # noqa: TID252
from . import nodes

logger = logging.getLogger(__name__)


class Phase(str, enum.Enum):
    """
    Enumeration of the phases of a material run.
    """

    INBOUND = "inbound"
    AT_COLOR_STATION = "at_color_station"
    ON_TABLE = "on_table"
    TERMINAL = "terminal"


class MaterialColor(enum.IntEnum):
    """
    Material colors, using the value reported by the color inspection sensor.
    """

    GREEN = 1
    BLUE = 2


class Outcome(str, enum.Enum):
    """
    Enumeration of the ways a run can end.
    """

    CORRECT = "correct"
    WRONG = "wrong"
    DROPPED = "dropped"
    STUCK = "stuck"


class Side(enum.IntEnum):
    """
    Sides of the turntable, using the value of the belt direction actuator.
    """

    LEFT = 0
    RIGHT = 1

    @property
    def station(self):
        """
        The reward sensor of the station on this side.
        """
        if self is Side.LEFT:
            return nodes.LEFT_STATION_COLOR
        return nodes.RIGHT_STATION_COLOR


@dataclasses.dataclass(frozen=True)
class PlantState:
    """
    State of the plant's event machine.
    """

    phase: Phase
    color: MaterialColor
    outcome: Outcome | None = None
    #: Indicates that the material is jammed at the feed junction
    jammed: bool = False
    #: Time units elapsed since the jam
    elapsed: int = 0

    @property
    def sensors(self):
        """
        The (light barrier, color inspection) readings for the state.
        """
        if self.phase is Phase.AT_COLOR_STATION:
            return 0, int(self.color)
        if self.phase is Phase.ON_TABLE:
            return 1, 0
        return 0, 0


class PlantSimulator:
    """
    Deterministic event machine of the sorting plant, driving the plant's nodes.

    A material of random color leaves the outlet on every reset. Actuations move
    it through the color station onto the turntable and into one of the stations,
    and a watchdog reports materials that got stuck. All randomness comes from a
    generator seeded at construction or by reset.
    """

    def __init__(self, space, seed=None, stuck_timeout=10, green_side=Side.LEFT):
        if stuck_timeout < 1:
            raise ValueError("stuck timeout must be at least one time unit")
        self.space = space
        self.stuck_timeout = stuck_timeout
        self.green_side = Side(green_side)
        self._rng = np.random.default_rng(seed)
        self._written = {}
        self._state = None
        self.reset()

    @property
    def state(self):
        return self._state

    def side_for(self, color):
        """
        Returns the side whose station is correct for the color.
        """
        if color is MaterialColor.GREEN:
            return self.green_side
        return Side(1 - self.green_side)

    def _set(self, node_id, data):
        self.space.set_value(node_id, Value.int32(data))

    def _sync_sensors(self):
        barrier, color = self._state.sensors
        self._set(nodes.LIGHT_BARRIER, barrier)
        self._set(nodes.COLOR_INSPECTION, color)

    def _enter(self, state):
        if state.phase is not self._state.phase:
            logger.debug("plant: %s -> %s", self._state.phase.value, state.phase.value)
        self._state = state

    def _finish(self, outcome, sensor, data):
        # Observations settle before the reward sensor reports
        self._enter(
            dataclasses.replace(self._state, phase=Phase.TERMINAL, outcome=outcome)
        )
        self._sync_sensors()
        self._set(sensor, data)
        logger.debug("plant: material %s", outcome.value)

    def reset(self, seed=None):
        """
        Releases a new material at the outlet, reseeding the generator if a seed
        is given. Actuators are left untouched.
        """
        if seed is not None:
            self._rng = np.random.default_rng(seed)
        color = MaterialColor(int(self._rng.integers(1, 3)))
        self._state = PlantState(Phase.INBOUND, color)
        self._written.clear()
        self._sync_sensors()
        for sensor in nodes.REWARD_SENSORS:
            self._set(sensor, 0)
        logger.debug("plant: reset, released %s material", color.name.lower())
        return self._state

    def restore(self, state):
        """
        Puts the event machine into the given state, syncing the observation sensors.
        """
        self._state = state
        self._written.clear()
        self._sync_sensors()
        for sensor in nodes.REWARD_SENSORS:
            self._set(sensor, 0)

    def actuate(self, rotate, direction):
        """
        Applies one actuation to the material and returns the new state.
        """
        state = self._state
        if state.phase is Phase.TERMINAL:
            logger.warning("plant: actuation ignored, run is over")
            return state
        if state.jammed:
            logger.warning("plant: actuation ignored, material is jammed")
            return state
        if state.phase is Phase.INBOUND:
            if rotate:
                self._enter(dataclasses.replace(state, jammed=True, elapsed=0))
                logger.debug("plant: material jammed at the feed junction")
            else:
                self._enter(dataclasses.replace(state, phase=Phase.AT_COLOR_STATION))
                self._sync_sensors()
        elif state.phase is Phase.AT_COLOR_STATION:
            if rotate:
                side = Side(direction)
                if side is self.side_for(state.color):
                    outcome = Outcome.CORRECT
                else:
                    outcome = Outcome.WRONG
                self._finish(outcome, side.station, int(state.color))
            else:
                self._enter(dataclasses.replace(state, phase=Phase.ON_TABLE))
                self._set(nodes.COLOR_INSPECTION, 0)
                self._set(nodes.LIGHT_BARRIER, 1)
        else:
            self._finish(Outcome.DROPPED, nodes.LIGHT_GRID, 1)
        return self._state

    def tick(self, n=1):
        """
        Advances simulated time by n units, firing the stuck detector once a jam
        has lasted for the stuck timeout.
        """
        if n < 0:
            raise ValueError("cannot tick backwards")
        state = self._state
        if state.phase is not Phase.INBOUND or not state.jammed:
            return state
        elapsed = state.elapsed + n
        self._state = dataclasses.replace(state, elapsed=elapsed)
        if elapsed >= self.stuck_timeout:
            self._finish(Outcome.STUCK, nodes.STUCK_DETECTED, 1)
        return self._state

    def on_write(self, node_id, value):
        """
        Write hook that actuates once every actuator has been written since the
        last actuation, whether or not the writes changed a value.
        """
        if node_id not in nodes.ACTUATORS:
            return
        self._written[node_id] = value.data
        if len(self._written) == len(nodes.ACTUATORS):
            rotate, direction = (self._written[a] for a in nodes.ACTUATORS)
            self._written.clear()
            self.actuate(rotate, direction)

    def _int_args(self, args, name, maximum):
        if len(args) > maximum:
            raise ValueError(f"{name} takes at most {maximum} argument(s)")
        if any(arg.variant is not ValueType.INT32 for arg in args):
            raise TypeError(f"{name} takes Int32 arguments")
        return [arg.data for arg in args]

    def _call_reset(self, args):
        seed = self._int_args(args, "Reset", 1)
        self.reset(*seed)
        return wire.StatusCode.GOOD, ()

    def _call_tick(self, args):
        count = self._int_args(args, "Tick", 1)
        if len(count) != 1:
            raise ValueError("Tick takes exactly one argument")
        self.tick(*count)
        return wire.StatusCode.GOOD, ()

    def method_handlers(self):
        return (
            MethodHandler(nodes.RESET, self._call_reset),
            MethodHandler(nodes.TICK, self._call_tick),
        )
