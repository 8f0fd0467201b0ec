import dataclasses
import logging

from ..server import Server, ServerHandle  # noqa: TID252
from .nodes import build_plant_space
from .simulator import PlantSimulator, Side

logger = logging.getLogger(__name__)

#: Wall-clock seconds per simulated time unit
REALTIME_TICK = 1.0
ACCELERATED_TICK = 0.001


@dataclasses.dataclass(frozen=True)
class PlantSettings:
    """
    Settings for a simulated plant server.
    """

    seed: int | None = None
    #: Time units a jam lasts before the stuck detector fires
    stuck_timeout: int = 10
    #: The side whose station takes green materials
    green_side: Side = Side.LEFT
    #: Pace the simulated clock in wall-clock seconds
    realtime: bool = False
    #: Only advance the simulated clock through the Tick method
    manual_clock: bool = False
    name: str = "sorting-plant"

    @property
    def tick_interval(self):
        return REALTIME_TICK if self.realtime else ACCELERATED_TICK


class PlantServer(Server):
    """
    Node server exposing the simulated sorting plant.

    Writing both actuators actuates the plant once. Reset and Tick are exposed as
    methods and, unless the clock is manual, a periodic task advances the
    simulated clock one unit per tick interval.
    """

    def __init__(self, settings=None):
        self.settings = settings or PlantSettings()
        space = build_plant_space()
        self.simulator = PlantSimulator(
            space,
            self.settings.seed,
            self.settings.stuck_timeout,
            self.settings.green_side,
        )
        super().__init__(
            space,
            self.simulator.method_handlers(),
            name=self.settings.name,
            write_hooks=[self.simulator.on_write],
        )
        if not self.settings.manual_clock:
            self.schedule_interval(self.simulator.tick, self.settings.tick_interval)


def serve_plant(endpoint, settings=None):
    """
    Starts a plant server on the endpoint and returns its handle.
    """
    return ServerHandle(PlantServer(settings)).start(endpoint)
