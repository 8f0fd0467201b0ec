from .environment import (  # noqa: F401
    TERMINAL,
    TRUNCATED,
    Environment,
    EpisodeResult,
)
from .errors import (  # noqa: F401
    ActuationRejected,
    EmptySpace,
    EpisodeNotActive,
    IncompleteCache,
    IndexOutOfRange,
    MapperError,
    MissingMethod,
    StepTimeout,
    UnknownValue,
)
from .rewards import RewardRule, RewardRules  # noqa: F401
from .spaces import (  # noqa: F401
    NodeBinding,
    SpaceSpec,
    action_to_values,
    discover_spaces,
    values_to_state,
)
from .training import EpisodeLog, RunReport, run_episodes  # noqa: F401
