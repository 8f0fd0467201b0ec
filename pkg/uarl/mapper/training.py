import collections
import csv
import dataclasses
import logging

logger = logging.getLogger(__name__)

#: Columns of the episode log
LOG_COLUMNS = ("episode", "steps", "return", "outcome")


@dataclasses.dataclass
class RunReport:
    """
    Results of a series of episodes.
    """

    results: list = dataclasses.field(default_factory=list)

    @property
    def episodes(self):
        return len(self.results)

    @property
    def mean_return(self):
        if not self.results:
            return 0.0
        return sum(r.episode_return for r in self.results) / len(self.results)

    @property
    def outcome_counts(self):
        return collections.Counter(r.outcome for r in self.results)


class EpisodeLog:
    """
    CSV log with one row per episode.
    """

    def __init__(self, path):
        self.path = path
        self._fh = None
        self._writer = None

    def open(self):
        self._fh = open(self.path, "w", newline="")
        self._writer = csv.writer(self._fh)
        self._writer.writerow(LOG_COLUMNS)
        return self

    def write(self, episode, result):
        self._writer.writerow(
            [episode, result.steps, repr(float(result.episode_return)), result.outcome]
        )
        self._fh.flush()

    def close(self):
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    def __enter__(self):
        return self.open()

    def __exit__(self, exc_type, exc_value, traceback):
        self.close()


def run_episodes(environment, agent, episodes, max_steps=20, log=None):
    """
    Runs the agent for the given number of episodes, optionally logging each one.
    """
    report = RunReport()
    for episode in range(1, episodes + 1):
        result = environment.run_episode(agent, max_steps)
        report.results.append(result)
        if log is not None:
            log.write(episode, result)
    logger.info(
        "ran %d episodes, mean return %.3f, outcomes %s",
        report.episodes,
        report.mean_return,
        dict(report.outcome_counts),
    )
    return report
