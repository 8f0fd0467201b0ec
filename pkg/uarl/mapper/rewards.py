import collections.abc
import dataclasses

from ..address_space import NodeId, Value  # noqa: TID252


@dataclasses.dataclass(frozen=True)
class RewardRule:
    """
    Grants a reward when a node of a server changes to the trigger value.
    """

    server_index: int
    node: NodeId
    trigger_value: Value
    reward: float
    terminal: bool = True
    #: Label recorded as the episode outcome when the rule ends an episode
    outcome: str = ""

    def matches(self, server_index, node, value):
        return (
            server_index == self.server_index
            and node == self.node
            and value == self.trigger_value
        )

    @classmethod
    def from_data(cls, data):
        """
        Builds a rule from configuration data.
        """
        try:
            node = data["node"]
            return cls(
                int(data.get("server", 0)),
                node if isinstance(node, NodeId) else NodeId.parse(node),
                Value.infer(data["value"]),
                float(data["reward"]),
                bool(data.get("terminal", True)),
                str(data.get("outcome", "")),
            )
        except KeyError as exc:
            raise ValueError(f"reward rule is missing {exc}")
        except (TypeError, AttributeError) as exc:
            raise ValueError(f"malformed reward rule: {exc}")

    def to_data(self):
        return {
            "server": self.server_index,
            "node": str(self.node),
            "value": self.trigger_value.data,
            "reward": self.reward,
            "terminal": self.terminal,
            "outcome": self.outcome,
        }


class RewardRules(collections.abc.Sequence):
    """
    An ordered rule table where the first matching rule wins.
    """

    def __init__(self, rules):
        self._rules = tuple(rules)

    def __getitem__(self, index):
        return self._rules[index]

    def __len__(self):
        return len(self._rules)

    def __eq__(self, other):
        if not isinstance(other, RewardRules):
            return NotImplemented
        return self._rules == other._rules

    @classmethod
    def from_data(cls, data):
        return cls(RewardRule.from_data(item) for item in data)

    def match(self, server_index, node, value):
        """
        Returns the first rule triggered by the change, or None.
        """
        return next(
            (rule for rule in self._rules if rule.matches(server_index, node, value)),
            None,
        )

    def nodes(self, server_index):
        """
        Returns the nodes of the server watched by the rules, in rule order.
        """
        return tuple(
            dict.fromkeys(
                rule.node for rule in self._rules if rule.server_index == server_index
            )
        )
