import collections.abc
import dataclasses

from ..address_space import BrowseEntry, NodeClass, NodeId, RLMarker  # noqa: TID252


@dataclasses.dataclass(frozen=True)
class CatalogEntry:
    """
    Client-side mirror of a browsed node.
    """

    node_id: NodeId
    browse_name: str
    node_class: NodeClass
    type_definition: NodeId | None = None
    #: The marker resolved from the node's marker property, if any
    marker: RLMarker | None = None
    #: The node the entry was first reached from, None for the root
    parent: NodeId | None = None
    references: tuple[BrowseEntry, ...] = ()

    @property
    def children(self):
        """
        The targets of the node's hierarchical references, in stored order.
        """
        return tuple(
            ref.target for ref in self.references if ref.reference_type.is_hierarchical
        )


class Catalog(collections.abc.Sequence):
    """
    The nodes of one server reachable from its Objects folder, in node id order.
    """

    def __init__(self, entries, root):
        self.root = root
        self._entries = tuple(sorted(entries, key=lambda e: e.node_id.sort_key()))
        self._by_id = {entry.node_id: entry for entry in self._entries}

    def __getitem__(self, index):
        return self._entries[index]

    def __len__(self):
        return len(self._entries)

    def __eq__(self, other):
        if not isinstance(other, Catalog):
            return NotImplemented
        return self.root == other.root and self._entries == other._entries

    def __repr__(self):
        return f"Catalog({len(self)} nodes)"

    def get(self, node_id):
        return self._by_id[node_id]

    def find(self, browse_name, node_class=None):
        """
        Returns the first entry in catalog order with the browse name, or None.
        """
        return next(
            (
                entry
                for entry in self._entries
                if entry.browse_name == browse_name
                and (node_class is None or entry.node_class is node_class)
            ),
            None,
        )

    def marked(self):
        """
        Returns the entries that carry a marker, in catalog order.
        """
        return tuple(entry for entry in self._entries if entry.marker is not None)
