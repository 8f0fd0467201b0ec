import bisect
import logging

from .errors import (
    AddressSpaceError,
    AlreadyMarked,
    DanglingReference,
    DuplicateNodeId,
    NoSuchNode,
    NotAVariable,
    NotWritable,
    TypeMismatch,
    ValueOutOfRange,
)
from .nodes import (
    MARKER_TYPE_IDS,
    OBJECTS_FOLDER,
    BrowseEntry,
    Node,
    NodeClass,
    NodeId,
    Reference,
    ReferenceType,
    Value,
)

logger = logging.getLogger(__name__)


class AddressSpace:
    """
    In-memory information model holding nodes, their references and values.

    An address space is owned by a single context. Change listeners are invoked
    synchronously, in registration order, with ``(node_id, value)`` whenever a
    variable's value actually changes.
    """

    def __init__(self, root=OBJECTS_FOLDER):
        self.root = root
        self._nodes = {}
        # Node ids in ascending order, maintained on insert
        self._order = []
        self._listeners = []
        # Nodes that make up materialized markers, which are read-only
        self._marker_parts = set()

    @classmethod
    def create(cls):
        """
        Returns a new address space containing just the Objects folder.
        """
        space = cls()
        space.add_node(Node.object(OBJECTS_FOLDER, "Objects"))
        return space

    def __len__(self):
        return len(self._nodes)

    def __contains__(self, node_id):
        return node_id in self._nodes

    def __iter__(self):
        """
        Iterates over the nodes in ascending node id order.
        """
        return (self._nodes[node_id] for node_id in list(self._order))

    def get(self, node_id):
        """
        Returns the node with the given id.
        """
        try:
            return self._nodes[node_id]
        except KeyError:
            raise NoSuchNode(f"no node with id {node_id}")

    def _variable(self, node_id):
        node = self.get(node_id)
        if node.node_class is not NodeClass.VARIABLE:
            raise NotAVariable(f"node {node_id} is not a Variable")
        return node

    def add_change_listener(self, listener):
        self._listeners.append(listener)

    def remove_change_listener(self, listener):
        self._listeners.remove(listener)

    def add_node(self, node, parent=None, reference_type=ReferenceType.HAS_COMPONENT):
        """
        Adds the given node, optionally referencing it from a parent node.
        """
        if node.node_id in self._nodes:
            raise DuplicateNodeId(f"node {node.node_id} already exists")
        if node.marker is not None:
            raise AddressSpaceError("markers must be added using attach_marker")
        for ref in node.references:
            # References from a node to itself are allowed
            if ref.target != node.node_id and ref.target not in self._nodes:
                raise DanglingReference(
                    f"node {node.node_id} references missing node {ref.target}"
                )
        if parent is not None and parent not in self._nodes:
            raise DanglingReference(f"parent node {parent} does not exist")
        self._nodes[node.node_id] = node
        bisect.insort(self._order, node.node_id)
        if parent is not None:
            self._nodes[parent].references.append(
                Reference(ReferenceType(reference_type), node.node_id)
            )
        return node

    def _ensure_marker_type(self, kind):
        type_id = MARKER_TYPE_IDS[kind]
        if type_id not in self._nodes:
            self.add_node(Node(type_id, kind.type_name, NodeClass.OBJECT_TYPE))
        return type_id

    def attach_marker(self, target, marker):
        """
        Marks the target variable as an action or observation node.

        The marker is stored on the node and materialized as a property node, typed
        by the marker's object type, with min/max/step component variables.
        """
        node = self._variable(target)
        if node.marker is not None:
            raise AlreadyMarked(f"node {target} is already marked")
        if not marker.contains(node.value):
            raise ValueOutOfRange(
                f"current value {node.value} of {target} is not in {marker}"
            )
        kind = marker.kind
        base = f"{target.identifier}.{kind.type_name}"
        prop_id = NodeId(target.namespace_index, base)
        bounds = {
            NodeId(target.namespace_index, f"{base}.{name}"): (name, bound)
            for name, bound in (
                ("min", marker.minimum),
                ("max", marker.maximum),
                ("step", marker.step),
            )
        }
        # A collision must leave the space unchanged
        for node_id in (prop_id, *bounds):
            if node_id in self._nodes:
                raise DuplicateNodeId(f"node {node_id} already exists")
        type_id = self._ensure_marker_type(kind)
        prop = Node(prop_id, kind.property_name, NodeClass.PROPERTY, type_id)
        self.add_node(prop, target, ReferenceType.HAS_PROPERTY)
        self._marker_parts.add(prop_id)
        variant = kind.value_type
        for part_id, (name, bound) in bounds.items():
            part = Node.variable(part_id, name, Value(variant, bound))
            self.add_node(part, prop_id)
            self._marker_parts.add(part.node_id)
        node.marker = marker
        logger.debug("attached %s to %s", marker, target)

    def resolve_marker(self, target):
        """
        Returns the marker attached to the target, or None.
        """
        return self.get(target).marker

    def read_value(self, node_id):
        return self._variable(node_id).value

    def set_value(self, node_id, value):
        """
        Sets the value of the given variable, notifying listeners if it changed.
        """
        node = self._variable(node_id)
        if node_id in self._marker_parts:
            raise NotWritable(f"node {node_id} is part of a marker")
        if value.variant is not node.value.variant:
            raise TypeMismatch(
                f"node {node_id} holds {node.value.variant.name}, "
                f"got {value.variant.name}"
            )
        if node.marker is not None and not node.marker.contains(value):
            raise ValueOutOfRange(f"{value} is not in {node.marker}")
        if value == node.value:
            return
        node.value = value
        for listener in list(self._listeners):
            listener(node_id, value)

    def browse(self, node_id):
        """
        Returns the references of the given node in stored order, with descriptors
        of their targets.
        """
        node = self.get(node_id)
        entries = []
        for ref in node.references:
            target = self._nodes[ref.target]
            entries.append(
                BrowseEntry(
                    ref.reference_type,
                    target.node_id,
                    target.browse_name,
                    target.node_class,
                    target.type_definition,
                    target.marker,
                )
            )
        return entries
