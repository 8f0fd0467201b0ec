from ..address_space import (  # noqa: TID252
    BASE_DATA_VARIABLE_TYPE,
    BASE_OBJECT_TYPE,
    OBJECTS_FOLDER,
    AddressSpace,
    MarkerKind,
    Node,
    NodeClass,
    NodeId,
    ReferenceType,
    RLMarker,
    Value,
)

#: Namespace of the plant nodes
PLANT_NAMESPACE = 1

TURNTABLE = NodeId(PLANT_NAMESPACE, 1000)

# Actuators
ROTATE_TABLE = NodeId(PLANT_NAMESPACE, 1001)
BELT_DIRECTION = NodeId(PLANT_NAMESPACE, 1002)

# Observation sensors
LIGHT_BARRIER = NodeId(PLANT_NAMESPACE, 1003)
COLOR_INSPECTION = NodeId(PLANT_NAMESPACE, 1004)

# Reward sensors
LEFT_STATION_COLOR = NodeId(PLANT_NAMESPACE, 1005)
RIGHT_STATION_COLOR = NodeId(PLANT_NAMESPACE, 1006)
LIGHT_GRID = NodeId(PLANT_NAMESPACE, 1007)
STUCK_DETECTED = NodeId(PLANT_NAMESPACE, 1008)

# Methods
RESET = NodeId(PLANT_NAMESPACE, 1010)
TICK = NodeId(PLANT_NAMESPACE, 1011)

ACTUATORS = (ROTATE_TABLE, BELT_DIRECTION)
OBSERVATION_SENSORS = (LIGHT_BARRIER, COLOR_INSPECTION)
REWARD_SENSORS = (LEFT_STATION_COLOR, RIGHT_STATION_COLOR, LIGHT_GRID, STUCK_DETECTED)

#: Browse names of the plant variables, in node id order
VARIABLES = {
    ROTATE_TABLE: "RotateTable",
    BELT_DIRECTION: "BeltDirection",
    LIGHT_BARRIER: "LightBarrier",
    COLOR_INSPECTION: "ColorInspection",
    LEFT_STATION_COLOR: "LeftStationColor",
    RIGHT_STATION_COLOR: "RightStationColor",
    LIGHT_GRID: "LightGrid",
    STUCK_DETECTED: "StuckDetected",
}

METHODS = {RESET: "Reset", TICK: "Tick"}

#: Markers of the nodes that make up the action and observation spaces
MARKERS = {
    ROTATE_TABLE: RLMarker(MarkerKind.INT_ACTION, 0, 1, 1),
    BELT_DIRECTION: RLMarker(MarkerKind.INT_ACTION, 0, 1, 1),
    LIGHT_BARRIER: RLMarker(MarkerKind.INT_OBSERVATION, 0, 1, 1),
    COLOR_INSPECTION: RLMarker(MarkerKind.INT_OBSERVATION, 0, 2, 1),
}


def build_plant_space():
    """
    Returns the address space of the sorting plant.

    The Turntable object is organized by the Objects folder and has every plant
    variable and method as a component. Boolean actuators and sensors are Int32
    variables with a (0, 1, 1) grid.
    """
    space = AddressSpace.create()
    space.add_node(Node(BASE_OBJECT_TYPE, "BaseObjectType", NodeClass.OBJECT_TYPE))
    space.add_node(
        Node(BASE_DATA_VARIABLE_TYPE, "BaseDataVariableType", NodeClass.OBJECT_TYPE)
    )
    space.add_node(
        Node.object(TURNTABLE, "Turntable", BASE_OBJECT_TYPE),
        OBJECTS_FOLDER,
        ReferenceType.ORGANIZES,
    )
    for node_id, browse_name in VARIABLES.items():
        space.add_node(
            Node.variable(
                node_id, browse_name, Value.int32(0), BASE_DATA_VARIABLE_TYPE
            ),
            TURNTABLE,
        )
    for node_id, browse_name in METHODS.items():
        space.add_node(Node.method(node_id, browse_name), TURNTABLE)
    for node_id, marker in MARKERS.items():
        space.attach_marker(node_id, marker)
    return space
