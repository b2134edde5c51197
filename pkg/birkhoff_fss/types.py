from enum import Enum


class SerializableEnum(Enum):
    @classmethod
    def from_dict(cls, value: str):
        return cls(value)

    def to_dict(self):
        return self.value


class SpecKind(SerializableEnum):
    nth_order = "nth_order"
    system = "system"
    nth_order_param = "nth_order_param"


class AnchorMode(SerializableEnum):
    plain = "plain"
    anchored = "anchored"


class SweepDirection(SerializableEnum):
    forward = "forward"
    backward = "backward"
