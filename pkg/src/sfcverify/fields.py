"""Field descriptors and the catalog of known network and state fields."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Optional

from .errors import SfcError, UnknownFieldError


class ValueKind(str, Enum):
    IP_ADDRESS = "ip-address"
    IP_PREFIX_SET = "ip-prefix-set"
    PORT = "port-number"
    COUNTER = "integer-counter"
    ENUM = "enum-token"
    TEXT = "opaque-text"
    PAYLOAD = "payload"


class Scope(str, Enum):
    NETWORK = "network"
    STATE = "state"


@dataclass(frozen=True)
class FieldDescriptor:
    name: str
    kind: ValueKind
    bit_length: int

    def __post_init__(self):
        if not self.name:
            raise SfcError("field name must be non-empty")
        if self.bit_length < 1:
            raise SfcError(f"field {self.name!r}: bit_length must be >= 1")


@dataclass(frozen=True)
class FieldCatalog:
    """Registry of network fields and state fields, disjoint by name."""

    network_fields: Mapping[str, FieldDescriptor] = field(default_factory=dict)
    state_fields: Mapping[str, FieldDescriptor] = field(default_factory=dict)

    def __post_init__(self):
        clash = set(self.network_fields) & set(self.state_fields)
        if clash:
            raise SfcError(f"fields registered as both network and state: {sorted(clash)}")

    @classmethod
    def build(cls, network: Iterable[FieldDescriptor] = (),
              state: Iterable[FieldDescriptor] = ()) -> "FieldCatalog":
        net, st = {}, {}
        for target, items in ((net, network), (st, state)):
            for d in items:
                if d.name in target:
                    raise SfcError(f"duplicate field {d.name!r}")
                target[d.name] = d
        return cls(net, st)

    def extend(self, descriptors: Iterable[FieldDescriptor],
               scope: Scope = Scope.STATE) -> "FieldCatalog":
        net, st = dict(self.network_fields), dict(self.state_fields)
        target = net if Scope(scope) is Scope.NETWORK else st
        for d in descriptors:
            if d.name in net or d.name in st:
                raise SfcError(f"duplicate field {d.name!r}")
            target[d.name] = d
        return FieldCatalog(net, st)

    def scope_of(self, name: str) -> Optional[Scope]:
        if name in self.network_fields:
            return Scope.NETWORK
        if name in self.state_fields:
            return Scope.STATE
        return None

    def lookup(self, name: str) -> FieldDescriptor:
        d = self.network_fields.get(name) or self.state_fields.get(name)
        if d is None:
            raise UnknownFieldError(name)
        return d

    def network(self, name: str) -> FieldDescriptor:
        try:
            return self.network_fields[name]
        except KeyError:
            raise UnknownFieldError(name, "network field") from None

    def state(self, name: str) -> FieldDescriptor:
        try:
            return self.state_fields[name]
        except KeyError:
            raise UnknownFieldError(name, "state field") from None

    def __hash__(self):
        return hash((tuple(sorted(self.network_fields)), tuple(sorted(self.state_fields))))


DEFAULT_CATALOG = FieldCatalog.build(
    network=[
        FieldDescriptor("ip_src", ValueKind.IP_ADDRESS, 32),
        FieldDescriptor("ip_dst", ValueKind.IP_ADDRESS, 32),
        FieldDescriptor("port_src", ValueKind.PORT, 16),
        FieldDescriptor("port_dst", ValueKind.PORT, 16),
        FieldDescriptor("proto", ValueKind.ENUM, 8),
        FieldDescriptor("http_method", ValueKind.ENUM, 64),
        FieldDescriptor("PL_4", ValueKind.PAYLOAD, 65535 * 8),
        FieldDescriptor("outer_ip_src", ValueKind.IP_ADDRESS, 32),
        FieldDescriptor("outer_ip_dst", ValueKind.IP_ADDRESS, 32),
    ],
)
