"""Packets, traffic and state tables.

All containers here are immutable; every operation returns a new value.
"""
from __future__ import annotations

from typing import Any, Iterable, Iterator, Mapping, Optional, Sequence, Tuple, Union

from .errors import KindError
from .fields import DEFAULT_CATALOG, FieldCatalog
from .values import is_wildcard

Traffic = Tuple["Packet", ...]


class FrozenMap(Mapping[str, Any]):
    """Immutable, hashable string-keyed mapping."""

    __slots__ = ("_data", "_hash")

    def __init__(self, entries: Union[Mapping[str, Any], Iterable[Tuple[str, Any]]] = ()):
        self._data = dict(entries)
        self._hash = None

    def __getitem__(self, key: str) -> Any:
        return self._data[key]

    def __iter__(self) -> Iterator[str]:
        return iter(self._data)

    def __len__(self) -> int:
        return len(self._data)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((type(self).__name__, frozenset(self._data.items())))
        return self._hash

    def __eq__(self, other: object) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return self._data == other._data

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self._data!r})"

    def _with(self, updates: Mapping[str, Any]):
        data = dict(self._data)
        data.update(updates)
        return type(self)(data)


class Packet(FrozenMap):
    """A finite map from network-field names to values.

    The null packet (``NULL_PACKET``) models a dropped packet: it has no
    fields and compares equal only to itself.  An empty non-null packet is
    a different value.
    """

    __slots__ = ("is_null",)

    def __init__(self, entries=(), *, null: bool = False):
        super().__init__(entries)
        if null and self._data:
            raise KindError("the null packet carries no fields")
        for name, value in self._data.items():
            if is_wildcard(value):
                raise KindError(f"packet field {name!r} holds a wildcard")
        self.is_null = null

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Packet):
            return NotImplemented
        return self.is_null == other.is_null and self._data == other._data

    def __hash__(self) -> int:
        return hash(("null",)) if self.is_null else super().__hash__()

    def __repr__(self) -> str:
        if self.is_null:
            return "∅"
        return "{" + ", ".join(f"({k}, {v!r})" for k, v in self._data.items()) + "}"

    def set(self, updates: Mapping[str, Any]) -> "Packet":
        if self.is_null:
            return self
        return self._with(updates)

    def without(self, names: Iterable[str]) -> "Packet":
        drop = set(names)
        return Packet({k: v for k, v in self._data.items() if k not in drop})


NULL_PACKET = Packet(null=True)


class State(FrozenMap):
    """State table of one service function, or the merged chain state."""

    __slots__ = ()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, State):
            return NotImplemented
        return self._data == other._data

    __hash__ = FrozenMap.__hash__

    def __repr__(self) -> str:
        return "{" + ", ".join(f"({k}, {v!r})" for k, v in self._data.items()) + "}"

    def set(self, updates: Mapping[str, Any]) -> "State":
        return self._with(updates)

    def restrict(self, names: Iterable[str]) -> "State":
        keep = set(names)
        return State({k: v for k, v in self._data.items() if k in keep})


SfState = State
GlobalState = State
EMPTY_STATE = State()


def packet_get(p: Packet, name: str, catalog: FieldCatalog = DEFAULT_CATALOG) -> Optional[Any]:
    """Value of network field ``name`` in ``p``, or ``None`` when absent."""
    catalog.network(name)
    return p.get(name)


def packet_equals(p1: Packet, p2: Packet) -> bool:
    return p1 == p2


def state_merge(acc: State, s: Mapping[str, Any]) -> State:
    """Key-wise union; on shared keys the value from ``s`` wins."""
    return acc.set(s) if s else acc


def normalize_traffic(traffic: Sequence[Packet]) -> Traffic:
    """Drop null packets, keeping survivors in order."""
    return tuple(p for p in traffic if not p.is_null)


def validate_packet(p: Packet, catalog: FieldCatalog) -> None:
    for name in p:
        catalog.network(name)


def validate_state(s: Mapping[str, Any], catalog: FieldCatalog) -> None:
    for name in s:
        catalog.state(name)
