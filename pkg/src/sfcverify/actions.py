"""The action space: parameterized transformers of (packet, state) pairs.

Null packets pass through every action untouched, so a drop is final.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping, Sequence, Tuple, Union

from .errors import ActionError, KindError
from .fields import DEFAULT_CATALOG, FieldCatalog, ValueKind
from .model import NULL_PACKET, FrozenMap, Packet, State
from .values import Encrypted, EncryptionParams, is_wildcard


@dataclass(frozen=True)
class SetTo:
    value: Any


@dataclass(frozen=True)
class Delta:
    amount: int


StateUpdate = Union[SetTo, Delta]


def _frozen(mapping: Mapping[str, Any], what: str) -> FrozenMap:
    fm = mapping if isinstance(mapping, FrozenMap) else FrozenMap(mapping)
    for name, value in fm.items():
        if is_wildcard(value):
            raise KindError(f"{what} for {name!r} must be concrete, not a wildcard")
    return fm


@dataclass(frozen=True)
class Allow:
    pass


@dataclass(frozen=True)
class Deny:
    pass


@dataclass(frozen=True)
class ModNf:
    assignments: FrozenMap

    def __post_init__(self):
        object.__setattr__(self, "assignments", _frozen(self.assignments, "assignment"))


@dataclass(frozen=True)
class ModSf:
    updates: FrozenMap

    def __post_init__(self):
        fm = self.updates if isinstance(self.updates, FrozenMap) else FrozenMap(self.updates)
        for name, upd in fm.items():
            if not isinstance(upd, (SetTo, Delta)):
                raise KindError(f"state update for {name!r} must be SetTo or Delta")
            if isinstance(upd, SetTo) and is_wildcard(upd.value):
                raise KindError(f"state update for {name!r} must be concrete")
        object.__setattr__(self, "updates", fm)


@dataclass(frozen=True)
class Encapsulate:
    added: FrozenMap
    inner_into: Union[str, None] = None

    def __post_init__(self):
        object.__setattr__(self, "added", _frozen(self.added, "outer field"))


@dataclass(frozen=True)
class Encrypt:
    targets: Tuple[str, ...]
    params: EncryptionParams

    def __post_init__(self):
        targets = (self.targets,) if isinstance(self.targets, str) else tuple(self.targets)
        if not targets:
            raise KindError("encrypt needs at least one target field")
        object.__setattr__(self, "targets", targets)
        if isinstance(self.params, str):
            object.__setattr__(self, "params", EncryptionParams(self.params))


ActionSpec = Union[Allow, Deny, ModNf, ModSf, Encapsulate, Encrypt]
ACTION_TYPES = (Allow, Deny, ModNf, ModSf, Encapsulate, Encrypt)

Pair = Tuple[Packet, State]


def act_allow(p: Packet, s: State) -> Pair:
    return p, s


def act_deny(p: Packet, s: State) -> Pair:
    return NULL_PACKET, s


def act_mod_nf(p: Packet, s: State, assignments: Mapping[str, Any],
               catalog: FieldCatalog = DEFAULT_CATALOG) -> Pair:
    for name in assignments:
        catalog.network(name)
    if p.is_null or not assignments:
        return p, s
    return p.set(assignments), s


def act_mod_sf(p: Packet, s: State, updates: Mapping[str, StateUpdate],
               catalog: FieldCatalog = DEFAULT_CATALOG) -> Pair:
    for name, upd in updates.items():
        d = catalog.state(name)
        if isinstance(upd, Delta) and d.kind is not ValueKind.COUNTER:
            raise KindError(f"delta update on non-counter state field {name!r}")
    if p.is_null:
        return p, s
    new = {}
    for name, upd in updates.items():
        if isinstance(upd, Delta):
            current = new.get(name, s.get(name, 0))
            if isinstance(current, bool) or not isinstance(current, int):
                raise KindError(f"counter {name!r} holds non-integer value {current!r}")
            new[name] = current + upd.amount
        else:
            new[name] = upd.value
    return p, s.set(new)


def act_encapsulate(p: Packet, s: State, added: Mapping[str, Any],
                    inner_into: Union[str, None] = None,
                    catalog: FieldCatalog = DEFAULT_CATALOG) -> Pair:
    """Wrap ``p`` in new outer fields.

    With ``inner_into`` set, every current field moves into a nested packet
    stored under that field, and ``added`` becomes the outer header.
    Without it, ``added`` fields are inserted next to the existing ones.
    """
    for name in added:
        catalog.network(name)
    if inner_into is not None:
        d = catalog.network(inner_into)
        if d.kind is not ValueKind.PAYLOAD:
            raise KindError(f"cannot nest a packet inside {d.kind.value} field {inner_into!r}")
        if inner_into in added:
            raise ActionError(f"outer field {inner_into!r} collides with the inner payload field")
    if p.is_null:
        return p, s
    if inner_into is None:
        clash = sorted(set(added) & set(p))
        if clash:
            raise ActionError(f"encapsulation would overwrite existing fields {clash}")
        return p.set(added), s
    outer = dict(added)
    outer[inner_into] = Packet(p)
    return Packet(outer), s


def act_encrypt(p: Packet, s: State, targets: Sequence[str], params: EncryptionParams,
                catalog: FieldCatalog = DEFAULT_CATALOG) -> Pair:
    for name in targets:
        catalog.network(name)
    if p.is_null:
        return p, s
    missing = [t for t in targets if t not in p]
    if missing:
        raise ActionError(f"cannot encrypt fields missing from packet: {missing}")
    return p.set({t: Encrypted(params, hidden=p[t]) for t in targets}), s


def apply_action(a: ActionSpec, p: Packet, s: State,
                 catalog: FieldCatalog = DEFAULT_CATALOG) -> Pair:
    if isinstance(a, Allow):
        return act_allow(p, s)
    if isinstance(a, Deny):
        return act_deny(p, s)
    if isinstance(a, ModNf):
        return act_mod_nf(p, s, a.assignments, catalog)
    if isinstance(a, ModSf):
        return act_mod_sf(p, s, a.updates, catalog)
    if isinstance(a, Encapsulate):
        return act_encapsulate(p, s, a.added, a.inner_into, catalog)
    if isinstance(a, Encrypt):
        return act_encrypt(p, s, a.targets, a.params, catalog)
    raise ActionError(f"unknown action {a!r}")


def apply_actions(actions: Sequence[ActionSpec], p: Packet, s: State,
                  catalog: FieldCatalog = DEFAULT_CATALOG) -> Pair:
    for a in actions:
        p, s = apply_action(a, p, s, catalog)
    return p, s


def state_fields_written(a: ActionSpec) -> frozenset:
    return frozenset(a.updates) if isinstance(a, ModSf) else frozenset()


def validate_action(a: ActionSpec, catalog: FieldCatalog) -> None:
    """Static field/kind checks that do not need a packet."""
    # every act_* validates its parameters before the null pass-through
    apply_action(a, NULL_PACKET, State(), catalog)
