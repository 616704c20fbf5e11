"""Conditions, rules, policies and first-match rule resolution."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable, Mapping, Optional, Tuple

from .actions import ActionSpec, Allow, state_fields_written
from .errors import KindError, SfcError
from .fields import DEFAULT_CATALOG, FieldCatalog, Scope
from .model import EMPTY_STATE, Packet, State
from .values import (comparable, contains, is_container, is_encrypted,
                     is_wildcard, subset)

ANY_NETWORK_FIELD = "<any-network>"
ANY_STATE_FIELD = "<any-state>"


class Relation(str, Enum):
    EQ = "="
    NE = "!="
    LT = "<"
    LE = "<="
    GT = ">"
    GE = ">="
    IN = "in"
    NOT_IN = "not_in"
    SUBSET = "subset"
    NOT_SUPERSET = "not_superset"
    ANY = "*"

    @classmethod
    def parse(cls, token: str) -> "Relation":
        token = token.strip()
        rel = _ALIASES.get(token)
        if rel is None:
            try:
                rel = cls(token)
            except ValueError:
                raise SfcError(f"unsupported relation {token!r}") from None
        return rel


_ALIASES = {
    "==": Relation.EQ, "≠": Relation.NE, "≤": Relation.LE, "≥": Relation.GE,
    "∈": Relation.IN, "∉": Relation.NOT_IN, "⊂": Relation.SUBSET, "⊆": Relation.SUBSET,
    "⊉": Relation.NOT_SUPERSET,
}


class AbsentMode(str, Enum):
    """How a condition on a field missing from the packet/state evaluates.

    ``PAPER`` treats absence as satisfying the condition; ``STRICT`` treats
    it as failing.
    """

    PAPER = "paper"
    STRICT = "strict"


class ResolutionStrategy(str, Enum):
    FIRST_MATCH = "first-match"


@dataclass(frozen=True)
class Condition:
    field: str
    relation: Relation
    operand: Any

    def __str__(self):
        return f"({self.field}, {self.relation.value}, {self.operand!r})"


@dataclass(frozen=True)
class Rule:
    conditions: Tuple[Condition, ...]
    actions: Tuple[ActionSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "conditions", tuple(self.conditions))
        object.__setattr__(self, "actions", tuple(self.actions))
        if not self.actions:
            raise SfcError("a rule needs at least one action")


@dataclass(frozen=True)
class Policy:
    rules: Tuple[Rule, ...] = ()
    resolution: ResolutionStrategy = ResolutionStrategy.FIRST_MATCH
    default_action: ActionSpec = field(default_factory=Allow)

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        object.__setattr__(self, "resolution", ResolutionStrategy(self.resolution))


@dataclass(frozen=True)
class ServiceFunction:
    name: str
    policy: Policy
    state: State = EMPTY_STATE

    def owned_state_fields(self) -> frozenset:
        """State keys this function declares initially or writes."""
        owned = set(self.state)
        for rule in self.policy.rules:
            for a in rule.actions:
                owned |= state_fields_written(a)
        owned |= state_fields_written(self.policy.default_action)
        return frozenset(owned)


@dataclass(frozen=True)
class ServiceFunctionChain:
    functions: Tuple[ServiceFunction, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "functions", tuple(self.functions))
        names = [sf.name for sf in self.functions]
        dupes = sorted({n for n in names if names.count(n) > 1})
        if dupes:
            raise SfcError(f"duplicate service function names in chain: {dupes}")

    def __iter__(self):
        return iter(self.functions)

    def __len__(self):
        return len(self.functions)

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(sf.name for sf in self.functions)


@dataclass(frozen=True)
class Ruling:
    """Outcome of resolution: the matched rule index, or ``None`` for the default."""

    rule_index: Optional[int]
    actions: Tuple[ActionSpec, ...]

    @property
    def is_default(self) -> bool:
        return self.rule_index is None


def eval_relation(lhs: Any, rel: Relation, rhs: Any) -> bool:
    """Evaluate ``lhs rel rhs``.

    An encrypted left-hand side is only readable as "is encrypted": it
    satisfies ``= <enc>`` and nothing else.
    """
    if rel is Relation.ANY or is_wildcard(rhs):
        return True
    if is_wildcard(lhs):
        raise KindError("wildcard is not a concrete value")
    if is_encrypted(lhs):
        return rel is Relation.EQ and is_encrypted(rhs)
    if is_encrypted(rhs):
        if rel is Relation.EQ:
            return False
        if rel is Relation.NE:
            return True
        raise KindError(f"relation {rel.value!r} is undefined against an encrypted operand")

    if rel in (Relation.EQ, Relation.NE):
        if type(lhs) is not type(rhs) and not comparable(lhs, rhs):
            raise KindError(f"cannot compare {lhs!r} with {rhs!r}")
        same = lhs == rhs
        return same if rel is Relation.EQ else not same

    if rel in (Relation.LT, Relation.LE, Relation.GT, Relation.GE):
        if not comparable(lhs, rhs):
            raise KindError(f"cannot order {lhs!r} against {rhs!r}")
        if rel is Relation.LT:
            return lhs < rhs
        if rel is Relation.LE:
            return lhs <= rhs
        if rel is Relation.GT:
            return lhs > rhs
        return lhs >= rhs

    if rel in (Relation.IN, Relation.NOT_IN):
        if not is_container(rhs):
            raise KindError(f"membership needs a set operand, got {rhs!r}")
        if is_container(lhs) or isinstance(lhs, Packet):
            raise KindError(f"membership needs a scalar subject, got {lhs!r}")
        inside = contains(rhs, lhs)
        return inside if rel is Relation.IN else not inside

    if rel is Relation.SUBSET:
        if not is_container(rhs):
            raise KindError(f"containment needs a set operand, got {rhs!r}")
        if isinstance(lhs, Packet):
            raise KindError("containment is undefined for packets")
        return subset(lhs, rhs)

    if rel is Relation.NOT_SUPERSET:
        if not is_container(lhs):
            raise KindError(f"non-superset needs a set subject, got {lhs!r}")
        if isinstance(rhs, Packet):
            raise KindError("non-superset is undefined for packets")
        return not subset(rhs, lhs)

    raise KindError(f"unsupported relation {rel!r}")


def _existential(values: Iterable[Any], c: Condition) -> bool:
    for v in values:
        try:
            if eval_relation(v, c.relation, c.operand):
                return True
        except KindError:
            continue
    return False


def condition_satisfied(c: Condition, p: Packet, state: Mapping[str, Any] = EMPTY_STATE,
                        absent_mode: AbsentMode = AbsentMode.STRICT,
                        catalog: FieldCatalog = DEFAULT_CATALOG) -> bool:
    """Does packet ``p`` with SF state ``state`` satisfy ``c``?"""
    absent_ok = AbsentMode(absent_mode) is AbsentMode.PAPER
    if c.field == ANY_NETWORK_FIELD:
        values = list(p.values())
        return _existential(values, c) if values else absent_ok
    if c.field == ANY_STATE_FIELD:
        values = list(state.values())
        return _existential(values, c) if values else absent_ok

    scope = catalog.scope_of(c.field)
    if scope is None:
        catalog.lookup(c.field)
    source = p if scope is Scope.NETWORK else state
    if c.field not in source:
        return absent_ok
    return eval_relation(source[c.field], c.relation, c.operand)


def rule_matches(rule: Rule, p: Packet, state: Mapping[str, Any] = EMPTY_STATE,
                 absent_mode: AbsentMode = AbsentMode.STRICT,
                 catalog: FieldCatalog = DEFAULT_CATALOG) -> bool:
    if p.is_null:
        return False
    return all(condition_satisfied(c, p, state, absent_mode, catalog) for c in rule.conditions)


def resolve(policy: Policy, p: Packet, state: Mapping[str, Any] = EMPTY_STATE,
            absent_mode: AbsentMode = AbsentMode.STRICT,
            catalog: FieldCatalog = DEFAULT_CATALOG) -> Ruling:
    if policy.resolution is ResolutionStrategy.FIRST_MATCH:
        for i, rule in enumerate(policy.rules):
            if rule_matches(rule, p, state, absent_mode, catalog):
                return Ruling(i, rule.actions)
        return Ruling(None, (policy.default_action,))
    raise SfcError(f"unsupported resolution strategy {policy.resolution!r}")


def validate_service_function(sf: ServiceFunction, catalog: FieldCatalog) -> None:
    """Check every field reference of ``sf`` against ``catalog``."""
    from .actions import validate_action

    for name in sf.state:
        catalog.state(name)
    actions = [sf.policy.default_action]
    for rule in sf.policy.rules:
        for c in rule.conditions:
            if c.field not in (ANY_NETWORK_FIELD, ANY_STATE_FIELD):
                catalog.lookup(c.field)
        actions.extend(rule.actions)
    for a in actions:
        validate_action(a, catalog)


__all__ = [
    "ANY_NETWORK_FIELD", "ANY_STATE_FIELD", "AbsentMode", "Condition",
    "Policy", "Relation", "ResolutionStrategy", "Rule", "Ruling", "ServiceFunction",
    "ServiceFunctionChain", "condition_satisfied", "eval_relation", "resolve",
    "rule_matches", "validate_service_function",
]
