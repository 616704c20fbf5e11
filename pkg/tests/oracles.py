"""Brute-force reference evaluators, written without the engine's helpers.

They cover the value domains produced by ``strategies`` only.
"""
import ipaddress

from sfcverify import Encrypted, Relation


def _as_int(v):
    if isinstance(v, (ipaddress.IPv4Address,)):
        return int(v)
    return v


def _members(container):
    if isinstance(container, ipaddress.IPv4Network):
        lo = int(container.network_address)
        return set(range(lo, lo + container.num_addresses))
    if isinstance(container, range):
        return set(container)
    return {_as_int(x) for x in container}


def naive_eval(lhs, rel, rhs):
    if rel is Relation.ANY:
        return True
    if isinstance(lhs, Encrypted):
        return rel is Relation.EQ and isinstance(rhs, Encrypted)
    if isinstance(rhs, Encrypted):
        return rel is Relation.NE
    a, b = _as_int(lhs), rhs
    table = {
        Relation.EQ: lambda: a == _as_int(b),
        Relation.NE: lambda: a != _as_int(b),
        Relation.LT: lambda: a < _as_int(b),
        Relation.LE: lambda: a <= _as_int(b),
        Relation.GT: lambda: a > _as_int(b),
        Relation.GE: lambda: a >= _as_int(b),
        Relation.IN: lambda: a in _members(b),
        Relation.NOT_IN: lambda: a not in _members(b),
        Relation.SUBSET: lambda: a in _members(b),
    }
    return table[rel]()


def naive_condition(c, p, state, absent_ok=False):
    source = state if c.field == "hits" else p
    if c.field not in source:
        return absent_ok
    return naive_eval(source[c.field], c.relation, c.operand)


def first_match(policy, p, state, absent_ok=False):
    """Evaluate every rule, then pick the lowest matching index."""
    if p.is_null:
        return None
    hits = [i for i, r in enumerate(policy.rules)
            if all(naive_condition(c, p, state, absent_ok) for c in r.conditions)]
    return min(hits) if hits else None
