"""Field values.

Concrete values are plain Python objects: ``ipaddress`` addresses, ``int``
and ``str`` scalars, and a nested :class:`~sfcverify.model.Packet` for an
encapsulated inner packet.  Sets of values are ``ipaddress`` networks,
``frozenset`` and ``range``.  Two markers complete the picture:
:data:`WILDCARD` (any value, patterns only) and :class:`Encrypted`.
"""
from __future__ import annotations

import ipaddress
from dataclasses import dataclass, field
from typing import Any, Optional

from .errors import KindError

Address = (ipaddress.IPv4Address, ipaddress.IPv6Address)
Network = (ipaddress.IPv4Network, ipaddress.IPv6Network)


class _Wildcard:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "*"

    def __reduce__(self):
        return (_Wildcard, ())


WILDCARD = _Wildcard()


@dataclass(frozen=True)
class EncryptionParams:
    spec: str

    def __post_init__(self):
        if not self.spec:
            raise KindError("encryption params must be non-empty")


@dataclass(frozen=True)
class Encrypted:
    """An opaque encrypted value.

    The plaintext is kept in ``hidden`` for future use but never takes part
    in equality or condition evaluation.
    """

    params: Optional[EncryptionParams] = None
    hidden: Any = field(default=None, compare=False, repr=False)

    def __repr__(self):
        return "•" if self.params is None else f"•[{self.params.spec}]"


SENTINEL = Encrypted()


def is_wildcard(v: Any) -> bool:
    return v is WILDCARD


def is_encrypted(v: Any) -> bool:
    return isinstance(v, Encrypted)


def is_container(v: Any) -> bool:
    return isinstance(v, (frozenset, range) + Network)


def _scalar_family(v: Any) -> str:
    if isinstance(v, bool):
        return "bool"
    if isinstance(v, int):
        return "int"
    if isinstance(v, ipaddress.IPv4Address):
        return "ip4"
    if isinstance(v, ipaddress.IPv6Address):
        return "ip6"
    if isinstance(v, str):
        return "str"
    return type(v).__name__


def comparable(a: Any, b: Any) -> bool:
    """True when ``a`` and ``b`` admit an ordering comparison."""
    fa, fb = _scalar_family(a), _scalar_family(b)
    return fa == fb and fa in ("int", "ip4", "ip6")


def contains(container: Any, item: Any) -> bool:
    """Membership of a scalar in a network, range or frozenset."""
    if isinstance(container, Network):
        return isinstance(item, Address) and item.version == container.version \
            and item in container
    if isinstance(container, range):
        return isinstance(item, int) and not isinstance(item, bool) and item in container
    if isinstance(container, frozenset):
        for elem in container:
            if elem == item and _scalar_family(elem) == _scalar_family(item):
                return True
            if is_container(elem) and contains(elem, item):
                return True
        return False
    raise KindError(f"{container!r} is not a set of values")


def subset(a: Any, b: Any) -> bool:
    """Non-strict containment of set ``a`` in set ``b``.

    A scalar ``a`` is read as the singleton ``{a}``.
    """
    if not is_container(a):
        return contains(b, a)
    if isinstance(a, Network):
        if isinstance(b, Network):
            return a.version == b.version and a.subnet_of(b)
        if isinstance(b, frozenset):
            return any(
                (e == a) or (isinstance(e, Network) and e.version == a.version and a.subnet_of(e))
                for e in b
            ) or (a.num_addresses == 1 and contains(b, a.network_address))
        return False
    if isinstance(a, range):
        if len(a) == 0:
            return True
        if isinstance(b, range):
            return a.step == 1 and b.step == 1 and a.start >= b.start and a.stop <= b.stop
        if isinstance(b, frozenset):
            return all(contains(b, x) for x in a)
        return False
    # frozenset
    return all(subset(e, b) if is_container(e) else contains(b, e) for e in a)
