"""Textual encoding of field values, shared by scenario files and reports.

    "*"            wildcard (patterns and conditions only)
    "<enc>"        encrypted sentinel; "<enc:SPEC>" carries encryption params
    "10.0.0.1"     address;  "10.0.0.0/24" or "10.0.0.*" a network
    "1024-2048"    inclusive port/integer range
    [a, b, ...]    a set of values
    {field: ...}   a nested packet (payload fields only)
"""
from __future__ import annotations

import ipaddress
import re
from typing import Any, Mapping, Optional

from .errors import KindError
from .fields import FieldCatalog, ValueKind
from .model import NULL_PACKET, Packet
from .values import (WILDCARD, Address, Encrypted, EncryptionParams, Network, SENTINEL,
                     is_wildcard)

_ENC = re.compile(r"^<enc(?::(.+))?>$")
_RANGE = re.compile(r"^\s*(\d+)\s*-\s*(\d+)\s*$")


def _special(raw: Any, pattern: bool) -> Any:
    if not isinstance(raw, str):
        return None
    if raw == "*":
        if not pattern:
            raise KindError("wildcard '*' is only allowed in conditions and expected traffic")
        return WILDCARD
    m = _ENC.match(raw)
    if m:
        return Encrypted(EncryptionParams(m.group(1))) if m.group(1) else SENTINEL
    return None


def _ip(raw: Any) -> Any:
    if not isinstance(raw, str):
        raise KindError(f"expected an IP address or prefix, got {raw!r}")
    text = raw.strip()
    if "*" in text:
        octets = text.split(".")
        if len(octets) != 4 or any(o == "*" for o in octets[:octets.index("*")]) \
                or any(o != "*" for o in octets[octets.index("*"):]):
            raise KindError(f"malformed address pattern {raw!r}")
        fixed = octets.index("*")
        text = ".".join(octets[:fixed] + ["0"] * (4 - fixed)) + f"/{8 * fixed}"
    try:
        if "/" in text:
            return ipaddress.ip_network(text)
        return ipaddress.ip_address(text)
    except ValueError as exc:
        raise KindError(str(exc)) from None


def _int(raw: Any, lo: int = None, hi: int = None) -> Any:
    if isinstance(raw, bool):
        raise KindError(f"expected an integer, got {raw!r}")
    if isinstance(raw, int):
        value = raw
    elif isinstance(raw, str) and _RANGE.match(raw):
        a, b = (int(x) for x in _RANGE.match(raw).groups())
        if a > b:
            raise KindError(f"empty range {raw!r}")
        value = range(a, b + 1)
        if (lo is not None and a < lo) or (hi is not None and b > hi):
            raise KindError(f"range {raw!r} outside [{lo}, {hi}]")
        return value
    else:
        raise KindError(f"expected an integer, got {raw!r}")
    if (lo is not None and value < lo) or (hi is not None and value > hi):
        raise KindError(f"{value} outside [{lo}, {hi}]")
    return value


def _token(raw: Any) -> str:
    if isinstance(raw, bool) or not isinstance(raw, (str, int)):
        raise KindError(f"expected a text token, got {raw!r}")
    return str(raw)


def parse_value(raw: Any, kind: ValueKind, catalog: Optional[FieldCatalog] = None, *,
                pattern: bool = False) -> Any:
    """Decode ``raw`` (as loaded from YAML/JSON) into a value of ``kind``."""
    special = _special(raw, pattern)
    if special is not None:
        return special
    if isinstance(raw, list):
        if not raw:
            raise KindError("empty value set")
        return frozenset(parse_value(x, kind, catalog, pattern=False) for x in raw)
    kind = ValueKind(kind)
    if kind in (ValueKind.IP_ADDRESS, ValueKind.IP_PREFIX_SET):
        return _ip(raw)
    if kind is ValueKind.PORT:
        return _int(raw, 0, 65535)
    if kind is ValueKind.COUNTER:
        return _int(raw)
    if kind in (ValueKind.ENUM, ValueKind.TEXT):
        return _token(raw)
    if kind is ValueKind.PAYLOAD:
        if isinstance(raw, Mapping):
            if catalog is None:
                raise KindError("nested packet needs a field catalog")
            return parse_packet(raw, catalog)
        return _token(raw)
    raise KindError(f"unsupported value kind {kind!r}")


def parse_untyped(raw: Any, *, pattern: bool = True) -> Any:
    """Best-effort decoding when no field kind is known."""
    special = _special(raw, pattern)
    if special is not None:
        return special
    if isinstance(raw, list):
        return frozenset(parse_untyped(x, pattern=False) for x in raw)
    if isinstance(raw, bool):
        raise KindError(f"unsupported value {raw!r}")
    if isinstance(raw, int):
        return raw
    if isinstance(raw, str):
        if _RANGE.match(raw):
            return _int(raw)
        try:
            return _ip(raw)
        except KindError:
            return raw
    raise KindError(f"unsupported value {raw!r}")


def parse_packet(raw: Optional[Mapping[str, Any]], catalog: FieldCatalog) -> Packet:
    if raw is None:
        return NULL_PACKET
    if not isinstance(raw, Mapping):
        raise KindError(f"a packet is a mapping of fields, got {raw!r}")
    return Packet({name: parse_value(v, catalog.network(name).kind, catalog)
                   for name, v in raw.items()})


def _sort_key(v: Any):
    if isinstance(v, Address):
        return (0, v.version, int(v), 0)
    if isinstance(v, Network):
        return (1, v.version, int(v.network_address), v.prefixlen)
    if isinstance(v, int):
        return (2, v, 0, 0)
    if isinstance(v, range):
        return (3, v.start, v.stop, 0)
    return (4, str(v), 0, 0)


def format_value(v: Any) -> Any:
    """Inverse of :func:`parse_value`: a YAML/JSON-ready representation."""
    if is_wildcard(v):
        return "*"
    if isinstance(v, Encrypted):
        return "<enc>" if v.params is None else f"<enc:{v.params.spec}>"
    if isinstance(v, Packet):
        return format_packet(v)
    if isinstance(v, Address):
        return str(v)
    if isinstance(v, Network):
        return v.with_prefixlen
    if isinstance(v, range):
        return f"{v.start}-{v.stop - 1}"
    if isinstance(v, frozenset):
        return [format_value(x) for x in sorted(v, key=_sort_key)]
    if isinstance(v, (int, str)) and not isinstance(v, bool):
        return v
    raise KindError(f"cannot encode value {v!r}")


def format_packet(p: Packet) -> Optional[dict]:
    if p.is_null:
        return None
    return {k: format_value(v) for k, v in p.items()}


def format_mapping(m: Mapping[str, Any]) -> dict:
    return {k: format_value(v) for k, v in m.items()}


def render_value(v: Any) -> str:
    """Compact one-line rendering for human-readable output."""
    if isinstance(v, Packet):
        return render_packet(v)
    enc = format_value(v)
    if isinstance(enc, list):
        return "{" + ", ".join(map(str, enc)) + "}"
    return str(enc)


def render_packet(p: Packet) -> str:
    if p.is_null:
        return "DROPPED"
    return "{" + ", ".join(f"({k}, {render_value(v)})" for k, v in p.items()) + "}"


def render_state(s: Mapping[str, Any]) -> str:
    return "{" + ", ".join(f"({k}, {render_value(v)})" for k, v in s.items()) + "}"
