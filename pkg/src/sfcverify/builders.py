"""Constructors for common service-function archetypes."""
from __future__ import annotations

from typing import Any, Iterable, Mapping, Sequence, Tuple, Union

from .actions import Allow, Delta, Deny, Encapsulate, Encrypt, ModNf, ModSf
from .errors import KindError
from .fields import DEFAULT_CATALOG, FieldCatalog, ValueKind
from .model import State
from .policy import Condition, Policy, Rule, ServiceFunction, validate_service_function
from .values import EncryptionParams

_VERDICTS = {"allow": Allow, "deny": Deny}


def _validated(sf: ServiceFunction, catalog: FieldCatalog) -> ServiceFunction:
    validate_service_function(sf, catalog)
    return sf


def build_traffic_monitor(watch: Iterable[Condition], counter: str, *, name: str = "TM",
                          catalog: FieldCatalog = DEFAULT_CATALOG) -> ServiceFunction:
    """Count packets matching ``watch`` in ``counter``; forward everything."""
    if catalog.state(counter).kind is not ValueKind.COUNTER:
        raise KindError(f"{counter!r} is not an integer-counter state field")
    rule = Rule(tuple(watch), (ModSf({counter: Delta(1)}),))
    return _validated(ServiceFunction(name, Policy((rule,)), State({counter: 0})), catalog)


def build_app_firewall(block: Iterable[Condition], *, name: str = "AF",
                       catalog: FieldCatalog = DEFAULT_CATALOG) -> ServiceFunction:
    rule = Rule(tuple(block), (Deny(),))
    return _validated(ServiceFunction(name, Policy((rule,))), catalog)


def build_vpn_gateway(select: Iterable[Condition], outer: Mapping[str, Any], inner_into: str,
                      enc: Union[EncryptionParams, str], *, name: str = "VG",
                      catalog: FieldCatalog = DEFAULT_CATALOG) -> ServiceFunction:
    """Tunnel selected packets: wrap them under ``outer`` headers with the
    original packet nested in ``inner_into``, then encrypt that field."""
    if isinstance(enc, str):
        enc = EncryptionParams(enc)
    rule = Rule(tuple(select), (Encapsulate(outer, inner_into), Encrypt((inner_into,), enc)))
    return _validated(ServiceFunction(name, Policy((rule,))), catalog)


def build_packet_filter(rules: Sequence[Tuple[Iterable[Condition], str]], default: str = "allow",
                        *, name: str = "PF",
                        catalog: FieldCatalog = DEFAULT_CATALOG) -> ServiceFunction:
    try:
        built = tuple(Rule(tuple(conds), (_VERDICTS[verdict](),)) for conds, verdict in rules)
        default_action = _VERDICTS[default]()
    except KeyError as exc:
        raise KindError(f"packet filter verdict must be allow or deny, got {exc.args[0]!r}") from None
    return _validated(ServiceFunction(name, Policy(built, default_action=default_action)), catalog)


def build_nat(select: Iterable[Condition], rewrite: Mapping[str, Any], *, name: str = "NAT",
              catalog: FieldCatalog = DEFAULT_CATALOG) -> ServiceFunction:
    rule = Rule(tuple(select), (ModNf(rewrite),))
    return _validated(ServiceFunction(name, Policy((rule,))), catalog)
