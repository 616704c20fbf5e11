"""Policy transformation of single packets and of whole traffics."""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .actions import ActionSpec, apply_action
from .errors import ActionError, SfcError
from .fields import DEFAULT_CATALOG, FieldCatalog
from .model import Packet, State, Traffic
from .policy import AbsentMode, Policy, resolve


@dataclass(frozen=True)
class ActionStep:
    action: ActionSpec
    packet: Packet
    state: State


@dataclass(frozen=True)
class TraceStep:
    """What a policy did to one packet.

    ``rule_index`` is ``None`` when the default action fired; ``skipped``
    marks a null packet, which is never reprocessed.
    """

    packet_in: Packet
    state_in: State
    rule_index: Optional[int]
    steps: Tuple[ActionStep, ...]
    packet_out: Packet
    state_out: State
    skipped: bool = False

    @property
    def fired(self) -> str:
        if self.skipped:
            return "skipped"
        return "default" if self.rule_index is None else f"rule {self.rule_index}"


def transform_packet(policy: Policy, p: Packet, s: State,
                     absent_mode: AbsentMode = AbsentMode.STRICT,
                     catalog: FieldCatalog = DEFAULT_CATALOG) -> Tuple[Packet, State, TraceStep]:
    if p.is_null:
        return p, s, TraceStep(p, s, None, (), p, s, skipped=True)
    ruling = resolve(policy, p, s, absent_mode, catalog)
    cur_p, cur_s = p, s
    steps = []
    for i, action in enumerate(ruling.actions):
        try:
            cur_p, cur_s = apply_action(action, cur_p, cur_s, catalog)
        except SfcError as exc:
            where = "default action" if ruling.is_default else f"rule {ruling.rule_index} action {i}"
            raise ActionError(f"{where} ({type(action).__name__}): {exc}") from exc
        steps.append(ActionStep(action, cur_p, cur_s))
    return cur_p, cur_s, TraceStep(p, s, ruling.rule_index, tuple(steps), cur_p, cur_s)


def transform_traffic(policy: Policy, traffic: Sequence[Packet], s: State,
                      absent_mode: AbsentMode = AbsentMode.STRICT,
                      catalog: FieldCatalog = DEFAULT_CATALOG,
                      ) -> Tuple[Traffic, State, List[TraceStep]]:
    """Left fold of :func:`transform_packet` over ``traffic``.

    State threads from one packet to the next.  Output positions match the
    input; dropped packets stay in place as null packets.
    """
    out, trace = [], []
    for p in traffic:
        p2, s, step = transform_packet(policy, p, s, absent_mode, catalog)
        out.append(p2)
        trace.append(step)
    return tuple(out), s, trace
