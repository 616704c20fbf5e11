"""Rendering verification reports as text or JSON."""
from __future__ import annotations

import json
from typing import Any, Dict, List, Optional

from .codec import format_mapping, format_packet, render_packet, render_state
from .verify import HopTrace, VerificationReport, VerificationResult, VerifyOptions

REPORT_SCHEMA: Dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["scenario", "chain", "options", "p_true", "p_false", "results"],
    "additionalProperties": False,
    "properties": {
        "scenario": {"type": ["string", "null"]},
        "chain": {"type": "array", "items": {"type": "string"}},
        "options": {
            "type": "object",
            "required": ["absent_mode", "match_mode"],
            "additionalProperties": False,
            "properties": {
                "absent_mode": {"enum": ["paper", "strict"]},
                "match_mode": {"enum": ["subset", "exact"]},
            },
        },
        "p_true": {"type": "array", "items": {"type": "string"}},
        "p_false": {"type": "array", "items": {"type": "string"}},
        "results": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["policy", "verdict", "hops", "final_traffic", "final_state"],
                "additionalProperties": False,
                "properties": {
                    "policy": {"type": "string"},
                    "verdict": {"enum": ["enforced", "violated"]},
                    "mismatch": {"type": "string"},
                    "error": {"type": "string"},
                    "final_traffic": {"$ref": "#/$defs/traffic"},
                    "final_state": {"type": "object"},
                    "hops": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["sf", "decisions", "traffic", "sf_state", "global_state"],
                            "additionalProperties": False,
                            "properties": {
                                "sf": {"type": "string"},
                                "decisions": {"type": "array", "items": {"type": "string"}},
                                "traffic": {"$ref": "#/$defs/traffic"},
                                "sf_state": {"type": "object"},
                                "global_state": {"type": "object"},
                            },
                        },
                    },
                },
            },
        },
    },
    "$defs": {"traffic": {"type": "array", "items": {"type": ["object", "null"]}}},
}


def _hop_dict(h: HopTrace) -> dict:
    return {
        "sf": h.sf,
        "decisions": [step.fired for step in h.packets],
        "traffic": [format_packet(p) for p in h.traffic_out],
        "sf_state": format_mapping(h.sf_state_out),
        "global_state": format_mapping(h.global_out),
    }


def result_to_dict(r: VerificationResult) -> dict:
    out: Dict[str, Any] = {"policy": r.policy, "verdict": r.verdict.value}
    if r.mismatch is not None:
        out["mismatch"] = r.mismatch
    if r.error is not None:
        out["error"] = r.error
    out["final_traffic"] = [format_packet(p) for p in r.final_traffic]
    out["final_state"] = format_mapping(r.final_state)
    out["hops"] = [_hop_dict(h) for h in r.hops]
    return out


def report_to_dict(report: VerificationReport, scenario: Optional[str] = None,
                   chain=(), options: VerifyOptions = VerifyOptions()) -> dict:
    return {
        "scenario": scenario,
        "chain": list(chain),
        "options": {"absent_mode": options.absent_mode.value,
                    "match_mode": options.match_mode.value},
        "p_true": list(report.p_true),
        "p_false": list(report.p_false),
        "results": [result_to_dict(r) for r in report.results],
    }


def render_trace(r: VerificationResult) -> List[str]:
    """Hop-by-hop derivation of one policy run."""
    def traffic(ts):
        return "[" + ", ".join(render_packet(p) for p in ts) + "]"

    lines = [f"policy {r.policy}"]
    if r.hops:
        t0, s0 = r.hops[0].traffic_in, r.hops[0].global_in
    else:
        t0, s0 = r.final_traffic, r.final_state
    lines.append(f"  (T_0, S_0) = ({traffic(t0)}, {render_state(s0)})")
    for i, h in enumerate(r.hops, 1):
        fired = ", ".join(step.fired for step in h.packets) or "no packets"
        lines.append(f"  (T_{i}, S_{i}) = {h.sf}(T_{i - 1}, S_{i - 1}) = "
                     f"({traffic(h.traffic_out)}, {render_state(h.global_out)})   [{fired}]")
    verdict = r.verdict.value.upper()
    detail = r.error or r.mismatch
    lines.append(f"  => {verdict}" + (f": {detail}" if detail else ""))
    return lines


def render_text(report: VerificationReport, scenario: Optional[str] = None, chain=(),
                options: VerifyOptions = VerifyOptions(), trace: bool = False) -> str:
    lines = []
    if scenario:
        lines.append(f"scenario: {scenario}")
    lines.append("chain: " + (" -> ".join(chain) if chain else "(empty)"))
    lines.append(f"options: absent_mode={options.absent_mode.value} "
                 f"match_mode={options.match_mode.value}")
    for r in report.results:
        line = f"{r.policy}: {r.verdict.value}"
        if r.error:
            line += f" (error: {r.error})"
        elif r.mismatch:
            line += f" ({r.mismatch})"
        lines.append(line)
        if trace:
            lines.extend("  " + t for t in render_trace(r)[1:])
    lines.append("P_true = {" + ", ".join(report.p_true) + "}")
    lines.append("P_false = {" + ", ".join(report.p_false) + "}")
    return "\n".join(lines) + "\n"


def emit_report(report: VerificationReport, fmt: str = "text", scenario: Optional[str] = None,
                chain=(), options: VerifyOptions = VerifyOptions(), trace: bool = False) -> str:
    """Render ``report``; the JSON form is byte-stable for equal inputs."""
    if fmt == "json":
        return json.dumps(report_to_dict(report, scenario, chain, options),
                          indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    if fmt == "text":
        return render_text(report, scenario, chain, options, trace)
    raise ValueError(f"unknown report format {fmt!r}")
