"""Chain verification: push each policy's traffic through the chain and
check the outcome against the expected traffic and state."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import SfcError
from .fields import DEFAULT_CATALOG, FieldCatalog
from .model import EMPTY_STATE, FrozenMap, Packet, State, Traffic, normalize_traffic, state_merge
from .policy import AbsentMode, ServiceFunctionChain
from .transform import TraceStep, transform_traffic
from .values import contains, is_container, is_encrypted, is_wildcard


class MatchMode(str, Enum):
    SUBSET = "subset"
    EXACT = "exact"


class Verdict(str, Enum):
    ENFORCED = "enforced"
    VIOLATED = "violated"


@dataclass(frozen=True)
class TrafficPattern:
    """Expected output traffic.  Pattern values may be wildcards or the
    encrypted sentinel; ``match_mode`` of ``None`` defers to the run options."""

    packets: Tuple[FrozenMap, ...] = ()
    match_mode: Optional[MatchMode] = None

    def __post_init__(self):
        object.__setattr__(self, "packets", tuple(
            p if isinstance(p, FrozenMap) and not isinstance(p, Packet) else FrozenMap(p)
            for p in self.packets))


@dataclass(frozen=True)
class VerificationPolicy:
    name: str
    input_traffic: Traffic
    initial_state: State = EMPTY_STATE
    expected_traffic: TrafficPattern = field(default_factory=TrafficPattern)
    expected_state: State = EMPTY_STATE

    def __post_init__(self):
        object.__setattr__(self, "input_traffic", tuple(self.input_traffic))
        if not isinstance(self.initial_state, State):
            object.__setattr__(self, "initial_state", State(self.initial_state))
        if not isinstance(self.expected_state, State):
            object.__setattr__(self, "expected_state", State(self.expected_state))
        if not isinstance(self.expected_traffic, TrafficPattern):
            object.__setattr__(self, "expected_traffic", TrafficPattern(self.expected_traffic))


@dataclass(frozen=True)
class VerifyOptions:
    absent_mode: AbsentMode = AbsentMode.STRICT
    match_mode: MatchMode = MatchMode.SUBSET
    catalog: FieldCatalog = DEFAULT_CATALOG

    def __post_init__(self):
        object.__setattr__(self, "absent_mode", AbsentMode(self.absent_mode))
        object.__setattr__(self, "match_mode", MatchMode(self.match_mode))


@dataclass(frozen=True)
class HopTrace:
    """One service function's contribution to a policy run."""

    sf: str
    traffic_in: Traffic
    global_in: State
    sf_state_in: State
    traffic_out: Traffic
    sf_state_out: State
    global_out: State
    packets: Tuple[TraceStep, ...]


@dataclass(frozen=True)
class VerificationResult:
    policy: str
    verdict: Verdict
    hops: Tuple[HopTrace, ...]
    final_traffic: Traffic
    final_state: State
    mismatch: Optional[str] = None
    error: Optional[str] = None

    @property
    def enforced(self) -> bool:
        return self.verdict is Verdict.ENFORCED


@dataclass(frozen=True)
class VerificationReport:
    results: Tuple[VerificationResult, ...]

    @property
    def p_true(self) -> Tuple[str, ...]:
        return tuple(r.policy for r in self.results if r.enforced)

    @property
    def p_false(self) -> Tuple[str, ...]:
        return tuple(r.policy for r in self.results if not r.enforced)

    @property
    def has_errors(self) -> bool:
        return any(r.error for r in self.results)

    def __getitem__(self, policy: str) -> VerificationResult:
        for r in self.results:
            if r.policy == policy:
                return r
        raise KeyError(policy)


def value_matches(actual: Any, pattern: Any) -> bool:
    if is_wildcard(pattern):
        return True
    if is_encrypted(pattern):
        if not is_encrypted(actual):
            return False
        return pattern.params is None or pattern == actual
    if is_encrypted(actual):
        return False
    if is_container(pattern) and not is_container(actual):
        try:
            return contains(pattern, actual)
        except SfcError:
            return False
    return actual == pattern


def traffic_mismatch(actual: Sequence[Packet], expected: TrafficPattern,
                     mode: MatchMode = MatchMode.SUBSET) -> Optional[str]:
    """Describe the first difference between ``actual`` and ``expected``,
    or return ``None`` when they match."""
    mode = MatchMode(expected.match_mode or mode)
    got = normalize_traffic(actual)
    want = expected.packets
    for i, (p, pat) in enumerate(zip(got, want)):
        for name, pv in pat.items():
            if name not in p:
                return f"packet {i}: field {name} missing (expected {pv!r})"
            if not value_matches(p[name], pv):
                return f"packet {i}: field {name} is {p[name]!r}, expected {pv!r}"
        if mode is MatchMode.EXACT:
            extra = sorted(set(p) - set(pat))
            if extra:
                return f"packet {i}: unexpected field {extra[0]} under exact matching"
    if len(got) != len(want):
        return f"traffic has {len(got)} packet(s) after drops, expected {len(want)}"
    return None


def match_traffic(actual: Sequence[Packet], expected: TrafficPattern,
                  mode: MatchMode = MatchMode.SUBSET) -> bool:
    return traffic_mismatch(actual, expected, mode) is None


def state_mismatch(actual: Mapping[str, Any], expected: Mapping[str, Any]) -> Optional[str]:
    for key, want in expected.items():
        if key not in actual:
            return f"state {key} missing (expected {want!r})"
        if not value_matches(actual[key], want):
            return f"state {key} is {actual[key]!r}, expected {want!r}"
    return None


def match_state(actual: Mapping[str, Any], expected: Mapping[str, Any]) -> bool:
    return state_mismatch(actual, expected) is None


def verify_policy(chain: ServiceFunctionChain, v: VerificationPolicy,
                  options: VerifyOptions = VerifyOptions()) -> VerificationResult:
    traffic: Traffic = tuple(v.input_traffic)
    glob = v.initial_state
    hops: List[HopTrace] = []
    for sf in chain:
        sf_state = sf.state.set(glob.restrict(sf.owned_state_fields()))
        try:
            out, sf_out, steps = transform_traffic(
                sf.policy, traffic, sf_state, options.absent_mode, options.catalog)
        except SfcError as exc:
            return VerificationResult(
                v.name, Verdict.VIOLATED, tuple(hops), traffic, glob,
                error=f"service function {sf.name}: {exc}")
        new_glob = state_merge(glob, sf_out)
        hops.append(HopTrace(sf.name, traffic, glob, sf_state, out, sf_out, new_glob, tuple(steps)))
        traffic, glob = out, new_glob

    mismatch = traffic_mismatch(traffic, v.expected_traffic, options.match_mode) \
        or state_mismatch(glob, v.expected_state)
    verdict = Verdict.ENFORCED if mismatch is None else Verdict.VIOLATED
    return VerificationResult(v.name, verdict, tuple(hops), traffic, glob, mismatch)


def verify_all(chain: ServiceFunctionChain, policies: Iterable[VerificationPolicy],
               options: VerifyOptions = VerifyOptions(),
               max_workers: Optional[int] = None) -> VerificationReport:
    """Verify every policy independently; the report keeps input order."""
    policies = list(policies)
    if max_workers and max_workers > 1 and len(policies) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(lambda v: verify_policy(chain, v, options), policies))
    else:
        results = [verify_policy(chain, v, options) for v in policies]
    return VerificationReport(tuple(results))
