"""Verification of security policies enforced by service function chains."""
from .actions import (Allow, Delta, Deny, Encapsulate, Encrypt, ModNf, ModSf, SetTo,
                      act_allow, act_deny, act_encapsulate, act_encrypt, act_mod_nf, act_mod_sf,
                      apply_action, apply_actions)
from .builders import (build_app_firewall, build_nat, build_packet_filter, build_traffic_monitor,
                       build_vpn_gateway)
from .errors import ActionError, KindError, ScenarioError, SfcError, UnknownFieldError
from .fields import DEFAULT_CATALOG, FieldCatalog, FieldDescriptor, Scope, ValueKind
from .model import (EMPTY_STATE, NULL_PACKET, GlobalState, Packet, SfState, State, Traffic,
                    normalize_traffic, packet_equals, packet_get, state_merge)
from .policy import (ANY_NETWORK_FIELD, ANY_STATE_FIELD, AbsentMode, Condition, Policy, Relation,
                     ResolutionStrategy, Rule, Ruling, ServiceFunction, ServiceFunctionChain,
                     condition_satisfied, eval_relation, resolve, rule_matches)
from .report import REPORT_SCHEMA, emit_report
from .scenario import Scenario, load_scenario, parse_scenario, serialize_scenario
from .transform import TraceStep, transform_packet, transform_traffic
from .values import SENTINEL, WILDCARD, Encrypted, EncryptionParams
from .verify import (MatchMode, TrafficPattern, Verdict, VerificationPolicy, VerificationReport,
                     VerificationResult, VerifyOptions, match_state, match_traffic, verify_all,
                     verify_policy)

__version__ = "0.1.0"
