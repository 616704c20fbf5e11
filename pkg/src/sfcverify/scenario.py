"""Scenario documents: parsing, validation and serialization.

A scenario is a YAML document with the top-level sections ``fields``
(optional), ``service_functions``, ``chain``, ``policies`` and ``options``
(optional).  See ``docs/scenario-format.md`` for the full grammar.
"""
from __future__ import annotations

import re
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, Iterator, List, Mapping, Optional, Tuple, Union

import yaml

from .actions import (ActionSpec, Allow, Delta, Deny, Encapsulate, Encrypt, ModNf, ModSf,
                      SetTo)
from .codec import format_mapping, format_packet, format_value, parse_packet, parse_untyped, \
    parse_value
from .errors import ScenarioError, SfcError
from .fields import DEFAULT_CATALOG, FieldCatalog, FieldDescriptor, Scope, ValueKind
from .model import State
from .policy import (ANY_NETWORK_FIELD, ANY_STATE_FIELD, AbsentMode, Condition, Policy,
                     Relation, ResolutionStrategy, Rule, ServiceFunction, ServiceFunctionChain,
                     validate_service_function)
from .verify import MatchMode, TrafficPattern, VerificationPolicy, VerifyOptions
from .values import EncryptionParams

Path_ = Tuple[Union[str, int], ...]

_DELTA = re.compile(r"^[+-]\d+$")
_SECTIONS = ("fields", "service_functions", "chain", "policies", "options")
_REQUIRED = ("service_functions", "chain", "policies")


@dataclass(frozen=True)
class FieldSpec:
    descriptor: FieldDescriptor
    scope: Scope = Scope.STATE


@dataclass(frozen=True)
class Scenario:
    fields: Tuple[FieldSpec, ...] = ()
    service_functions: Tuple[ServiceFunction, ...] = ()
    chain: Tuple[str, ...] = ()
    policies: Tuple[VerificationPolicy, ...] = ()
    absent_mode: AbsentMode = AbsentMode.STRICT
    match_mode: MatchMode = MatchMode.SUBSET
    name: str = field(default="", compare=False)

    @property
    def catalog(self) -> FieldCatalog:
        return extend_catalog(DEFAULT_CATALOG, self.fields)

    def sf(self, name: str) -> ServiceFunction:
        for sf in self.service_functions:
            if sf.name == name:
                return sf
        raise KeyError(name)

    def build_chain(self) -> ServiceFunctionChain:
        return ServiceFunctionChain(tuple(self.sf(n) for n in self.chain))

    def policy(self, name: str) -> VerificationPolicy:
        for v in self.policies:
            if v.name == name:
                return v
        raise KeyError(name)

    def options(self, absent_mode: Optional[AbsentMode] = None,
                match_mode: Optional[MatchMode] = None) -> VerifyOptions:
        return VerifyOptions(absent_mode or self.absent_mode, match_mode or self.match_mode,
                             self.catalog)

    def with_chain(self, chain) -> "Scenario":
        return replace(self, chain=tuple(chain))


def extend_catalog(base: FieldCatalog, specs) -> FieldCatalog:
    cat = base
    for spec in specs:
        cat = cat.extend([spec.descriptor], spec.scope)
    return cat


# -- YAML loading with source lines ------------------------------------------------

def _fmt_path(path: Path_) -> str:
    out = ""
    for part in path:
        out += f"[{part}]" if isinstance(part, int) else (f".{part}" if out else str(part))
    return out


class _Doc:
    def __init__(self, lines: Dict[Path_, int]):
        self.lines = lines

    def line(self, path: Path_) -> Optional[int]:
        while path:
            if path in self.lines:
                return self.lines[path]
            path = path[:-1]
        return self.lines.get(())

    def error(self, msg: str, path: Path_) -> ScenarioError:
        return ScenarioError(msg, _fmt_path(path), self.line(path))

    @contextmanager
    def at(self, path: Path_) -> Iterator[None]:
        try:
            yield
        except ScenarioError:
            raise
        except SfcError as exc:
            raise self.error(str(exc), path) from exc

    def mapping(self, raw: Any, path: Path_, allowed=None, required=()) -> Mapping[str, Any]:
        if not isinstance(raw, Mapping):
            raise self.error(f"expected a mapping, got {type(raw).__name__}", path)
        if allowed is not None:
            for key in raw:
                if key not in allowed:
                    raise self.error(f"unknown key {key!r}", path + (key,))
        for key in required:
            if key not in raw:
                raise self.error(f"missing required key {key!r}", path)
        return raw

    def sequence(self, raw: Any, path: Path_) -> List[Any]:
        if not isinstance(raw, list):
            raise self.error(f"expected a list, got {type(raw).__name__}", path)
        return raw

    def string(self, raw: Any, path: Path_) -> str:
        if not isinstance(raw, str) or not raw:
            raise self.error(f"expected a non-empty string, got {raw!r}", path)
        return raw


def _convert(node: yaml.Node, path: Path_, lines: Dict[Path_, int], loader) -> Any:
    lines.setdefault(path, node.start_mark.line + 1)
    if isinstance(node, yaml.MappingNode):
        out = {}
        for key_node, value_node in node.value:
            key = loader.construct_object(key_node, deep=True)
            if not isinstance(key, (str, int)) or isinstance(key, bool):
                raise ScenarioError(f"unsupported key {key!r}", _fmt_path(path),
                                    key_node.start_mark.line + 1)
            key = str(key)
            if key in out:
                raise ScenarioError(f"duplicate key {key!r}", _fmt_path(path),
                                    key_node.start_mark.line + 1)
            lines[path + (key,)] = key_node.start_mark.line + 1
            out[key] = _convert(value_node, path + (key,), lines, loader)
        return out
    if isinstance(node, yaml.SequenceNode):
        return [_convert(n, path + (i,), lines, loader) for i, n in enumerate(node.value)]
    return loader.construct_object(node, deep=True)


def _load(text: str) -> Tuple[Any, _Doc]:
    loader = yaml.SafeLoader(text)
    try:
        node = loader.get_single_node()
        if node is None:
            raise ScenarioError("empty scenario document")
        lines: Dict[Path_, int] = {}
        data = _convert(node, (), lines, loader)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        raise ScenarioError(f"syntax error: {exc.problem}",
                            line=mark.line + 1 if mark else None) from None
    except yaml.YAMLError as exc:
        raise ScenarioError(f"syntax error: {exc}") from None
    finally:
        loader.dispose()
    return data, _Doc(lines)


# -- parsing -----------------------------------------------------------------------

def _parse_fields(raw: Any, doc: _Doc) -> Tuple[FieldSpec, ...]:
    specs = []
    for i, entry in enumerate(doc.sequence(raw, ("fields",))):
        path = ("fields", i)
        entry = doc.mapping(entry, path, {"name", "kind", "bits", "scope"}, ("name", "kind"))
        with doc.at(path):
            try:
                kind = ValueKind(entry["kind"])
            except ValueError:
                raise doc.error(f"unknown value kind {entry['kind']!r}", path + ("kind",)) from None
            try:
                scope = Scope(entry.get("scope", "state"))
            except ValueError:
                raise doc.error("scope must be network or state", path + ("scope",)) from None
            bits = entry.get("bits", 32)
            if isinstance(bits, bool) or not isinstance(bits, int):
                raise doc.error("bits must be an integer", path + ("bits",))
            specs.append(FieldSpec(FieldDescriptor(doc.string(entry["name"], path + ("name",)),
                                                   kind, bits), scope))
    return tuple(specs)


def _parse_condition(raw: Any, path: Path_, doc: _Doc, catalog: FieldCatalog) -> Condition:
    if not isinstance(raw, list) or len(raw) != 3:
        raise doc.error("a condition is a [field, relation, value] triple", path)
    name, rel, operand = raw
    name = doc.string(name, path + (0,))
    if not isinstance(rel, str):
        raise doc.error(f"relation must be a string, got {rel!r}", path + (1,))
    with doc.at(path + (1,)):
        relation = Relation.parse(rel)
    with doc.at(path + (2,)):
        if name in (ANY_NETWORK_FIELD, ANY_STATE_FIELD):
            value = parse_untyped(operand)
        else:
            with doc.at(path + (0,)):
                kind = catalog.lookup(name).kind
            value = parse_value(operand, kind, catalog, pattern=True)
    return Condition(name, relation, value)


def _parse_action(raw: Any, path: Path_, doc: _Doc, catalog: FieldCatalog) -> ActionSpec:
    if isinstance(raw, str):
        simple = {"allow": Allow, "deny": Deny}.get(raw)
        if simple is None:
            raise doc.error(f"unknown action {raw!r}", path)
        return simple()
    if not isinstance(raw, Mapping) or len(raw) != 1:
        raise doc.error("an action is 'allow', 'deny' or a single-key mapping", path)
    (kind, body), = raw.items()
    bpath = path + (kind,)
    with doc.at(bpath):
        if kind == "mod_nf":
            body = doc.mapping(body, bpath)
            return ModNf({f: parse_value(v, catalog.network(f).kind, catalog)
                          for f, v in body.items()})
        if kind == "mod_sf":
            body = doc.mapping(body, bpath)
            updates = {}
            for f, v in body.items():
                with doc.at(bpath + (f,)):
                    d = catalog.state(f)
                    if isinstance(v, str) and _DELTA.match(v):
                        updates[f] = Delta(int(v))
                    else:
                        updates[f] = SetTo(parse_value(v, d.kind, catalog))
            return ModSf(updates)
        if kind == "encapsulate":
            body = doc.mapping(body, bpath, {"fields", "inner_into"}, ("fields",))
            added = doc.mapping(body["fields"], bpath + ("fields",))
            inner = body.get("inner_into")
            if inner is not None:
                inner = doc.string(inner, bpath + ("inner_into",))
            return Encapsulate({f: parse_value(v, catalog.network(f).kind, catalog)
                                for f, v in added.items()}, inner)
        if kind == "encrypt":
            body = doc.mapping(body, bpath, {"targets", "params"}, ("targets", "params"))
            targets = body["targets"]
            if isinstance(targets, str):
                targets = [targets]
            targets = [doc.string(t, bpath + ("targets", i))
                       for i, t in enumerate(doc.sequence(targets, bpath + ("targets",)))]
            params = doc.string(body["params"], bpath + ("params",))
            return Encrypt(tuple(targets), EncryptionParams(params))
    raise doc.error(f"unknown action {kind!r}", path)


def _parse_sf(name: str, raw: Any, doc: _Doc, catalog: FieldCatalog) -> ServiceFunction:
    path = ("service_functions", name)
    raw = doc.mapping(raw, path, {"state", "resolution", "default", "rules"})
    state = {}
    if raw.get("state") is not None:
        for f, v in doc.mapping(raw["state"], path + ("state",)).items():
            with doc.at(path + ("state", f)):
                state[f] = parse_value(v, catalog.state(f).kind, catalog)
    try:
        resolution = ResolutionStrategy(raw.get("resolution", "first-match"))
    except ValueError:
        raise doc.error(f"unknown resolution strategy {raw['resolution']!r}",
                        path + ("resolution",)) from None
    default = _parse_action(raw.get("default", "allow"), path + ("default",), doc, catalog)
    rules = []
    for i, r in enumerate(doc.sequence(raw.get("rules", []), path + ("rules",))):
        rpath = path + ("rules", i)
        r = doc.mapping(r, rpath, {"when", "do"}, ("do",))
        conds = tuple(_parse_condition(c, rpath + ("when", j), doc, catalog)
                      for j, c in enumerate(doc.sequence(r.get("when", []), rpath + ("when",))))
        do = doc.sequence(r["do"], rpath + ("do",))
        if not do:
            raise doc.error("a rule needs at least one action", rpath + ("do",))
        acts = tuple(_parse_action(a, rpath + ("do", j), doc, catalog) for j, a in enumerate(do))
        rules.append(Rule(conds, acts))
    sf = ServiceFunction(name, Policy(tuple(rules), resolution, default), State(state))
    with doc.at(path):
        validate_service_function(sf, catalog)
    return sf


def _parse_state(raw: Any, path: Path_, doc: _Doc, catalog: FieldCatalog,
                 pattern: bool) -> State:
    if raw is None:
        return State()
    out = {}
    for f, v in doc.mapping(raw, path).items():
        with doc.at(path + (f,)):
            out[f] = parse_value(v, catalog.state(f).kind, catalog, pattern=pattern)
    return State(out)


def _parse_policy(raw: Any, i: int, doc: _Doc, catalog: FieldCatalog) -> VerificationPolicy:
    path = ("policies", i)
    raw = doc.mapping(raw, path, {"name", "input_traffic", "initial_state", "expected_traffic",
                                  "expected_state"}, ("name", "input_traffic"))
    name = doc.string(raw["name"], path + ("name",))
    traffic = []
    for j, p in enumerate(doc.sequence(raw["input_traffic"], path + ("input_traffic",))):
        with doc.at(path + ("input_traffic", j)):
            traffic.append(parse_packet(p, catalog))
    patterns = []
    expected = raw.get("expected_traffic") or []
    for j, p in enumerate(doc.sequence(expected, path + ("expected_traffic",))):
        ppath = path + ("expected_traffic", j)
        p = doc.mapping(p, ppath)
        pat = {}
        for f, v in p.items():
            with doc.at(ppath + (f,)):
                pat[f] = parse_value(v, catalog.network(f).kind, catalog, pattern=True)
        patterns.append(pat)
    return VerificationPolicy(
        name, tuple(traffic),
        _parse_state(raw.get("initial_state"), path + ("initial_state",), doc, catalog, False),
        TrafficPattern(tuple(patterns)),
        _parse_state(raw.get("expected_state"), path + ("expected_state",), doc, catalog, True),
    )


def parse_scenario(text: str, name: str = "") -> Scenario:
    """Parse and fully validate a scenario document.

    Raises :class:`ScenarioError` carrying the offending path and line.
    """
    data, doc = _load(text)
    if not isinstance(data, Mapping):
        raise ScenarioError("a scenario document must be a mapping", line=doc.line(()))
    doc.mapping(data, (), set(_SECTIONS))
    for section in _REQUIRED:
        if section not in data:
            raise ScenarioError(f"missing required section {section!r}", section, doc.line(()))

    fields = _parse_fields(data["fields"], doc) if data.get("fields") else ()
    try:
        catalog = extend_catalog(DEFAULT_CATALOG, fields)
    except SfcError as exc:
        raise doc.error(str(exc), ("fields",)) from None

    sfs_raw = doc.mapping(data["service_functions"] or {}, ("service_functions",))
    sfs = tuple(_parse_sf(n, body, doc, catalog) for n, body in sfs_raw.items())

    chain = tuple(doc.string(n, ("chain", i))
                  for i, n in enumerate(doc.sequence(data["chain"] or [], ("chain",))))
    known = {sf.name for sf in sfs}
    for i, n in enumerate(chain):
        if n not in known:
            raise doc.error(f"chain references undefined service function {n!r}", ("chain", i))
    if len(set(chain)) != len(chain):
        raise doc.error("a service function appears twice in the chain", ("chain",))

    policies = tuple(_parse_policy(p, i, doc, catalog)
                     for i, p in enumerate(doc.sequence(data["policies"] or [], ("policies",))))
    seen = set()
    for i, v in enumerate(policies):
        if v.name in seen:
            raise doc.error(f"duplicate policy name {v.name!r}", ("policies", i, "name"))
        seen.add(v.name)

    opts = doc.mapping(data.get("options") or {}, ("options",), {"absent_mode", "match_mode"})
    try:
        absent = AbsentMode(opts.get("absent_mode", "strict"))
    except ValueError:
        raise doc.error("absent_mode must be paper or strict", ("options", "absent_mode")) from None
    try:
        match = MatchMode(opts.get("match_mode", "subset"))
    except ValueError:
        raise doc.error("match_mode must be subset or exact", ("options", "match_mode")) from None

    return Scenario(fields, sfs, chain, policies, absent, match, name)


def load_scenario(path: Union[str, Path]) -> Scenario:
    path = Path(path)
    return parse_scenario(path.read_text(encoding="utf-8"), path.stem)


# -- serialization -----------------------------------------------------------------

def _dump_condition(c: Condition) -> list:
    return [c.field, c.relation.value, format_value(c.operand)]


def _dump_action(a: ActionSpec) -> Any:
    if isinstance(a, Allow):
        return "allow"
    if isinstance(a, Deny):
        return "deny"
    if isinstance(a, ModNf):
        return {"mod_nf": format_mapping(a.assignments)}
    if isinstance(a, ModSf):
        return {"mod_sf": {f: (f"{u.amount:+d}" if isinstance(u, Delta) else format_value(u.value))
                           for f, u in a.updates.items()}}
    if isinstance(a, Encapsulate):
        body = {"fields": format_mapping(a.added)}
        if a.inner_into is not None:
            body["inner_into"] = a.inner_into
        return {"encapsulate": body}
    if isinstance(a, Encrypt):
        return {"encrypt": {"targets": list(a.targets), "params": a.params.spec}}
    raise SfcError(f"cannot serialize action {a!r}")


def _dump_sf(sf: ServiceFunction) -> dict:
    body: Dict[str, Any] = {}
    if sf.state:
        body["state"] = format_mapping(sf.state)
    if sf.policy.resolution is not ResolutionStrategy.FIRST_MATCH:
        body["resolution"] = sf.policy.resolution.value
    if not isinstance(sf.policy.default_action, Allow):
        body["default"] = _dump_action(sf.policy.default_action)
    body["rules"] = [
        {"when": [_dump_condition(c) for c in r.conditions],
         "do": [_dump_action(a) for a in r.actions]}
        for r in sf.policy.rules
    ]
    return body


def _dump_policy(v: VerificationPolicy) -> dict:
    body: Dict[str, Any] = {"name": v.name,
                            "input_traffic": [format_packet(p) for p in v.input_traffic]}
    if v.initial_state:
        body["initial_state"] = format_mapping(v.initial_state)
    body["expected_traffic"] = [format_mapping(p) for p in v.expected_traffic.packets]
    if v.expected_state:
        body["expected_state"] = format_mapping(v.expected_state)
    return body


def scenario_to_dict(sc: Scenario) -> dict:
    data: Dict[str, Any] = {}
    if sc.fields:
        data["fields"] = [{"name": s.descriptor.name, "scope": s.scope.value,
                           "kind": s.descriptor.kind.value, "bits": s.descriptor.bit_length}
                          for s in sc.fields]
    data["service_functions"] = {sf.name: _dump_sf(sf) for sf in sc.service_functions}
    data["chain"] = list(sc.chain)
    data["policies"] = [_dump_policy(v) for v in sc.policies]
    data["options"] = {"absent_mode": sc.absent_mode.value, "match_mode": sc.match_mode.value}
    return data


def serialize_scenario(sc: Scenario) -> str:
    return yaml.safe_dump(scenario_to_dict(sc), sort_keys=False, allow_unicode=True,
                          default_flow_style=None, width=100)
