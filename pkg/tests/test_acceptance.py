"""Exit criteria.  Each test carries a ``criterion`` marker; the terminal
summary prints one PASS/FAIL line per criterion."""
import ipaddress
import itertools
import time

import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from sfcverify import (NULL_PACKET, AbsentMode, ActionError, Allow, Delta, Deny, Encapsulate,
                       Encrypt, Encrypted, ModNf, ModSf, Policy, Rule, SetTo, State,
                       apply_actions, emit_report, load_scenario, normalize_traffic,
                       parse_scenario, resolve, scenarios, serialize_scenario,
                       transform_traffic, verify_all)
from sfcverify.actions import apply_action

from oracles import first_match, naive_condition
from strategies import SMALL, actions_for, conditions, packets, policies, states

ip = ipaddress.ip_address
IP_GW = ip("203.0.113.1")
CASES = 1000
LAW_SETTINGS = settings(max_examples=CASES, deadline=None,
                        suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much])


def _count_cases(law):
    """Run a hypothesis law and return how many valid cases it executed."""
    counter = {"n": 0}
    law(counter)
    return counter["n"]


def _run(actions, p, s):
    try:
        return ("ok",) + apply_actions(actions, p, s, SMALL)
    except ActionError as exc:
        return ("err", type(exc))


@st.composite
def action_sequences(draw, p, max_size=4):
    return draw(st.lists(actions_for(p), max_size=max_size))


# -- 1, 2: Figure-1 golden runs ----------------------------------------------------

@pytest.mark.criterion("AC1", "Figure-1 correct ordering [TM, AF, VG]: P_true={v1,v2}")
def test_ac1_correct_ordering():
    start = time.perf_counter()
    sc = load_scenario(scenarios.path("figure1_correct"))
    report = verify_all(sc.build_chain(), sc.policies, sc.options())
    elapsed = time.perf_counter() - start

    assert sc.chain == ("TM", "AF", "VG")
    assert set(report.p_true) == {"v1", "v2"} and report.p_false == ()
    v1 = report["v1"]
    assert v1.hops[0].sf == "TM"
    assert v1.hops[0].global_in == State({"con_db": 0})
    assert v1.hops[0].global_out == State({"con_db": 1})
    assert v1.final_state == State({"con_db": 1})
    final = normalize_traffic(v1.final_traffic)
    assert len(final) == len(sc.policy("v1").input_traffic)
    for p in final:
        assert p["ip_src"] == IP_GW and isinstance(p["PL_4"], Encrypted)
    assert elapsed < 1.0


@pytest.mark.criterion("AC2", "Figure-1 wrong ordering [VG, TM, AF]: P_true={v2}, P_false={v1}")
def test_ac2_wrong_ordering():
    start = time.perf_counter()
    sc = load_scenario(scenarios.path("figure1_wrong"))
    report = verify_all(sc.build_chain(), sc.policies, sc.options())
    elapsed = time.perf_counter() - start

    assert sc.chain == ("VG", "TM", "AF")
    assert report.p_true == ("v2",) and report.p_false == ("v1",)
    v1 = report["v1"]
    assert normalize_traffic(v1.final_traffic) == ()
    assert v1.final_state == State({"con_db": 0}) == sc.policy("v1").initial_state
    assert elapsed < 1.0


# -- 3: action laws ----------------------------------------------------------------

@pytest.mark.criterion("AC3", "action laws hold on >=1000 randomized cases each")
def test_ac3_action_laws():
    @LAW_SETTINGS
    @given(packets(), states, st.data())
    def allow_is_identity(counter, p, s, data):
        seq = data.draw(action_sequences(p))
        at = data.draw(st.integers(0, len(seq)))
        assert _run(seq[:at] + [Allow()] + seq[at:], p, s) == _run(seq, p, s)
        counter["n"] += 1

    @LAW_SETTINGS
    @given(packets(), states, st.data())
    def deny_is_absorbing(counter, p, s, data):
        seq = data.draw(action_sequences(NULL_PACKET))
        out = _run([Deny()] + seq, p, s)
        assert out[0] == "ok" and out[1].is_null and out[2] == s
        counter["n"] += 1

    @LAW_SETTINGS
    @given(states, st.data())
    def null_in_null_out(counter, s, data):
        a = data.draw(actions_for(NULL_PACKET))
        out, s2 = apply_action(a, NULL_PACKET, s, SMALL)
        assert out.is_null
        counter["n"] += 1

    @LAW_SETTINGS
    @given(packets(), states, st.data())
    def mod_sf_keeps_packet(counter, p, s, data):
        upd = data.draw(st.one_of(st.builds(Delta, st.integers(-3, 3)),
                                  st.builds(SetTo, st.integers(0, 9))))
        out, _ = apply_action(ModSf({"hits": upd}), p, s, SMALL)
        assert out == p
        for name in p:
            assert out[name] == p[name]
        counter["n"] += 1

    @LAW_SETTINGS
    @given(packets(), states, st.data())
    def packet_actions_keep_state(counter, p, s, data):
        a = data.draw(actions_for(p).filter(lambda a: isinstance(a, (ModNf, Encapsulate, Encrypt))))
        try:
            _, s2 = apply_action(a, p, s, SMALL)
        except ActionError:
            assume(False)
        assert s2 == s
        for name in s:
            assert s2[name] == s[name]
        counter["n"] += 1

    for law in (allow_is_identity, deny_is_absorbing, null_in_null_out, mod_sf_keeps_packet,
                packet_actions_keep_state):
        assert _count_cases(law) >= CASES, law.__name__


# -- 4: first-match resolution vs brute force --------------------------------------

@pytest.mark.criterion("AC4", "first-match resolve() equals brute-force scan on >=1000 policies")
def test_ac4_fmr_oracle():
    assert len(SMALL.network_fields) + len(SMALL.state_fields) == 6

    @LAW_SETTINGS
    @given(policies, packets(), states, st.sampled_from(list(AbsentMode)))
    def law(counter, policy, p, s, mode):
        assert len(policy.rules) <= 16
        expected = first_match(policy, p, s, absent_ok=mode is AbsentMode.PAPER)
        assert resolve(policy, p, s, mode, SMALL).rule_index == expected
        counter["n"] += 1

    assert _count_cases(law) >= CASES


# -- 5: state threading ------------------------------------------------------------

@pytest.mark.criterion("AC5", "monitor counter equals independent match count on >=1000 traffics")
def test_ac5_state_threading():
    @LAW_SETTINGS
    @given(st.lists(conditions().filter(lambda c: c.field != "hits"), max_size=3),
           st.lists(packets(), max_size=20), st.integers(0, 5))
    def law(counter, watch, traffic, start):
        policy = Policy((Rule(tuple(watch), (ModSf({"hits": Delta(1)}),)),))
        _, final, _ = transform_traffic(policy, traffic, State({"hits": start}), catalog=SMALL)
        matching = sum(1 for p in traffic
                       if not p.is_null and all(naive_condition(c, p, {}) for c in watch))
        assert final["hits"] == start + matching
        counter["n"] += 1

    assert _count_cases(law) >= CASES


# -- 6: order sensitivity ----------------------------------------------------------

@pytest.mark.criterion("AC6", "permuting the Figure-1 chain flips at least one verdict")
def test_ac6_order_sensitivity():
    sc = load_scenario(scenarios.path("figure1_correct"))

    def verdicts(order):
        s = sc.with_chain(order)
        return {r.policy: r.verdict for r in verify_all(s.build_chain(), s.policies, s.options()).results}

    baseline = verdicts(("TM", "AF", "VG"))
    flipped = [order for order in itertools.permutations(("TM", "AF", "VG"))
               if verdicts(order) != baseline]
    assert len(list(itertools.permutations(("TM", "AF", "VG")))) == 6
    assert flipped
    assert ("VG", "TM", "AF") in flipped


# -- 7: determinism and round trip -------------------------------------------------

@pytest.mark.criterion("AC7", "byte-identical JSON reports; parse(serialize(S)) == S for shipped scenarios")
def test_ac7_determinism_round_trip():
    names = scenarios.names()
    assert {"figure1_correct", "figure1_wrong"} <= set(names)
    for name in names:
        outputs = set()
        for _ in range(3):
            sc = load_scenario(scenarios.path(name))
            opts = sc.options()
            chain = sc.build_chain()
            outputs.add(emit_report(verify_all(chain, sc.policies, opts, max_workers=2), "json",
                                    sc.name, chain.names, opts).encode())
        assert len(outputs) == 1, name
        sc = load_scenario(scenarios.path(name))
        assert parse_scenario(serialize_scenario(sc)) == sc
