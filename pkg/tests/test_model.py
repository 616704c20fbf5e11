import ipaddress

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sfcverify import (NULL_PACKET, SENTINEL, Encrypted, EncryptionParams, KindError, Packet,
                       State, UnknownFieldError, WILDCARD, normalize_traffic, packet_equals,
                       packet_get, state_merge)
from sfcverify.fields import DEFAULT_CATALOG, FieldCatalog, FieldDescriptor, Scope, ValueKind
from sfcverify.errors import SfcError

from strategies import packets

IP_DB = ipaddress.ip_address("10.20.0.10")


def test_default_catalog_has_required_fields():
    for name in ("ip_src", "ip_dst", "port_src", "port_dst", "proto", "http_method", "PL_4",
                 "outer_ip_src", "outer_ip_dst"):
        assert name in DEFAULT_CATALOG.network_fields
    assert not set(DEFAULT_CATALOG.network_fields) & set(DEFAULT_CATALOG.state_fields)


def test_catalog_rejects_overlap_and_bad_lengths():
    with pytest.raises(SfcError):
        DEFAULT_CATALOG.extend([FieldDescriptor("ip_src", ValueKind.COUNTER, 8)], Scope.STATE)
    with pytest.raises(SfcError):
        FieldDescriptor("x", ValueKind.COUNTER, 0)
    with pytest.raises(SfcError):
        FieldCatalog.build(network=[FieldDescriptor("a", ValueKind.TEXT, 8)],
                           state=[FieldDescriptor("a", ValueKind.COUNTER, 8)])


class TestPacketGet:
    def test_present(self):
        assert packet_get(Packet({"ip_dst": IP_DB}), "ip_dst") == IP_DB

    def test_null_packet_is_empty(self):
        assert packet_get(NULL_PACKET, "ip_src") is None

    def test_encrypted_sentinel(self):
        assert isinstance(packet_get(Packet({"PL_4": SENTINEL}), "PL_4"), Encrypted)

    def test_unknown_field(self):
        with pytest.raises(UnknownFieldError):
            packet_get(Packet({}), "no_such_field")


class TestPacketEquals:
    def test_null_identity(self):
        assert packet_equals(NULL_PACKET, Packet(null=True))

    def test_null_differs_from_empty(self):
        assert not packet_equals(NULL_PACKET, Packet({}))

    def test_equal_maps(self):
        a = Packet({"ip_src": ipaddress.ip_address("1.1.1.1")})
        b = Packet({"ip_src": ipaddress.ip_address("1.1.1.1")})
        assert packet_equals(a, b)

    def test_encrypted_never_equals_plaintext(self):
        assert not packet_equals(Packet({"PL_4": SENTINEL}), Packet({"PL_4": "GET /"}))

    def test_encrypted_ignores_hidden_plaintext(self):
        params = EncryptionParams("aes")
        assert packet_equals(Packet({"PL_4": Encrypted(params, hidden="a")}),
                             Packet({"PL_4": Encrypted(params, hidden="b")}))
        assert not packet_equals(Packet({"PL_4": Encrypted(params)}),
                                 Packet({"PL_4": Encrypted(EncryptionParams("des"))}))

    @given(packets(), packets())
    def test_reflexive_and_symmetric(self, p, q):
        assert packet_equals(p, p)
        assert packet_equals(p, q) == packet_equals(q, p)


def test_packet_invariants():
    with pytest.raises(KindError):
        Packet({"ip_src": WILDCARD})
    with pytest.raises(KindError):
        Packet({"ip_src": 1}, null=True)
    assert NULL_PACKET.set({"ip_src": 1}) is NULL_PACKET


class TestStateMerge:
    def test_union_with_empty(self):
        assert state_merge(State(), State({"con_db": 1})) == State({"con_db": 1})

    def test_latest_write_wins(self):
        assert state_merge(State({"con_db": 0}), State({"con_db": 1})) == State({"con_db": 1})

    def test_disjoint_union_matches_dict_oracle(self):
        acc, s = {"con_db": 1, "x": 5}, {"y": 2}
        oracle = {k: v for d in (acc, s) for k, v in d.items()}
        assert state_merge(State(acc), State(s)) == State(oracle)

    @given(*[st.dictionaries(st.sampled_from("abcde"), st.integers(0, 3))] * 3)
    def test_associative(self, a, b, c):
        a, b, c = State(a), State(b), State(c)
        assert state_merge(state_merge(a, b), c) == state_merge(a, state_merge(b, c))


class TestNormalize:
    def test_all_dropped(self):
        assert normalize_traffic([NULL_PACKET, NULL_PACKET]) == ()

    def test_keeps_order(self):
        p1, p2 = Packet({"proto": "tcp"}), Packet({"proto": "udp"})
        assert normalize_traffic([p1, NULL_PACKET, p2]) == (p1, p2)

    def test_empty(self):
        assert normalize_traffic([]) == ()

    @given(st.lists(packets(), max_size=8))
    def test_idempotent(self, traffic):
        once = normalize_traffic(traffic)
        assert normalize_traffic(once) == once
