#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Written by Lucas Sinclair.
MIT Licensed.
Contact at www.sinclair.bio

Script to test objects, transactions, blocks and their canonical
encoding.
"""

# Built-in modules #
import dataclasses

# Internal modules #
from mangrove.core.objects       import coin, coin_total, user, reactive, OwnedObject
from mangrove.core.serialization import encode, digest, short
from mangrove.core.transactions  import (UaTx, UaRaTx, RaRaTx, Block, conflicts,
                                         canonical_order, listing, value_hash)
from mangrove.core.votes         import scope, scope_label, parse_scope
from mangrove.vm.commands        import Transfer

# First party modules #

# Third party modules #
import pytest

###############################################################################
def test_encoding_is_canonical():
    # Dictionaries and sets do not depend on insertion order #
    assert encode({'a': 1, 'b': 2}) == encode({'b': 2, 'a': 1})
    assert encode({3, 1, 2}) == encode({2, 3, 1})
    # Lists do #
    assert encode([1, 2]) != encode([2, 1])
    # Types are distinguished #
    assert encode(1) != encode('1')
    assert encode(True) != encode(1)
    assert encode(None) != encode(b'')

def test_encoding_refuses_unknown_types():
    with pytest.raises(TypeError):
        encode(object())

def test_short_digest():
    assert len(short(digest('x'))) == 10
    assert short(None) is None

###############################################################################
def test_actors():
    assert user('alice').is_user
    assert reactive('vault').is_reactive
    assert str(user('alice')) == 'alice'
    assert user('x') != reactive('x')
    with pytest.raises(ValueError):
        user('')

def test_coins():
    assert coin_total([coin('a', 3, user('x')), coin('b', 4, user('x'))]) == 7
    assert OwnedObject('i', 'item', 'hat', user('x')).amount == 0
    with pytest.raises(ValueError):
        coin('a', -1, user('x'))

###############################################################################
def test_tx_identity(alice_coin):
    a = UaTx(user('alice'), 0, (alice_coin,), (Transfer(0, 'bob'),))
    b = UaTx(user('alice'), 0, (alice_coin,), (Transfer(0, 'bob'),))
    c = UaTx(user('alice'), 0, (alice_coin,), (Transfer(0, 'carol'),))
    assert a == b and hash(a) == hash(b)
    assert a != c
    # The signature is not part of the id #
    assert a.signed_with('sig').tx_id == a.tx_id
    assert a.signed_with('sig').wire_bytes != a.wire_bytes

def test_conflicts(alice_coin):
    a = UaTx(user('alice'), 0, (alice_coin,))
    b = UaRaTx(user('alice'), 0, reactive('vault'), (alice_coin,))
    c = UaTx(user('alice'), 1, (alice_coin,))
    assert conflicts(a, b)
    assert not conflicts(a, a)
    assert not conflicts(a, c)
    r = RaRaTx(reactive('vault'), reactive('safe'), origin='x:0')
    assert not conflicts(r, r)
    assert r.key is None
    assert a.key == ('alice', 0)

def test_field_order(alice_coin):
    names = lambda cls: [f.name for f in dataclasses.fields(cls) if f.init]
    assert names(UaTx)[:2] == ['sender', 'sn']
    assert names(UaRaTx)[:3] == ['sender', 'sn', 'recipient']
    assert 'sn' not in names(RaRaTx)
    # Positional construction with every default left out #
    tx = UaRaTx(user('alice'), 4, reactive('vault'))
    assert tx.sn == 4 and tx.consumed == () and tx.call is None
    assert RaRaTx(reactive('vault'), reactive('safe')).sn is None

def test_tx_summary(signed_uara):
    tx = signed_uara()
    summary = tx.summary()
    assert summary['kind']      == 'ua-ra'
    assert summary['sender']    == 'alice'
    assert summary['recipient'] == 'vault'
    assert summary['consumed']  == ['alice.coin.0']

###############################################################################
def test_blocks(signed_uara):
    a, b = signed_uara(0), signed_uara(1)
    first  = Block('vault', 0, frozenset([a, b]))
    second = Block('vault', 0, frozenset([b, a]))
    assert first == second
    assert len(first) == 2 and a in first
    # Empty blocks differ per instance #
    assert Block('vault', 0).block_hash != Block('vault', 1).block_hash
    # Canonical order is by id #
    assert [tx.tx_id for tx in first.canonical_order] == sorted([a.tx_id, b.tx_id])
    assert first.without([a]) == Block('vault', 0, frozenset([b]))
    assert first.ua_ra == canonical_order([a, b])
    assert first.ra_ra == []

def test_listing_and_value_hash(signed_uara):
    tx = signed_uara()
    block = Block('vault', 0, frozenset([tx]))
    assert listing(None) == []
    assert listing(tx) == [tx.summary()]
    assert listing(block) == [tx.summary()]
    assert value_hash(block) == block.block_hash
    assert value_hash(tx) == tx.tx_id

def test_scopes():
    s = scope('poa', 'vault', 3)
    assert scope_label(s) == 'poa/vault/3'
    assert parse_scope('poa/vault/3') == s
    assert scope_label(None) is None
