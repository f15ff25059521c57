#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Written by Lucas Sinclair.
MIT Licensed.
Contact at www.sinclair.bio

Script to test the lock registry, evidence and credits of the entity
V.A of a user actor, driven directly without running the event loop.
"""

# Built-in modules #

# Internal modules #
from mangrove.core.objects       import coin, user, reactive
from mangrove.core.transactions  import UaTx, UaRaTx
from mangrove.protocol.messages  import Credit
from mangrove.vm.commands        import Transfer

# First party modules #

# Third party modules #
import pytest

###############################################################################
@pytest.fixture
def built(make_scenario):
    """A simulator with alice's entity at validator 0."""
    sim = make_scenario(reactive={'vault': {'program': 'vault'}}).build()
    return sim, sim.nodes[0].entity('alice')

def make_tx(sim, sn=0, owner='bob', consumed=None, kind='ua'):
    consumed = (coin('alice.coin.0', 10, user('alice')),) \
               if consumed is None else consumed
    if kind == 'ua':
        tx = UaTx(user('alice'), sn, consumed, (Transfer(0, owner),))
    else:
        tx = UaRaTx(user('alice'), sn, reactive('vault'), consumed, (), None, ())
    return sim.keyring.sign_tx(sim.keyring.generate('alice'), tx)

###############################################################################
def test_locks_are_write_once(built):
    sim, entity = built
    a, b = make_tx(sim), make_tx(sim, owner='alice')
    assert entity.fp_lock_slot(a)
    assert not entity.fp_lock_slot(b)
    assert entity.fp_lock_slot(a)
    assert entity.fp_locked[0] == a
    # The two registries are independent #
    assert entity.sp_lock_slot(b)
    assert not entity.sp_lock_slot(a)
    kinds = [r['kind'] for r in sim.trace]
    assert kinds.count('fp_lock') == 1 and kinds.count('sp_lock') == 1

def test_ready(built):
    sim, entity = built
    assert entity.ready(make_tx(sim))
    # The predecessor was not executed #
    assert not entity.ready(make_tx(sim, sn=1))
    entity.executed[0] = 'x'
    assert entity.ready(make_tx(sim, sn=1))
    # An object alice does not own #
    ghost = coin('ghost', 3, user('alice'))
    assert not entity.ready(make_tx(sim, consumed=(ghost,)))

def test_validity(built):
    sim, entity = built
    tx = make_tx(sim)
    assert entity.valid(tx, ('ua',))
    assert not entity.valid(tx, ('ua-ra',))
    assert not entity.valid(None, ('ua',))
    # Signed with somebody else's key #
    forged = sim.keyring.sign_tx(sim.keyring.generate('bob'), tx)
    assert not entity.valid(forged, ('ua',))

def test_evidence(built):
    sim, entity = built
    a, b = make_tx(sim), make_tx(sim, owner='alice')
    entity.observe_tx(a)
    entity.observe_tx(a)
    assert not sim.trace.of_kind('evidence')
    entity.observe_tx(b)
    entity.observe_tx(make_tx(sim, owner='nobody'))
    evidence, = sim.trace.of_kind('evidence')
    assert evidence['sn'] == 0
    assert evidence['txs'] == sorted([a.tx_id, b.tx_id])

def test_conflicting_forward_is_dropped(built):
    sim, entity = built
    ua, uara = make_tx(sim), make_tx(sim, kind='ua-ra')
    entity.fp_lock_slot(ua)
    entity.uara_forward(uara)
    assert 0 not in entity.forwards
    drop, = sim.trace.of_kind('drop')
    assert drop['reason'] == 'fp-conflict'

def test_credit(built):
    sim, entity = built
    gift = coin('gift', 4, user('alice'))
    entity.on_credit(Credit('t' * 64, (gift,)))
    entity.on_credit(Credit('t' * 64, (gift,)))
    assert entity.owned['gift'] == gift
    credits = sim.trace.of_kind('credit')
    assert len(credits) == 2 and credits[1]['objects'] == []
    # The controlling client is told #
    notices = [r for r in sim.trace.of_kind('send') if r['msg'] == 'ClientNotice']
    assert notices[0]['dst'] == 'client.wallet'

def test_snapshot(built):
    sim, entity = built
    entity.fp_lock_slot(make_tx(sim))
    snapshot = entity.snapshot()
    assert snapshot['role'] == 'user' and snapshot['at'] == 'V0.alice'
    assert snapshot['fp_locked'][0][0] == 0
    assert snapshot['owned'][0]['id'] == 'alice.coin.0'
