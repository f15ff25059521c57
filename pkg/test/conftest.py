#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Written by Lucas Sinclair.
MIT Licensed.
Contact at www.sinclair.bio
"""

# Built-in modules #

# Internal modules #
from mangrove.core.params        import SystemParams
from mangrove.core.objects       import coin, user, reactive
from mangrove.core.transactions  import UaTx, UaRaTx
from mangrove.crypto.signatures  import Keyring
from mangrove.network.delays     import DelayPolicy
from mangrove.network.simulator  import Simulator
from mangrove.harness.scenario   import Scenario

# First party modules #
from autopaths.dir_path import DirectoryPath

# Third party modules #
import pytest

###############################################################################
@pytest.fixture(scope="module")
def this_script_dir(request):
    """Return the directory of the currently running test script."""
    return DirectoryPath(request.fspath.dirname)

###############################################################################
@pytest.fixture
def params():
    """Six validators, one Byzantine, one fast-path fault."""
    return SystemParams(n=6, f=1, p=1, delta_bound=10, gst=0)

@pytest.fixture
def keyring(params):
    """A key ring with every validator key and the keys of alice and bob."""
    keyring = Keyring()
    for i in range(params.n): keyring.validator_key(i)
    keyring.generate('alice')
    keyring.generate('bob')
    return keyring

@pytest.fixture
def sim(params, keyring):
    """An empty simulator with fixed delays of Δ."""
    delays = DelayPolicy(params, mode='fixed')
    return Simulator(params, delays, keyring, horizon=1000)

###############################################################################
@pytest.fixture
def alice_coin():
    return coin('alice.coin.0', 10, user('alice'))

@pytest.fixture
def signed_ua(keyring, alice_coin):
    """A function returning a signed UA transaction of alice."""
    def make(sn=0, consumed=None, code=()):
        consumed = (alice_coin,) if consumed is None else consumed
        tx = UaTx(user('alice'), sn, tuple(consumed), tuple(code))
        return keyring.sign_tx(keyring.generate('alice'), tx)
    return make

@pytest.fixture
def signed_uara(keyring, alice_coin):
    """A function returning a signed UA-RA transaction of alice."""
    def make(sn=0, recipient='vault', consumed=None, call=None):
        consumed = (alice_coin,) if consumed is None else consumed
        tx = UaRaTx(user('alice'), sn, reactive(recipient), tuple(consumed),
                    (), call, ())
        return keyring.sign_tx(keyring.generate('alice'), tx)
    return make

###############################################################################
@pytest.fixture
def make_scenario():
    """
    A function building a Scenario from keyword overrides applied on top
    of a minimal one: alice pays bob her coin with a UA transaction.
    """
    def make(**overrides):
        document = {
            'name':    'pytest_scenario',
            'params':  {'n': 6, 'f': 1, 'p': 1, 'delta': 10, 'gst': 0},
            'delay':   {'mode': 'fixed'},
            'users':   {'alice': {'objects': [{'id': 'alice.coin.0',
                                               'type': 'coin',
                                               'payload': 10}]},
                        'bob':   {}},
            'clients': {'wallet': {'behavior': 'honest',
                                   'actors':   ['alice'],
                                   'script':   [{'at': 0, 'label': 'pay',
                                                 'actor': 'alice',
                                                 'kind': 'ua',
                                                 'consume': ['alice.coin.0'],
                                                 'code': [{'op': 'transfer',
                                                           'slot': 0,
                                                           'owner': 'bob'}]}]}},
        }
        document.update(overrides)
        return Scenario(**document)
    return make
