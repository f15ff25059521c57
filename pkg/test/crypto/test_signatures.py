#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Written by Lucas Sinclair.
MIT Licensed.
Contact at www.sinclair.bio

Script to test simulated signatures, votes and their aggregation into
decision proofs.
"""

# Built-in modules #

# Internal modules #
from mangrove.core.votes        import scope
from mangrove.crypto.signatures import (Keyring, AggregationError, aggregate,
                                        verify_proof, sign)

# First party modules #

# Third party modules #
import pytest

# Constants #
SCOPE = scope('pob', 'alice', 0)

###############################################################################
def votes_for(keyring, voters, value='abc', where=SCOPE):
    return [keyring.vote(keyring.validator_key(i), i, where, value)
            for i in voters]

###############################################################################
def test_sign_and_verify(keyring):
    key = keyring.generate('alice')
    signature = sign(key, b'hello')
    assert signature == sign(key, b'hello')
    assert keyring.verify('alice', b'hello', signature)
    assert not keyring.verify('alice', b'hullo', signature)
    assert not keyring.verify('bob', b'hello', signature)
    assert not keyring.verify('nobody', b'hello', signature)
    assert not keyring.verify('alice', b'hello', None)

def test_keys_are_stable():
    assert Keyring().generate('x').seed == Keyring().generate('x').seed
    assert Keyring(1).generate('x').seed != Keyring(2).generate('x').seed
    keyring = Keyring()
    assert keyring.generate('x') is keyring.generate('x')
    assert 'x' in keyring

def test_transaction_signatures(keyring, signed_ua):
    tx = signed_ua()
    assert keyring.verify_tx(tx)
    # Signed by somebody else #
    forged = keyring.sign_tx(keyring.generate('bob'), tx)
    assert not keyring.verify_tx(forged)
    # Unsigned #
    assert not keyring.verify_tx(tx.signed_with(None))

###############################################################################
def test_aggregate(keyring, params):
    votes = votes_for(keyring, [4, 0, 2, 1, 3])
    proof = aggregate(votes, params.quorums, keyring)
    assert proof.voters == [0, 1, 2, 3, 4]
    assert proof.value == 'abc'
    assert verify_proof(proof, params.quorums, keyring)
    assert verify_proof(proof, params.quorums, keyring, SCOPE, 'abc')
    assert not verify_proof(proof, params.quorums, keyring, SCOPE, 'xyz')
    assert not verify_proof(proof, params.quorums, keyring,
                            scope('pob', 'alice', 1))

@pytest.mark.parametrize("case, match", [
    ('empty',     "No votes"),
    ('few',       "are needed"),
    ('bottom',    "cannot be aggregated"),
    ('mixed',     "different scope or value"),
    ('duplicate', "Duplicate voter"),
    ('forged',    "Invalid signature"),
])
def test_aggregate_errors(keyring, params, case, match):
    votes = votes_for(keyring, range(5))
    if case == 'empty':     votes = []
    if case == 'few':       votes = votes[:4]
    if case == 'bottom':    votes = votes_for(keyring, range(5), None)
    if case == 'mixed':     votes = votes[:4] + votes_for(keyring, [4], 'xyz')
    if case == 'duplicate': votes = votes[:4] + votes[:1]
    if case == 'forged':
        # Validator 1 signs in the name of validator 4 #
        fake  = keyring.vote(keyring.validator_key(1), 4, SCOPE, 'abc')
        votes = votes[:4] + [fake]
    with pytest.raises(AggregationError, match=match):
        aggregate(votes, params.quorums, keyring)

def test_aggregation_error_is_value_error():
    assert issubclass(AggregationError, ValueError)
