#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Written by Lucas Sinclair.
MIT Licensed.
Contact at www.sinclair.bio
"""

# Built-in modules #
from dataclasses import dataclass

# Internal modules #
from mangrove.core.serialization import encode

# First party modules #

# Third party modules #

# Constants #
POB, POA, QC, TA = 'pob', 'poa', 'qc', 'ta'

###############################################################################
def scope(protocol, actor, number):
    """
    Every protocol instance is named by a scope tuple such as
    ('poa', 'vault', 3) or ('pob', 'alice', 0).
    """
    return (protocol, actor, number)

def scope_label(scope):
    """The string form used in trace records."""
    if scope is None: return None
    return '%s/%s/%s' % scope

def parse_scope(label):
    protocol, actor, number = label.split('/')
    return (protocol, actor, int(number))

###############################################################################
@dataclass(frozen=True)
class Vote:
    """
    A signed endorsement of `value` (a block hash or a tx id) within
    `scope`. A `value` of None is the ⊥ vote.
    """

    scope:     tuple
    value:     str
    voter:     int
    signature: str

    @staticmethod
    def message(scope, value):
        return encode(('vote', scope, value))

    @property
    def is_bottom(self): return self.value is None

###############################################################################
@dataclass(frozen=True)
class DecisionProof:
    """At least `fast` distinct valid votes for one value in one scope."""

    scope: tuple
    value: str
    votes: tuple

    @property
    def voters(self): return [v.voter for v in self.votes]
