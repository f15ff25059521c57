#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Written by Lucas Sinclair.
MIT Licensed.
Contact at www.sinclair.bio

Every message kind that travels through the simulator. The class name is
what appears in the `msg` field of trace records. Messages that belong to
a protocol instance carry its `scope`.
"""

# Built-in modules #
from dataclasses import dataclass

# Internal modules #
from mangrove.core.serialization import encode

# First party modules #

# Third party modules #

###############################################################################
# Client to user actor #
@dataclass(frozen=True)
class UaTx:
    """A user transaction broadcast by a client (UA via POB or UA-RA)."""
    tx: object

    @property
    def scope(self):
        if self.tx.kind == 'ua': return ('pob', self.tx.sender.name, self.tx.sn)
        return None

# User actor to client #
@dataclass(frozen=True)
class ClientNotice:
    """Tells a client what happened to one of its actors."""
    actor:    str
    kind:     str
    tx_id:    str
    sn:       int   = None
    created:  tuple = ()
    consumed: tuple = ()

###############################################################################
# Parallel Optimistic Broadcast #
@dataclass(frozen=True)
class UaVote:
    scope: tuple
    vote:  object
    tx:    object = None

@dataclass(frozen=True)
class UaProof:
    scope: tuple
    tx:    object
    proof: object

###############################################################################
# Between entities of one validator #
@dataclass(frozen=True)
class UaRaForward:
    tx: object

@dataclass(frozen=True)
class RaRaDelivery:
    tx: object

@dataclass(frozen=True)
class Executed:
    """Effects of a UA-RA transaction to settle at its sender."""
    tx:      object
    created: tuple = ()
    failed:  bool  = False

@dataclass(frozen=True)
class Credit:
    """Objects created for a user actor by somebody else's transaction."""
    tx_id:   str
    objects: tuple

@dataclass(frozen=True)
class FpLockReq:
    scope: tuple
    tx:    object

@dataclass(frozen=True)
class FpLockResp:
    scope:  tuple
    tx_id:  str
    status: bool

@dataclass(frozen=True)
class SpLockReq:
    scope: tuple
    tx:    object
    phase: int

@dataclass(frozen=True)
class SpLockResp:
    scope:  tuple
    tx_id:  str
    phase:  int
    status: bool

@dataclass(frozen=True)
class UaInitiate:
    scope: tuple
    tx:    object

@dataclass(frozen=True)
class TaResult:
    scope:   tuple
    tx_id:   str
    success: bool

###############################################################################
# Parallel Optimistic Agreement #
@dataclass(frozen=True)
class PoaProposal:
    scope:     tuple
    block:     object
    leader:    int
    signature: str

    @staticmethod
    def message(scope, block_hash):
        return encode(('proposal', scope, block_hash))

@dataclass(frozen=True)
class PoaVote:
    """A vote on the block (None for ⊥) and the voter's fallback block."""
    scope:    tuple
    vote:     object
    block:    object
    fallback: frozenset

@dataclass(frozen=True)
class PoaProof:
    scope: tuple
    block: object
    proof: object

###############################################################################
# Quorum Consensus and Transaction Agreement #
@dataclass(frozen=True)
class QcProposal:
    scope:     tuple
    value:     object
    voter:     int
    signature: str

    @staticmethod
    def message(scope, value_hash):
        return encode(('qc-proposal', scope, value_hash))

@dataclass(frozen=True)
class QcLeaderValue:
    """The leader's value with what justifies it."""
    scope:        tuple
    view:         int
    value:        object
    proposals:    tuple
    view_changes: tuple
    leader:       int
    signature:    str

    @staticmethod
    def message(scope, view, value_hash):
        return encode(('qc-leader', scope, view, value_hash))

@dataclass(frozen=True)
class QcPrepare:
    scope:     tuple
    view:      int
    value:     object
    voter:     int
    signature: str

    @staticmethod
    def message(scope, view, value_hash):
        return encode(('qc-prepare', scope, view, value_hash))

@dataclass(frozen=True)
class QcCommit:
    scope:     tuple
    view:      int
    value:     object
    voter:     int
    signature: str

    @staticmethod
    def message(scope, view, value_hash):
        return encode(('qc-commit', scope, view, value_hash))

@dataclass(frozen=True)
class QcViewChange:
    """Entering `view`, with the highest lock and the sender's proposal."""
    scope:     tuple
    view:      int
    lock_view: int
    lock:      object
    lock_cert: tuple
    proposal:  object
    voter:     int
    signature: str

    @staticmethod
    def message(scope, view, lock_view, lock_hash):
        return encode(('qc-view-change', scope, view, lock_view, lock_hash))

@dataclass(frozen=True)
class QcDecideCert:
    scope:   tuple
    value:   object
    commits: tuple
