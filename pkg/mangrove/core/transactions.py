#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Written by Lucas Sinclair.
MIT Licensed.
Contact at www.sinclair.bio

The three transaction kinds and the blocks that POA instances decide.

Every transaction carries the full content of the objects it consumes so
that the entity executing it can read their payloads. The user actor's
entity checks those contents against its own owned objects before it
locks or executes anything.
"""

# Built-in modules #
import dataclasses, hashlib
from dataclasses import dataclass, field

# Internal modules #
from mangrove.core.serialization import encode, digest, short

# First party modules #

# Third party modules #

# Constants #
UA, UA_RA, RA_RA = 'ua', 'ua-ra', 'ra-ra'

###############################################################################
class Transaction:
    """
    Common behavior of every transaction kind. Two transactions are equal
    exactly when their `tx_id` is equal. The id is the hash of the body,
    which is every field except the signature.
    """

    kind = None

    def __post_init__(self):
        body = encode(self.body)
        object.__setattr__(self, 'signing_bytes', body)
        object.__setattr__(self, 'tx_id', hashlib.sha256(body).hexdigest())
        object.__setattr__(self, 'wire_bytes', encode(self.wire))

    def __repr__(self):
        return '<%s %s from "%s">' % (self.__class__.__name__,
                                      short(self.tx_id), self.sender)

    def __eq__(self, other):
        if not isinstance(other, Transaction): return NotImplemented
        return self.tx_id == other.tx_id

    def __hash__(self): return hash(self.tx_id)

    #----------------------------- Properties --------------------------------#
    body_fields = ()

    @property
    def body(self):
        return (self.kind,) + tuple(getattr(self, n) for n in self.body_fields)

    @property
    def wire(self):
        return (self.body, getattr(self, 'signature', None))

    @property
    def consumed_ids(self):
        return tuple(o.object_id for o in self.consumed)

    @property
    def is_user(self):
        return self.kind in (UA, UA_RA)

    @property
    def key(self):
        """The (sender, sn) slot that user transactions compete for."""
        return (self.sender.name, self.sn)

    def summary(self):
        """A JSON friendly description used in trace records."""
        recipient = getattr(self, 'recipient', None)
        return {'id':        self.tx_id,
                'kind':      self.kind,
                'sender':    self.sender.name,
                'sn':        self.sn,
                'recipient': recipient.name if recipient else None,
                'consumed':  list(self.consumed_ids)}

    #------------------------------- Methods ---------------------------------#
    def signed_with(self, signature):
        return dataclasses.replace(self, signature=signature)

###############################################################################
@dataclass(frozen=True, eq=False, repr=False)
class UaTx(Transaction):
    """A transaction touching only its sender's objects."""

    kind = UA
    body_fields = ('sender', 'sn', 'consumed', 'code')

    sender:    object
    sn:        int
    consumed:  tuple = ()
    code:      tuple = ()
    signature: str   = None
    tx_id:         str   = field(init=False, repr=False, compare=False)
    signing_bytes: bytes = field(init=False, repr=False, compare=False)
    wire_bytes:    bytes = field(init=False, repr=False, compare=False)

    def __post_init__(self): Transaction.__post_init__(self)

###############################################################################
@dataclass(frozen=True, eq=False, repr=False)
class UaRaTx(Transaction):
    """A user actor calling a function of a reactive actor."""

    kind = UA_RA
    body_fields = ('sender', 'sn', 'recipient', 'consumed', 'code_pre',
                   'call', 'code_post')

    sender:    object
    sn:        int
    recipient: object
    consumed:  tuple  = ()
    code_pre:  tuple  = ()
    call:      object = None
    code_post: tuple  = ()
    signature: str    = None
    tx_id:         str   = field(init=False, repr=False, compare=False)
    signing_bytes: bytes = field(init=False, repr=False, compare=False)
    wire_bytes:    bytes = field(init=False, repr=False, compare=False)

    def __post_init__(self): Transaction.__post_init__(self)

###############################################################################
@dataclass(frozen=True, eq=False, repr=False)
class RaRaTx(Transaction):
    """
    A reactive actor calling another one. There is no sequence number and
    no signature, the `origin` (parent tx id and emission index) keeps ids
    unique when two executions emit the same call.
    """

    kind = RA_RA
    sn   = None
    body_fields = ('sender', 'recipient', 'consumed', 'call', 'code_post',
                   'origin')

    sender:    object
    recipient: object
    consumed:  tuple  = ()
    call:      object = None
    code_post: tuple  = ()
    origin:    str    = ''
    tx_id:         str   = field(init=False, repr=False, compare=False)
    signing_bytes: bytes = field(init=False, repr=False, compare=False)
    wire_bytes:    bytes = field(init=False, repr=False, compare=False)

    def __post_init__(self): Transaction.__post_init__(self)

    @property
    def key(self): return None

###############################################################################
def conflicts(a, b):
    """Same user sender, same sequence number, different content."""
    if not (a.is_user and b.is_user): return False
    return a.sender == b.sender and a.sn == b.sn and a.tx_id != b.tx_id

def canonical_order(txs):
    """Sort by id, duplicates collapse since equality is id equality."""
    return sorted(set(txs), key=lambda tx: tx.tx_id)

def listing(value):
    """Trace friendly list of the transactions in a block or a single tx."""
    if value is None: return []
    if isinstance(value, Transaction): return [value.summary()]
    return [tx.summary() for tx in canonical_order(value.txs)]

def value_hash(value):
    """What votes and certificates refer to: block hash or tx id."""
    if isinstance(value, Block):       return value.block_hash
    if isinstance(value, Transaction): return value.tx_id
    return digest(value)

###############################################################################
@dataclass(frozen=True, eq=False)
class Block:
    """
    The set of transactions decided by instance `instance` of the POA of
    reactive actor `actor`. The hash covers the actor, the instance and
    the sorted transaction ids, so empty blocks differ per instance.
    """

    actor:    str
    instance: int
    txs:      frozenset = frozenset()
    block_hash: str   = field(init=False, repr=False, compare=False)
    wire_bytes: bytes = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        txs = frozenset(self.txs)
        object.__setattr__(self, 'txs', txs)
        ids = sorted(tx.tx_id for tx in txs)
        object.__setattr__(self, 'block_hash',
                           digest(('block', self.actor, self.instance, ids)))
        object.__setattr__(self, 'wire_bytes',
                           encode(('block', self.actor, self.instance,
                                   [tx.wire_bytes for tx in
                                    canonical_order(txs)])))

    def __repr__(self):
        return '<Block %s/%i with %i txs>' % (self.actor, self.instance,
                                              len(self.txs))

    def __eq__(self, other):
        if not isinstance(other, Block): return NotImplemented
        return self.block_hash == other.block_hash

    def __hash__(self): return hash(self.block_hash)

    def __len__(self): return len(self.txs)

    def __contains__(self, tx): return tx in self.txs

    @property
    def canonical_order(self): return canonical_order(self.txs)

    @property
    def tx_ids(self): return sorted(tx.tx_id for tx in self.txs)

    @property
    def ua_ra(self):
        return [tx for tx in self.canonical_order if tx.kind == UA_RA]

    @property
    def ra_ra(self):
        return [tx for tx in self.canonical_order if tx.kind == RA_RA]

    def without(self, txs):
        removed = set(txs)
        return Block(self.actor, self.instance,
                     frozenset(tx for tx in self.txs if tx not in removed))

###############################################################################
@dataclass(frozen=True)
class NoTransaction:
    """
    What Transaction Agreement decides for the slot (`actor`, `sn`) when
    the proposals it was derived from back no transaction strongly
    enough. Only a user that signed conflicting transactions can end up
    here, its slot then executes nothing.
    """

    actor: str
    sn:    int

    kind = None
    txs  = frozenset()
