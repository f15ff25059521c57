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

# First party modules #

# Third party modules #

# Constants #
USER     = 'user'
REACTIVE = 'reactive'
COIN     = 'coin'

###############################################################################
@dataclass(frozen=True, order=True)
class ActorId:
    """
    Identifies an actor. User actors are bound to one signing key whose
    public id is the actor name. Names are unique across both kinds.
    """

    kind: str
    name: str

    def __post_init__(self):
        if self.kind not in (USER, REACTIVE):
            msg = "An actor kind must be '%s' or '%s', not '%s'."
            raise ValueError(msg % (USER, REACTIVE, self.kind))
        if not isinstance(self.name, str) or not self.name:
            raise ValueError("An actor needs a non-empty name.")

    def __str__(self): return self.name

    @property
    def is_user(self): return self.kind == USER

    @property
    def is_reactive(self): return self.kind == REACTIVE

def user(name):     return ActorId(USER, name)
def reactive(name): return ActorId(REACTIVE, name)

###############################################################################
@dataclass(frozen=True)
class OwnedObject:
    """
    An object owned by exactly one actor. For coins the payload is a
    non-negative integer amount.
    """

    object_id: str
    type_tag:  str
    payload:   object
    owner:     ActorId

    def __post_init__(self):
        if self.type_tag == COIN:
            if not isinstance(self.payload, int) or self.payload < 0:
                msg = "The coin '%s' has an invalid amount '%s'."
                raise ValueError(msg % (self.object_id, self.payload))

    @property
    def is_coin(self): return self.type_tag == COIN

    @property
    def amount(self):
        """Coin amount, zero for every other kind of object."""
        return self.payload if self.is_coin else 0

    def summary(self):
        """A JSON friendly description used in traces and snapshots."""
        return {'id':      self.object_id,
                'type':    self.type_tag,
                'payload': self.payload,
                'owner':   self.owner.name}

def coin(object_id, amount, owner):
    return OwnedObject(object_id, COIN, amount, owner)

def coin_total(objects):
    return sum(o.amount for o in objects)
