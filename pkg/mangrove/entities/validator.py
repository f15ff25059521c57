#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Written by Lucas Sinclair.
MIT Licensed.
Contact at www.sinclair.bio

A validator hosts one entity per actor. Entities are created on first
use from the world directory, which lists the user actors (with the
client controlling each of them) and the reactive actors with their
program, initial state and initial objects.
"""

# Built-in modules #

# Internal modules #
from mangrove.core.objects       import user, reactive
from mangrove.network.simulator  import client_address
from mangrove.protocol.poa       import LeaderOracle
from mangrove.entities.user_actor     import UserActorEntity
from mangrove.entities.reactive_actor import ReactiveActorEntity

# First party modules #

# Third party modules #

###############################################################################
class World:
    """Initial actors and objects, shared read-only by every validator."""

    def __repr__(self):
        return '<%s object with %i users and %i reactive actors>' % \
               (self.__class__.__name__, len(self.users), len(self.reactive))

    def __init__(self, users=None, reactive=None, controllers=None):
        # Name to tuple of initial objects #
        self.users = dict(users or {})
        # Name to (program, state, objects) #
        self.reactive = dict(reactive or {})
        # User name to client name #
        self.controllers = dict(controllers or {})
        # Check names are unique #
        clash = set(self.users) & set(self.reactive)
        if clash:
            raise ValueError("Actor names used twice: %s." % sorted(clash))

    def controller(self, name):
        return self.controllers.get(name)

###############################################################################
class Validator:
    """
    One validator. Byzantine validators run the honest entities too, but
    a `strategy` rewrites everything they send over Outer Links.
    """

    def __repr__(self):
        return '<%s object V%i>' % (self.__class__.__name__, self.index)

    def __init__(self, sim, index, world, strategy=None):
        # Save attributes #
        self.sim      = sim
        self.index    = index
        self.world    = world
        self.strategy = strategy
        # Keys and leaders #
        self.key    = sim.keyring.validator_key(index)
        self.oracle = LeaderOracle(sim.params.n)
        # Reactive actors known here, including spawned ones #
        self.reactive = dict(world.reactive)
        # Entities by actor name #
        self.entities = {}
        # Register #
        sim.add_node(self)

    @property
    def byzantine(self): return self.strategy is not None

    #------------------------------ Directory --------------------------------#
    def resolve(self, name):
        """The ActorId called `name`, None when nobody has that name."""
        if name in self.world.users: return user(name)
        if name in self.reactive:    return reactive(name)
        return None

    def entity(self, name):
        if name not in self.entities:
            if name in self.world.users:
                entity = UserActorEntity(self, user(name),
                                         self.world.users[name])
            elif name in self.reactive:
                program, state, objects = self.reactive[name]
                entity = ReactiveActorEntity(self, reactive(name), program,
                                             state, objects)
            else:
                raise KeyError("Validator %i knows no actor '%s'." %
                               (self.index, name))
            self.entities[name] = entity
        return self.entities[name]

    def spawn_reactive(self, actor, program, state=None):
        """A reactive actor created by executed user code."""
        if actor.name in self.reactive: return
        self.reactive[actor.name] = (program, state, ())
        self.sim.record('spawn', at='V%i' % self.index, actor=actor.name,
                        program=program)

    #------------------------------ Messaging --------------------------------#
    def send(self, src, dst, msg):
        if self.strategy is None or dst.node == self.index:
            return self.sim.send(src, dst, msg)
        for target, payload in self.strategy.outgoing(self, src, dst, msg):
            self.sim.send(src, target, payload)

    def send_client(self, src, client, msg):
        self.send(src, client_address(client), msg)

    def observe(self, msg):
        if self.strategy is not None: self.strategy.observe(self, msg)

    def release(self):
        if self.strategy is not None: self.strategy.release(self)

    def select_proposals(self, known, need, derive):
        """Which proposals a Quorum Consensus leader justifies its value with."""
        if self.strategy is None: return list(known)
        return self.strategy.select_proposals(self, known, need, derive)

    #------------------------------- Output ----------------------------------#
    def snapshot(self):
        names = sorted(set(self.world.users) | set(self.reactive))
        return [self.entity(name).snapshot() for name in names]
