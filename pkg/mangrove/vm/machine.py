#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Written by Lucas Sinclair.
MIT Licensed.
Contact at www.sinclair.bio

Deterministic execution of transaction code and reactive actor calls.

Object ids of everything created are derived from the transaction id,
the stage and a running index, so every validator derives the same ids.
Execution is total: anything ill-typed turns the whole transaction into
a failure that still consumes its inputs and leaves the reactive actor
state untouched.
"""

# Built-in modules #
from dataclasses import dataclass

# Internal modules #
from mangrove.core.objects import OwnedObject, COIN, coin_total, reactive, user
from mangrove.vm.commands  import (Split, Merge, Transfer, CreateObject,
                                   CreateReactiveActor, SpawnTx, RaRaTemplate)
from mangrove.vm.programs  import IllTyped

# First party modules #

# Third party modules #

###############################################################################
@dataclass(frozen=True)
class Effects:
    """
    The outcome of executing one transaction:

        * created: objects that exist afterwards, with their owners.
        * rara: RA-RA templates waiting for the emission check.
        * returned: objects handed out by the call.
        * actors: (ActorId, program, init_state) of spawned reactive actors.
        * spent: ids of the executing reactive actor's holdings used up.
        * absorbed: call inputs now owned by the reactive actor.
        * state: the reactive actor state afterwards.
        * burned / minted: coin amounts destroyed and created.
    """

    created:  tuple  = ()
    rara:     tuple  = ()
    returned: tuple  = ()
    actors:   tuple  = ()
    spent:    tuple  = ()
    absorbed: tuple  = ()
    state:    object = None
    failed:   bool   = False
    error:    str    = None
    burned:   int    = 0
    minted:   int    = 0

    def owned_by(self, name):
        return tuple(o for o in self.created if o.owner.name == name)

    def summary(self):
        return {'created': [o.object_id for o in self.created],
                'failed':  self.failed,
                'error':   self.error,
                'burned':  self.burned,
                'minted':  self.minted}

def failure(error, consumed, state=None):
    """Empty effects that still account for the consumed coins."""
    return Effects(state=state, failed=True, error=str(error),
                   burned=coin_total(consumed))

def default_resolve(name):
    """Without a directory every name is taken to be a user actor."""
    return user(name)

###############################################################################
class Workspace:
    """The slots one stage of code operates on."""

    def __init__(self, inputs, ctx, stage, resolve, emitter=None,
                 allow_actors=False):
        self.slots        = list(inputs)
        self.inputs       = len(self.slots)
        self.ctx          = ctx
        self.stage        = stage
        self.resolve      = resolve or default_resolve
        self.emitter      = emitter
        self.allow_actors = allow_actors
        self.count        = 0
        self.templates    = []
        self.actors       = []
        self.minted       = 0

    #------------------------------- Helpers ---------------------------------#
    def fresh_id(self):
        self.count += 1
        return '%s.%s.%i' % (self.ctx[:16], self.stage, self.count)

    def get(self, slot):
        if not isinstance(slot, int) or not 0 <= slot < len(self.slots):
            raise IllTyped("No slot %s in the workspace." % (slot,))
        obj = self.slots[slot]
        if obj is None: raise IllTyped("Slot %i was already consumed." % slot)
        return obj

    def take(self, slot):
        obj = self.get(slot)
        self.slots[slot] = None
        return obj

    def owner(self, name):
        """Explicit owners must be user actors."""
        actor = self.resolve(name)
        if actor is None: raise IllTyped("Unknown actor '%s'." % name)
        if not actor.is_user:
            msg = "Code cannot create objects at the reactive actor '%s'."
            raise IllTyped(msg % name)
        return actor

    def add(self, type_tag, payload, owner):
        try:
            obj = OwnedObject(self.fresh_id(), type_tag, payload, owner)
        except ValueError as error:
            raise IllTyped(str(error))
        self.slots.append(obj)
        return obj

    @property
    def live(self): return [o for o in self.slots if o is not None]

    @property
    def created(self):
        return [o for o in self.slots[self.inputs:] if o is not None]

    @property
    def leftover(self):
        return [o for o in self.slots[:self.inputs] if o is not None]

    #------------------------------ Commands ---------------------------------#
    def run(self, code):
        for command in code: self.apply(command)
        return self

    def apply(self, command):
        if isinstance(command, Split):
            source = self.take(command.slot)
            parts  = list(command.parts)
            if source.type_tag != COIN: raise IllTyped("Only coins can be split.")
            if any(not isinstance(x, int) or x < 0 for x in parts):
                raise IllTyped("Invalid split amounts %s." % parts)
            if sum(parts) != source.payload:
                msg = "Split amounts %s do not add up to %i."
                raise IllTyped(msg % (parts, source.payload))
            owners = command.owners
            if owners is None: owners = [None] * len(parts)
            if len(owners) != len(parts):
                raise IllTyped("Split needs one owner per part.")
            for amount, name in zip(parts, owners):
                owner = source.owner if name is None else self.owner(name)
                self.add(COIN, amount, owner)
        elif isinstance(command, Merge):
            slots = list(command.slots)
            if not slots or len(set(slots)) != len(slots):
                raise IllTyped("Merge needs distinct slots.")
            coins = [self.take(s) for s in slots]
            if any(c.type_tag != COIN for c in coins):
                raise IllTyped("Only coins can be merged.")
            self.add(COIN, coin_total(coins), coins[0].owner)
        elif isinstance(command, Transfer):
            source = self.take(command.slot)
            self.add(source.type_tag, source.payload, self.owner(command.owner))
        elif isinstance(command, CreateObject):
            obj = self.add(command.type_tag, command.payload,
                           self.owner(command.owner))
            self.minted += obj.amount
        elif isinstance(command, CreateReactiveActor):
            if not self.allow_actors:
                raise IllTyped("Only user code can create reactive actors.")
            name = '%s-%s-%i' % (command.program, self.ctx[:8],
                                 len(self.actors))
            self.actors.append((reactive(name), command.program,
                                command.init_state))
        elif isinstance(command, SpawnTx):
            if self.emitter is None:
                raise IllTyped("Only reactive actors can spawn transactions.")
            ids = tuple(self.get(s).object_id for s in command.slots)
            self.templates.append(RaRaTemplate(command.recipient, ids,
                                               command.call,
                                               tuple(command.code_post)))
        else:
            raise IllTyped("Unknown command %r." % (command,))

###############################################################################
def execute_code(code, inputs, ctx, resolve=None, stage='code', emitter=None,
                 allow_actors=False):
    """
    Run a CommandList on `inputs`. Returns Effects where `created` are
    the objects made by the commands. Inputs left untouched are consumed
    and show up as burned coins. Failures give flagged empty effects.
    """
    try:
        space = Workspace(inputs, ctx, stage, resolve, emitter,
                          allow_actors).run(code)
    except IllTyped as error:
        return failure(error, inputs)
    return Effects(created = tuple(space.created),
                   rara    = tuple(space.templates),
                   actors  = tuple(space.actors),
                   burned  = coin_total(space.leftover),
                   minted  = space.minted)

def execute_call(program, state, spec, inputs, holdings=(), me=None,
                 resolve=None, ctx=''):
    """
    Run one call of `program` on behalf of the reactive actor `me`.
    Returns (state′, Effects). Unknown functions and bad arguments leave
    the state unchanged and flag a failure.
    """
    try:
        name    = me.name if me is not None else None
        outcome = program.handle(state, spec, tuple(inputs), tuple(holdings),
                                 name)
        # Spent objects must be held #
        held = {o.object_id for o in holdings} | {o.object_id for o in inputs}
        for object_id in outcome.spent:
            if object_id not in held:
                raise IllTyped("The call spent '%s' it does not hold." %
                               object_id)
        # Materialise the returned objects #
        returned = []
        for i, (tag, payload, owner) in enumerate(outcome.returned):
            actor = me if owner == name else (resolve or default_resolve)(owner)
            if actor is None: raise IllTyped("Unknown actor '%s'." % owner)
            if actor.is_reactive and actor != me:
                msg = "A call cannot create objects at another reactive actor."
                raise IllTyped(msg)
            try:
                returned.append(OwnedObject('%s.ret.%i' % (ctx[:16], i), tag,
                                            payload, actor))
            except ValueError as error:
                raise IllTyped(str(error))
    except IllTyped as error:
        return state, failure(error, inputs, state)
    # Return #
    return outcome.state, Effects(returned = tuple(returned),
                                  rara     = tuple(outcome.emit),
                                  spent    = tuple(outcome.spent),
                                  state    = outcome.state)

###############################################################################
def execute_user_tx(tx, resolve):
    """Execute the code of a UA transaction, the only place actors can spawn."""
    return execute_code(tx.code, tx.consumed, tx.tx_id, resolve, stage='code',
                        allow_actors=True)

def execute_reactive_tx(tx, program, state, holdings, me, resolve):
    """
    Execute a UA-RA or RA-RA transaction at the reactive actor `me`:
    code_pre over the consumed objects (UA-RA only), the call on the
    actor state, then code_post over the returned objects.
    """
    ctx = tx.tx_id
    try:
        # Prepare the call inputs #
        minted = 0
        if tx.kind == 'ua-ra':
            pre = Workspace(tx.consumed, ctx, 'pre', resolve).run(tx.code_pre)
            prepared, minted = pre.live, pre.minted
        else:
            prepared = list(tx.consumed)
        # The reactive actor takes ownership of the call inputs #
        absorbed = tuple(OwnedObject('%s.in.%i' % (ctx[:16], i), o.type_tag,
                                     o.payload, me)
                         for i, o in enumerate(prepared))
        # Call #
        new_state, called = execute_call(program, state, tx.call, absorbed,
                                         tuple(holdings) + absorbed, me,
                                         resolve, ctx)
        if called.failed: raise IllTyped(called.error)
        # Post-processing of what the call returned #
        post = Workspace(called.returned, ctx, 'post', resolve,
                         emitter=me).run(tx.code_post)
        minted += post.minted
    except IllTyped as error:
        return failure(error, tx.consumed, state)
    # Return #
    spent = set(called.spent)
    return Effects(created  = tuple(post.live),
                   rara     = tuple(called.rara) + tuple(post.templates),
                   returned = called.returned,
                   spent    = tuple(sorted(spent)),
                   absorbed = tuple(o for o in absorbed
                                    if o.object_id not in spent),
                   state    = new_state,
                   minted   = minted)
