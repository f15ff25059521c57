#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Written by Lucas Sinclair.
MIT Licensed.
Contact at www.sinclair.bio

The closed library of reactive actor programs. A handler is a pure
function of (state, arguments, inputs, holdings) where `inputs` are the
objects passed to this call (already owned by the actor) and `holdings`
are all objects the actor owns including those inputs. It returns a
CallOutcome describing the new state, the objects it hands out, which of
its holdings it spent and which RA-RA transactions it wants to emit.
"""

# Built-in modules #
from dataclasses import dataclass

# Internal modules #
from mangrove.core.objects import COIN, coin_total
from mangrove.vm.commands  import RaRaTemplate, call

# First party modules #

# Third party modules #

###############################################################################
class IllTyped(ValueError):
    """A command or a call that cannot be executed."""
    pass

class UnknownFunction(IllTyped):
    pass

###############################################################################
@dataclass(frozen=True)
class CallOutcome:
    """`returned` holds (type_tag, payload, owner name) triples."""

    state:    object
    returned: tuple = ()
    spent:    tuple = ()
    emit:     tuple = ()

###############################################################################
class RaProgram:
    """A named set of handlers and an initial state."""

    def __repr__(self): return '<%s "%s">' % (self.__class__.__name__, self.name)

    name     = None
    initial  = None
    handlers = ()

    def handle(self, state, spec, inputs, holdings, me):
        """Dispatch `spec` (a CallSpec) to the handler of the same name."""
        if spec is None or spec.function not in self.handlers:
            function = spec.function if spec is not None else None
            msg = "The program '%s' has no function '%s'."
            raise UnknownFunction(msg % (self.name, function))
        handler = getattr(self, spec.function)
        try:
            return handler(state, inputs, holdings, me, **spec.kwargs)
        except TypeError as error:
            raise IllTyped("Bad arguments to '%s': %s" % (spec.function, error))

    def initial_state(self, given=None):
        if given is None: return self.initial
        return given

###############################################################################
def pick_coins(objects, amount):
    """Smallest prefix (by object id) of coins reaching `amount`."""
    chosen, total = [], 0
    for obj in sorted(objects, key=lambda o: o.object_id):
        if total >= amount: break
        if obj.type_tag != COIN: continue
        chosen.append(obj)
        total += obj.payload
    if total < amount:
        raise IllTyped("Holdings of %i cannot cover %i." % (total, amount))
    return chosen, total

###############################################################################
class Counter(RaProgram):
    name     = 'counter'
    initial  = 0
    handlers = ('inc', 'get')

    def inc(self, state, inputs, holdings, me, by=1):
        return CallOutcome(state + by)

    def get(self, state, inputs, holdings, me):
        return CallOutcome(state)

###############################################################################
class Vault(RaProgram):
    """
    Keeps coins. The state is the balance, the coins themselves are the
    actor's owned objects.
    """

    name     = 'vault'
    initial  = 0
    handlers = ('deposit', 'withdraw', 'forward')

    def deposit(self, state, inputs, holdings, me):
        return CallOutcome(state + coin_total(inputs))

    def withdraw(self, state, inputs, holdings, me, amount, to):
        if amount > state: raise IllTyped("Balance %i below %i." % (state, amount))
        chosen, total = pick_coins(holdings, amount)
        returned = [(COIN, amount, to)]
        if total > amount: returned.append((COIN, total - amount, me))
        return CallOutcome(state - amount + coin_total(inputs),
                           returned = tuple(returned),
                           spent    = tuple(o.object_id for o in chosen))

    def forward(self, state, inputs, holdings, me, target, function='deposit'):
        """Pass this call's inputs on to `target` with an RA-RA call."""
        template = RaRaTemplate(recipient = target,
                                consumed  = tuple(o.object_id for o in inputs),
                                call      = call(function))
        return CallOutcome(state, emit=(template,))

###############################################################################
class Marketplace(RaProgram):
    """Sellers list items at a price, buyers pay with coins."""

    name     = 'marketplace'
    initial  = {}
    handlers = ('offer', 'buy')

    def offer(self, state, inputs, holdings, me, item, price, seller):
        listings = dict(state)
        listings[item] = [price, seller]
        return CallOutcome(listings)

    def buy(self, state, inputs, holdings, me, item, buyer):
        if item not in state: raise IllTyped("No listing for '%s'." % item)
        price, seller = state[item]
        paid = coin_total(inputs)
        if paid < price: raise IllTyped("Paid %i for a price of %i." % (paid, price))
        returned = [(COIN, price, seller), ('item', item, buyer)]
        if paid > price: returned.append((COIN, paid - price, buyer))
        listings = {k: v for k, v in state.items() if k != item}
        return CallOutcome(listings,
                           returned = tuple(returned),
                           spent    = tuple(o.object_id for o in inputs))

###############################################################################
library = {cls.name: cls() for cls in (Counter, Vault, Marketplace)}

def get_program(name):
    if name not in library:
        msg = "Unknown program '%s', the library has %s."
        raise ValueError(msg % (name, sorted(library)))
    return library[name]
