#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Written by Lucas Sinclair.
MIT Licensed.
Contact at www.sinclair.bio

A client controls user actors. It runs a script of timed emissions and
keeps its own view of what its actors own, which it learns from the
notices validators send after execution. A notice is believed once f+1
validators sent the same one.

Three behaviors exist:

    * honest: checks the emission predicate before broadcasting, that is
              the previous sequence number was executed and every consumed
              object is owned.
    * double-spender: skips the check and sends each variant of a step,
                      all with the same sequence number, to its own share
                      of the validators.
    * stale-object: skips the check, so it may consume objects that are
                    already gone.
"""

# Built-in modules #

# Internal modules #
from mangrove.core.objects       import user, reactive
from mangrove.core.transactions  import UaTx, UaRaTx
from mangrove.network.simulator  import Address, client_address
from mangrove.protocol           import messages

# First party modules #

# Third party modules #

# Constants #
behaviors = ('honest', 'double-spender', 'stale-object')

###############################################################################
class EmissionError(ValueError):
    """An honest client cannot emit this transaction now."""
    pass

###############################################################################
class UserClient:

    def __repr__(self):
        return '<%s object "%s" (%s)>' % (self.__class__.__name__, self.name,
                                          self.behavior)

    def __init__(self, sim, name, actors, behavior='honest', script=(),
                 objects=None, labels=None, max_tries=50):
        # Check #
        if behavior not in behaviors:
            msg = "The client behavior '%s' is not one of %s."
            raise ValueError(msg % (behavior, behaviors))
        # Save attributes #
        self.sim       = sim
        self.name      = name
        self.actors    = list(actors)
        self.behavior  = behavior
        self.script    = list(script)
        self.address   = client_address(name)
        self.max_tries = max_tries
        # Labels are shared by every client of a run #
        self.labels = labels if labels is not None else {}
        # Keys and sequence numbers #
        self.keys = {a: sim.keyring.generate(a) for a in self.actors}
        self.sns  = {a: 0 for a in self.actors}
        # Local view #
        objects       = objects or {}
        self.owned    = {a: {o.object_id: o for o in objects.get(a, ())}
                         for a in self.actors}
        self.known    = {o.object_id: o for a in self.actors
                         for o in objects.get(a, ())}
        self.executed = {a: set() for a in self.actors}
        self.outputs  = {}
        # Notices #
        self.notices  = {}
        self.accepted = set()
        # Register #
        sim.add_client(self)

    @property
    def honest(self): return self.behavior == 'honest'

    #------------------------------ Scheduling -------------------------------#
    def start(self):
        """Put every step of the script in the event queue."""
        for i, step in enumerate(self.script):
            self.sim.call_at(step.get('at', 0), self.address,
                             {'label': step.get('label'), 'step': i, 'try': 0})

    def on_call(self, payload):
        step = self.script[payload['step']]
        try:
            self.emit(step)
        except EmissionError as error:
            tries = step.get('tries', self.max_tries)
            if step.get('wait') and payload['try'] < tries:
                retry = dict(payload, **{'try': payload['try'] + 1})
                self.sim.call_at(self.sim.now + self.sim.params.delta_bound,
                                 self.address, retry)
                return
            self.sim.record('emit_error', at=self.address,
                            label=step.get('label'), actor=step.get('actor'),
                            reason=str(error))

    def on_timer(self, timer_id): pass

    #------------------------------- Emitting --------------------------------#
    def lookup(self, ref):
        """An object id, or '@label:index' for an output of a labeled step."""
        if isinstance(ref, str) and ref.startswith('@'):
            label, _, index = ref[1:].rpartition(':')
            outputs = self.outputs.get(self.labels.get(label), [])
            if not index.isdigit() or int(index) >= len(outputs):
                raise EmissionError("The reference '%s' is not known yet." % ref)
            return outputs[int(index)]
        if ref not in self.known:
            raise EmissionError("The object '%s' is unknown to '%s'." %
                                (ref, self.name))
        return self.known[ref]

    def check(self, actor, sn, consumed):
        """The emission predicate as seen from the local view."""
        if sn > 0 and (sn - 1) not in self.executed[actor]:
            msg = "Not possible to emit: '%s' has not executed sn %i."
            raise EmissionError(msg % (actor, sn - 1))
        for obj in consumed:
            if self.owned[actor].get(obj.object_id) != obj:
                msg = "Not possible to emit: '%s' does not own '%s'."
                raise EmissionError(msg % (actor, obj.object_id))

    def build(self, step, sn):
        actor    = step['actor']
        consumed = tuple(self.lookup(ref) for ref in step.get('consume', ()))
        if step.get('kind', 'ua') == 'ua':
            tx = UaTx(user(actor), sn, consumed, tuple(step.get('code', ())))
        else:
            tx = UaRaTx(user(actor), sn, reactive(step['recipient']), consumed,
                        tuple(step.get('code_pre', ())), step.get('call'),
                        tuple(step.get('code_post', ())))
        return self.sim.keyring.sign_tx(self.keys[actor], tx)

    def emit(self, step):
        """Build, check, sign and broadcast the transaction(s) of a step."""
        actor = step['actor']
        if actor not in self.sns:
            raise EmissionError("'%s' does not control '%s'." % (self.name, actor))
        sn = self.sns[actor]
        # One transaction per variant, all with the same sequence number #
        variants = step.get('variants') or [{}]
        txs = [self.build(dict(step, **variant), sn) for variant in variants]
        if self.honest: self.check(actor, sn, txs[0].consumed)
        self.sns[actor] = sn + 1
        # Split the validators between the variants #
        n = self.sim.params.n
        if self.behavior == 'double-spender':
            shares = [[i for i in range(n) if i * len(txs) // n == v]
                      for v in range(len(txs))]
        else:
            shares = [list(range(n))] + [[] for _ in txs[1:]]
        # Send #
        if step.get('label'): self.labels[step['label']] = txs[0].tx_id
        for variant, (tx, targets) in enumerate(zip(txs, shares)):
            recipient = tx.recipient.name if tx.kind == 'ua-ra' else None
            self.sim.record('emit', at=self.address, tx=tx.tx_id, tx_kind=tx.kind,
                            sender=actor, sn=sn, recipient=recipient,
                            consumed=list(tx.consumed_ids),
                            label=step.get('label'), variant=variant,
                            behavior=self.behavior, targets=targets)
            for i in targets:
                self.sim.send(self.address, Address(i, actor),
                              messages.UaTx(tx))
        return txs

    #------------------------------ Receiving --------------------------------#
    def on_message(self, msg, src):
        if not isinstance(msg, messages.ClientNotice): return
        if msg.actor not in self.owned: return
        key = (msg.actor, msg.kind, msg.tx_id, msg.sn, msg.created,
               msg.consumed)
        if key in self.accepted: return
        voters = self.notices.setdefault(key, set())
        voters.add(src.node)
        if len(voters) < self.sim.params.f + 1: return
        # Believe it #
        self.accepted.add(key)
        owned = self.owned[msg.actor]
        for object_id in msg.consumed: owned.pop(object_id, None)
        for obj in msg.created:
            owned[obj.object_id]  = obj
            self.known[obj.object_id] = obj
        self.outputs.setdefault(msg.tx_id, []).extend(msg.created)
        if msg.kind == 'executed' and msg.sn is not None:
            self.executed[msg.actor].add(msg.sn)
        self.sim.record('accept', at=self.address, actor=msg.actor,
                        notice=msg.kind, tx=msg.tx_id, sn=msg.sn,
                        created=[o.object_id for o in msg.created])
