#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Written by Lucas Sinclair.
MIT Licensed.
Contact at www.sinclair.bio

Property checkers. Each one is a pure function that takes a Trace and
returns an Outcome. They only ever look at the records, so they can be
run again offline on a stored trace file. Records written at Byzantine
validators are ignored unless stated otherwise.

A liveness property that does not hold when the run stopped at its
horizon is reported as `horizon` instead of `fail`, the run was simply
not long enough to tell.
"""

# Built-in modules #
from dataclasses import dataclass

# Internal modules #

# First party modules #

# Third party modules #
import pandas
from tabulate import tabulate

# Constants #
PASS, FAIL, HORIZON, SKIPPED = 'pass', 'fail', 'horizon', 'skipped'

###############################################################################
@dataclass(frozen=True)
class Outcome:
    name:    str
    status:  str
    record:  int = None
    message: str = ''

    @property
    def ok(self): return self.status in (PASS, SKIPPED)

def passed(name, message=''):
    return Outcome(name, PASS, None, message)

def failed(name, record, message):
    return Outcome(name, FAIL, record['id'] if record else None, message)

def unfinished(name, trace, record, message):
    """Fails at quiescence, only inconclusive when the horizon was hit."""
    status = HORIZON if trace.status == 'horizon' else FAIL
    return Outcome(name, status, record['id'] if record else None, message)

###############################################################################
class CheckReport:
    """The outcomes of several checkers on one trace."""

    def __repr__(self):
        return '<%s object with %i outcomes>' % (self.__class__.__name__,
                                                 len(self.outcomes))

    def __init__(self, outcomes=()):
        self.outcomes = list(outcomes)

    def __iter__(self): return iter(self.outcomes)

    def __getitem__(self, name):
        for outcome in self.outcomes:
            if outcome.name == name: return outcome
        raise KeyError(name)

    @property
    def ok(self): return all(o.ok for o in self.outcomes)

    @property
    def violations(self):
        return [o for o in self.outcomes if o.status == FAIL]

    @property
    def exit_code(self):
        """0 all pass, 1 a violation, 3 a liveness check hit the horizon."""
        if self.violations: return 1
        if any(o.status == HORIZON for o in self.outcomes): return 3
        return 0

    def merge(self, other):
        return CheckReport(self.outcomes + list(other))

    #------------------------------- Output ----------------------------------#
    @property
    def frame(self):
        rows = [{'check': o.name, 'status': o.status, 'record': o.record,
                 'message': o.message} for o in self.outcomes]
        return pandas.DataFrame(rows, columns=['check', 'status', 'record',
                                               'message'])

    def __str__(self):
        frame = self.frame.fillna('')
        return tabulate(frame, headers='keys', tablefmt='simple',
                        showindex=False)

###############################################################################
# Helpers #
def node_of(at):
    """The validator index of an address string such as 'V3.alice'."""
    if not at or not at.startswith('V'): return None
    return int(at[1:].split('.')[0])

def actor_of(at):
    return at.split('.', 1)[1] if at and '.' in at else None

def honest_nodes(trace):
    meta = trace.meta
    return set(range(meta.get('n', 0))) - set(meta.get('byzantine', []))

def honest_records(trace, *kinds):
    honest = honest_nodes(trace)
    return [r for r in trace.records if r['kind'] in kinds
            and node_of(r.get('at')) in honest]

def protocol_of(scope):
    return scope.split('/')[0] if scope else None

def user_executions(trace):
    """Every honest record of a user transaction taking effect."""
    result = []
    for record in honest_records(trace, 'execute', 'settle'):
        if record.get('tx_kind') == 'ra-ra' or record.get('sn') is None:
            continue
        result.append(record)
    return result

def sender_of(record):
    """Settle records are written at the sender's own entity."""
    if record['kind'] == 'settle': return actor_of(record['at'])
    return record.get('sender')

###############################################################################
# Network #
def delivery_bound(trace):
    """Outer deliveries happen in (t, max(t+Δ, GST+Δ)], inner ones at t."""
    name  = 'delivery_bound'
    meta  = trace.meta
    delta, gst = meta.get('delta'), meta.get('gst', 0)
    for record in trace.of_kind('deliver'):
        sent = trace[record['cause']]['time']
        if record['link'] == 'inner':
            if record['time'] != sent:
                return failed(name, record, "Inner delivery took time.")
            continue
        if not sent < record['time'] <= max(sent + delta, gst + delta):
            msg = "Sent at %i but delivered at %i." % (sent, record['time'])
            return failed(name, record, msg)
    return passed(name)

def perfect_links(trace):
    """Each send is delivered once, only Byzantine senders lose messages."""
    name = 'perfect_links'
    byzantine = set(trace.meta.get('byzantine', []))
    delivered, dropped = set(), set()
    for record in trace.of_kind('deliver'):
        cause = trace[record['cause']]
        if cause['kind'] != 'send' or cause['dst'] != record['at'] or \
           cause['digest'] != record['digest']:
            return failed(name, record, "Delivery of something never sent.")
        if cause['id'] in delivered:
            return failed(name, record, "Message delivered twice.")
        delivered.add(cause['id'])
    for record in trace.of_kind('drop'):
        if 'send' not in record: continue
        if node_of(record['at']) not in byzantine:
            return failed(name, record, "An honest message was lost.")
        dropped.add(record['send'])
    if trace.status == 'quiescent':
        accounted = delivered | dropped
        for record in trace.of_kind('send'):
            if record['id'] not in accounted:
                return failed(name, record, "Message never delivered.")
    return passed(name)

###############################################################################
# Agreement #
def agreement(trace):
    """Honest validators decide at most once per scope and all the same."""
    name = 'agreement'
    first, seen = {}, set()
    for record in honest_records(trace, 'decide'):
        scope = record['scope']
        if (record['at'], scope) in seen:
            return failed(name, record, "Second decision in %s." % scope)
        seen.add((record['at'], scope))
        value = first.setdefault(scope, record['value'])
        if value != record['value']:
            return failed(name, record, "Two values decided in %s." % scope)
    return passed(name, "%i scopes" % len(first))

def no_conflict(trace):
    """Two transactions of one (sender, sn) never both take effect."""
    name = 'no_conflict'
    slots = {}
    def check(record, sender, sn, tx):
        if sn is None: return None
        known = slots.setdefault((sender, sn), tx)
        if known != tx:
            return failed(name, record, "Conflicting transactions for %s/%s."
                          % (sender, sn))
    for record in honest_records(trace, 'execute', 'settle', 'decide'):
        if record['kind'] == 'decide':
            if protocol_of(record['scope']) not in ('poa', 'pob'): continue
            for tx in record['txs']:
                result = check(record, tx['sender'], tx['sn'], tx['id'])
                if result: return result
        else:
            result = check(record, sender_of(record), record.get('sn'),
                           record['tx'])
            if result: return result
    return passed(name, "%i slots" % len(slots))

def ua_agreement(trace):
    """Every honest V.A takes user transactions in sequence number order."""
    name = 'ua_agreement'
    progress = {}
    for record in user_executions(trace):
        at = record['at']
        if actor_of(at) != sender_of(record): continue
        expected = progress.get(at, 0)
        if record['sn'] != expected:
            msg = "%s took sn %s while expecting %i." % (at, record['sn'],
                                                         expected)
            return failed(name, record, msg)
        progress[at] = expected + 1
    return passed(name)

def integrity(trace):
    """Every transaction is executed at most once per entity and was emitted."""
    name = 'integrity'
    emitted = {r['tx'] for r in trace.of_kind('emit')}
    seen = set()
    for record in honest_records(trace, 'execute', 'settle'):
        key = (record['at'], record['kind'], record['tx'])
        if key in seen:
            return failed(name, record, "Executed twice at %s." % record['at'])
        seen.add(key)
        if record['tx'] not in emitted:
            return failed(name, record, "The transaction was never emitted.")
    return passed(name)

def ra_total_order(trace):
    """Honest V.X execute the same sequence, one a prefix of the other."""
    name = 'ra_total_order'
    chains = {}
    for record in honest_records(trace, 'execute'):
        if record.get('instance') is None: continue
        chains.setdefault(record['actor'], {}).setdefault(record['at'], []) \
              .append((record['tx'], record))
    for actor, per_node in sorted(chains.items()):
        longest = max(per_node.values(), key=len)
        for at, chain in sorted(per_node.items()):
            for (tx, record), (reference, _) in zip(chain, longest):
                if tx != reference:
                    msg = "%s diverges from the order of %s." % (at, actor)
                    return failed(name, record, msg)
    # At quiescence every honest entity of an actor has the full chain #
    if trace.status == 'quiescent':
        honest = honest_nodes(trace)
        for actor, per_node in sorted(chains.items()):
            sizes = {len(per_node.get('V%i.%s' % (i, actor), [])) for i in honest}
            if len(sizes) > 1:
                return failed(name, None, "Chains of '%s' differ in length %s."
                              % (actor, sorted(sizes)))
    return passed(name)

def object_safety(trace):
    """No honest validator lets an object be consumed or created twice."""
    name = 'object_safety'
    consumed, created = {}, {}
    for record in honest_records(trace, 'execute', 'settle', 'emit'):
        node = node_of(record['at'])
        if record['kind'] != 'emit' and record.get('failed'): continue
        for object_id in record.get('consumed', []):
            tx = consumed.setdefault((node, object_id), record['tx'])
            if tx != record['tx']:
                msg = "'%s' consumed twice at V%i." % (object_id, node)
                return failed(name, record, msg)
        for obj in record.get('created', []) if record['kind'] != 'emit' else []:
            tx = created.setdefault((node, obj['id']), record['tx'])
            if tx != record['tx']:
                msg = "'%s' created twice at V%i." % (obj['id'], node)
                return failed(name, record, msg)
    return passed(name)

###############################################################################
# Liveness #
def common_termination(trace):
    """Once one honest validator decides, all do within the delay bound."""
    name = 'common_termination'
    meta = trace.meta
    delta, gst = meta.get('delta'), meta.get('gst', 0)
    first = {}
    for record in honest_records(trace, 'decide'):
        if protocol_of(record['scope']) not in ('poa', 'pob'): continue
        start = first.setdefault(record['scope'], record['time'])
        if record['time'] > max(start + delta, gst + delta):
            msg = "%s decided %s at %i, first decision was at %i." % \
                  (record['at'], record['scope'], record['time'], start)
            return failed(name, record, msg)
    return passed(name)

def termination(trace):
    """Instances started by an honest validator decide everywhere honest."""
    name = 'termination'
    honest  = honest_nodes(trace)
    decided = {(node_of(r['at']), r['scope']) for r in
               honest_records(trace, 'decide')}
    started = {}
    for record in honest_records(trace, 'initiate'):
        started.setdefault(record['scope'], record)
    for record in trace.of_kind('emit'):
        if record.get('behavior') == 'honest' and record.get('tx_kind') == 'ua':
            started.setdefault('pob/%s/%i' % (record['sender'], record['sn']),
                               record)
    for scope, record in sorted(started.items()):
        missing = sorted(i for i in honest if (i, scope) not in decided)
        if missing:
            msg = "%s never decided at %s." % (scope, missing)
            return unfinished(name, trace, record, msg)
    return passed(name, "%i instances" % len(started))

def validity(trace):
    """Honest emissions take effect at every honest validator."""
    name = 'validity'
    honest = honest_nodes(trace)
    done   = {(node_of(r['at']), r['tx']) for r in user_executions(trace)}
    for record in trace.of_kind('emit'):
        if record.get('behavior') != 'honest' or record.get('variant'): continue
        missing = sorted(i for i in honest if (i, record['tx']) not in done)
        if missing:
            label = record.get('label') or record['tx'][:10]
            msg = "'%s' never executed at %s." % (label, missing)
            return unfinished(name, trace, record, msg)
    return passed(name)

###############################################################################
# Fast path and consensus #
def fast_termination(trace):
    """Every instance decides on the fast path and then stops sending."""
    name = 'fast_termination'
    decisions = {}
    for record in honest_records(trace, 'decide'):
        if protocol_of(record['scope']) not in ('poa', 'pob'): continue
        if record['path'] not in ('fast', 'proof'):
            msg = "%s took the %s path." % (record['scope'], record['path'])
            return failed(name, record, msg)
        decisions[(node_of(record['at']), record['scope'])] = record['time']
    for record in honest_records(trace, 'send'):
        key = (node_of(record['at']), record.get('scope'))
        if key in decisions and record['time'] > decisions[key]:
            return failed(name, record, "Sent in %s after deciding." % key[1])
    return passed(name)

def quorum_validity(trace):
    """
    Consensus decisions are backed by honest proposals: whatever every
    honest proposal holds is decided, and every decided transaction was
    proposed by at least n−3f honest validators, blocks and single
    transactions alike. A slot decided as NoTransaction holds nothing.
    """
    name = 'quorum_validity'
    meta = trace.meta
    n, f = meta.get('n', 0), meta.get('f', 0)
    b    = len(meta.get('byzantine', []))
    proposals = {}
    for record in honest_records(trace, 'propose'):
        ids = {tx['id'] for tx in record['txs']}
        proposals.setdefault(record['scope'], []).append(ids)
    for record in honest_records(trace, 'decide'):
        scope = record['scope']
        kind  = protocol_of(scope)
        if kind not in ('qc', 'ta') or scope not in proposals: continue
        sets    = proposals[scope]
        decided = {tx['id'] for tx in record['txs']}
        need    = n - 3 * f
        for tx in sorted(decided):
            if sum(tx in s for s in sets) < need:
                msg = "'%s' decided in %s with fewer than %i honest " \
                      "proposals." % (tx[:10], scope, need)
                return failed(name, record, msg)
        if len(sets) >= n - b:
            unanimous = set.intersection(*sets)
            if not unanimous <= decided:
                msg = "A transaction of every honest proposal is missing " \
                      "from %s." % scope
                return failed(name, record, msg)
    return passed(name)

def sp_lock_respects_fast(trace):
    """No honest V.A SP-locks a transaction conflicting with a fast decision."""
    name = 'sp_lock_respects_fast'
    fast = {}
    for record in honest_records(trace, 'decide'):
        if protocol_of(record['scope']) not in ('poa', 'pob'): continue
        if record['path'] not in ('fast', 'proof'): continue
        for tx in record['txs']:
            if tx['sn'] is not None:
                fast.setdefault((tx['sender'], tx['sn']), tx['id'])
    for record in honest_records(trace, 'sp_lock'):
        key = (actor_of(record['at']), record['sn'])
        if key in fast and fast[key] != record['tx']:
            msg = "SP-lock of a transaction conflicting with %s." % fast[key][:10]
            return failed(name, record, msg)
    return passed(name)

###############################################################################
# Accounting and structure #
def coin_conservation(trace):
    """Coins held plus burned minus minted equals the initial supply."""
    name = 'coin_conservation'
    initial = trace.meta.get('coins')
    if initial is None or trace.status != 'quiescent':
        return Outcome(name, SKIPPED, None, "Only checked at quiescence.")
    totals = {}
    for record in honest_records(trace, 'snapshot'):
        coins = sum(o['payload'] for o in record.get('owned', [])
                    if o['type'] == 'coin')
        node = node_of(record['at'])
        totals[node] = totals.get(node, 0) + coins
    for record in honest_records(trace, 'execute'):
        node = node_of(record['at'])
        totals[node] = totals.get(node, 0) + record.get('burned', 0) \
                                           - record.get('minted', 0)
    for node, total in sorted(totals.items()):
        if total != initial:
            msg = "V%i accounts for %i coins instead of %i." % (node, total,
                                                               initial)
            return failed(name, None, msg)
    return passed(name)

def ancestor_actors(trace):
    """For every record, the reactive actors whose POA it depends on."""
    result = []
    empty  = frozenset()
    for record in trace.records:
        actors = set()
        if record.get('cause') is not None: actors |= result[record['cause']]
        for dep in record.get('deps', []): actors |= result[dep]
        scope = record.get('scope')
        if record['kind'] == 'decide' and protocol_of(scope) == 'poa':
            actors.add(scope.split('/')[1])
        result.append(frozenset(actors) if actors else empty)
    return result

def parallelization(trace):
    """
    A UA-RA transaction executed at Y never waits on another reactive
    actor's instances, unless its sender also called that actor.
    """
    name   = 'parallelization'
    above  = ancestor_actors(trace)
    called = {}
    for record in trace.of_kind('emit'):
        if record.get('recipient'):
            called.setdefault(record['sender'], set()).add(record['recipient'])
    for record in honest_records(trace, 'execute'):
        if record.get('tx_kind') != 'ua-ra': continue
        allowed = {record['actor']} | called.get(record['sender'], set())
        foreign = above[record['id']] - allowed
        if foreign:
            msg = "Execution at '%s' depends on %s." % (record['actor'],
                                                        sorted(foreign))
            return failed(name, record, msg)
    return passed(name)

###############################################################################
safety_checks = ('delivery_bound', 'perfect_links', 'agreement', 'no_conflict',
                 'ua_agreement', 'integrity', 'ra_total_order', 'object_safety',
                 'quorum_validity', 'sp_lock_respects_fast')

liveness_checks = ('common_termination', 'termination', 'validity')

all_checks = {check.__name__: check for check in (
    delivery_bound, perfect_links, agreement, no_conflict, ua_agreement,
    integrity, ra_total_order, object_safety, common_termination, termination,
    validity, fast_termination, quorum_validity, sp_lock_respects_fast,
    coin_conservation, parallelization)}

def check_trace(trace, names=None):
    """Run the named checkers, every one of them by default."""
    names = list(names) if names else list(all_checks)
    unknown = [n for n in names if n not in all_checks]
    if unknown:
        msg = "Unknown checks %s, expected some of %s."
        raise ValueError(msg % (unknown, sorted(all_checks)))
    return CheckReport(all_checks[n](trace) for n in names)
