#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Written by Lucas Sinclair.
MIT Licensed.
Contact at www.sinclair.bio

Latency measured in communication steps. The depth of a record is the
largest number of Outer-Link deliveries on any causal chain leading to
it, following both the `cause` of every record and the `deps` of
decisions. Inner-Link deliveries count zero.

The hops of a transaction at a validator are the depth of its execution
there minus the depth of where it started:

    * UA and UA-RA: the client emission.
    * UA-RA at the leader of the deciding instance: the arrival of the
      transaction in the leader's own pool.
    * RA-RA: the emission at that same validator.
"""

# Built-in modules #

# Internal modules #
from mangrove.harness.checkers import node_of, honest_records

# First party modules #
from plumbing.cache import property_cached

# Third party modules #
import pandas
from tabulate import tabulate

###############################################################################
def causal_depths(trace):
    """A list giving the depth of every record, indexed by record id."""
    depths = []
    for record in trace.records:
        depth = 0
        if record.get('cause') is not None: depth = depths[record['cause']]
        for dep in record.get('deps', []): depth = max(depth, depths[dep])
        if record['kind'] == 'deliver' and record.get('link') == 'outer':
            depth += 1
        depths.append(depth)
    return depths

###############################################################################
class Metrics:
    """
    Tables computed from one trace. Every property is a pandas DataFrame
    restricted to honest validators.
    """

    def __repr__(self):
        return '<%s object on %i records>' % (self.__class__.__name__,
                                              len(self.trace.records))

    def __init__(self, trace):
        self.trace = trace

    @property_cached
    def depths(self): return causal_depths(self.trace)

    @property_cached
    def labels(self):
        """
        Transaction id to the label of the script step that emitted it.
        An RA-RA transaction emitted while executing 'pay' is 'pay.emit'.
        """
        labels = {}
        for record in self.trace.of_kind('emit'):
            if record.get('label'):
                labels[record['tx']] = record['label']
            elif record.get('parent') in labels:
                labels.setdefault(record['tx'],
                                  labels[record['parent']] + '.emit')
        return labels

    @property_cached
    def leaders(self):
        """(node, scope) to the leader of that POA instance."""
        return {(node_of(r['at']), r['scope']): r['leader']
                for r in honest_records(self.trace, 'decide') if 'leader' in r}

    #------------------------------- Tables ----------------------------------#
    @property_cached
    def hops(self):
        trace, depths = self.trace, self.depths
        # Where every transaction starts #
        emitted, local, pooled = {}, {}, {}
        for record in trace.of_kind('emit'):
            if record['at'].startswith('client.'): emitted[record['tx']] = record
            else: local[(node_of(record['at']), record['tx'])] = record
        for record in trace.of_kind('pool'):
            pooled[(node_of(record['at']), record['tx'])] = record
        # One row per honest execution #
        rows = []
        for record in honest_records(trace, 'execute'):
            node, tx, kind = node_of(record['at']), record['tx'], record['tx_kind']
            leader = False
            if kind == 'ra-ra':
                start = local.get((node, tx))
            else:
                start = emitted.get(tx)
                if kind == 'ua-ra':
                    scope  = 'poa/%s/%i' % (record['actor'], record['instance'])
                    leader = self.leaders.get((node, scope)) == node
                    if leader: start = pooled.get((node, tx), start)
            if start is None: continue
            rows.append({'tx':     tx[:10],
                         'label':  self.labels.get(tx, ''),
                         'kind':   kind,
                         'actor':  record['actor'],
                         'node':   node,
                         'leader': leader,
                         'hops':   depths[record['id']] - depths[start['id']],
                         'time':   record['time']})
        columns = ['tx', 'label', 'kind', 'actor', 'node', 'leader', 'hops',
                   'time']
        return pandas.DataFrame(rows, columns=columns)

    @property_cached
    def paths(self):
        """How every POA and POB instance was decided at every validator."""
        rows = [{'scope': r['scope'], 'node': node_of(r['at']),
                 'path': r['path'], 'time': r['time'], 'txs': len(r['txs'])}
                for r in honest_records(self.trace, 'decide')
                if r['scope'].split('/')[0] in ('poa', 'pob')]
        return pandas.DataFrame(rows, columns=['scope', 'node', 'path', 'time',
                                               'txs'])

    @property_cached
    def chains(self):
        """Instances decided and transactions executed per reactive actor."""
        rows = {}
        for record in honest_records(self.trace, 'execute'):
            if record.get('instance') is None: continue
            key = (record['actor'], node_of(record['at']))
            row = rows.setdefault(key, {'actor': key[0], 'node': key[1],
                                        'instances': 0, 'txs': 0})
            row['instances'] = max(row['instances'], record['instance'] + 1)
            row['txs'] += 1
        return pandas.DataFrame(list(rows.values()),
                                columns=['actor', 'node', 'instances', 'txs'])

    @property_cached
    def messages(self):
        """Number of messages sent per kind and link."""
        sends = [{'msg': r['msg'], 'link': r['link']}
                 for r in self.trace.of_kind('send')]
        frame = pandas.DataFrame(sends, columns=['msg', 'link'])
        if frame.empty: return pandas.DataFrame(columns=['msg', 'link', 'count'])
        counts = frame.groupby(['msg', 'link']).size().reset_index(name='count')
        return counts.sort_values(['link', 'msg']).reset_index(drop=True)

    #------------------------------- Queries ---------------------------------#
    def hops_of(self, label):
        """Hops of the labeled transaction, split by leader and the others."""
        frame = self.hops[self.hops['label'] == label]
        mask  = frame['leader'].astype(bool)
        return {'leader': sorted(set(frame[mask]['hops'])),
                'others': sorted(set(frame[~mask]['hops']))}

    def fast(self):
        """True when every instance was decided on the fast path."""
        return bool(self.paths['path'].isin(['fast', 'proof']).all())

    #------------------------------- Output ----------------------------------#
    def table(self, name):
        frame = getattr(self, name)
        return tabulate(frame, headers='keys', tablefmt='simple',
                        showindex=False)

    def __str__(self):
        parts = []
        for name in ('hops', 'chains', 'messages'):
            parts += ['-' * 20 + ' ' + name + ' ' + '-' * 20, self.table(name)]
        return '\n'.join(parts)

    def write(self, path):
        """All tables as one TSV file, a `table` column says which is which."""
        frames = []
        for name in ('hops', 'paths', 'chains', 'messages'):
            frame = getattr(self, name).copy()
            frame.insert(0, 'table', name)
            if not frame.empty: frames.append(frame)
        if frames: result = pandas.concat(frames, ignore_index=True)
        else:      result = pandas.DataFrame(columns=['table'])
        result.to_csv(str(path), sep='\t', index=False)
        return path
