#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Written by Lucas Sinclair.
MIT Licensed.
Contact at www.sinclair.bio

The trace is the structured log of a simulation: one JSON object per
event, written one per line. Every record has an integer `id`, the
simulated `time`, a `kind` and the `cause` (id of the record being
processed when it was produced). Decisions also list the records of the
votes that formed their quorum in `deps`, which is what hop counting
follows.
"""

# Built-in modules #
import json

# Internal modules #

# First party modules #
from autopaths.file_path import FilePath

# Third party modules #

###############################################################################
class Trace:
    """An ordered list of record dictionaries."""

    def __repr__(self):
        return '<%s object with %i records>' % (self.__class__.__name__,
                                                len(self.records))

    def __init__(self, records=None):
        self.records = list(records) if records is not None else []

    def __len__(self): return len(self.records)

    def __iter__(self): return iter(self.records)

    def __getitem__(self, index): return self.records[index]

    #------------------------------- Methods ---------------------------------#
    def add(self, time, kind, cause=None, deps=None, **fields):
        """Append a record and return its id."""
        record = {'id': len(self.records), 'time': time, 'kind': kind,
                  'cause': cause}
        if deps: record['deps'] = sorted(set(deps))
        record.update((k, v) for k, v in fields.items() if v is not None)
        self.records.append(record)
        return record['id']

    def of_kind(self, *kinds):
        return [r for r in self.records if r['kind'] in kinds]

    #----------------------------- Properties --------------------------------#
    bookkeeping = ('meta', 'snapshot', 'end')

    @property
    def events(self):
        """Every record except the run description and closing records."""
        return [r for r in self.records if r['kind'] not in self.bookkeeping]

    @property
    def meta(self):
        """The first record describes the run."""
        for record in self.records:
            if record['kind'] == 'meta': return record
        return {}

    @property
    def status(self):
        """'quiescent' or 'horizon', taken from the closing record."""
        for record in reversed(self.records):
            if record['kind'] == 'end': return record['status']
        return None

    #------------------------------ Exporting --------------------------------#
    def to_lines(self):
        dump = lambda r: json.dumps(r, sort_keys=True, separators=(',', ':'),
                                    ensure_ascii=False)
        return [dump(r) for r in self.records]

    def to_jsonl(self):
        return '\n'.join(self.to_lines()) + '\n' if self.records else ''

    def write(self, path):
        """Write the trace to `path` and return the FilePath."""
        path = FilePath(path)
        path.directory.create_if_not_exists()
        path.write(self.to_jsonl())
        return path

    @classmethod
    def load(cls, path):
        """Parse a trace file previously written with `write`."""
        path = FilePath(path)
        if not path.exists:
            raise FileNotFoundError("No trace file at '%s'." % path)
        lines = [line for line in path.contents.splitlines() if line.strip()]
        return cls(json.loads(line) for line in lines)
