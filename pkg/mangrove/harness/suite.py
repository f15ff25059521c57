#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Written by Lucas Sinclair.
MIT Licensed.
Contact at www.sinclair.bio

Seed batches and the acceptance suite. Every run builds its own
simulator, so batches can be spread over processes.
"""

# Built-in modules #
import functools

# Internal modules #
from mangrove.harness.runner  import ScenarioRun, load, summary
from mangrove.harness.explore import Explorer

# First party modules #
from plumbing.processes import prll_map

# Third party modules #
import pandas
from tabulate import tabulate

# Constants #
acceptance   = ('fast_ua', 'fast_uara', 'fast_rara', 'double_spend',
                'slow_leader_silent', 'slow_leader_conflicting', 'long_run',
                'parallel')
explorations = ('explore_n4', 'explore_n6')
columns      = ['scenario', 'seed', 'exit', 'status', 'end', 'records',
                'problems']

###############################################################################
def parse_seeds(value):
    """
    Seeds are given as an integer, a list of integers, or a 'start:stop'
    string meaning range(start, stop).
    """
    if isinstance(value, int) and not isinstance(value, bool): return [value]
    if isinstance(value, (list, tuple)): return [int(v) for v in value]
    if isinstance(value, str):
        if ':' in value:
            start, stop = value.split(':')
            return list(range(int(start), int(stop)))
        return [int(value)]
    raise ValueError("Cannot understand the seeds '%s'." % (value,))

def run_seed(scenario, seed):
    """Returns a plain dictionary so it travels between processes."""
    run = ScenarioRun(scenario, seed)
    code = run()
    return {'scenario': run.scenario.name, 'seed': seed, 'exit': code,
            'status': run.trace.status, 'end': run.sim.now,
            'records': len(run.trace.records),
            'problems': '' if code == 0 else summary(run.report)}

def run_seeds(scenario, seeds, parallel=False):
    """A DataFrame with one row per seed."""
    scenario = load(scenario)
    if parallel: rows = prll_map(functools.partial(run_seed, scenario), seeds)
    else:        rows = [run_seed(scenario, s) for s in seeds]
    return pandas.DataFrame(list(rows), columns=columns)

###############################################################################
class Suite:
    """Every bundled acceptance scenario over its seeds, then explorations."""

    def __repr__(self):
        return '<%s object with %i scenarios>' % (self.__class__.__name__,
                                                  len(self.names))

    def __init__(self, names=acceptance, explore=explorations, seeds=None,
                 parallel=False, verbose=True):
        self.names    = list(names)
        self.explore  = list(explore)
        self.seeds    = seeds
        self.parallel = parallel
        self.verbose  = verbose
        self.results  = None

    def __call__(self):
        frames = []
        for name in self.names:
            scenario = load(name)
            seeds    = parse_seeds(self.seeds if self.seeds is not None
                                   else scenario.seeds)
            if self.verbose:
                print("# Scenario '%s' over %i seeds #" % (name, len(seeds)))
            frames.append(run_seeds(scenario, seeds, self.parallel))
        for name in self.explore:
            scenario = load(name)
            if self.verbose: print("# Exploring '%s' #" % name)
            explorer = Explorer(scenario, **scenario.explore)
            report   = explorer.report
            frames.append(pandas.DataFrame([{
                'scenario': name, 'seed': explorer.seed,
                'exit': report.exit_code, 'status': 'explored',
                'end': None, 'records': explorer.runs,
                'problems': '' if report.ok else summary(report)}]))
        frames = [frame for frame in frames if not frame.empty]
        if frames: self.results = pandas.concat(frames, ignore_index=True)
        else:      self.results = pandas.DataFrame(columns=columns)
        return self.results

    @property
    def exit_code(self):
        """The worst exit code, violations rank above horizon exhaustion."""
        codes = set(self.results['exit'])
        if 1 in codes: return 1
        if 3 in codes: return 3
        return 0

    def __str__(self):
        frame = self.results.groupby('scenario', sort=False).agg(
            runs=('seed', 'count'), failing=('exit', lambda e: int((e != 0).sum())))
        return tabulate(frame, headers='keys', tablefmt='simple')
