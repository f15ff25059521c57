#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Written by Lucas Sinclair.
MIT Licensed.
Contact at www.sinclair.bio

Typically you would run this file from a command line like this:

     ipython3 -i -- ~/repos/mangrove/mangrove/harness/runner.py

Or use it from python like this:

    from mangrove.harness.runner import run_scenario
    trace, metrics, report = run_scenario('fast_ua', seed=3)
    print(report)
"""

# Built-in modules #
import json

# Internal modules #
from mangrove.harness.scenario import Scenario
from mangrove.harness.metrics  import Metrics
from mangrove.harness.checkers import Outcome, PASS, FAIL, check_trace

# First party modules #
from autopaths.dir_path import DirectoryPath
from plumbing.cache     import property_cached

# Third party modules #

###############################################################################
def load(scenario):
    """Accept a Scenario, a path or the name of a bundled scenario."""
    if isinstance(scenario, Scenario): return scenario
    return Scenario.from_path(scenario)

def check_expectations(metrics, expect):
    """Compare the metrics with the `expect` section of a scenario."""
    problems = []
    # Hop counts per label #
    for label, wanted in sorted((expect.get('hops') or {}).items()):
        found = metrics.hops_of(label)
        if not isinstance(wanted, dict): wanted = {'leader': wanted,
                                                   'others': wanted}
        for who in ('leader', 'others'):
            if who not in wanted or not found[who]: continue
            if found[who] != [wanted[who]]:
                msg = "'%s' took %s hops at %s instead of %s."
                problems.append(msg % (label, found[who], who, wanted[who]))
        if not found['leader'] and not found['others']:
            problems.append("'%s' was never executed." % label)
    # Every instance on the fast path #
    if expect.get('fast') and not metrics.fast():
        problems.append("Some instance left the fast path.")
    # Chain lengths #
    for actor, count in sorted((expect.get('instances') or {}).items()):
        chains = metrics.chains[metrics.chains['actor'] == actor]
        if chains.empty or chains['instances'].min() < count:
            shortest = 0 if chains.empty else int(chains['instances'].min())
            msg = "'%s' reached %i instances instead of %i."
            problems.append(msg % (actor, shortest, count))
    # Return #
    if problems: return Outcome('expect', FAIL, None, ' '.join(problems))
    return Outcome('expect', PASS, None, '%i expectations' % len(expect))

###############################################################################
class ScenarioRun:
    """
    One simulation of a scenario with a given seed, and optionally an
    exploration schedule. The trace, metrics and report are computed on
    first access and written to `out_dir` when one is given.
    """

    all_paths = """
                /trace.jsonl
                /metrics.tsv
                /report.txt
                /schedule.json
                """

    def __repr__(self):
        return '<%s object "%s" seed %i>' % (self.__class__.__name__,
                                             self.scenario.name, self.seed)

    def __init__(self, scenario, seed=0, schedule=None, width=2, checks=None,
                 out_dir=None, verbose=False):
        # Save attributes #
        self.scenario = load(scenario)
        self.seed     = seed
        self.schedule = schedule
        self.width    = width
        self.checks   = checks if checks is not None else self.scenario.checks
        self.out_dir  = out_dir
        self.verbose  = verbose

    def __call__(self):
        """Run, check, write the outputs and return the exit code."""
        self.report
        if self.out_dir is not None: self.write()
        return self.report.exit_code

    #-------------------------- Automatic paths ------------------------------#
    @property_cached
    def autopaths(self):
        from autopaths.auto_paths import AutoPaths
        return AutoPaths(DirectoryPath(self.out_dir), self.all_paths)

    #----------------------------- Properties --------------------------------#
    @property_cached
    def sim(self):
        return self.scenario.build(self.seed, schedule=self.schedule,
                                   width=self.width, verbose=self.verbose)

    @property_cached
    def trace(self):
        return self.sim.run()

    @property_cached
    def choices(self):
        """The picks made during the run, enough to replay it."""
        return [pick for count, pick in self.sim.choices]

    @property_cached
    def metrics(self):
        return Metrics(self.trace)

    @property_cached
    def report(self):
        report = check_trace(self.trace, self.checks)
        if self.scenario.expect:
            report = report.merge([check_expectations(self.metrics,
                                                      self.scenario.expect)])
        return report

    #------------------------------- Output ----------------------------------#
    def write(self):
        self.trace.write(self.autopaths.trace)
        self.metrics.write(self.autopaths.metrics)
        self.autopaths.report.write(str(self.report) + '\n')
        saved = {'seed':      self.seed,
                 'width':     self.width,
                 'exploring': self.schedule is not None,
                 'schedule':  self.choices}
        self.autopaths.schedule.write(json.dumps(saved))
        if self.verbose: print("Outputs written to '%s'." % self.out_dir)

###############################################################################
def run_scenario(scenario, seed=0, schedule=None, width=2, checks=None,
                 out_dir=None, verbose=False):
    """Returns the trace, the metrics and the check report of one run."""
    run = ScenarioRun(scenario, seed, schedule, width, checks, out_dir, verbose)
    run()
    return run.trace, run.metrics, run.report

def replay(scenario, schedule_path, checks=None, verbose=False):
    """Run again from a `schedule.json` written by a previous run."""
    from autopaths.file_path import FilePath
    saved = json.loads(FilePath(schedule_path).contents)
    schedule = saved['schedule'] if saved.get('exploring') else None
    return run_scenario(scenario, saved['seed'], schedule,
                        saved.get('width', 2), checks, verbose=verbose)

def summary(report):
    """One line per outcome that is not a pass."""
    lines = ['%s: %s (record %s) %s' % (o.name, o.status, o.record, o.message)
             for o in report if o.status != PASS]
    if not lines: return 'All %i checks pass.' % len(report.outcomes)
    return '\n'.join(lines)
