#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Written by Lucas Sinclair.
MIT Licensed.
Contact at www.sinclair.bio

Bounded model checking. A run in exploring mode consumes one integer per
choice point, be it which of the first `width` pending events fires or
which option a Byzantine strategy picks. Starting from the all-zeros
schedule, every alternative at the first `depth` choice points is
visited depth first, each distinct schedule exactly once.
"""

# Built-in modules #

# Internal modules #
from mangrove.harness.runner   import ScenarioRun, load
from mangrove.harness.checkers import (CheckReport, Outcome, PASS, FAIL,
                                       SKIPPED, safety_checks)

# First party modules #
from plumbing.cache import property_cached
from plumbing.common import split_thousands as thousands

# Third party modules #

###############################################################################
class Explorer:
    """
    Enumerates schedules of a small scenario and runs the safety checks
    on each one. Stops at the first violation, whose schedule is kept in
    `counterexample`, or once `max_runs` schedules were tried.
    """

    def __repr__(self):
        return '<%s object on "%s" at depth %i>' % (self.__class__.__name__,
                                                    self.scenario.name,
                                                    self.depth)

    def __init__(self, scenario, depth=8, width=2, max_runs=2000, seed=0,
                 checks=safety_checks, verbose=False):
        # Save attributes #
        self.scenario = load(scenario)
        self.depth    = depth
        self.width    = width
        self.max_runs = max_runs
        self.seed     = seed
        self.checks   = list(checks)
        self.verbose  = verbose
        # Results #
        self.runs           = 0
        self.complete       = None
        self.counterexample = None
        self.failure        = None

    def run_one(self, schedule):
        run = ScenarioRun(self.scenario, self.seed, schedule, self.width,
                          self.checks)
        run.report
        self.runs += 1
        return run

    @property_cached
    def report(self):
        """A CheckReport with one outcome per check plus the coverage."""
        stack = [[]]
        while stack:
            if self.runs >= self.max_runs:
                self.complete = False
                break
            prefix = stack.pop()
            run    = self.run_one(prefix)
            if run.report.violations:
                self.counterexample = run.choices
                self.failure        = run.report
                self.complete       = False
                break
            # Branch on the choice points past the prefix #
            counts = [count for count, pick in run.sim.choices]
            picks  = run.choices
            for i in reversed(range(len(prefix), min(self.depth, len(counts)))):
                for alternative in reversed(range(picks[i] + 1, counts[i])):
                    stack.append(picks[:i] + [alternative])
            if self.verbose and self.runs % 100 == 0:
                msg = "Explored %s schedules, %i pending."
                print(msg % (thousands(self.runs), len(stack)))
        else:
            self.complete = True
        return CheckReport(self.outcomes())

    def outcomes(self):
        result = []
        for name in self.checks:
            if self.failure is not None and name in [o.name for o in
                                                     self.failure.violations]:
                original = self.failure[name]
                msg = "%s Replay with schedule %s." % (original.message,
                                                       self.counterexample)
                result.append(Outcome(name, FAIL, original.record, msg))
            else:
                result.append(Outcome(name, PASS, None,
                                      "%i schedules" % self.runs))
        # Hitting the cap is partial coverage, not a failure #
        if self.complete:
            result.append(Outcome('coverage', PASS, None,
                                  "All %i schedules up to depth %i." %
                                  (self.runs, self.depth)))
        elif self.failure is None:
            result.append(Outcome('coverage', SKIPPED, None,
                                  "Partial, stopped after %i schedules." %
                                  self.runs))
        return result

###############################################################################
def explore(scenario, depth=8, width=2, max_runs=2000, verbose=False):
    """Returns the CheckReport of a bounded exploration."""
    return Explorer(scenario, depth, width, max_runs, verbose=verbose).report
