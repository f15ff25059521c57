#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Written by Lucas Sinclair.
MIT Licensed.
Contact at www.sinclair.bio

Script to run `mangrove` simulations.

Typically you would run this file from a command line like this:

    mangrove-sim run --scenario fast_ua --seed 0 --trace-out fast_ua.jsonl
    mangrove-sim run --scenario double_spend --seeds 0:1000
    mangrove-sim explore --scenario explore_n4 --depth 8
    mangrove-sim check --trace fast_ua.jsonl --props agreement,no_conflict
    mangrove-sim suite

Exit codes: 0 every check passes, 1 a property is violated, 2 the
scenario could not be loaded, 3 a liveness check ran into the horizon.
"""

# Built-in modules #
import os, sys, argparse

# Internal modules #
from mangrove.harness.scenario import ScenarioError
from mangrove.harness.checkers import all_checks

# First party modules #
from plumbing.timer import Timer

# Constants #
env_scenario = os.environ.get("MANGROVE_SCENARIO")
env_seed     = os.environ.get("MANGROVE_SEED")

###############################################################################
class UnbufferedLoggerDuplicator:
    """Duplicate all output to a text log."""

    def __init__(self, path):
        self.orig = sys.stdout
        self.path = path
        self.log  = open(self.path, "w")

    def write(self, message):
        self.orig.write(message)
        self.log.write(message)
        self.orig.flush()
        self.log.flush()

    def flush(self):
        self.orig.flush()
        self.log.flush()

###############################################################################
def make_parser():
    # Some strings #
    description   = "Per-actor consensus simulator with property checkers."
    scenario_help = "Path or bundled name of a scenario (or $MANGROVE_SCENARIO)."
    seed_help     = "Seed of the run (or $MANGROVE_SEED), default 0."
    seeds_help    = "Run a batch of seeds given as 'start:stop'."
    log_help      = "Also write everything printed to this file."
    # Parser #
    parser = argparse.ArgumentParser(prog='mangrove-sim',
                                     description=description)
    commands = parser.add_subparsers(dest='command')
    commands.required = True
    # Run #
    run = commands.add_parser('run', help="Run one scenario.")
    run.add_argument("--scenario", help=scenario_help, default=env_scenario)
    run.add_argument("--seed", help=seed_help, type=int,
                     default=int(env_seed) if env_seed else 0)
    run.add_argument("--seeds", help=seeds_help, default=None)
    run.add_argument("--trace-out", help="Where to write the trace.")
    run.add_argument("--metrics-out", help="Where to write the metrics TSV.")
    run.add_argument("--out-dir", help="Directory for every output file.")
    run.add_argument("--schedule", help="A schedule.json to replay.")
    run.add_argument("--parallel", action='store_true',
                     help="Spread a seed batch over processes.")
    run.add_argument("--log", help=log_help)
    # Explore #
    explore = commands.add_parser('explore', help="Enumerate schedules.")
    explore.add_argument("--scenario", help=scenario_help, default=env_scenario)
    explore.add_argument("--depth", type=int, default=None,
                         help="Number of choice points to branch on.")
    explore.add_argument("--width", type=int, default=None,
                         help="How many pending events may fire next.")
    explore.add_argument("--max-runs", type=int, default=None,
                         help="Stop after this many schedules.")
    explore.add_argument("--log", help=log_help)
    # Check #
    check = commands.add_parser('check', help="Check a stored trace.")
    check.add_argument("--trace", required=True, help="A trace file.")
    check.add_argument("--props", default=None,
                       help="Comma separated checks among %s." %
                            ', '.join(sorted(all_checks)))
    # Suite #
    suite = commands.add_parser('suite', help="Run every acceptance scenario.")
    suite.add_argument("--seeds", help="Override the seeds of every scenario.")
    suite.add_argument("--parallel", action='store_true',
                       help="Spread seed batches over processes.")
    suite.add_argument("--log", help=log_help)
    # Return #
    return parser

###############################################################################
def do_run(args):
    from mangrove.harness.runner import ScenarioRun, load, replay, summary
    from mangrove.harness.suite  import run_seeds, parse_seeds
    from tabulate import tabulate
    scenario = load(args.scenario)
    # Message #
    print("------------------------------------------")
    print("Running scenario '%s'." % scenario.name)
    print("------------------------------------------")
    timer = Timer()
    timer.print_start()
    # A batch of seeds #
    if args.seeds:
        results = run_seeds(scenario, parse_seeds(args.seeds), args.parallel)
        print(tabulate(results[results['exit'] != 0], headers='keys',
                       showindex=False) or "All %i seeds pass." % len(results))
        timer.print_end()
        timer.print_total_elapsed()
        codes = set(results['exit'])
        return 1 if 1 in codes else 3 if 3 in codes else 0
    # Replay a schedule #
    if args.schedule:
        trace, metrics, report = replay(scenario, args.schedule, verbose=True)
        print(report)
        return report.exit_code
    # A single run #
    run  = ScenarioRun(scenario, args.seed, out_dir=args.out_dir, verbose=True)
    code = run()
    timer.print_elapsed()
    if args.trace_out:   print(run.trace.write(args.trace_out))
    if args.metrics_out: print(run.metrics.write(args.metrics_out))
    print(run.metrics)
    print(run.report)
    print(summary(run.report))
    timer.print_end()
    timer.print_total_elapsed()
    return code

def do_explore(args):
    from mangrove.harness.runner  import load
    from mangrove.harness.explore import Explorer
    scenario = load(args.scenario)
    options  = dict(scenario.explore)
    for key in ('depth', 'width', 'max_runs'):
        if getattr(args, key) is not None: options[key] = getattr(args, key)
    print("------------------------------------------")
    print("Exploring scenario '%s' with %s." % (scenario.name, options))
    print("------------------------------------------")
    timer = Timer()
    timer.print_start()
    explorer = Explorer(scenario, verbose=True, **options)
    report   = explorer.report
    print(report)
    if explorer.counterexample is not None:
        print("Counterexample schedule: %s" % explorer.counterexample)
    timer.print_end()
    timer.print_total_elapsed()
    return report.exit_code

def do_check(args):
    from mangrove.network.trace    import Trace
    from mangrove.harness.checkers import check_trace
    names  = args.props.split(',') if args.props else None
    report = check_trace(Trace.load(args.trace), names)
    print(report)
    return report.exit_code

def do_suite(args):
    from mangrove.harness.suite import Suite
    timer = Timer()
    timer.print_start()
    suite = Suite(seeds=args.seeds, parallel=args.parallel)
    suite()
    print(suite)
    timer.print_end()
    timer.print_total_elapsed()
    return suite.exit_code

###############################################################################
def main(argv=None):
    """Entry point of the `mangrove-sim` console script."""
    args = make_parser().parse_args(argv)
    # Duplicate all output to a text log #
    if getattr(args, 'log', None): sys.stdout = UnbufferedLoggerDuplicator(args.log)
    # Scenarios are needed for everything except checking a trace #
    if args.command in ('run', 'explore') and not args.scenario:
        print("No scenario has been given.", file=sys.stderr)
        return 2
    # Dispatch #
    commands = {'run': do_run, 'explore': do_explore, 'check': do_check,
                'suite': do_suite}
    try:
        return commands[args.command](args)
    except ScenarioError as error:
        print("Scenario error: %s" % error, file=sys.stderr)
        return 2
    except (FileNotFoundError, ValueError) as error:
        print(error, file=sys.stderr)
        return 2

###############################################################################
if __name__ == "__main__":
    sys.exit(main())
