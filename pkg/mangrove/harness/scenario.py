#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Written by Lucas Sinclair.
MIT Licensed.
Contact at www.sinclair.bio

A Scenario is read from a YAML file such as:

    name: fast_ua
    params: {n: 6, f: 1, p: 1, delta: 10, gst: 0}
    validators:
      byzantine: {5: silent}
    delay: {mode: fixed}
    users:
      alice:
        objects: [{id: alice.coin.0, type: coin, payload: 10}]
      bob: {}
    reactive:
      vault: {program: vault, state: 0}
    clients:
      wallet:
        behavior: honest
        actors: [alice]
        script:
          - {at: 0, label: pay, actor: alice, kind: ua,
             consume: [alice.coin.0],
             code: [{op: transfer, slot: 0, owner: bob}]}
    checks: [agreement, no_conflict]
    expect:
      hops: {pay: 2}

Every top level key becomes an attribute of the Scenario. Attributes are
transformed, validated and then completed with defaults.
"""

# Built-in modules #
import copy

# Internal modules #
from mangrove                    import scenarios_dir
from mangrove.core.objects       import OwnedObject, user, reactive
from mangrove.core.params        import SystemParams
from mangrove.crypto.signatures  import Keyring
from mangrove.network.delays     import DelayPolicy, modes
from mangrove.network.simulator  import Simulator
from mangrove.entities.validator import World, Validator
from mangrove.entities.client    import UserClient, behaviors
from mangrove.vm.commands        import parse_commands, parse_call
from mangrove.vm.programs        import library
from mangrove.harness.byzantine  import make_strategy, strategies
from mangrove.harness.checkers   import all_checks, safety_checks

# First party modules #
from autopaths.file_path import FilePath

# Third party modules #
import yaml

###############################################################################
class ScenarioError(ValueError):
    """A scenario file that cannot be parsed or does not make sense."""
    pass

###############################################################################
class Scenario:
    """
    Describes one simulation: the system parameters, which validators are
    Byzantine and how, the actors with their initial objects, the clients
    with their scripts, the network delays, the horizon and the checks to
    run on the resulting trace.

    Attributes after construction (non exhaustive list):

        * self.name: a short name.
        * self.params: a SystemParams object.
        * self.byzantine: a dictionary of validator index to strategy spec.
        * self.users: a dictionary of user name to tuple of OwnedObject.
        * self.reactive: a dictionary of name to (program, state, objects).
        * self.clients: a dictionary of client name to client options.
        * self.checks: the names of the checkers to run.
    """

    def __repr__(self):
        return '<%s object "%s">' % (self.__class__.__name__, self.name)

    def __init__(self, **kwargs):
        # Keep the original document #
        self.raw = copy.deepcopy(kwargs)
        # Record which keys were given #
        self.given_keys = list(kwargs)
        # Set the attributes of this instance with the given kwargs #
        for key in self.given_keys: setattr(self, key, kwargs[key])
        # Three steps #
        self.transform_attrs()
        self.validate_attrs()
        self.set_default_attrs()

    #---------------------------- Constructors -------------------------------#
    @classmethod
    def from_text(cls, text, name=None):
        try:
            document = yaml.safe_load(text)
        except yaml.YAMLError as error:
            raise ScenarioError("The scenario is not valid YAML: %s" % error)
        if not isinstance(document, dict):
            raise ScenarioError("A scenario must be a mapping at the top level.")
        if name is not None: document.setdefault('name', name)
        return cls(**document)

    @classmethod
    def from_path(cls, path):
        """Accepts a path or the name of a bundled scenario."""
        path = FilePath(path)
        if not path.exists:
            bundled = FilePath(scenarios_dir + path.name)
            if not bundled.exists: bundled = FilePath(bundled + '.yaml')
            if not bundled.exists:
                raise ScenarioError("No scenario file at '%s'." % path)
            path = bundled
        return cls.from_text(path.contents, name=path.short_prefix)

    #------------------------------- Methods ---------------------------------#
    known_keys = ['name', 'description', 'params', 'validators', 'delay',
                  'horizon', 'users', 'reactive', 'clients', 'checks',
                  'expect', 'beyond_resilience', 'seeds', 'explore']

    def transform_attrs(self):
        """Turn the raw YAML values into the objects the simulation needs."""
        # Unknown keys are most likely typos #
        unknown = [k for k in self.given_keys if k not in self.known_keys]
        if unknown:
            msg = "Unknown scenario keys %s, expected some of %s."
            raise ScenarioError(msg % (unknown, self.known_keys))
        # System parameters #
        params = getattr(self, 'params', None)
        if not isinstance(params, dict):
            raise ScenarioError("The scenario needs a `params` mapping.")
        try:
            self.params = SystemParams(n           = params.get('n'),
                                       f           = params.get('f'),
                                       p           = params.get('p', 0),
                                       delta_bound = params.get('delta', 10),
                                       gst         = params.get('gst', 0))
        except (TypeError, ValueError) as error:
            raise ScenarioError("Invalid `params`: %s" % error)
        # Byzantine validators keyed by integer index #
        validators = getattr(self, 'validators', None) or {}
        byzantine  = validators.get('byzantine') or {}
        try:
            self.byzantine = {int(k): v for k, v in byzantine.items()}
        except (TypeError, ValueError, AttributeError):
            raise ScenarioError("`validators.byzantine` maps indices to strategies.")
        # Users and their objects #
        self.users = {name: self.parse_objects(name, (spec or {}).get('objects'),
                                               user(name))
                      for name, spec in (getattr(self, 'users', None) or {}).items()}
        # Reactive actors #
        reactive_actors = {}
        for name, spec in (getattr(self, 'reactive', None) or {}).items():
            spec = spec or {}
            objects = self.parse_objects(name, spec.get('objects'), reactive(name))
            reactive_actors[name] = (spec.get('program'), spec.get('state'),
                                     objects)
        self.reactive = reactive_actors
        # Clients and their scripts #
        clients = {}
        for name, spec in (getattr(self, 'clients', None) or {}).items():
            spec = dict(spec or {})
            spec['script'] = [self.parse_step(name, i, step) for i, step in
                              enumerate(spec.get('script') or [])]
            clients[name] = spec
        self.clients = clients

    def parse_objects(self, name, specs, owner):
        objects = []
        for spec in specs or ():
            try:
                objects.append(OwnedObject(spec['id'], spec.get('type', 'coin'),
                                           spec.get('payload', 0), owner))
            except (KeyError, TypeError, ValueError) as error:
                msg = "Invalid object of actor '%s': %s (%s)."
                raise ScenarioError(msg % (name, spec, error))
        return tuple(objects)

    def parse_step(self, client, index, step):
        """Parse the commands and calls of one script step and its variants."""
        if not isinstance(step, dict) or 'actor' not in step:
            msg = "Step %i of client '%s' must be a mapping with an `actor`."
            raise ScenarioError(msg % (index, client))
        def parse(part):
            part = dict(part)
            try:
                for key in ('code', 'code_pre', 'code_post'):
                    if key in part: part[key] = parse_commands(part[key])
                if 'call' in part: part['call'] = parse_call(part['call'])
            except (KeyError, TypeError, ValueError) as error:
                msg = "Step %i of client '%s' is malformed: %s"
                raise ScenarioError(msg % (index, client, error))
            return part
        step = parse(step)
        if 'variants' in step:
            step['variants'] = [parse(v) for v in step['variants'] or []]
        return step

    def validate_attrs(self):
        """Check the scenario is consistent and usable."""
        params = self.params
        # Byzantine validators #
        for index, spec in self.byzantine.items():
            if not 0 <= index < params.n:
                msg = "Byzantine validator %i is out of range for n=%i."
                raise ScenarioError(msg % (index, params.n))
            name = spec if isinstance(spec, str) else (spec or {}).get('name')
            if name not in strategies:
                msg = "Unknown strategy '%s' for validator %i, expected one of %s."
                raise ScenarioError(msg % (name, index, sorted(strategies)))
        if len(self.byzantine) > params.f and \
           not getattr(self, 'beyond_resilience', False):
            msg = "%i Byzantine validators exceed f=%i without `beyond_resilience`."
            raise ScenarioError(msg % (len(self.byzantine), params.f))
        # Delays #
        delay = getattr(self, 'delay', None) or {}
        if delay.get('mode', 'synchronous') not in modes:
            msg = "Unknown delay mode '%s', expected one of %s."
            raise ScenarioError(msg % (delay.get('mode'), modes))
        # Actors #
        clash = set(self.users) & set(self.reactive)
        if clash: raise ScenarioError("Actor names used twice: %s." % sorted(clash))
        for name, (program, state, objects) in self.reactive.items():
            if program not in library:
                msg = "The reactive actor '%s' uses the unknown program '%s'."
                raise ScenarioError(msg % (name, program))
        ids = [o.object_id for objs in self.users.values() for o in objs] + \
              [o.object_id for p, s, objs in self.reactive.values() for o in objs]
        if len(ids) != len(set(ids)):
            raise ScenarioError("Object ids must be unique across actors.")
        # Clients #
        controlled = {}
        for name, spec in self.clients.items():
            if spec.get('behavior', 'honest') not in behaviors:
                msg = "Client '%s' has the unknown behavior '%s'."
                raise ScenarioError(msg % (name, spec.get('behavior')))
            for actor in spec.get('actors') or []:
                if actor not in self.users:
                    msg = "Client '%s' controls the unknown user actor '%s'."
                    raise ScenarioError(msg % (name, actor))
                if actor in controlled:
                    msg = "User actor '%s' is controlled by two clients."
                    raise ScenarioError(msg % actor)
                controlled[actor] = name
            for step in spec['script']:
                if step['actor'] not in (spec.get('actors') or []):
                    msg = "Client '%s' has a step for '%s' it does not control."
                    raise ScenarioError(msg % (name, step['actor']))
                if step.get('kind', 'ua') not in ('ua', 'ua-ra'):
                    msg = "Client '%s' has a step of unknown kind '%s'."
                    raise ScenarioError(msg % (name, step.get('kind')))
        self.controllers = controlled
        # Checks #
        for check in getattr(self, 'checks', None) or []:
            if check not in all_checks:
                msg = "Unknown check '%s', expected some of %s."
                raise ScenarioError(msg % (check, sorted(all_checks)))

    # Declare the default values #
    defaults = {
        'description':       '',
        'delay':             {},
        'expect':            {},
        'beyond_resilience': False,
        'seeds':             [0],
        'explore':           {},
    }

    delay_defaults = {'mode': 'synchronous', 'cap': 20}

    def set_default_attrs(self):
        """Optional keys that are absent get their default value."""
        for key, value in self.defaults.items():
            if not hasattr(self, key): setattr(self, key, copy.deepcopy(value))
        if not hasattr(self, 'name'): self.name = 'scenario'
        self.delay = dict(self.delay_defaults, **(self.delay or {}))
        if not hasattr(self, 'checks') or not self.checks:
            self.checks = list(safety_checks)
        if not hasattr(self, 'horizon') or self.horizon is None:
            self.horizon = self.params.gst + 40 * self.params.delta_bound

    #----------------------------- Properties --------------------------------#
    @property
    def initial_coins(self):
        objects = [o for objs in self.users.values() for o in objs] + \
                  [o for p, s, objs in self.reactive.values() for o in objs]
        return sum(o.amount for o in objects)

    @property
    def world(self):
        return World(self.users, self.reactive, self.controllers)

    #------------------------------- Building --------------------------------#
    def build(self, seed=0, schedule=None, width=2, verbose=False):
        """A Simulator with every validator and client in place."""
        params  = self.params
        keyring = Keyring()
        # Every signing key exists before anything is verified #
        for i in range(params.n): keyring.validator_key(i)
        for name in sorted(self.users): keyring.generate(name)
        # Network #
        delays = DelayPolicy(params, mode=self.delay['mode'], seed=seed,
                             cap=self.delay['cap'],
                             byzantine=sorted(self.byzantine))
        sim = Simulator(params, delays, keyring, seed=seed,
                        horizon=self.horizon, schedule=schedule, width=width,
                        verbose=verbose)
        sim.meta.update({'scenario': self.name, 'coins': self.initial_coins})
        # Validators #
        world = self.world
        for i in range(params.n):
            spec = self.byzantine.get(i)
            Validator(sim, i, world, make_strategy(spec) if spec else None)
        # Clients #
        labels = {}
        for name in sorted(self.clients):
            spec = self.clients[name]
            actors = spec.get('actors') or []
            client = UserClient(sim, name, actors,
                                behavior = spec.get('behavior', 'honest'),
                                script   = spec['script'],
                                objects  = {a: self.users[a] for a in actors},
                                labels   = labels)
            client.start()
        # Return #
        return sim
