#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Written by Lucas Sinclair.
MIT Licensed.
Contact at www.sinclair.bio

The command language of transaction code. A CommandList is a tuple of
the commands below. Commands address objects through workspace slots:
the inputs of the stage occupy the first slots in order and every object
a command creates is appended after them.
"""

# Built-in modules #
from dataclasses import dataclass

# Internal modules #

# First party modules #

# Third party modules #

###############################################################################
@dataclass(frozen=True)
class Split:
    """Split the coin in `slot` into coins of the given amounts."""
    slot:   int
    parts:  tuple
    owners: tuple = None

@dataclass(frozen=True)
class Merge:
    """Merge the coins in `slots` into a single coin."""
    slots: tuple

@dataclass(frozen=True)
class Transfer:
    """Move the object in `slot` to a new owner (a new object id)."""
    slot:  int
    owner: str

@dataclass(frozen=True)
class CreateObject:
    type_tag: str
    payload:  object
    owner:    str

@dataclass(frozen=True)
class CreateReactiveActor:
    program:    str
    init_state: object = None

@dataclass(frozen=True)
class SpawnTx:
    """Emit an RA-RA call consuming the objects in `slots`."""
    recipient: str
    slots:     tuple = ()
    call:      object = None
    code_post: tuple = ()

###############################################################################
@dataclass(frozen=True)
class CallSpec:
    """A function name and its keyword arguments as sorted pairs."""

    function: str
    args:     tuple = ()

    @property
    def kwargs(self): return dict(self.args)

def call(function, **kwargs):
    return CallSpec(function, tuple(sorted(kwargs.items())))

###############################################################################
@dataclass(frozen=True)
class RaRaTemplate:
    """
    What an execution asks to emit. `consumed` are ids of objects that the
    emitting reactive actor must own when the emission is checked.
    """

    recipient: str
    consumed:  tuple = ()
    call:      CallSpec = None
    code_post: tuple = ()

###############################################################################
command_types = {'split':           Split,
                 'merge':           Merge,
                 'transfer':        Transfer,
                 'create_object':   CreateObject,
                 'create_reactive': CreateReactiveActor,
                 'spawn':           SpawnTx}

def freeze(value):
    """Make lists and dicts from YAML hashable."""
    if isinstance(value, list):  return tuple(freeze(v) for v in value)
    if isinstance(value, dict):  return tuple(sorted((k, freeze(v))
                                                     for k, v in value.items()))
    return value

def parse_call(spec):
    """Accepts {'function': name, 'args': {...}} or a CallSpec."""
    if spec is None or isinstance(spec, CallSpec): return spec
    args = spec.get('args') or {}
    return CallSpec(spec['function'], freeze(args))

def parse_commands(specs):
    """Build a CommandList from a list of dictionaries with an 'op' key."""
    commands = []
    for spec in specs or ():
        if not isinstance(spec, dict):
            commands.append(spec)
            continue
        spec = dict(spec)
        op   = spec.pop('op', None)
        if op not in command_types:
            msg = "Unknown command '%s', expected one of %s."
            raise ValueError(msg % (op, sorted(command_types)))
        if op == 'spawn':
            spec['call']      = parse_call(spec.get('call'))
            spec['code_post'] = parse_commands(spec.get('code_post'))
        commands.append(command_types[op](**{k: freeze(v)
                                             if k not in ('call', 'code_post')
                                             else v
                                             for k, v in spec.items()}))
    return tuple(commands)
