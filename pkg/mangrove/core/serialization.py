#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Written by Lucas Sinclair.
MIT Licensed.
Contact at www.sinclair.bio

Canonical byte encoding of every value that gets hashed, signed or
written to a trace. Each value is a one byte tag followed by its
content. Integers are big-endian and fixed-width, variable length
content is prefixed by its length. Unordered collections are encoded
in sorted order so that equal sets always give equal bytes.
"""

# Built-in modules #
import struct, hashlib, dataclasses

# Internal modules #

# First party modules #

# Third party modules #

###############################################################################
def encode(value):
    """Return the canonical bytes of `value`."""
    # Objects that cache their own encoding #
    cached = getattr(value, 'wire_bytes', None)
    if isinstance(cached, bytes): return cached
    # Scalars #
    if value is None:            return b'N'
    if isinstance(value, bool):  return b'T' if value else b'F'
    if isinstance(value, int):   return b'I' + struct.pack('>q', value)
    if isinstance(value, str):   return prefixed(b'S', value.encode('utf-8'))
    if isinstance(value, bytes): return prefixed(b'B', value)
    # Ordered collections #
    if isinstance(value, (tuple, list)):
        return collection(b'L', [encode(v) for v in value])
    # Unordered collections #
    if isinstance(value, (set, frozenset)):
        return collection(b'E', sorted(encode(v) for v in value))
    if isinstance(value, dict):
        items = sorted(encode(k) + encode(v) for k, v in value.items())
        return collection(b'D', items)
    # Dataclasses use their class name and init fields in declaration order #
    if dataclasses.is_dataclass(value):
        fields = [getattr(value, f.name) for f in dataclasses.fields(value)
                  if f.init]
        return b'C' + encode(value.__class__.__name__) + encode(fields)
    # Anything else is a programming error #
    msg = "Cannot canonically encode a value of type '%s'."
    raise TypeError(msg % value.__class__.__name__)

def prefixed(tag, data):
    return tag + struct.pack('>I', len(data)) + data

def collection(tag, parts):
    return tag + struct.pack('>I', len(parts)) + b''.join(parts)

###############################################################################
def digest(value):
    """Hex SHA-256 of the canonical encoding."""
    return hashlib.sha256(encode(value)).hexdigest()

def short(hex_digest, size=10):
    """Abbreviated digest used in trace records and tables."""
    if hex_digest is None: return None
    return hex_digest[:size]
