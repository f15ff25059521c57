#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Written by Lucas Sinclair.
MIT Licensed.
Contact at www.sinclair.bio
"""

# Built-in modules #
from dataclasses import dataclass

# Internal modules #

# First party modules #

# Third party modules #

###############################################################################
@dataclass(frozen=True)
class SystemParams:
    """
    The fixed parameters of a deployment:

        * n: the number of validators.
        * f: the maximum number of Byzantine validators.
        * p: the number of faults the fast path can still tolerate.
        * delta_bound: the maximum message delay after GST.
        * gst: the global stabilization time.

    Time is measured in integer simulated time units.
    """

    n:           int
    f:           int
    p:           int
    delta_bound: int
    gst:         int = 0

    def __post_init__(self):
        # Every field must be an integer #
        for name in ('n', 'f', 'p', 'delta_bound', 'gst'):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool):
                msg = "The parameter `%s` must be an integer, not '%s'."
                raise ValueError(msg % (name, value))
        # Signs #
        if self.f < 0 or self.p < 0 or self.gst < 0:
            msg = "The parameters f, p and gst cannot be negative (%s)."
            raise ValueError(msg % (self,))
        if self.delta_bound <= 0:
            raise ValueError("The delay bound must be positive (%s)." % self)
        # Resilience #
        check_resilience(self.n, self.f, self.p)

    @property
    def delta(self):
        """Shorter name for the post-GST delay bound."""
        return self.delta_bound

    @property
    def quorums(self):
        return derive_quorums(self)

    @property
    def validators(self):
        return range(self.n)

    def bound(self, sent_at):
        """Latest delivery time of an Outer-Link message sent at `sent_at`."""
        return max(sent_at + self.delta_bound, self.gst + self.delta_bound)

###############################################################################
@dataclass(frozen=True)
class Quorums:
    """The vote thresholds used across every protocol."""

    fast:         int
    slow_trigger: int
    fallback:     int
    qc_carry:     int
    round_votes:  int

###############################################################################
def check_resilience(n, f, p):
    if n < 3 * f + 2 * p + 1:
        msg = "With f=%i and p=%i at least %i validators are needed, " \
              "only n=%i were given."
        raise ValueError(msg % (f, p, 3 * f + 2 * p + 1, n))

def derive_quorums(params):
    """Compute the five thresholds from a set of system parameters."""
    # Refuse anything below the resilience bound #
    n, f, p = params.n, params.f, params.p
    check_resilience(n, f, p)
    # Return #
    return Quorums(fast         = n - p,
                   slow_trigger = n - p - 2 * f,
                   fallback     = n - 2 * f,
                   qc_carry     = n - 3 * f,
                   round_votes  = n - f)
