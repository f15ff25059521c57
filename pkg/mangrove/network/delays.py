#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Written by Lucas Sinclair.
MIT Licensed.
Contact at www.sinclair.bio
"""

# Built-in modules #
import random

# Internal modules #

# First party modules #

# Third party modules #

# Constants #
modes = ('synchronous', 'pre-gst-adversarial', 'drop-byzantine', 'fixed')

###############################################################################
class DelayPolicy:
    """
    Chooses the delay of every Outer-Link message. Whatever the mode, a
    message sent at time t is delivered by max(t+Δ, GST+Δ) and never at
    the same instant it was sent. The modes are:

        * synchronous: uniform in [1, Δ].
        * pre-gst-adversarial: before GST, uniform up to `cap`·Δ and then
                               clamped, after GST as synchronous.
        * drop-byzantine: as synchronous, but everything a Byzantine
                          validator sends is lost.
        * fixed: always exactly Δ, useful for exact latency measurements.
    """

    def __repr__(self):
        return '<%s object in mode "%s">' % (self.__class__.__name__, self.mode)

    def __init__(self, params, mode='synchronous', seed=0, cap=20,
                 byzantine=()):
        # Check #
        if mode not in modes:
            msg = "The delay mode '%s' is not one of %s."
            raise ValueError(msg % (mode, modes))
        # Save attributes #
        self.params    = params
        self.mode      = mode
        self.cap       = cap
        self.byzantine = frozenset(byzantine)
        self.rng       = random.Random(seed)

    @property
    def delta(self): return self.params.delta_bound

    def bound(self, sent_at):
        return self.params.bound(sent_at)

    def outer_delay(self, sent_at, src_node=None, dst_node=None):
        """
        Returns a positive integer delay, or None when the message is lost.
        Only messages from Byzantine validators can be lost.
        """
        # Byzantine senders may be silenced #
        if self.mode == 'drop-byzantine' and src_node in self.byzantine:
            return None
        # Pick a delay #
        if self.mode == 'fixed':
            delay = self.delta
        elif self.mode == 'pre-gst-adversarial' and sent_at < self.params.gst:
            delay = self.rng.randint(1, self.cap * self.delta)
        else:
            delay = self.rng.randint(1, self.delta)
        # Clamp to the partial synchrony bound #
        return max(1, min(delay, self.bound(sent_at) - sent_at))
