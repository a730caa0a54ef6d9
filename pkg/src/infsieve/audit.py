"""Opt-in runtime checks and operation counters for the sieves.

Enabled by ``INFSIEVE_AUDIT=1`` or :func:`enable`.  When on, every grid sieve
asserts the centre-count bound and the cell-diameter property, and the
provable drivers check both pair invariants exactly after every iteration.
Counters accumulate across runs until :func:`reset`.
"""

from __future__ import annotations

import os
from collections import Counter


class AuditError(AssertionError):
    pass


class _Audit:
    def __init__(self):
        self.enabled = os.environ.get("INFSIEVE_AUDIT", "") not in ("", "0")
        self.counters: Counter = Counter()
        self.max_centre_fill = 0.0

    def require(self, cond: bool, what: str):
        if not cond:
            self.counters["violations"] += 1
            raise AuditError(what)


AUDIT = _Audit()


def enable(flag: bool = True):
    AUDIT.enabled = flag


def reset():
    AUDIT.counters.clear()
    AUDIT.max_centre_fill = 0.0


def snapshot() -> dict:
    out = dict(AUDIT.counters)
    out["max_centre_fill"] = AUDIT.max_centre_fill
    return out
