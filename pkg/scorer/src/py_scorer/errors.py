"""Exception hierarchy for the scorer adapter.

Every error raised on an expected failure path derives from ScorerError so
the CLI can turn any of them into a single-line message and exit code 1.
"""

from __future__ import annotations


class ScorerError(Exception):
    """Base class for all scorer errors."""


class WireError(ScorerError):
    """A candidate file line is malformed; the message names the 1-based line."""


class UnknownMetricError(ScorerError):
    """A metric id is not in the shared metadata table."""


class ModeKindError(ScorerError):
    """The requested scoring mode contradicts a metric's kind."""


class ModelLoadError(ScorerError):
    """A model backend could not be constructed."""


class DeviceOomError(ScorerError):
    """The device ran out of memory; the message suggests a smaller batch."""


class MissingReferenceError(ScorerError):
    """at_ref mode reached a segment without a reference."""
