"""Exception hierarchy shared across the package.

Every failure the library reports deliberately is a ``ThdError`` subclass,
so callers (and the CLI) can distinguish bad input from genuine bugs:
anything else escaping the library is a defect.
"""

from __future__ import annotations


class ThdError(Exception):
    """Base class for all errors raised deliberately by this package."""


# --- network model ---------------------------------------------------------


class HypergraphError(ThdError):
    """Invalid network structure or lookup."""


class DuplicateEdgeId(HypergraphError):
    pass


class InvalidInterval(HypergraphError):
    """Edge availability with start > end."""


class TooFewParticipants(HypergraphError):
    """A hyperedge needs at least two distinct participants."""


class InvalidVertexId(HypergraphError):
    """Vertex and edge identifiers must be nonempty strings."""


class UnknownVertex(HypergraphError):
    pass


# --- path queries ----------------------------------------------------------


class PathsError(ThdError):
    pass


class NonPositiveMaxHops(PathsError):
    pass


class Unreached(PathsError):
    """Requested target carries no label."""


class InfeasibleWalk(PathsError):
    """A walk violates edge availability or chaining rules."""


# --- generators ------------------------------------------------------------


class ParamsInvalid(ThdError):
    pass


# --- ingest / serialization ------------------------------------------------


class IoError(ThdError):
    pass


class MalformedJson(IoError):
    """Input is not a structurally valid network document."""


class MixedTimeEncodings(IoError):
    """Document mixes integer ticks with calendar timestamps."""


class RecordInvalid(IoError):
    """A single edge record failed validation."""

    def __init__(self, index: int, reason: str):
        super().__init__(f"edge record {index}: {reason}")
        self.index = index
        self.reason = reason


# --- simulation ------------------------------------------------------------


class SimulateError(ThdError):
    pass


class PlanInvalid(SimulateError):
    pass


class CheckpointMismatch(SimulateError):
    """Checkpoint was written for a different input or plan."""


class CorruptCheckpoint(SimulateError):
    """Checkpoint file exists but fails its integrity check."""
