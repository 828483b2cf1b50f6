"""Time-varying hypergraph data model.

A communication network is a set of hyperedges, each connecting two or more
vertices and available during a closed tick interval ``[start, end]``.
Instantaneous edges (``start == end``) are legal. The built structure is
immutable and carries a per-vertex incidence index sorted by edge start,
which is what every traversal in :mod:`thd.paths` walks.

Ticks are plain integers and unit-agnostic; the ingest layer converts
calendar timestamps to milliseconds since the epoch.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import (
    DuplicateEdgeId,
    InvalidInterval,
    InvalidVertexId,
    TooFewParticipants,
    UnknownVertex,
)

Tick = int

MIN_TICK = -(2**62)
MAX_TICK = 2**62


@dataclass(frozen=True)
class TemporalHyperedge:
    """One interaction: who participated, and when the edge was open.

    Records are plain data; validation happens in :func:`build_hypergraph`
    so that ingest layers can construct candidate records first and report
    which ones are bad.
    """

    id: str
    participants: frozenset[str]
    start: Tick
    end: Tick

    def validate(self) -> None:
        """Raise a :class:`~thd.errors.HypergraphError` subclass if invalid."""
        if not isinstance(self.id, str) or not self.id:
            raise InvalidVertexId(f"edge id must be a nonempty string, got {self.id!r}")
        for p in self.participants:
            if not isinstance(p, str) or not p:
                raise InvalidVertexId(
                    f"edge {self.id!r}: participant must be a nonempty string, got {p!r}"
                )
        if len(self.participants) < 2:
            raise TooFewParticipants(
                f"edge {self.id!r} has {len(self.participants)} participant(s), need >= 2"
            )
        if not isinstance(self.start, int) or not isinstance(self.end, int):
            raise InvalidInterval(f"edge {self.id!r}: ticks must be integers")
        if not (MIN_TICK <= self.start <= MAX_TICK and MIN_TICK <= self.end <= MAX_TICK):
            raise InvalidInterval(f"edge {self.id!r}: tick outside representable range")
        if self.start > self.end:
            raise InvalidInterval(
                f"edge {self.id!r}: start {self.start} > end {self.end}"
            )


def hyperedge(edge_id: str, participants: Iterable[str], start: Tick, end: Tick) -> TemporalHyperedge:
    """Convenience constructor accepting any iterable of participant ids."""
    return TemporalHyperedge(edge_id, frozenset(participants), start, end)


@dataclass(frozen=True)
class NetworkStats:
    vertex_count: int
    edge_count: int
    participant_histogram: Mapping[int, int]
    time_span: tuple[Tick, Tick] | None


@dataclass(frozen=True)
class TimeVaryingHypergraph:
    """Immutable network with interned vertices and a time-sorted incidence index.

    Vertex ids are interned to dense indices ``0 .. |V|-1`` in lexicographic
    id order; all internal arrays are indexed by those. Construction goes
    through :func:`build_hypergraph`; instances are safe to share across
    concurrent readers.
    """

    vertex_ids: tuple[str, ...]
    edges: tuple[TemporalHyperedge, ...]
    # traversal arrays, parallel to `edges`
    edge_starts: tuple[Tick, ...] = field(repr=False)
    edge_ends: tuple[Tick, ...] = field(repr=False)
    edge_members: tuple[tuple[int, ...], ...] = field(repr=False)
    # per-vertex edge indexes, ascending (start, edge id)
    incidence: tuple[tuple[int, ...], ...] = field(repr=False)
    _vertex_index: Mapping[str, int] = field(repr=False)

    @property
    def vertex_count(self) -> int:
        return len(self.vertex_ids)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def vertices(self) -> Iterator[str]:
        return iter(self.vertex_ids)

    def __contains__(self, vertex: str) -> bool:
        return vertex in self._vertex_index

    def index_of(self, vertex: str) -> int:
        """Dense index of a vertex id; raises UnknownVertex if absent."""
        try:
            return self._vertex_index[vertex]
        except KeyError:
            raise UnknownVertex(f"vertex {vertex!r} not in hypergraph") from None

    def edge_by_id(self, edge_id: str) -> TemporalHyperedge:
        idx = self._edge_index.get(edge_id)
        if idx is None:
            raise KeyError(edge_id)
        return self.edges[idx]

    @property
    def _edge_index(self) -> dict[str, int]:
        # lazily built; cached on the instance despite frozen dataclass
        cache = self.__dict__.get("_edge_index_cache")
        if cache is None:
            cache = {e.id: i for i, e in enumerate(self.edges)}
            object.__setattr__(self, "_edge_index_cache", cache)
        return cache


def build_hypergraph(edge_records: Sequence[TemporalHyperedge]) -> TimeVaryingHypergraph:
    """Validate edge records and assemble the immutable hypergraph.

    The vertex table is the union of all participants, interned in
    lexicographic order. The incidence index lists each (vertex, edge)
    membership exactly once, sorted ascending by edge start with ties
    broken by edge id, so iteration order is deterministic for any
    input order of equal records.

    Raises DuplicateEdgeId, InvalidInterval, TooFewParticipants, or
    InvalidVertexId on the first offending record.
    """
    seen_ids: set[str] = set()
    for rec in edge_records:
        rec.validate()
        if rec.id in seen_ids:
            raise DuplicateEdgeId(f"edge id {rec.id!r} appears more than once")
        seen_ids.add(rec.id)

    edges = tuple(edge_records)

    vertex_ids = tuple(sorted({p for e in edges for p in e.participants}))
    vertex_index = {v: i for i, v in enumerate(vertex_ids)}

    edge_starts = tuple(e.start for e in edges)
    edge_ends = tuple(e.end for e in edges)
    edge_members = tuple(
        tuple(sorted(vertex_index[p] for p in e.participants)) for e in edges
    )

    order = sorted(range(len(edges)), key=lambda i: (edges[i].start, edges[i].id))
    incidence_lists: list[list[int]] = [[] for _ in vertex_ids]
    for ei in order:
        for vi in edge_members[ei]:
            incidence_lists[vi].append(ei)

    return TimeVaryingHypergraph(
        vertex_ids=vertex_ids,
        edges=edges,
        edge_starts=edge_starts,
        edge_ends=edge_ends,
        edge_members=edge_members,
        incidence=tuple(tuple(lst) for lst in incidence_lists),
        _vertex_index=vertex_index,
    )


def incident_edges(
    h: TimeVaryingHypergraph, vertex: str, not_before: Tick
) -> list[TemporalHyperedge]:
    """Edges containing `vertex` still open at `not_before` (end >= not_before).

    Returned in ascending start order, ties by edge id; the hypergraph is
    not mutated.
    """
    vi = h.index_of(vertex)
    ends = h.edge_ends
    return [h.edges[ei] for ei in h.incidence[vi] if ends[ei] >= not_before]


def stats(h: TimeVaryingHypergraph) -> NetworkStats:
    """Exact counts over the data model; cheap enough to be a sanity check."""
    histogram = Counter(len(e.participants) for e in h.edges)
    if h.edges:
        span = (min(h.edge_starts), max(h.edge_ends))
    else:
        span = None
    return NetworkStats(
        vertex_count=h.vertex_count,
        edge_count=h.edge_count,
        participant_histogram=dict(histogram),
        time_span=span,
    )
