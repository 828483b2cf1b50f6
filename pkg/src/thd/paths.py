"""Minimal temporal paths over a time-varying hypergraph.

A temporal walk leaves its source at a departure tick and crosses one
hyperedge per hop. A hop over edge ``e`` is feasible when the current time
``a`` satisfies ``a <= end(e)``; it delivers the walker to any other
participant of ``e`` at ``max(a, start(e))``. Arrival times are therefore
non-decreasing along a walk, and waiting on a vertex is free.

Three notions of minimal distance from a source:

* foremost - earliest possible arrival tick at each vertex, departing at
  ``t0``. Computed by a label-setting generalization of Dijkstra: vertices
  settle in arrival order and every hyperedge needs relaxing at most once,
  because later settlements can only produce later candidate arrivals.
* shortest - fewest hops, over walks that are temporally feasible from
  ``t0``. Computed by hop-layered dynamic programming where each layer
  keeps only the earliest arrival per vertex; an earlier arrival never
  disables an extension that a later one enables, so that reduction is
  lossless.
* fastest - smallest duration (arrival minus departure), minimized over
  all departures ``tau >= t0``. For a fixed walk the arrival equals
  ``max(tau, latest edge start)`` and feasibility caps ``tau`` at the
  walk's earliest edge end, so the optimum departure of any walk is the
  minimum end over its edges. Running foremost once per candidate in
  ``{t0} union {end(e) >= t0 for every edge e}`` and folding
  ``arrival - tau`` is exact.

Unreached vertices are absent from the label maps; there are no sentinel
values anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from heapq import heappop, heappush
from typing import Mapping

from .core import Tick, TimeVaryingHypergraph
from .errors import InfeasibleWalk, NonPositiveMaxHops, PathsError, Unreached


class Metric(str, Enum):
    FOREMOST = "foremost"
    SHORTEST = "shortest"
    FASTEST = "fastest"


METRIC_ORDER: tuple[Metric, ...] = (Metric.FOREMOST, Metric.SHORTEST, Metric.FASTEST)


@dataclass(frozen=True)
class TemporalWalk:
    """A concrete feasible walk: the evidence behind a distance label.

    ``hops[i]`` is ``(edge id, via vertex)`` - the edge crossed and the
    participant reached; ``arrivals[i]`` is the tick that hop completed.
    The empty walk (zero hops) represents staying on the source.
    """

    source: str
    departure: Tick
    hops: tuple[tuple[str, str], ...]
    arrivals: tuple[Tick, ...]

    @property
    def hop_count(self) -> int:
        return len(self.hops)

    @property
    def arrival(self) -> Tick:
        return self.arrivals[-1] if self.arrivals else self.departure

    @property
    def duration(self) -> Tick:
        return self.arrival - self.departure

    @property
    def terminus(self) -> str:
        return self.hops[-1][1] if self.hops else self.source


@dataclass(frozen=True)
class DistanceLabels:
    """Per-source result of one metric.

    ``values`` maps reached vertex ids to the metric value (arrival tick,
    hop count, or duration). The source is always present with value
    ``t0`` / 0 / 0 respectively. ``predecessors`` maps each reached
    vertex to the last hop ``(edge id, prior vertex)`` of an optimal walk;
    chains always terminate at the source. For hop and duration labels the
    optimal walk through a vertex need not extend that vertex's own
    optimal walk, so those metrics additionally carry exact per-vertex
    ``witnesses`` and reconstruction reads them instead of replaying the
    chain. Both are None when the labels were computed values-only.
    """

    source: str
    t0: Tick
    metric: Metric
    values: Mapping[str, int]
    predecessors: Mapping[str, tuple[str, str]] | None
    witnesses: Mapping[str, TemporalWalk] | None = None


# --------------------------------------------------------------------------
# foremost
# --------------------------------------------------------------------------


def _foremost_core(
    h: TimeVaryingHypergraph,
    src: int,
    t0: Tick,
    horizon: Tick | None,
    keep_pred: bool,
) -> tuple[dict[int, Tick], dict[int, tuple[int, int]]]:
    """Label-setting earliest-arrival search over vertex indices.

    Returns ``(arrival, pred)`` keyed by dense vertex index; ``pred[v]``
    is ``(edge index, prior vertex index)`` and is empty unless
    ``keep_pred``. Each hyperedge is relaxed at most once: the first
    feasible relaxation happens at the smallest settled arrival among its
    participants, which minimizes ``max(arrival, start)`` for everyone.
    """
    starts = h.edge_starts
    ends = h.edge_ends
    members = h.edge_members
    incidence = h.incidence

    arrival: dict[int, Tick] = {src: t0}
    pred: dict[int, tuple[int, int]] = {}
    settled = bytearray(len(h.vertex_ids))
    edge_done = bytearray(len(h.edges))

    heap: list[tuple[Tick, int]] = [(t0, src)]
    while heap:
        a_u, u = heappop(heap)
        if settled[u]:
            continue
        settled[u] = 1
        for ei in incidence[u]:
            if edge_done[ei] or ends[ei] < a_u:
                continue
            edge_done[ei] = 1
            arr = a_u if a_u >= starts[ei] else starts[ei]
            if horizon is not None and arr > horizon:
                continue
            for v in members[ei]:
                if v == u or settled[v]:
                    continue
                known = arrival.get(v)
                if known is None or arr < known:
                    arrival[v] = arr
                    if keep_pred:
                        pred[v] = (ei, u)
                    heappush(heap, (arr, v))
                elif keep_pred and arr == known:
                    # deterministic tie-break: smallest (edge id, prior id)
                    cur = pred.get(v)
                    if cur is not None:
                        cand = (h.edges[ei].id, h.vertex_ids[u])
                        if cand < (h.edges[cur[0]].id, h.vertex_ids[cur[1]]):
                            pred[v] = (ei, u)
    return arrival, pred


def foremost(
    h: TimeVaryingHypergraph,
    source: str,
    t0: Tick,
    horizon: Tick | None = None,
    keep_predecessors: bool = True,
) -> DistanceLabels:
    """Earliest arrival tick at every reachable vertex, departing at ``t0``.

    With a ``horizon``, arrivals beyond it are discarded entirely. Raises
    UnknownVertex if the source is not in the hypergraph.
    """
    src = h.index_of(source)
    arrival, pred = _foremost_core(h, src, t0, horizon, keep_predecessors)
    ids = h.vertex_ids
    values = {ids[v]: a for v, a in sorted(arrival.items())}
    predecessors = None
    if keep_predecessors:
        predecessors = {
            ids[v]: (h.edges[ei].id, ids[u]) for v, (ei, u) in sorted(pred.items())
        }
    return DistanceLabels(source, t0, Metric.FOREMOST, values, predecessors)


# --------------------------------------------------------------------------
# shortest (hop-layered DP)
# --------------------------------------------------------------------------


def shortest(
    h: TimeVaryingHypergraph,
    source: str,
    t0: Tick,
    max_hops: int,
    horizon: Tick | None = None,
    keep_predecessors: bool = True,
) -> DistanceLabels:
    """Minimum hop count over temporally feasible walks from ``(source, t0)``.

    Layer ``k`` holds the earliest arrival reachable in at most ``k``
    hops; a vertex's hop label is the first layer that defines it. Layers
    stop early once no arrival improves, and never exceed ``max_hops``.
    """
    if max_hops < 1:
        raise NonPositiveMaxHops(f"max_hops must be >= 1, got {max_hops}")
    src = h.index_of(source)

    starts = h.edge_starts
    ends = h.edge_ends
    members = h.edge_members
    incidence = h.incidence
    ids = h.vertex_ids

    arrival: dict[int, Tick] = {src: t0}
    hop_of: dict[int, int] = {src: 0}

    # arrival-improvement events; walking prior links from a vertex's first
    # event replays a feasible minimal-hop walk exactly
    ev_edge: list[int] = []
    ev_vertex: list[int] = []
    ev_arrival: list[Tick] = []
    ev_prior: list[int] = []
    latest_event: dict[int, int] = {src: -1}
    first_event: dict[int, int] = {}

    frontier = [src]
    layer = 0
    while frontier and layer < max_hops:
        layer += 1
        # candidate per vertex: (arrival, edge idx, prior vertex, prior event)
        updates: dict[int, tuple[Tick, int, int, int]] = {}
        for u in frontier:
            a_u = arrival[u]
            pe = latest_event[u]
            for ei in incidence[u]:
                if ends[ei] < a_u:
                    continue
                arr = a_u if a_u >= starts[ei] else starts[ei]
                if horizon is not None and arr > horizon:
                    continue
                for v in members[ei]:
                    if v == u:
                        continue
                    known = arrival.get(v)
                    if known is not None and known <= arr:
                        continue
                    cur = updates.get(v)
                    if cur is None or arr < cur[0]:
                        updates[v] = (arr, ei, u, pe)
                    elif arr == cur[0] and (h.edges[ei].id, ids[u]) < (
                        h.edges[cur[1]].id,
                        ids[cur[2]],
                    ):
                        updates[v] = (arr, ei, u, pe)
        frontier = []
        for v, (arr, ei, u, pe) in updates.items():
            known = arrival.get(v)
            event = len(ev_edge)
            ev_edge.append(ei)
            ev_vertex.append(v)
            ev_arrival.append(arr)
            ev_prior.append(pe)
            latest_event[v] = event
            if known is None:
                hop_of[v] = layer
                first_event[v] = event
            arrival[v] = arr
            frontier.append(v)
        frontier.sort()

    values = {ids[v]: k for v, k in sorted(hop_of.items())}
    predecessors = None
    witnesses = None
    if keep_predecessors:
        predecessors = {}
        witnesses = {ids[src]: TemporalWalk(source, t0, (), ())}
        for v in sorted(first_event):
            rev: list[tuple[str, str, Tick]] = []
            ev = first_event[v]
            while ev != -1:
                rev.append((h.edges[ev_edge[ev]].id, ids[ev_vertex[ev]], ev_arrival[ev]))
                ev = ev_prior[ev]
            rev.reverse()
            walk = TemporalWalk(
                source,
                t0,
                tuple((e, w) for e, w, _ in rev),
                tuple(a for _, _, a in rev),
            )
            witnesses[ids[v]] = walk
            prior = rev[-2][1] if len(rev) >= 2 else source
            predecessors[ids[v]] = (rev[-1][0], prior)
    return DistanceLabels(source, t0, Metric.SHORTEST, values, predecessors, witnesses)


# --------------------------------------------------------------------------
# fastest
# --------------------------------------------------------------------------


def fastest_departure_candidates(h: TimeVaryingHypergraph, t0: Tick) -> list[Tick]:
    """Departure ticks that can be optimal for some walk, descending.

    A walk's duration is non-increasing in its departure until the
    departure passes the walk's earliest edge end; that bound is always
    some edge's end tick, so edge ends (clamped to ``>= t0``) plus ``t0``
    itself cover every optimum.
    """
    cands = {end for end in h.edge_ends if end >= t0}
    cands.add(t0)
    return sorted(cands, reverse=True)


def fastest(
    h: TimeVaryingHypergraph,
    source: str,
    t0: Tick,
    horizon: Tick | None = None,
    keep_predecessors: bool = True,
) -> DistanceLabels:
    """Minimum duration (arrival minus departure) over departures ``>= t0``.

    One earliest-arrival sweep per candidate departure, folded with strict
    improvement; the first run (largest departure) attaining a vertex's
    optimum supplies its witness walk, so witnesses form a forest.
    """
    src = h.index_of(source)
    ids = h.vertex_ids

    best: dict[int, Tick] = {}
    witness: dict[int, TemporalWalk] = {}
    for tau in fastest_departure_candidates(h, t0):
        arrival, pred = _foremost_core(h, src, tau, horizon, keep_predecessors)
        for v, a in arrival.items():
            dur = a - tau
            known = best.get(v)
            if known is None or dur < known:
                best[v] = dur
                if keep_predecessors:
                    witness[v] = _replay_chain(h, source, tau, arrival, pred, v)

    values = {ids[v]: d for v, d in sorted(best.items())}
    predecessors = None
    witnesses = None
    if keep_predecessors:
        witnesses = {}
        predecessors = {}
        for v in sorted(best):
            walk = witness[v]
            witnesses[ids[v]] = walk
            if walk.hops:
                prior = walk.hops[-2][1] if len(walk.hops) >= 2 else source
                predecessors[ids[v]] = (walk.hops[-1][0], prior)
    return DistanceLabels(source, t0, Metric.FASTEST, values, predecessors, witnesses)


def _replay_chain(
    h: TimeVaryingHypergraph,
    source: str,
    departure: Tick,
    arrival: dict[int, Tick],
    pred: dict[int, tuple[int, int]],
    v: int,
) -> TemporalWalk:
    """Walk the predecessor chain of one earliest-arrival run."""
    rev: list[tuple[str, str, Tick]] = []
    while v in pred:
        ei, u = pred[v]
        rev.append((h.edges[ei].id, h.vertex_ids[v], arrival[v]))
        v = u
    rev.reverse()
    return TemporalWalk(
        source,
        departure,
        tuple((e, w) for e, w, _ in rev),
        tuple(a for _, _, a in rev),
    )


# --------------------------------------------------------------------------
# reconstruction and validation
# --------------------------------------------------------------------------


def reconstruct_walk(labels: DistanceLabels, target: str) -> TemporalWalk:
    """Recover a feasible optimal walk for ``target`` from its labels.

    The walk's metric value equals ``labels.values[target]`` exactly.
    Raises Unreached when the target carries no label, and PathsError when
    the labels were computed without predecessors.
    """
    if target not in labels.values:
        raise Unreached(f"{target!r} is not reached in these labels")
    if target == labels.source:
        return TemporalWalk(labels.source, labels.t0, (), ())
    if labels.metric is Metric.FOREMOST:
        if labels.predecessors is None:
            raise PathsError("labels were computed without predecessors")
        rev: list[tuple[str, str]] = []
        v = target
        while v != labels.source:
            edge_id, prior = labels.predecessors[v]
            rev.append((edge_id, v))
            v = prior
        rev.reverse()
        # foremost chains attain the label arrival at every prefix vertex
        return TemporalWalk(
            labels.source,
            labels.t0,
            tuple(rev),
            tuple(labels.values[v] for _, v in rev),
        )
    if labels.witnesses is None:
        raise PathsError("labels were computed without predecessors")
    return labels.witnesses[target]


def validate_walk(h: TimeVaryingHypergraph, walk: TemporalWalk) -> None:
    """Check the feasibility invariant; raise InfeasibleWalk on violation.

    Verifies participant chaining (each via-vertex joins consecutive
    edges, the source joins the first), the availability rule
    ``a_prev <= end(e)``, and the arrival recurrence
    ``a = max(a_prev, start(e))``.
    """
    if walk.source not in h:
        raise InfeasibleWalk(f"source {walk.source!r} not in hypergraph")
    if len(walk.hops) != len(walk.arrivals):
        raise InfeasibleWalk("hops and arrivals differ in length")
    at = walk.source
    now = walk.departure
    for i, ((edge_id, via), arr) in enumerate(zip(walk.hops, walk.arrivals)):
        try:
            edge = h.edge_by_id(edge_id)
        except KeyError:
            raise InfeasibleWalk(f"hop {i}: unknown edge {edge_id!r}") from None
        if at not in edge.participants:
            raise InfeasibleWalk(f"hop {i}: {at!r} does not join edge {edge_id!r}")
        if via not in edge.participants:
            raise InfeasibleWalk(f"hop {i}: {via!r} does not join edge {edge_id!r}")
        if now > edge.end:
            raise InfeasibleWalk(
                f"hop {i}: edge {edge_id!r} closed at {edge.end}, reached at {now}"
            )
        expect = now if now >= edge.start else edge.start
        if arr != expect:
            raise InfeasibleWalk(f"hop {i}: arrival {arr} != max(prev, start) = {expect}")
        at = via
        now = arr


def walk_metric_value(walk: TemporalWalk, metric: Metric) -> int:
    if metric is Metric.FOREMOST:
        return walk.arrival
    if metric is Metric.SHORTEST:
        return walk.hop_count
    return walk.duration
