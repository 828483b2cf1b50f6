"""Exhaustive walk enumeration: ground truth for the path algorithms.

Deliberately dumb. Every feasible temporal walk up to a hop budget is
generated by depth-first search with no memoization or pruning beyond
feasibility itself, and the per-vertex minima are folded from the stream.
Minimal labels are always attained by simple walks, so a budget of
``|V|`` hops is enough for exact answers; anything beyond desk scale
(roughly a dozen edges) is out of scope by design.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping

from .core import Tick, TimeVaryingHypergraph
from .errors import InfeasibleWalk
from .paths import (
    DistanceLabels,
    Metric,
    TemporalWalk,
    fastest,
    foremost,
    reconstruct_walk,
    shortest,
    validate_walk,
    walk_metric_value,
)


@dataclass(frozen=True)
class OracleResult:
    """Per-vertex minima with one witness walk per metric."""

    source: str
    t0: Tick
    foremost: Mapping[str, Tick]
    hops: Mapping[str, int]
    duration: Mapping[str, Tick]
    foremost_witness: Mapping[str, TemporalWalk]
    hops_witness: Mapping[str, TemporalWalk]
    duration_witness: Mapping[str, TemporalWalk]


def enumerate_walks(
    h: TimeVaryingHypergraph, source: str, t0: Tick, max_hops: int
) -> Iterator[TemporalWalk]:
    """Yield every feasible walk from ``(source, t0)`` with at most ``max_hops`` hops.

    Depth-first preorder, each walk exactly once. Children are explored in
    (edge id, via-vertex id) order, so the stream is deterministic. Hops
    that re-select the vertex just entered are skipped: they never change
    any metric. Revisiting earlier vertices is allowed.
    """
    if max_hops < 0:
        raise ValueError(f"max_hops must be >= 0, got {max_hops}")
    src = h.index_of(source)
    ids = h.vertex_ids
    starts = h.edge_starts
    ends = h.edge_ends
    members = h.edge_members

    # per-vertex incidence re-sorted by edge id for the DFS child order
    by_id: dict[int, list[int]] = {}

    def children(u: int) -> list[int]:
        lst = by_id.get(u)
        if lst is None:
            lst = sorted(h.incidence[u], key=lambda ei: h.edges[ei].id)
            by_id[u] = lst
        return lst

    # stack of (vertex, now, hops-so-far, arrivals-so-far)
    stack: list[tuple[int, Tick, tuple[tuple[str, str], ...], tuple[Tick, ...]]] = [
        (src, t0, (), ())
    ]
    while stack:
        u, now, hops, arrivals = stack.pop()
        yield TemporalWalk(source, t0, hops, arrivals)
        if len(hops) >= max_hops:
            continue
        pushed: list[tuple[int, Tick, tuple[tuple[str, str], ...], tuple[Tick, ...]]] = []
        for ei in children(u):
            if ends[ei] < now:
                continue
            arr = now if now >= starts[ei] else starts[ei]
            eid = h.edges[ei].id
            for v in members[ei]:
                if v == u:
                    continue
                pushed.append((v, arr, hops + ((eid, ids[v]),), arrivals + (arr,)))
        stack.extend(reversed(pushed))


def _walk_time_profile(h: TimeVaryingHypergraph, walk: TemporalWalk) -> tuple[Tick, Tick]:
    """(latest start, earliest end) over the walk's edges; needs >= 1 hop."""
    edges = [h.edge_by_id(edge_id) for edge_id, _ in walk.hops]
    return max(e.start for e in edges), min(e.end for e in edges)


def _optimal_departure(max_start: Tick, min_end: Tick, t0: Tick) -> Tick:
    """Smallest departure >= t0 minimizing a walk's duration.

    At departure ``tau`` the walk arrives at ``max(tau, max_start)`` and
    stays feasible while ``tau <= min_end``; duration is non-increasing
    in ``tau``, so the optimum duration is ``max(0, max_start - min_end)``.
    """
    if max_start < t0:
        return t0
    if max_start <= min_end:
        return max_start
    return min_end


def best_duration(h: TimeVaryingHypergraph, walk: TemporalWalk, t0: Tick) -> tuple[Tick, Tick]:
    """Optimal (duration, departure) of a fixed walk over departures >= t0.

    A walk enumerated as feasible at ``t0`` is feasible at every departure
    in ``[t0, min_end]``, so the optimum is always attainable.
    """
    if not walk.hops:
        return 0, t0
    max_start, min_end = _walk_time_profile(h, walk)
    tau = _optimal_departure(max_start, min_end, t0)
    arrival = tau if tau >= max_start else max_start
    return arrival - tau, tau


def _at_departure(h: TimeVaryingHypergraph, walk: TemporalWalk, tau: Tick) -> TemporalWalk:
    """The same hop sequence re-timed to depart at ``tau``."""
    arrivals = []
    now = tau
    for edge_id, _ in walk.hops:
        e = h.edge_by_id(edge_id)
        now = now if now >= e.start else e.start
        arrivals.append(now)
    return TemporalWalk(walk.source, tau, walk.hops, tuple(arrivals))


def oracle_distances(
    h: TimeVaryingHypergraph, source: str, t0: Tick, max_hops: int
) -> OracleResult:
    """Fold the walk stream into exact per-vertex minima for all three metrics.

    Witnesses keep the first walk (in enumeration order) attaining each
    final minimum, so results are deterministic.
    """
    foremost: dict[str, Tick] = {}
    hops: dict[str, int] = {}
    duration: dict[str, Tick] = {}
    w_fore: dict[str, TemporalWalk] = {}
    w_hops: dict[str, TemporalWalk] = {}
    w_dur: dict[str, TemporalWalk] = {}

    window = {e.id: (e.start, e.end) for e in h.edges}
    inf = float("inf")

    for walk in enumerate_walks(h, source, t0, max_hops):
        v = walk.terminus
        arr = walk.arrival
        if arr < foremost.get(v, inf):
            foremost[v] = arr
            w_fore[v] = walk
        k = walk.hop_count
        if k < hops.get(v, inf):
            hops[v] = k
            w_hops[v] = walk
        if walk.hops:
            max_start = max(window[e][0] for e, _ in walk.hops)
            min_end = min(window[e][1] for e, _ in walk.hops)
            tau = _optimal_departure(max_start, min_end, t0)
            dur = max_start - tau if max_start > tau else 0
        else:
            dur, tau = 0, t0
        if dur < duration.get(v, inf):
            duration[v] = dur
            w_dur[v] = _at_departure(h, walk, tau)

    return OracleResult(
        source=source,
        t0=t0,
        foremost=foremost,
        hops=hops,
        duration=duration,
        foremost_witness=w_fore,
        hops_witness=w_hops,
        duration_witness=w_dur,
    )


# --------------------------------------------------------------------------
# differential checking
# --------------------------------------------------------------------------


def _check_labels(
    h: TimeVaryingHypergraph,
    labels: DistanceLabels,
    expected: Mapping[str, int],
    out: list[str],
) -> None:
    name = labels.metric.value
    if dict(labels.values) != dict(expected):
        extra = sorted(set(labels.values) - set(expected))
        missing = sorted(set(expected) - set(labels.values))
        diffs = {
            v: (labels.values[v], expected[v])
            for v in set(labels.values) & set(expected)
            if labels.values[v] != expected[v]
        }
        out.append(
            f"{name} from {labels.source!r}: extra={extra} missing={missing} diffs={diffs}"
        )
        return
    for target in labels.values:
        walk = reconstruct_walk(labels, target)
        try:
            validate_walk(h, walk)
        except InfeasibleWalk as exc:
            out.append(f"{name} from {labels.source!r}: witness for {target!r} infeasible: {exc}")
            continue
        if walk.terminus != target:
            out.append(f"{name} from {labels.source!r}: witness ends at {walk.terminus!r}, not {target!r}")
        got = walk_metric_value(walk, labels.metric)
        if got != labels.values[target]:
            out.append(
                f"{name} from {labels.source!r}: witness for {target!r} "
                f"attains {got}, label says {labels.values[target]}"
            )
        if labels.metric is Metric.FASTEST and walk.departure < labels.t0:
            out.append(
                f"{name} from {labels.source!r}: witness for {target!r} departs "
                f"at {walk.departure} before t0 {labels.t0}"
            )


def differential_report(
    h: TimeVaryingHypergraph, t0: Tick = 0, max_hops: int | None = None
) -> list[str]:
    """Compare all three metrics with the oracle from every source.

    Also validates every reconstructed witness walk (feasibility, attained
    value). Returns human-readable mismatch descriptions, empty when the
    implementations agree everywhere. Strictly desk scale: the oracle is
    exhaustive. The default hop budget is ``|V| - 1``: cutting any cycle
    out of a walk never worsens a metric, so simple walks attain every
    minimum.
    """
    budget = max_hops if max_hops is not None else max(h.vertex_count - 1, 1)
    out: list[str] = []
    for source in h.vertex_ids:
        orc = oracle_distances(h, source, t0, budget)
        _check_labels(h, foremost(h, source, t0), orc.foremost, out)
        _check_labels(h, shortest(h, source, t0, budget), orc.hops, out)
        _check_labels(h, fastest(h, source, t0), orc.duration, out)
        for witness_map, values, metric in (
            (orc.foremost_witness, orc.foremost, Metric.FOREMOST),
            (orc.hops_witness, orc.hops, Metric.SHORTEST),
            (orc.duration_witness, orc.duration, Metric.FASTEST),
        ):
            for target, walk in witness_map.items():
                try:
                    validate_walk(h, walk)
                except InfeasibleWalk as exc:
                    out.append(f"oracle witness from {source!r} to {target!r}: {exc}")
                    continue
                if walk_metric_value(walk, metric) != values[target]:
                    out.append(
                        f"oracle {metric.value} witness from {source!r} to {target!r} "
                        f"does not attain its value"
                    )
    return out
