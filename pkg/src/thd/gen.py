"""Seeded synthetic network generators.

Random graphs for property tests and scale benchmarks, plus structured
fixtures (chains, stars, single clique hyperedges) whose distances are
known in closed form. Everything is driven by one ``random.Random``
instance derived from the parameter seed, so any failure replays from
``(params, seed)`` alone; there is no global randomness.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .core import TemporalHyperedge, Tick, TimeVaryingHypergraph, build_hypergraph
from .errors import ParamsInvalid


@dataclass(frozen=True)
class GenParams:
    """Knobs for :func:`gen_random`.

    Participant counts per edge are drawn from ``[min_participants,
    max_participants]``; ``size_skew > 0`` biases toward small edges
    (0 is uniform). Edge availability starts fall in ``[0, span]`` and
    last between ``min_length`` and ``max_length`` ticks, clamped to the
    span.
    """

    vertex_count: int
    edge_count: int
    min_participants: int = 2
    max_participants: int = 4
    size_skew: float = 1.0
    span: Tick = 1000
    min_length: Tick = 0
    max_length: Tick = 50
    seed: int = 0

    def validate(self) -> None:
        if self.vertex_count < 2:
            raise ParamsInvalid(f"vertex_count must be >= 2, got {self.vertex_count}")
        if self.edge_count < 0:
            raise ParamsInvalid(f"edge_count must be >= 0, got {self.edge_count}")
        if self.min_participants < 2:
            raise ParamsInvalid("min_participants must be >= 2")
        if self.max_participants < self.min_participants:
            raise ParamsInvalid("max_participants < min_participants")
        if self.max_participants > self.vertex_count:
            raise ParamsInvalid("max_participants exceeds vertex_count")
        if self.size_skew < 0:
            raise ParamsInvalid("size_skew must be >= 0")
        if self.span < 0 or self.min_length < 0 or self.max_length < self.min_length:
            raise ParamsInvalid("invalid time span or interval lengths")


def _vertex_names(n: int) -> list[str]:
    width = len(str(n - 1))
    return [f"v{i:0{width}d}" for i in range(n)]


def _edge_name(i: int, total: int) -> str:
    width = len(str(max(total - 1, 1)))
    return f"e{i:0{width}d}"


def gen_random(params: GenParams) -> TimeVaryingHypergraph:
    """Generate a random network with exactly the requested counts.

    Every vertex is guaranteed to appear in at least one edge (so the
    built vertex table matches ``vertex_count`` exactly): participant
    slots are first filled from a shuffled round-robin over all vertices,
    then topped up randomly. Requires enough total slots to cover the
    vertices, otherwise ParamsInvalid.
    """
    params.validate()
    rng = random.Random(params.seed)
    names = _vertex_names(params.vertex_count)

    sizes = [_draw_size(rng, params) for _ in range(params.edge_count)]
    if sum(sizes) < params.vertex_count:
        raise ParamsInvalid(
            f"{params.edge_count} edges with these sizes cannot cover "
            f"{params.vertex_count} vertices"
        )

    coverage = list(range(params.vertex_count))
    rng.shuffle(coverage)
    pos = 0

    records: list[TemporalHyperedge] = []
    for i, k in enumerate(sizes):
        members: set[int] = set()
        while pos < len(coverage) and len(members) < k:
            members.add(coverage[pos])
            pos += 1
        while len(members) < k:
            members.add(rng.randrange(params.vertex_count))
        start = rng.randint(0, params.span)
        length = rng.randint(params.min_length, params.max_length)
        end = min(start + length, params.span)
        records.append(
            TemporalHyperedge(
                _edge_name(i, params.edge_count),
                frozenset(names[m] for m in members),
                start,
                end,
            )
        )
    return build_hypergraph(records)


def _draw_size(rng: random.Random, params: GenParams) -> int:
    lo, hi = params.min_participants, params.max_participants
    if lo == hi:
        return lo
    u = rng.random() ** (1.0 + params.size_skew)
    return min(lo + int(u * (hi - lo + 1)), hi)


def gen_desk_instance(
    seed: int, max_vertices: int = 8, max_edges: int = 12, span: Tick = 20
) -> TimeVaryingHypergraph:
    """Small random network sized for exhaustive-oracle comparison.

    Sizes are drawn up to the caps; availability windows are kept short
    relative to the span so that exhaustive walk enumeration stays
    tractable even at the caps - temporal feasibility, not luck, prunes
    the search. Fully determined by ``seed``.
    """
    rng = random.Random(seed)
    n = rng.randint(2, max_vertices)
    m = rng.randint(1, max_edges)
    params = GenParams(
        vertex_count=n,
        edge_count=m,
        min_participants=2,
        max_participants=min(rng.choice([2, 2, 3, 3, 4]), n),
        size_skew=1.5,
        span=span,
        min_length=0,
        max_length=rng.choice([0, 0, 1, 1, 2, 3]),
        seed=rng.getrandbits(48),
    )
    try:
        return gen_random(params)
    except ParamsInvalid:
        # not enough participant slots to cover n vertices; shrink n to fit
        return gen_random(
            GenParams(
                vertex_count=max(2, min(n, 2 * m)),
                edge_count=m,
                min_participants=2,
                max_participants=2,
                span=span,
                max_length=2,
                seed=rng.getrandbits(48),
            )
        )


def gen_structured(
    shape: str,
    size: int,
    times: list[Tick] | None = None,
) -> TimeVaryingHypergraph:
    """Canonical fixtures with analytically known distances.

    * ``chain``: vertices ``v0..v<size>``, edge ``i`` joins ``v<i-1>`` and
      ``v<i>`` instantaneously at ``times[i-1]`` (default ``1..size``).
      With increasing times the far end is ``size`` hops away and its
      foremost arrival is ``times[-1]``; with decreasing times it is
      unreachable from ``v0``.
    * ``star``: a hub plus ``size`` leaves, edge ``i`` joins the hub and
      leaf ``i`` at ``times[i]``.
    * ``clique``: one hyperedge over ``size`` vertices at a single tick
      (``times[0]``, default 1); every pair is one hop apart.
    """
    if size < 2:
        raise ParamsInvalid(f"size must be >= 2, got {size}")
    if shape == "chain":
        ts = times if times is not None else list(range(1, size + 1))
        if len(ts) != size:
            raise ParamsInvalid(f"chain of {size} edges needs {size} times, got {len(ts)}")
        names = _vertex_names(size + 1)
        records = [
            TemporalHyperedge(
                _edge_name(i, size), frozenset({names[i], names[i + 1]}), ts[i], ts[i]
            )
            for i in range(size)
        ]
    elif shape == "star":
        ts = times if times is not None else list(range(1, size + 1))
        if len(ts) != size:
            raise ParamsInvalid(f"star of {size} leaves needs {size} times, got {len(ts)}")
        leaves = _vertex_names(size)
        records = [
            TemporalHyperedge(
                _edge_name(i, size), frozenset({"hub", leaves[i]}), ts[i], ts[i]
            )
            for i in range(size)
        ]
    elif shape == "clique":
        if times is not None and len(times) != 1:
            raise ParamsInvalid("clique takes a single time")
        t = times[0] if times else 1
        records = [
            TemporalHyperedge("e0", frozenset(_vertex_names(size)), t, t)
        ]
    else:
        raise ParamsInvalid(f"unknown shape {shape!r} (chain, star, clique)")
    return build_hypergraph(records)
