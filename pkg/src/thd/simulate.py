"""All-sources diffusion runs: planning, execution, aggregation, checkpoints.

Work is partitioned per source (embarrassingly parallel); the hypergraph
is shared read-only and per-source results are merged in source-id order,
so serialized output is byte-identical for any parallelism degree. Long
runs flush completed sources to an atomic checkpoint file bound to the
exact input and plan by digest; a resumed run reuses completed sources
verbatim and refuses to mix anything else.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence

from . import __version__
from .core import Tick, TimeVaryingHypergraph
from .errors import CheckpointMismatch, CorruptCheckpoint, PlanInvalid
from .io import canonical_json_bytes
from .paths import (
    METRIC_ORDER,
    DistanceLabels,
    Metric,
    TemporalWalk,
    fastest,
    foremost,
    shortest,
)

log = logging.getLogger("thd.simulate")

CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class SimulationPlan:
    """What to run and how.

    ``sources=None`` means every vertex; an explicit tuple selects those
    vertices (duplicates are rejected); ``sample_size`` draws a seeded
    sample instead. ``t0=None`` starts each source at its earliest
    incident edge start (vertices with no edges start at 0), a fixed tick
    applies to all sources. ``horizon`` discards arrivals beyond it.
    ``parallelism`` and the checkpoint settings never affect result bytes.
    """

    metrics: tuple[Metric, ...] = (Metric.FOREMOST,)
    sources: tuple[str, ...] | None = None
    sample_size: int | None = None
    sample_seed: int = 0
    t0: Tick | None = None
    max_hops: int | None = None
    horizon: Tick | None = None
    keep_predecessors: bool = False
    parallelism: int = 1
    checkpoint_path: str | None = None
    checkpoint_interval: int = 25

    def to_document(self) -> dict:
        """Canonical form of the result-affecting fields; digest input."""
        if self.sources is not None:
            source_spec: object = {"explicit": sorted(self.sources)}
        elif self.sample_size is not None:
            source_spec = {"sample_size": self.sample_size, "sample_seed": self.sample_seed}
        else:
            source_spec = "all"
        return {
            "metrics": [m.value for m in self.metrics],
            "sources": source_spec,
            "t0": "earliest" if self.t0 is None else self.t0,
            "max_hops": self.max_hops,
            "horizon": self.horizon,
            "keep_predecessors": self.keep_predecessors,
        }


@dataclass(frozen=True)
class DiffusionResult:
    """Per-source labels (ordered by source id, then metric) plus summary."""

    labels: tuple[DistanceLabels, ...]
    summary: dict
    provenance: dict
    _label_docs: tuple[dict, ...] = field(repr=False)

    def to_document(self) -> dict:
        return {
            "schema": 1,
            "kind": "thd-result",
            "provenance": self.provenance,
            "sources": list(self._label_docs),
            "summary": self.summary,
        }


def validate_plan(h: TimeVaryingHypergraph, plan: SimulationPlan) -> None:
    """Raise PlanInvalid unless the plan is executable against this network."""
    if not plan.metrics:
        raise PlanInvalid("no metrics selected")
    if len(set(plan.metrics)) != len(plan.metrics):
        raise PlanInvalid("duplicate metrics")
    for m in plan.metrics:
        if not isinstance(m, Metric):
            raise PlanInvalid(f"unknown metric {m!r}")
    if plan.sources is not None and plan.sample_size is not None:
        raise PlanInvalid("explicit sources and sample are mutually exclusive")
    if plan.sources is not None:
        if len(set(plan.sources)) != len(plan.sources):
            raise PlanInvalid("duplicate sources in explicit list")
        for s in plan.sources:
            if s not in h:
                raise PlanInvalid(f"source {s!r} not in network")
    if plan.sample_size is not None:
        if plan.sample_size < 0 or plan.sample_size > h.vertex_count:
            raise PlanInvalid(
                f"sample_size {plan.sample_size} outside [0, {h.vertex_count}]"
            )
    if plan.max_hops is not None and plan.max_hops < 1:
        raise PlanInvalid(f"max_hops must be >= 1, got {plan.max_hops}")
    if plan.parallelism < 1:
        raise PlanInvalid(f"parallelism must be >= 1, got {plan.parallelism}")
    if plan.checkpoint_interval < 1:
        raise PlanInvalid("checkpoint_interval must be >= 1")
    if plan.horizon is not None:
        for s in resolve_sources(h, plan):
            t0 = resolve_t0(h, plan, s)
            if plan.horizon < t0:
                raise PlanInvalid(
                    f"horizon {plan.horizon} precedes t0 {t0} of source {s!r}"
                )


def resolve_sources(h: TimeVaryingHypergraph, plan: SimulationPlan) -> list[str]:
    """Planned sources in source-id order (the merge order)."""
    if plan.sources is not None:
        return sorted(plan.sources)
    if plan.sample_size is not None:
        import random

        rng = random.Random(plan.sample_seed)
        return sorted(rng.sample(list(h.vertex_ids), plan.sample_size))
    return list(h.vertex_ids)


def resolve_t0(h: TimeVaryingHypergraph, plan: SimulationPlan, source: str) -> Tick:
    if plan.t0 is not None:
        return plan.t0
    vi = h.index_of(source)
    inc = h.incidence[vi]
    if not inc:
        return 0
    return min(h.edge_starts[ei] for ei in inc)


def input_digest(h: TimeVaryingHypergraph) -> str:
    """Content hash of the network, independent of edge input order."""
    digest = hashlib.sha256()
    for e in sorted(h.edges, key=lambda e: e.id):
        digest.update(
            json.dumps(
                [e.id, sorted(e.participants), e.start, e.end],
                separators=(",", ":"),
                ensure_ascii=False,
            ).encode("utf-8")
        )
    return digest.hexdigest()


def plan_digest(plan: SimulationPlan) -> str:
    return hashlib.sha256(canonical_json_bytes(plan.to_document())).hexdigest()


# --------------------------------------------------------------------------
# per-source computation and its serialized form
# --------------------------------------------------------------------------


def _compute_labels(
    h: TimeVaryingHypergraph, plan: SimulationPlan, source: str
) -> dict[Metric, DistanceLabels]:
    t0 = resolve_t0(h, plan, source)
    keep = plan.keep_predecessors
    out: dict[Metric, DistanceLabels] = {}
    for m in plan.metrics:
        if m is Metric.FOREMOST:
            out[m] = foremost(h, source, t0, plan.horizon, keep)
        elif m is Metric.SHORTEST:
            hops = plan.max_hops if plan.max_hops is not None else h.vertex_count
            out[m] = shortest(h, source, t0, hops, plan.horizon, keep)
        else:
            out[m] = fastest(h, source, t0, plan.horizon, keep)
    return out


def _walk_doc(walk: TemporalWalk) -> dict:
    return {
        "departure": walk.departure,
        "hops": [[e, v] for e, v in walk.hops],
        "arrivals": list(walk.arrivals),
    }


def _walk_from_doc(source: str, doc: dict) -> TemporalWalk:
    return TemporalWalk(
        source,
        doc["departure"],
        tuple((e, v) for e, v in doc["hops"]),
        tuple(doc["arrivals"]),
    )


def _source_doc(source: str, t0: Tick, labels: Mapping[Metric, DistanceLabels]) -> dict:
    metrics_doc: dict[str, dict] = {}
    for m in METRIC_ORDER:
        if m not in labels:
            continue
        lab = labels[m]
        entry: dict = {"values": dict(lab.values)}
        if lab.predecessors is not None:
            entry["predecessors"] = {v: list(p) for v, p in lab.predecessors.items()}
        if lab.witnesses is not None:
            entry["witnesses"] = {v: _walk_doc(w) for v, w in lab.witnesses.items()}
        metrics_doc[m.value] = entry
    return {"source": source, "t0": t0, "metrics": metrics_doc}


def _labels_from_doc(doc: dict) -> dict[Metric, DistanceLabels]:
    source = doc["source"]
    t0 = doc["t0"]
    out: dict[Metric, DistanceLabels] = {}
    for mval, entry in doc["metrics"].items():
        m = Metric(mval)
        preds = entry.get("predecessors")
        wits = entry.get("witnesses")
        out[m] = DistanceLabels(
            source=source,
            t0=t0,
            metric=m,
            values=dict(entry["values"]),
            predecessors=None if preds is None else {v: (p[0], p[1]) for v, p in preds.items()},
            witnesses=None
            if wits is None
            else {v: _walk_from_doc(source, w) for v, w in wits.items()},
        )
    return out


# --------------------------------------------------------------------------
# checkpoints
# --------------------------------------------------------------------------


def checkpoint_write(
    path: str | Path,
    in_digest: str,
    p_digest: str,
    docs: Mapping[str, dict],
) -> None:
    """Atomically persist completed source documents (temp file + rename)."""
    body = b"".join(
        canonical_json_bytes(docs[s]) for s in sorted(docs)
    )
    header = {
        "kind": "thd-checkpoint",
        "version": CHECKPOINT_VERSION,
        "input_digest": in_digest,
        "plan_digest": p_digest,
        "body_sha256": hashlib.sha256(body).hexdigest(),
        "sources": len(docs),
    }
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(canonical_json_bytes(header))
        fh.write(body)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def checkpoint_load(path: str | Path) -> tuple[str, str, dict[str, dict]]:
    """Read a checkpoint; returns (input digest, plan digest, source docs).

    Raises CorruptCheckpoint when the file is empty, unparseable, or fails
    its body hash.
    """
    raw = Path(path).read_bytes()
    if not raw.strip():
        raise CorruptCheckpoint(f"{path}: empty checkpoint file")
    head, sep, body = raw.partition(b"\n")
    try:
        header = json.loads(head)
    except ValueError as exc:
        raise CorruptCheckpoint(f"{path}: unreadable header: {exc}") from None
    if not isinstance(header, dict) or header.get("kind") != "thd-checkpoint":
        raise CorruptCheckpoint(f"{path}: not a checkpoint file")
    if header.get("version") != CHECKPOINT_VERSION:
        raise CorruptCheckpoint(f"{path}: unsupported version {header.get('version')!r}")
    if hashlib.sha256(body).hexdigest() != header.get("body_sha256"):
        raise CorruptCheckpoint(f"{path}: body hash mismatch")
    docs: dict[str, dict] = {}
    for line in body.splitlines():
        if not line:
            continue
        try:
            doc = json.loads(line)
            docs[doc["source"]] = doc
        except (ValueError, KeyError, TypeError) as exc:
            raise CorruptCheckpoint(f"{path}: bad record: {exc}") from None
    return str(header["input_digest"]), str(header["plan_digest"]), docs


# --------------------------------------------------------------------------
# aggregation
# --------------------------------------------------------------------------


def nearest_rank(sorted_values: Sequence[int], percentile: int) -> int:
    """Nearest-rank percentile of an ascending sequence (1-based rank)."""
    n = len(sorted_values)
    rank = max(1, -(-percentile * n // 100))
    return sorted_values[rank - 1]


def aggregate(
    label_sets: Sequence[Mapping[Metric, DistanceLabels]], vertex_count: int
) -> dict:
    """Summary statistics as a pure function of the per-source labels.

    Per source: reached count (label map size) and reachability ratio.
    Network level: p50/p90/p99 by nearest rank over the pooled multiset of
    label values per metric, null when nothing was reached.
    """
    seen = set()
    for labels in label_sets:
        for lab in labels.values():
            if lab.source in seen:
                raise PlanInvalid(f"conflicting label sets for source {lab.source!r}")
            seen.add(lab.source)
            break

    per_source = []
    pooled: dict[Metric, list[int]] = {}
    for labels in label_sets:
        entry: dict = {"source": None, "reached": {}, "ratio": {}}
        for m in METRIC_ORDER:
            if m not in labels:
                continue
            lab = labels[m]
            entry["source"] = lab.source
            entry["reached"][m.value] = len(lab.values)
            entry["ratio"][m.value] = len(lab.values) / vertex_count if vertex_count else 0.0
            pooled.setdefault(m, []).extend(lab.values.values())
        per_source.append(entry)

    quantiles: dict[str, dict | None] = {}
    for m, values in pooled.items():
        if not values:
            quantiles[m.value] = None
            continue
        values.sort()
        quantiles[m.value] = {
            "p50": nearest_rank(values, 50),
            "p90": nearest_rank(values, 90),
            "p99": nearest_rank(values, 99),
        }
    return {
        "vertex_count": vertex_count,
        "per_source": per_source,
        "quantiles": quantiles,
    }


# --------------------------------------------------------------------------
# execution
# --------------------------------------------------------------------------

_WORKER_STATE: tuple[TimeVaryingHypergraph, SimulationPlan] | None = None


def _compute_source_doc(source: str) -> tuple[str, dict]:
    assert _WORKER_STATE is not None
    h, plan = _WORKER_STATE
    labels = _compute_labels(h, plan, source)
    return source, _source_doc(source, resolve_t0(h, plan, source), labels)


def run(
    h: TimeVaryingHypergraph,
    plan: SimulationPlan,
    progress: Callable[[str], None] | None = None,
) -> DiffusionResult:
    """Execute the plan and return the aggregated result.

    Output is deterministic for any parallelism degree. When the plan
    names a checkpoint path, completed sources are flushed there at the
    configured interval and an existing compatible checkpoint short-cuts
    recomputation; an incompatible one raises CheckpointMismatch rather
    than mixing results. ``progress`` is invoked once per freshly computed
    source.
    """
    global _WORKER_STATE
    validate_plan(h, plan)
    sources = resolve_sources(h, plan)
    in_digest = input_digest(h)
    p_digest = plan_digest(plan)

    done: dict[str, dict] = {}
    if plan.checkpoint_path and Path(plan.checkpoint_path).exists():
        ck_in, ck_plan, docs = checkpoint_load(plan.checkpoint_path)
        if ck_in != in_digest:
            raise CheckpointMismatch(
                f"{plan.checkpoint_path}: checkpoint was written for a different input"
            )
        if ck_plan != p_digest:
            raise CheckpointMismatch(
                f"{plan.checkpoint_path}: checkpoint was written for a different plan"
            )
        done = {s: d for s, d in docs.items() if s in set(sources)}
        log.info("checkpoint: %d of %d sources already complete", len(done), len(sources))

    todo = [s for s in sources if s not in done]

    def flush() -> None:
        if plan.checkpoint_path:
            checkpoint_write(plan.checkpoint_path, in_digest, p_digest, done)

    completed_since_flush = 0
    workers = min(plan.parallelism, max(len(todo), 1))
    if todo:
        if workers > 1 and _fork_available():
            _WORKER_STATE = (h, plan)
            try:
                import multiprocessing

                ctx = multiprocessing.get_context("fork")
                with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
                    pending = {pool.submit(_compute_source_doc, s) for s in todo}
                    while pending:
                        finished, pending = wait(pending, return_when=FIRST_COMPLETED)
                        for fut in finished:
                            source, doc = fut.result()
                            done[source] = doc
                            completed_since_flush += 1
                            if progress is not None:
                                progress(source)
                            if completed_since_flush >= plan.checkpoint_interval:
                                flush()
                                completed_since_flush = 0
            finally:
                _WORKER_STATE = None
        else:
            _WORKER_STATE = (h, plan)
            try:
                for s in todo:
                    source, doc = _compute_source_doc(s)
                    done[source] = doc
                    completed_since_flush += 1
                    if progress is not None:
                        progress(source)
                    if completed_since_flush >= plan.checkpoint_interval:
                        flush()
                        completed_since_flush = 0
            finally:
                _WORKER_STATE = None
    if completed_since_flush:
        flush()

    label_docs = tuple(done[s] for s in sources)
    label_sets = [_labels_from_doc(d) for d in label_docs]
    flat: list[DistanceLabels] = []
    for labels in label_sets:
        for m in METRIC_ORDER:
            if m in labels:
                flat.append(labels[m])
    summary = aggregate(label_sets, h.vertex_count)
    provenance = {
        "input_digest": in_digest,
        "plan": plan.to_document(),
        "tool_version": __version__,
    }
    return DiffusionResult(tuple(flat), summary, provenance, label_docs)


def _fork_available() -> bool:
    import multiprocessing

    return "fork" in multiprocessing.get_all_start_methods()
