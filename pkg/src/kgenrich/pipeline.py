"""End-to-end enrichment per property and in batch, with rates and timings.

Stage order per property: gap detection -> entity alignment -> property
alignment -> retrieval -> validation. Everything downstream of gap detection
only ever proposes values for gap subjects; that safety property is enforced
here with hard checks, not just asserted in tests.
"""

from __future__ import annotations

import json
import statistics
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .align import PropertyPath, enumerate_paths, select_path
from .config import PipelineConfig
from .consistency import (AgreementReport, Granularity, LiteralAgreementReport,
                          agreement, format_rate, literal_agreement)
from .errors import ConfigError
from .gaps import GapPartition, detect_gaps
from .resolve import EntityMapping, build_mapping, resolve
from .retrieve import CandidateStatement, retrieve
from .store import (Graph, Node, Provenance, Statement, Value, ValueKind,
                    serialize_value, value_sort_key)
from .validate import ValueTypeConstraint, validate_detailed

TIMING_KEYS = ("entity_align", "property_align", "retrieval",
               "datatype_validation", "valuetype_validation", "total")

NO_ALIGNMENT = "no-alignment"


class PipelineInvariantError(RuntimeError):
    """An emitted statement violated a pipeline safety invariant."""


@dataclass
class EnrichmentResult:
    property: str
    graph: str
    status: str = "ok"
    s_w: int = 0
    s_g: int = 0
    s_e: int = 0
    n_k: int = 0
    n_u: int = 0
    n_f: int = 0
    n_c: int = 0
    selected_path: PropertyPath | None = None
    timings: dict[str, float] = field(default_factory=dict)
    statements: tuple[Statement, ...] = ()
    # aggregation support; id-level sets so batch rows merge cheaply
    candidate_keys: frozenset[tuple[str, str, str]] = frozenset()
    statement_keys: frozenset[tuple[str, str, str]] = frozenset()
    known_ids: frozenset[str] = frozenset()
    unknown_ids: frozenset[str] = frozenset()
    found_ids: frozenset[str] = frozenset()
    compatible_ids: frozenset[str] = frozenset()

    @property
    def s_total(self) -> int:
        return self.s_w + self.s_e

    @property
    def r_e(self) -> float | None:
        return self.s_e / self.s_w if self.s_w else None

    @property
    def r_c(self) -> float | None:
        return self.s_e / self.s_g if self.s_g else None

    @property
    def r_r(self) -> float | None:
        return self.n_c / self.n_u if self.n_u else None


def _statement_key(subject: Node, prop: str, obj: Value) -> tuple[str, str, str]:
    return (subject.id, prop, serialize_value(obj))


def alignment_pairs(partition: GapPartition, mapping: EntityMapping) -> set[tuple]:
    """Map known (subject, object) pairs into external-id space.

    Item objects go through the same mapping as subjects (cross product when
    either side maps to several ids); literal objects ride along unchanged.
    """
    pairs = set()
    subject_map = resolve(mapping, {s for s, _ in partition.known}).mapped
    for subj, obj in partition.known:
        subject_exts = subject_map.get(subj)
        if not subject_exts:
            continue
        if isinstance(obj, Node):
            object_exts = mapping.forward.get(obj)
            if not object_exts:
                continue
            pairs.update((se, oe) for se in subject_exts for oe in object_exts)
        else:
            pairs.update((se, obj) for se in subject_exts)
    return pairs


def _check_safety(partition: GapPartition, accepted: Sequence[CandidateStatement],
                  candidates: Sequence[CandidateStatement]) -> None:
    if partition.known_subjects & partition.unknown_subjects:
        raise PipelineInvariantError("gap partition is not disjoint")
    candidate_set = set(candidates)
    for cand in accepted:
        if cand not in candidate_set:
            raise PipelineInvariantError("validated statement not among retrieved candidates")
        if cand.subject in partition.known_subjects:
            raise PipelineInvariantError(
                f"validated statement targets known subject {cand.subject.id}")
        if cand.subject not in partition.unknown_subjects:
            raise PipelineInvariantError(
                f"validated statement subject {cand.subject.id} outside the gap set")


def enrich_property(target: Graph, external: Graph, prop: str, cfg: PipelineConfig, *,
                    entity_class: str | None = None,
                    mapping: EntityMapping | None = None,
                    constraints: Mapping[str, ValueTypeConstraint] | None = None,
                    ) -> EnrichmentResult:
    """Run the five enrichment stages for one property against one external graph."""
    t_start = time.monotonic()
    timings: dict[str, float] = {}

    entity_filter = (entity_class, cfg.gaps.type_property) if entity_class else None
    partition = detect_gaps(target, prop, entity_filter,
                            no_value_sentinel=cfg.gaps.no_value_sentinel)

    result = EnrichmentResult(
        property=prop, graph=external.tag,
        s_w=len(partition.known),
        n_k=len(partition.known_subjects), n_u=len(partition.unknown_subjects),
        known_ids=frozenset(n.id for n in partition.known_subjects),
        unknown_ids=frozenset(n.id for n in partition.unknown_subjects),
    )

    t0 = time.monotonic()
    if mapping is None:
        spec = cfg.mapping_for(external.tag)
        mapping = build_mapping(target, spec.link_property, spec.transform())
    pairs = alignment_pairs(partition, mapping)
    unknown_map = resolve(mapping, partition.unknown_subjects).mapped
    timings["entity_align"] = time.monotonic() - t0

    if not pairs:
        result.status = NO_ALIGNMENT
        timings["total"] = time.monotonic() - t_start
        result.timings = timings
        return result

    t0 = time.monotonic()
    candidates_paths = enumerate_paths(external, pairs, cfg.alignment)
    selected = select_path(candidates_paths, target.label(prop), external, cfg.alignment)
    timings["property_align"] = time.monotonic() - t0

    if selected is None:
        result.status = NO_ALIGNMENT
        timings["total"] = time.monotonic() - t_start
        result.timings = timings
        return result
    result.selected_path = selected

    t0 = time.monotonic()
    candidates = retrieve(external, unknown_map, prop, selected, mapping)
    timings["retrieval"] = time.monotonic() - t0
    result.s_g = len(candidates)
    result.n_f = len({c.subject for c in candidates})
    result.found_ids = frozenset(c.subject.id for c in candidates)
    result.candidate_keys = frozenset(
        _statement_key(c.subject, prop, c.object) for c in candidates)

    constraint = (constraints or {}).get(prop)
    outcome = validate_detailed(target, candidates, partition.known, constraint,
                                cfg.validation)
    timings["datatype_validation"] = outcome.datatype_seconds
    timings["valuetype_validation"] = outcome.valuetype_seconds

    _check_safety(partition, outcome.accepted, candidates)

    statements = sorted(
        (Statement(c.subject, prop, c.object, Provenance.EXTERNAL_CANDIDATE,
                   external.tag).as_validated() for c in outcome.accepted),
        key=lambda s: (s.property, s.subject.id, value_sort_key(s.object)))
    result.statements = tuple(statements)
    result.s_e = len(outcome.accepted)
    result.n_c = len({c.subject for c in outcome.accepted})
    result.compatible_ids = frozenset(c.subject.id for c in outcome.accepted)
    result.statement_keys = frozenset(
        _statement_key(c.subject, prop, c.object) for c in outcome.accepted)

    timings["total"] = time.monotonic() - t_start
    result.timings = timings
    return result


# -- batch --------------------------------------------------------------------


@dataclass
class BatchResult:
    rows: list[EnrichmentResult]
    aggregates: list[EnrichmentResult]
    median_novel: float | None

    @property
    def all_rows(self) -> list[EnrichmentResult]:
        return self.rows + self.aggregates

    def statements(self) -> tuple[Statement, ...]:
        """Union of validated statements, deduplicated across graphs."""
        seen: set[tuple[str, str, str]] = set()
        merged: list[Statement] = []
        for row in self.rows:
            for stmt in row.statements:
                key = _statement_key(stmt.subject, stmt.property, stmt.object)
                if key not in seen:
                    seen.add(key)
                    merged.append(stmt)
        merged.sort(key=lambda s: (s.property, s.subject.id, value_sort_key(s.object)))
        return tuple(merged)


def _aggregate_rows(rows: Sequence[EnrichmentResult], label: str, graph: str,
                    ) -> EnrichmentResult:
    s_w_per_property: dict[str, int] = {}
    for row in rows:
        s_w_per_property.setdefault(row.property, row.s_w)
    candidate_keys = frozenset().union(*(r.candidate_keys for r in rows)) if rows else frozenset()
    statement_keys = frozenset().union(*(r.statement_keys for r in rows)) if rows else frozenset()
    timings: dict[str, float] = {}
    for row in rows:
        for key, seconds in row.timings.items():
            timings[key] = timings.get(key, 0.0) + seconds

    def union(attr: str) -> frozenset[str]:
        return frozenset().union(*(getattr(r, attr) for r in rows)) if rows else frozenset()

    known = union("known_ids")
    unknown = union("unknown_ids")
    found = union("found_ids")
    compatible = union("compatible_ids")
    return EnrichmentResult(
        property=label, graph=graph, status="aggregate",
        s_w=sum(s_w_per_property.values()),
        s_g=len(candidate_keys), s_e=len(statement_keys),
        n_k=len(known), n_u=len(unknown), n_f=len(found), n_c=len(compatible),
        timings=timings,
        candidate_keys=candidate_keys, statement_keys=statement_keys,
        known_ids=known, unknown_ids=unknown, found_ids=found, compatible_ids=compatible,
    )


def batch_enrich(target: Graph, externals: Sequence[Graph], properties: Sequence[str],
                 cfg: PipelineConfig, *, entity_class: str | None = None,
                 constraints: Mapping[str, ValueTypeConstraint] | None = None,
                 ) -> BatchResult:
    """Enrich every (property, external graph) combination.

    Per-property failures become error rows instead of aborting the batch.
    Rows are sorted by enrichment rate, descending, undefined rates last;
    per-graph aggregates and (with several externals) a deduplicated
    combined row are appended.
    """
    if constraints is None:
        constraints = cfg.load_constraint_table()
    rows: list[EnrichmentResult] = []
    for external in externals:
        spec = cfg.mapping_for(external.tag)
        mapping = build_mapping(target, spec.link_property, spec.transform())
        for prop in properties:
            try:
                rows.append(enrich_property(
                    target, external, prop, cfg, entity_class=entity_class,
                    mapping=mapping, constraints=constraints))
            except (ConfigError, PipelineInvariantError):
                raise
            except Exception as exc:  # noqa: BLE001 - batch keeps going
                rows.append(EnrichmentResult(property=prop, graph=external.tag,
                                             status=f"error: {exc}"))
    rows.sort(key=lambda r: (r.r_e is None, -(r.r_e or 0.0), r.property, r.graph))

    aggregates = [
        _aggregate_rows([r for r in rows if r.graph == ext.tag], "(all)", ext.tag)
        for ext in externals
    ]
    if len(externals) > 1:
        aggregates.append(_aggregate_rows(rows, "(all)", "(both)"))
    median_novel = statistics.median([r.s_e for r in rows]) if rows else None
    return BatchResult(rows=rows, aggregates=aggregates, median_novel=median_novel)


# -- consistency --------------------------------------------------------------


@dataclass
class ConsistencyOutcome:
    property: str
    expected_kind: ValueKind
    s_w: int
    s_e: int
    item_report: AgreementReport | None = None
    literal_report: LiteralAgreementReport | None = None

    def report_dict(self) -> dict:
        out: dict = {"property": self.property, "expected_kind": self.expected_kind.value,
                     "s_w": self.s_w, "s_e": self.s_e}
        rep = self.item_report or self.literal_report
        if rep is not None:
            out.update(s_overlap=rep.s_overlap, s_agree=rep.s_agree,
                       s_disagree=rep.s_disagree, r_agree=rep.r_agree_str)
        if self.literal_report is not None:
            out["granularity"] = self.literal_report.granularity.value
            out["skipped_non_date"] = self.literal_report.skipped
        return out


def run_consistency(target: Graph, external: Graph, prop: str, cfg: PipelineConfig,
                    granularity: Granularity | None = None, *,
                    entity_class: str | None = None,
                    constraints: Mapping[str, ValueTypeConstraint] | None = None,
                    ) -> ConsistencyOutcome:
    """Overlap-mode run: retrieve for *known* subjects and compare values.

    The novel side (normal enrichment) runs too, so the report can state
    s_e alongside the agreement counts.
    """
    if constraints is None:
        constraints = cfg.load_constraint_table()
    entity_filter = (entity_class, cfg.gaps.type_property) if entity_class else None
    partition = detect_gaps(target, prop, entity_filter,
                            no_value_sentinel=cfg.gaps.no_value_sentinel)
    spec = cfg.mapping_for(external.tag)
    mapping = build_mapping(target, spec.link_property, spec.transform())

    pairs = alignment_pairs(partition, mapping)
    selected = select_path(enumerate_paths(external, pairs, cfg.alignment),
                           target.label(prop), external, cfg.alignment)
    constraint = (constraints or {}).get(prop)
    if selected is None:
        raise ConfigError(f"property {prop} has no alignable path in {external.tag}")

    known_map = resolve(mapping, partition.known_subjects).mapped
    overlap_candidates = retrieve(external, known_map, prop, selected, mapping)
    overlap_outcome = validate_detailed(target, overlap_candidates, partition.known,
                                        constraint, cfg.validation)

    unknown_map = resolve(mapping, partition.unknown_subjects).mapped
    novel_candidates = retrieve(external, unknown_map, prop, selected, mapping)
    novel_outcome = validate_detailed(target, novel_candidates, partition.known,
                                      constraint, cfg.validation)

    outcome = ConsistencyOutcome(property=prop, expected_kind=overlap_outcome.expected,
                                 s_w=len(partition.known), s_e=len(novel_outcome.accepted))
    if overlap_outcome.expected is ValueKind.DATE:
        outcome.literal_report = literal_agreement(
            target, overlap_outcome.accepted, granularity or Granularity.YEAR)
    else:
        outcome.item_report = agreement(target, overlap_outcome.accepted,
                                        s_w=len(partition.known),
                                        s_e=len(novel_outcome.accepted))
    return outcome


# -- reporting ----------------------------------------------------------------

_REPORT_COLUMNS = ("graph", "property", "status", "path",
                   "s_w", "s_g", "s_e", "s_total", "n_k", "n_u", "n_f", "n_c",
                   "r_e", "r_c", "r_r")
_TIMING_COLUMNS = tuple(f"t_{key}" for key in TIMING_KEYS)


def _row_cells(result: EnrichmentResult, include_timings: bool) -> list[str]:
    cells = [
        result.graph, result.property, result.status,
        result.selected_path.path_str if result.selected_path else "-",
        str(result.s_w), str(result.s_g), str(result.s_e), str(result.s_total),
        str(result.n_k), str(result.n_u), str(result.n_f), str(result.n_c),
        format_rate(result.s_e, result.s_w),
        format_rate(result.s_e, result.s_g),
        format_rate(result.n_c, result.n_u),
    ]
    if include_timings:
        cells.extend(f"{result.timings.get(key, 0.0):.2f}" for key in TIMING_KEYS)
    return cells


def _result_json(result: EnrichmentResult, include_timings: bool) -> dict:
    out = {
        "graph": result.graph, "property": result.property, "status": result.status,
        "path": result.selected_path.path_str if result.selected_path else None,
        "s_w": result.s_w, "s_g": result.s_g, "s_e": result.s_e,
        "s_total": result.s_total,
        "n_k": result.n_k, "n_u": result.n_u, "n_f": result.n_f, "n_c": result.n_c,
        "r_e": format_rate(result.s_e, result.s_w),
        "r_c": format_rate(result.s_e, result.s_g),
        "r_r": format_rate(result.n_c, result.n_u),
    }
    if include_timings:
        out["timings"] = {key: round(result.timings.get(key, 0.0), 2)
                          for key in TIMING_KEYS}
    return out


def emit_report(results: Sequence[EnrichmentResult], fmt: str, path: str | Path, *,
                include_timings: bool = True, summary: Mapping | None = None) -> Path:
    """Write the run report; identical inputs give identical bytes.

    Rates are rendered to two decimal places; undefined rates (zero
    denominator) render as '-'; missing timings as 0.00.
    """
    if not results:
        raise ValueError("emit_report needs at least one result")
    path = Path(path)
    if fmt == "json":
        doc = {"results": [_result_json(r, include_timings) for r in results]}
        if summary:
            doc["summary"] = dict(sorted(summary.items()))
        path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n",
                        encoding="utf-8")
    elif fmt == "tsv":
        columns = _REPORT_COLUMNS + (_TIMING_COLUMNS if include_timings else ())
        lines = ["\t".join(columns)]
        lines += ["\t".join(_row_cells(r, include_timings)) for r in results]
        for key, value in sorted((summary or {}).items()):
            lines.append(f"#{key}={value}")
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    return path


def write_statements(statements: Iterable[Statement], path: str | Path) -> None:
    """Validated statements as edge TSV plus provenance columns."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("node1\tlabel\tnode2\tsource\tprovenance\n")
        for stmt in statements:
            fh.write("\t".join((
                stmt.subject.id, stmt.property, serialize_value(stmt.object),
                stmt.source_graph, stmt.provenance.value)) + "\n")
