"""Candidate retrieval: follow the aligned path from mapped gap subjects.

Item-valued terminals are inverse-resolved back into target-graph nodes;
externals with no inverse mapping are kept (flagged) so the report can
account for them, but they can never pass validation. Output order and
dedup choices are deterministic so identical inputs give identical files.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from .align import PropertyPath
from .resolve import EntityMapping
from .store import Graph, Node, Value, serialize_value, value_sort_key


@dataclass(frozen=True)
class CandidateStatement:
    subject: Node
    property: str
    object: Value
    external_object: Value
    path: PropertyPath
    ambiguous: bool = False
    unresolved: bool = False


def follow_path(graph: Graph, start: str | Node, path: PropertyPath) -> set[Value]:
    """All terminal values reached by applying the steps in order.

    Literals reached before the final step end their branch; an unknown
    start node yields the empty set.
    """
    if not path.steps:
        raise ValueError("cannot follow an empty path")
    start_id = start.id if isinstance(start, Node) else start
    if graph.node(start_id) is None:
        return set()
    frontier: set[Value] = {graph.node(start_id)}
    for step in path.steps:
        reached: set[Value] = set()
        for value in frontier:
            if isinstance(value, Node):
                reached |= graph.objects(value, step)
        frontier = reached
    return frontier


def retrieve(graph: Graph, unknowns: Mapping[Node, Iterable[str]], prop: str,
             path: PropertyPath, mapping: EntityMapping) -> list[CandidateStatement]:
    """Collect candidate statements for every mapped gap subject.

    Exact (subject, property, object) duplicates are merged; the first hit
    in sorted processing order keeps its provenance fields.
    """
    candidates: list[CandidateStatement] = []
    seen: set[tuple[str, str, tuple]] = set()

    def emit(subject: Node, obj: Value, external: Value,
             ambiguous: bool, unresolved: bool) -> None:
        key = (subject.id, prop, value_sort_key(obj))
        if key in seen:
            return
        seen.add(key)
        candidates.append(CandidateStatement(
            subject=subject, property=prop, object=obj, external_object=external,
            path=path, ambiguous=ambiguous, unresolved=unresolved))

    for subject in sorted(unknowns, key=lambda n: n.id):
        for external_id in sorted(set(unknowns[subject])):
            for terminal in sorted(follow_path(graph, external_id, path), key=value_sort_key):
                if isinstance(terminal, Node):
                    targets = mapping.inverse.get(terminal.id)
                    if not targets:
                        emit(subject, terminal, terminal, ambiguous=False, unresolved=True)
                        continue
                    for resolved in sorted(targets, key=lambda n: n.id):
                        emit(subject, resolved, terminal,
                             ambiguous=len(targets) > 1, unresolved=False)
                else:
                    emit(subject, terminal, terminal, ambiguous=False, unresolved=False)
    return candidates


# -- candidate files ----------------------------------------------------------

CANDIDATE_COLUMNS = ("subject", "property", "object", "external_object", "path", "flags")


def write_candidates(candidates: Iterable[CandidateStatement], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\t".join(CANDIDATE_COLUMNS) + "\n")
        for cand in candidates:
            flags = ",".join(name for name, on in
                             (("ambiguous", cand.ambiguous), ("unresolved", cand.unresolved))
                             if on) or "-"
            fh.write("\t".join((
                cand.subject.id, cand.property, serialize_value(cand.object),
                serialize_value(cand.external_object), cand.path.path_str, flags)) + "\n")


def read_candidates(path: str | Path, target_tag: str,
                    external_tag: str) -> list[CandidateStatement]:
    """Parse a candidate TSV written by write_candidates."""
    from .store import Graph, parse_tsv_value

    target_scratch = Graph(target_tag)
    external_scratch = Graph(external_tag)
    out = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        col = {name: header.index(name) for name in CANDIDATE_COLUMNS}
        for line in fh:
            fields = line.rstrip("\n").split("\t")
            if len(fields) < len(CANDIDATE_COLUMNS):
                continue
            flags = set(fields[col["flags"]].split(","))
            unresolved = "unresolved" in flags
            obj_scratch = external_scratch if unresolved else target_scratch
            out.append(CandidateStatement(
                subject=target_scratch.intern(fields[col["subject"]]),
                property=fields[col["property"]],
                object=parse_tsv_value(fields[col["object"]], obj_scratch),
                external_object=parse_tsv_value(fields[col["external_object"]], external_scratch),
                path=PropertyPath(steps=tuple(fields[col["path"]].split("/"))),
                ambiguous="ambiguous" in flags,
                unresolved=unresolved,
            ))
    return out
