"""Semantic validation of candidate statements.

Three independent filters: datatype conformance against the modal kind of
the known objects, value-type constraints (allowed classes reached through
instance-of / subclass-of closure), and a literal range rule for dates.
A candidate is accepted iff every applicable check passes and its object
resolved into the target graph; veracity is explicitly not checked, so
logically consistent but factually wrong statements pass.
"""

from __future__ import annotations

import time
from collections import Counter, deque
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from .errors import DataFormatError
from .retrieve import CandidateStatement
from .store import Graph, Node, Value, ValueKind, value_kind

# modal-kind tie break, most specific first
KIND_PRECEDENCE = (ValueKind.ITEM, ValueKind.DATE, ValueKind.QUANTITY,
                   ValueKind.MONOLINGUAL, ValueKind.STRING, ValueKind.OTHER)

DEFAULT_CUTOFF_YEAR = 2022
DEFAULT_DEPTH_CAP = 20


class RelationMode(Enum):
    INSTANCE_OF = "instance"
    SUBCLASS_OF = "subclass"
    BOTH = "both"


class RejectReason(Enum):
    WRONG_DATATYPE = "wrong-datatype"
    WRONG_VALUE_TYPE = "wrong-value-type"
    OUT_OF_RANGE = "out-of-range"
    UNRESOLVABLE = "unresolvable"


@dataclass(frozen=True)
class ValueTypeConstraint:
    property: str
    allowed_classes: frozenset[str]
    relation_mode: RelationMode = RelationMode.BOTH
    exceptions: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if not self.allowed_classes:
            raise ValueError("a value-type constraint needs at least one allowed class")


@dataclass(frozen=True)
class ValidationVerdict:
    statement: CandidateStatement
    datatype_ok: bool
    value_type_ok: bool | None
    range_ok: bool | None
    accepted: bool
    reject_reason: RejectReason | None


@dataclass(frozen=True)
class ValidationSettings:
    cutoff_year: int = DEFAULT_CUTOFF_YEAR
    depth_cap: int = DEFAULT_DEPTH_CAP
    instance_of: str = "P31"
    subclass_of: str = "P279"
    expected_datatype: ValueKind | None = None


@dataclass
class ValidationOutcome:
    accepted: list[CandidateStatement]
    verdicts: list[ValidationVerdict]
    expected: ValueKind
    datatype_seconds: float = 0.0
    valuetype_seconds: float = 0.0


def infer_expected_datatype(known: Iterable[tuple[Node, Value]]) -> ValueKind:
    """Modal object kind of the known pairs; ties break by kind precedence."""
    counts = Counter(value_kind(obj) for _, obj in known)
    if not counts:
        raise ValueError("no known statements to infer a datatype from; "
                         "supply expected_datatype in the validation config")
    best = max(counts.values())
    for kind in KIND_PRECEDENCE:
        if counts.get(kind) == best:
            return kind
    raise AssertionError("unreachable")


def check_datatype(candidate: CandidateStatement, expected: ValueKind) -> bool:
    """Kind equality; an expected item additionally requires inverse resolution."""
    if candidate.unresolved:
        return False
    return value_kind(candidate.object) == expected


def allowed_class_closure(graph: Graph, constraint: ValueTypeConstraint,
                          subclass_of: str = "P279",
                          depth_cap: int = DEFAULT_DEPTH_CAP) -> frozenset[str]:
    """Allowed classes plus everything reaching them via <= depth_cap subclass hops.

    Computed by reverse BFS over the subclass index; cycle-safe, and
    monotone in depth_cap so deeper caps only ever accept more.
    """
    closure = set(constraint.allowed_classes)
    frontier = deque((cls, 0) for cls in constraint.allowed_classes)
    while frontier:
        class_id, depth = frontier.popleft()
        if depth >= depth_cap:
            continue
        class_node = graph.node(class_id)
        if class_node is None:
            continue
        for sub in graph.subjects_with(subclass_of, class_node):
            if sub.id not in closure:
                closure.add(sub.id)
                frontier.append((sub.id, depth + 1))
    return frozenset(closure)


def _object_in_graph(graph: Graph, obj: Value) -> bool:
    return isinstance(obj, Node) and graph.node(obj.id) is not None


def _type_reaches(graph: Graph, obj: Node, constraint: ValueTypeConstraint,
                  closure: frozenset[str], instance_of: str, subclass_of: str) -> bool:
    relations = {
        RelationMode.INSTANCE_OF: (instance_of,),
        RelationMode.SUBCLASS_OF: (subclass_of,),
        RelationMode.BOTH: (instance_of, subclass_of),
    }[constraint.relation_mode]
    for rel in relations:
        for parent in graph.objects(obj, rel):
            if isinstance(parent, Node) and parent.id in closure:
                return True
    return False


def check_value_type(graph: Graph, candidate: CandidateStatement,
                     constraint: ValueTypeConstraint,
                     depth_cap: int = DEFAULT_DEPTH_CAP, *,
                     instance_of: str = "P31", subclass_of: str = "P279",
                     closure: frozenset[str] | None = None) -> bool:
    """True iff the subject is exempt or the object's type chain reaches an allowed class."""
    if candidate.subject.id in constraint.exceptions:
        return True
    if not _object_in_graph(graph, candidate.object):
        return False
    if closure is None:
        closure = allowed_class_closure(graph, constraint, subclass_of, depth_cap)
    return _type_reaches(graph, candidate.object, constraint, closure,
                         instance_of, subclass_of)


def check_literal_range(candidate: CandidateStatement,
                        cutoff_year: int = DEFAULT_CUTOFF_YEAR) -> bool:
    obj = candidate.object
    if not (not isinstance(obj, Node) and obj.kind is ValueKind.DATE):
        raise ValueError("range check applies to date objects only")
    return obj.year < cutoff_year


def validate_detailed(graph: Graph, candidates: Sequence[CandidateStatement],
                      known: Iterable[tuple[Node, Value]],
                      constraint: ValueTypeConstraint | None = None,
                      settings: ValidationSettings | None = None) -> ValidationOutcome:
    """Run all applicable checks and assemble per-candidate verdicts.

    The accepted set is exactly the intersection of the per-check pass sets;
    verdicts carry the first failing reason in the order unresolvable ->
    datatype -> value type -> range.
    """
    settings = settings or ValidationSettings()
    t0 = time.monotonic()
    expected = settings.expected_datatype or infer_expected_datatype(known)
    datatype_ok = [check_datatype(c, expected) for c in candidates]
    t1 = time.monotonic()

    closure = None
    if constraint is not None:
        closure = allowed_class_closure(graph, constraint, settings.subclass_of,
                                        settings.depth_cap)
    accepted = []
    verdicts = []
    for cand, dt_ok in zip(candidates, datatype_ok):
        vt_ok: bool | None = None
        if constraint is not None and value_kind(cand.object) is ValueKind.ITEM \
                and not cand.unresolved:
            vt_ok = check_value_type(graph, cand, constraint, settings.depth_cap,
                                     instance_of=settings.instance_of,
                                     subclass_of=settings.subclass_of, closure=closure)
        rng_ok: bool | None = None
        if not isinstance(cand.object, Node) and cand.object.kind is ValueKind.DATE:
            rng_ok = check_literal_range(cand, settings.cutoff_year)

        if cand.unresolved:
            reason = RejectReason.UNRESOLVABLE
        elif not dt_ok:
            reason = RejectReason.WRONG_DATATYPE
        elif vt_ok is False:
            if not _object_in_graph(graph, cand.object) \
                    and cand.subject.id not in constraint.exceptions:
                reason = RejectReason.UNRESOLVABLE
            else:
                reason = RejectReason.WRONG_VALUE_TYPE
        elif rng_ok is False:
            reason = RejectReason.OUT_OF_RANGE
        else:
            reason = None

        ok = reason is None
        verdicts.append(ValidationVerdict(
            statement=cand, datatype_ok=dt_ok, value_type_ok=vt_ok,
            range_ok=rng_ok, accepted=ok, reject_reason=reason))
        if ok:
            accepted.append(cand)
    t2 = time.monotonic()
    return ValidationOutcome(accepted=accepted, verdicts=verdicts, expected=expected,
                             datatype_seconds=t1 - t0, valuetype_seconds=t2 - t1)


def validate(graph: Graph, candidates: Sequence[CandidateStatement],
             known: Iterable[tuple[Node, Value]],
             constraint: ValueTypeConstraint | None = None,
             settings: ValidationSettings | None = None,
             ) -> tuple[list[CandidateStatement], list[ValidationVerdict]]:
    outcome = validate_detailed(graph, candidates, known, constraint, settings)
    return outcome.accepted, outcome.verdicts


# -- constraint files ---------------------------------------------------------


def load_constraints(path: str | Path) -> dict[str, ValueTypeConstraint]:
    """Read a constraint TSV: rows (property, allowed_class).

    ``#mode=instance|subclass|both`` and ``#exception=<node>`` header
    directives apply to every property in the file.
    """
    mode = RelationMode.BOTH
    exceptions: set[str] = set()
    allowed: dict[str, set[str]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            stripped = line.strip()
            if not stripped:
                continue
            if stripped.startswith("#"):
                directive = stripped[1:].strip()
                if directive.startswith("mode="):
                    try:
                        mode = RelationMode(directive[len("mode="):].strip())
                    except ValueError:
                        raise DataFormatError(
                            f"{path}:{lineno}: unknown mode {directive!r}") from None
                elif directive.startswith("exception="):
                    exceptions.add(directive[len("exception="):].strip())
                continue
            fields = stripped.split("\t")
            if fields[:2] == ["property", "allowed_class"]:
                continue
            if len(fields) < 2 or not fields[0] or not fields[1]:
                raise DataFormatError(f"{path}:{lineno}: expected property<TAB>allowed_class")
            allowed.setdefault(fields[0], set()).add(fields[1])
    return {
        prop: ValueTypeConstraint(property=prop, allowed_classes=frozenset(classes),
                                  relation_mode=mode, exceptions=frozenset(exceptions))
        for prop, classes in allowed.items()
    }


def write_verdicts(verdicts: Iterable[ValidationVerdict], path: str | Path) -> None:
    from .store import serialize_value

    with open(path, "w", encoding="utf-8") as fh:
        fh.write("subject\tproperty\tobject\tdatatype_ok\tvalue_type_ok\trange_ok"
                 "\taccepted\treject_reason\n")
        for v in verdicts:
            def cell(flag: bool | None) -> str:
                return "-" if flag is None else str(flag).lower()
            fh.write("\t".join((
                v.statement.subject.id, v.statement.property,
                serialize_value(v.statement.object),
                cell(v.datatype_ok), cell(v.value_type_ok), cell(v.range_ok),
                str(v.accepted).lower(),
                v.reject_reason.value if v.reject_reason else "-")) + "\n")
