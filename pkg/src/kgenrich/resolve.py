"""Entity resolution between the target graph and an external graph.

Mappings are built from identifier-link edges in the target graph (an
external-id property or a sitelink pseudo-property). Link values are turned
into external node ids by a literal prefix/suffix rewrite with
percent-encoded spaces; the external side of a mapping is therefore a plain
id string, resolved against the external graph only at query time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .store import Graph, Literal, Node, ValueKind


@dataclass(frozen=True)
class IdTransform:
    """value -> prefix + percent-encoded(value) + suffix."""

    prefix: str = ""
    suffix: str = ""

    def apply(self, value: str) -> str:
        encoded = value.strip().replace(" ", "%20")
        if not encoded:
            raise ValueError("empty link value")
        return f"{self.prefix}{encoded}{self.suffix}"


@dataclass(frozen=True)
class EntityMapping:
    link_property: str
    forward: Mapping[Node, frozenset[str]]
    inverse: Mapping[str, frozenset[Node]]
    skipped: int = 0

    def external_ids(self, node: Node) -> frozenset[str]:
        return self.forward.get(node, frozenset())


@dataclass(frozen=True)
class Resolution:
    mapped: Mapping[Node, frozenset[str]]
    coverage: float


@dataclass(frozen=True)
class InverseResolution:
    mapped: Mapping[str, frozenset[Node]]
    ambiguous: frozenset[str] = field(default_factory=frozenset)


def _link_value(obj) -> str | None:
    if isinstance(obj, Node):
        return obj.id
    if isinstance(obj, Literal):
        if obj.kind in (ValueKind.STRING, ValueKind.MONOLINGUAL, ValueKind.OTHER):
            return obj.text
    return None


def build_mapping(target: Graph, link_property: str,
                  transform: IdTransform | None = None) -> EntityMapping:
    """Collect link_property edges into forward/inverse node maps.

    Values the transform rejects (empty, or non-string-shaped literals) are
    skipped and counted, never fatal.
    """
    transform = transform or IdTransform()
    forward: dict[Node, set[str]] = {}
    inverse: dict[str, set[Node]] = {}
    skipped = 0
    for subj, obj in target.statements_for(link_property):
        raw = _link_value(obj)
        if raw is None:
            skipped += 1
            continue
        try:
            external_id = transform.apply(raw)
        except ValueError:
            skipped += 1
            continue
        forward.setdefault(subj, set()).add(external_id)
        inverse.setdefault(external_id, set()).add(subj)
    return EntityMapping(
        link_property=link_property,
        forward={n: frozenset(ids) for n, ids in forward.items()},
        inverse={e: frozenset(nodes) for e, nodes in inverse.items()},
        skipped=skipped,
    )


def resolve(mapping: EntityMapping, nodes: Iterable[Node]) -> Resolution:
    """Forward-map the given nodes; coverage = mapped / |nodes|."""
    nodes = set(nodes)
    mapped = {n: mapping.forward[n] for n in nodes if n in mapping.forward}
    coverage = len(mapped) / len(nodes) if nodes else 0.0
    return Resolution(mapped=mapped, coverage=coverage)


def inverse_resolve(mapping: EntityMapping, externals: Iterable[str]) -> InverseResolution:
    """Transpose lookup; ids linked by several target nodes are flagged ambiguous."""
    mapped = {}
    ambiguous = set()
    for ext in set(externals):
        targets = mapping.inverse.get(ext)
        if targets is None:
            continue
        mapped[ext] = targets
        if len(targets) > 1:
            ambiguous.add(ext)
    return InverseResolution(mapped=mapped, ambiguous=frozenset(ambiguous))
