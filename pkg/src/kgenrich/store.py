"""Immutable in-memory knowledge graphs loaded from N-Triples or edge-TSV.

A graph holds interned nodes, a deduplicated edge set, and three indexes
(subject->property->objects, property->(subject, object) pairs,
object->property->subjects) that are kept in lockstep by ``add_edge``.
Graphs are treated as immutable once a loader returns them; pipeline stages
only ever read them and emit separate statement sets.

IRIs are shortened through a configurable prefix table (unknown namespaces
keep the full IRI). Edge-TSV carries no datatypes, so literal kinds are
inferred from the lexical shape of the ``node2`` field; N-Triples literals
are classified by their explicit datatype.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Union

from .errors import DataFormatError

DEFAULT_LABEL_PROPERTIES = ("label", "rdfs:label")
DEFAULT_MALFORMED_THRESHOLD = 0.10


class ValueKind(Enum):
    ITEM = "item"
    STRING = "string"
    MONOLINGUAL = "monolingual"
    DATE = "date"
    QUANTITY = "quantity"
    OTHER = "other"


class Provenance(Enum):
    TARGET_KNOWN = "known"
    EXTERNAL_CANDIDATE = "candidate"
    VALIDATED = "validated"


@dataclass(frozen=True)
class Node:
    id: str
    graph_tag: str

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("node id must be non-empty")

    @property
    def local_name(self) -> str:
        return local_name(self.id)


@dataclass(frozen=True)
class Literal:
    """A typed literal value.

    ``raw`` preserves the original lexical form but is excluded from
    equality/hashing so that value-equal literals from different
    serializations compare equal.
    """

    kind: ValueKind
    text: str | None = None
    language: str | None = None
    year: int | None = None
    month: int | None = None
    day: int | None = None
    precision: str | None = None
    magnitude: float | None = None
    unit: str | None = None
    raw: str = field(default="", compare=False)

    @staticmethod
    def string(text: str, raw: str | None = None) -> "Literal":
        return Literal(ValueKind.STRING, text=text, raw=raw if raw is not None else text)

    @staticmethod
    def monolingual(text: str, language: str, raw: str | None = None) -> "Literal":
        if not language:
            raise ValueError("monolingual text requires a language tag")
        return Literal(ValueKind.MONOLINGUAL, text=text, language=language,
                       raw=raw if raw is not None else text)

    @staticmethod
    def date(year: int, month: int | None = None, day: int | None = None,
             precision: str | None = None, raw: str | None = None) -> "Literal":
        if precision is None:
            precision = "day" if day is not None else "month" if month is not None else "year"
        if precision not in ("year", "month", "day"):
            raise ValueError(f"bad date precision {precision!r}")
        if precision == "day" and (month is None or day is None):
            raise ValueError("day precision requires month and day")
        if precision == "month" and month is None:
            raise ValueError("month precision requires a month")
        return Literal(ValueKind.DATE, year=year, month=month, day=day,
                       precision=precision, raw=raw if raw is not None else "")

    @staticmethod
    def quantity(magnitude: float, unit: str | None = None, raw: str | None = None) -> "Literal":
        magnitude = float(magnitude)
        if not math.isfinite(magnitude):
            raise ValueError("quantity magnitude must be finite")
        return Literal(ValueKind.QUANTITY, magnitude=magnitude, unit=unit,
                       raw=raw if raw is not None else "")

    @staticmethod
    def other(raw: str) -> "Literal":
        return Literal(ValueKind.OTHER, text=raw, raw=raw)


Value = Union[Node, Literal]


def value_kind(value: Value) -> ValueKind:
    return ValueKind.ITEM if isinstance(value, Node) else value.kind


def value_sort_key(value: Value) -> tuple:
    if isinstance(value, Node):
        return (0, value.id, "", 0, 0, 0, 0.0)
    return (1, value.kind.value, value.text or "", value.year or 0,
            value.month or 0, value.day or 0, value.magnitude or 0.0)


@dataclass(frozen=True)
class Statement:
    subject: Node
    property: str
    object: Value
    provenance: Provenance
    source_graph: str

    def __post_init__(self) -> None:
        if not self.property:
            raise ValueError("statement property must be non-empty")

    def as_validated(self) -> "Statement":
        # provenance only moves forward: candidate -> validated
        if self.provenance is not Provenance.EXTERNAL_CANDIDATE:
            raise ValueError(f"cannot validate a {self.provenance.value} statement")
        return replace(self, provenance=Provenance.VALIDATED)


def local_name(identifier: str) -> str:
    """Local part of an id: everything after the last '/', '#', or ':'."""
    tail = re.split(r"[/#:]", identifier)[-1]
    return tail or identifier


class PrefixTable:
    """Shortens full IRIs into CURIE-like tokens.

    Prefix keys are given without the trailing colon; the empty prefix
    produces bare local names (Wikidata-style "Q42"). Longest namespace
    wins; unknown namespaces keep the full IRI.
    """

    def __init__(self, prefixes: Mapping[str, str] | None = None):
        table = {}
        for prefix, namespace in (prefixes or {}).items():
            table[prefix.rstrip(":")] = namespace
        self._by_length = sorted(table.items(), key=lambda kv: -len(kv[1]))

    def shorten(self, iri: str) -> str:
        for prefix, namespace in self._by_length:
            if iri.startswith(namespace):
                local = iri[len(namespace):]
                if not local:
                    continue
                return local if prefix == "" else f"{prefix}:{local}"
        return iri


@dataclass
class LoadStats:
    lines: int = 0
    edges: int = 0
    duplicates: int = 0
    skipped: int = 0
    first_bad_lineno: int = 0
    first_bad_text: str = ""


class Graph:
    """Indexed, deduplicated edge set over interned nodes.

    Built by the loaders (or test fixtures) through ``add_edge`` and treated
    as immutable afterwards; every pipeline stage only reads it.
    """

    def __init__(self, tag: str, label_properties: Iterable[str] = DEFAULT_LABEL_PROPERTIES):
        self.tag = tag
        self.label_properties = tuple(label_properties)
        self.stats = LoadStats()
        self._nodes: dict[str, Node] = {}
        self._spo: dict[str, dict[str, set[Value]]] = {}
        self._pso: dict[str, set[tuple[Node, Value]]] = {}
        self._osp: dict[Value, dict[str, set[Node]]] = {}
        self._labels: dict[str, str] = {}
        self._edge_count = 0

    # -- construction ------------------------------------------------------

    def intern(self, node_id: str) -> Node:
        node = self._nodes.get(node_id)
        if node is None:
            node = Node(node_id, self.tag)
            self._nodes[node_id] = node
        return node

    def add_edge(self, subject: str | Node, prop: str, obj: Value | str) -> bool:
        """Insert one edge, keeping all three indexes in agreement.

        Returns False when the edge was already present. String objects are
        interned as nodes; pass a ``Literal`` for literal values.
        """
        subj = subject if isinstance(subject, Node) else self.intern(subject)
        if isinstance(obj, str):
            obj = self.intern(obj)
        if not prop:
            raise ValueError("property must be non-empty")
        by_prop = self._spo.setdefault(subj.id, {})
        objs = by_prop.setdefault(prop, set())
        if obj in objs:
            self.stats.duplicates += 1
            return False
        objs.add(obj)
        self._pso.setdefault(prop, set()).add((subj, obj))
        self._osp.setdefault(obj, {}).setdefault(prop, set()).add(subj)
        self._edge_count += 1
        if prop in self.label_properties and isinstance(obj, Literal) and obj.text:
            self._labels.setdefault(subj.id, obj.text)
        return True

    # -- queries -----------------------------------------------------------

    @property
    def edge_count(self) -> int:
        return self._edge_count

    @property
    def node_count(self) -> int:
        return len(self._nodes)

    def node(self, node_id: str) -> Node | None:
        return self._nodes.get(node_id)

    def objects(self, subject: str | Node, prop: str) -> set[Value]:
        """Exact object set for (subject, property); empty set if none."""
        sid = subject.id if isinstance(subject, Node) else subject
        return self._spo.get(sid, {}).get(prop, set())

    def out_edges(self, subject: str | Node) -> Mapping[str, set[Value]]:
        sid = subject.id if isinstance(subject, Node) else subject
        return self._spo.get(sid, {})

    def subjects(self) -> Iterator[Node]:
        """All nodes appearing as subject of at least one edge."""
        for sid in self._spo:
            yield self._nodes[sid]

    def statements_for(self, prop: str) -> set[tuple[Node, Value]]:
        return self._pso.get(prop, set())

    def has_property(self, prop: str) -> bool:
        return prop in self._pso

    def properties(self) -> Iterator[str]:
        return iter(self._pso)

    def subjects_with(self, prop: str, obj: Value) -> set[Node]:
        return self._osp.get(obj, {}).get(prop, set())

    def edges(self) -> Iterator[tuple[Node, str, Value]]:
        for sid, by_prop in self._spo.items():
            subj = self._nodes[sid]
            for prop, objs in by_prop.items():
                for obj in objs:
                    yield subj, prop, obj

    def label(self, node: str | Node) -> str:
        """Display label, falling back to the id's local name, then the id."""
        nid = node.id if isinstance(node, Node) else node
        got = self._labels.get(nid)
        if got is not None:
            return got
        return local_name(nid)


# -- N-Triples ---------------------------------------------------------------

_XSD = "http://www.w3.org/2001/XMLSchema#"
_NUMERIC_XSD = {
    "integer", "decimal", "double", "float", "int", "long", "short", "byte",
    "nonNegativeInteger", "positiveInteger", "negativeInteger",
    "nonPositiveInteger", "unsignedLong", "unsignedInt", "unsignedShort",
    "unsignedByte",
}

_NT_LINE = re.compile(
    r'^\s*'
    r'(?P<s><[^<>\s]+>|_:\S+)\s+'
    r'(?P<p><[^<>\s]+>)\s+'
    r'(?P<o><[^<>\s]+>|_:\S+|"(?:[^"\\]|\\.)*"(?:@[A-Za-z][A-Za-z0-9-]*|\^\^<[^<>\s]+>)?)'
    r'\s*\.\s*(?:#.*)?$'
)
_NT_LITERAL = re.compile(
    r'^"(?P<lex>(?:[^"\\]|\\.)*)"(?:@(?P<lang>[A-Za-z][A-Za-z0-9-]*)|\^\^<(?P<dt>[^<>\s]+)>)?$'
)

_DATE_DAY = re.compile(r"^(-?\d{4,})-(\d{2})-(\d{2})(?:T\S*)?$")
_DATE_MONTH = re.compile(r"^(-?\d{4,})-(\d{2})$")
_DATE_YEAR = re.compile(r"^(-?\d{4,})$")

_ESCAPES = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f",
            '"': '"', "'": "'", "\\": "\\"}


def _unescape(text: str) -> str:
    if "\\" not in text:
        return text
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch != "\\":
            out.append(ch)
            i += 1
            continue
        esc = text[i + 1]
        if esc == "u":
            out.append(chr(int(text[i + 2:i + 6], 16)))
            i += 6
        elif esc == "U":
            out.append(chr(int(text[i + 2:i + 10], 16)))
            i += 10
        else:
            out.append(_ESCAPES.get(esc, esc))
            i += 2
    return "".join(out)


def _parse_date_lexical(lex: str) -> Literal | None:
    m = _DATE_DAY.match(lex)
    if m:
        return Literal.date(int(m.group(1)), int(m.group(2)), int(m.group(3)), raw=lex)
    m = _DATE_MONTH.match(lex)
    if m:
        return Literal.date(int(m.group(1)), int(m.group(2)), raw=lex)
    m = _DATE_YEAR.match(lex)
    if m:
        return Literal.date(int(m.group(1)), raw=lex)
    return None


def _nt_literal(lex: str, lang: str | None, datatype: str | None) -> Literal:
    text = _unescape(lex)
    if lang:
        return Literal.monolingual(text, lang, raw=lex)
    if datatype is None or datatype == _XSD + "string":
        return Literal.string(text, raw=lex)
    if datatype.startswith(_XSD):
        local = datatype[len(_XSD):]
        if local in ("date", "dateTime", "gYear", "gYearMonth"):
            parsed = _parse_date_lexical(text)
            if parsed is not None:
                return parsed
            return Literal.other(text)
        if local in _NUMERIC_XSD:
            try:
                return Literal.quantity(float(text), raw=text)
            except ValueError:
                return Literal.other(text)
    return Literal.other(text)


def _check_threshold(path: str | Path, stats: LoadStats, considered: int,
                     threshold: float) -> None:
    if considered and stats.skipped / considered > threshold:
        raise DataFormatError(
            f"{path}: {stats.skipped} of {considered} lines malformed "
            f"(> {threshold:.0%} threshold); first at line "
            f"{stats.first_bad_lineno}: {stats.first_bad_text!r}"
        )


def load_ntriples(path: str | Path, graph_tag: str, *,
                  prefixes: Mapping[str, str] | PrefixTable | None = None,
                  label_properties: Iterable[str] = DEFAULT_LABEL_PROPERTIES,
                  malformed_threshold: float = DEFAULT_MALFORMED_THRESHOLD) -> Graph:
    """Load a UTF-8 N-Triples file into a fully indexed graph.

    Malformed lines are counted and skipped; if more than
    ``malformed_threshold`` of the non-blank, non-comment lines are
    malformed, a DataFormatError naming the first offending line is raised.
    """
    table = prefixes if isinstance(prefixes, PrefixTable) else PrefixTable(prefixes)
    graph = Graph(graph_tag, label_properties)
    considered = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            graph.stats.lines += 1
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            considered += 1
            m = _NT_LINE.match(line)
            if m is None:
                graph.stats.skipped += 1
                if graph.stats.first_bad_lineno == 0:
                    graph.stats.first_bad_lineno = lineno
                    graph.stats.first_bad_text = stripped
                continue
            subj = _nt_term_id(m.group("s"), table)
            prop = _nt_term_id(m.group("p"), table)
            raw_obj = m.group("o")
            if raw_obj.startswith('"'):
                lm = _NT_LITERAL.match(raw_obj)
                obj: Value = _nt_literal(lm.group("lex"), lm.group("lang"), lm.group("dt"))
            else:
                obj = graph.intern(_nt_term_id(raw_obj, table))
            if graph.add_edge(subj, prop, obj):
                graph.stats.edges += 1
    _check_threshold(path, graph.stats, considered, malformed_threshold)
    return graph


def _nt_term_id(token: str, table: PrefixTable) -> str:
    if token.startswith("<"):
        return table.shorten(token[1:-1])
    return token  # blank node label, kept verbatim


# -- edge TSV ----------------------------------------------------------------

_TSV_NODE_ID = re.compile(r"^[A-Za-z_][A-Za-z0-9_.\-]*(?::[^\s]+)?$")
_TSV_DATE = re.compile(r"^-?\d{4}(?:-\d{2}(?:-\d{2})?)?$")
_TSV_NUMBER = re.compile(r"^[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?$")
_TSV_MONOLINGUAL = re.compile(r"^'(?P<text>(?:[^'\\]|\\.)*)'@(?P<lang>[A-Za-z][A-Za-z0-9-]*)$")


def parse_tsv_value(text: str, graph: Graph) -> Value:
    """Classify a ``node2`` field by lexical shape.

    Quoted -> string, 'x'@lang -> monolingual, ISO date -> date, numeric ->
    quantity, id-shaped -> node; anything else becomes an Other literal.
    """
    if text.startswith('"') and text.endswith('"') and len(text) >= 2:
        return Literal.string(_unescape(text[1:-1]), raw=text)
    m = _TSV_MONOLINGUAL.match(text)
    if m:
        return Literal.monolingual(_unescape(m.group("text")), m.group("lang"), raw=text)
    if _TSV_DATE.match(text):
        parsed = _parse_date_lexical(text)
        if parsed is not None:
            return parsed
    if _TSV_NUMBER.match(text):
        return Literal.quantity(float(text), raw=text)
    if _TSV_NODE_ID.match(text) or "://" in text:
        return graph.intern(text)
    return Literal.other(text)


def load_edge_tsv(path: str | Path, graph_tag: str, *,
                  prefixes: Mapping[str, str] | PrefixTable | None = None,
                  label_properties: Iterable[str] = DEFAULT_LABEL_PROPERTIES,
                  malformed_threshold: float = DEFAULT_MALFORMED_THRESHOLD) -> Graph:
    """Load a header-first edge TSV (columns node1, label, node2, id optional)."""
    table = prefixes if isinstance(prefixes, PrefixTable) else PrefixTable(prefixes)
    graph = Graph(graph_tag, label_properties)
    considered = 0
    with open(path, encoding="utf-8") as fh:
        header_line = fh.readline()
        if not header_line:
            return graph
        header = header_line.rstrip("\n").split("\t")
        try:
            col = {name: header.index(name) for name in ("node1", "label", "node2")}
        except ValueError:
            raise DataFormatError(
                f"{path}: required columns node1/label/node2 missing; found {header}"
            ) from None
        width = max(col.values()) + 1
        graph.stats.lines += 1
        for lineno, line in enumerate(fh, 2):
            graph.stats.lines += 1
            stripped = line.rstrip("\n")
            if not stripped or stripped.startswith("#"):
                continue
            considered += 1
            fields = stripped.split("\t")
            if len(fields) < width or not fields[col["node1"]] or not fields[col["label"]]:
                graph.stats.skipped += 1
                if graph.stats.first_bad_lineno == 0:
                    graph.stats.first_bad_lineno = lineno
                    graph.stats.first_bad_text = stripped
                continue
            subj = table.shorten(fields[col["node1"]])
            prop = table.shorten(fields[col["label"]])
            obj = parse_tsv_value(fields[col["node2"]], graph)
            if isinstance(obj, Node):
                shortened = table.shorten(obj.id)
                if shortened != obj.id:
                    obj = graph.intern(shortened)
            if graph.add_edge(subj, prop, obj):
                graph.stats.edges += 1
    _check_threshold(path, graph.stats, considered, malformed_threshold)
    return graph


def _escape(text: str) -> str:
    return (text.replace("\\", "\\\\").replace('"', '\\"').replace("'", "\\'")
            .replace("\t", "\\t").replace("\n", "\\n").replace("\r", "\\r"))


def _format_year(year: int) -> str:
    return f"-{abs(year):04d}" if year < 0 else f"{year:04d}"


def serialize_value(value: Value) -> str:
    """Render a value into the edge-TSV ``node2`` lexicon.

    Inverse of parse_tsv_value up to value equality: quantities always carry
    a decimal point so integral magnitudes cannot be re-read as dates.
    """
    if isinstance(value, Node):
        return value.id
    if value.kind is ValueKind.STRING:
        return f'"{_escape(value.text or "")}"'
    if value.kind is ValueKind.MONOLINGUAL:
        return f"'{_escape(value.text or '')}'@{value.language}"
    if value.kind is ValueKind.DATE:
        out = _format_year(value.year or 0)
        if value.precision in ("month", "day"):
            out += f"-{value.month:02d}"
        if value.precision == "day":
            out += f"-{value.day:02d}"
        return out
    if value.kind is ValueKind.QUANTITY:
        mag = value.magnitude or 0.0
        if mag == int(mag) and abs(mag) < 1e15:
            return f"{int(mag)}.0"
        return repr(mag)
    return value.text or value.raw


def write_edge_tsv(graph: Graph, path: str | Path) -> None:
    """Serialize the full edge set, sorted, so identical graphs give identical bytes."""
    rows = sorted(
        (subj.id, prop, serialize_value(obj)) for subj, prop, obj in graph.edges()
    )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("node1\tlabel\tnode2\n")
        for row in rows:
            fh.write("\t".join(row) + "\n")
