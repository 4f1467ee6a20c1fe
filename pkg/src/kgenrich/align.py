"""Property alignment: find the external property path matching a target property.

The signal is structural first, lexical second: candidate paths are the
property sequences (length <= L) whose composition connects mapped known
(subject, object) pairs in the external graph, ranked by how many pairs they
connect. The top candidates are then reranked by gestalt string similarity
between the target property label and the path label, with a threshold
deciding whether the lexical winner overrides the frequency winner.
"""

from __future__ import annotations

import difflib
import random
import re
from collections import Counter
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Sequence

from .store import Graph, Literal, Node, Value, ValueKind, value_sort_key

MAX_PATH_LENGTH_CAP = 6


class AlignMode(Enum):
    HYBRID = "hybrid"
    FREQUENCY_ONLY = "frequency"
    STRING_ONLY = "string"


@dataclass(frozen=True)
class AlignConfig:
    max_path_length: int = 1
    sample_cap: int = 200_000
    top_k: int = 10
    similarity_threshold: float = 0.9
    mode: AlignMode = AlignMode.HYBRID
    sample_seed: int | None = None

    def __post_init__(self) -> None:
        if not 1 <= self.max_path_length <= MAX_PATH_LENGTH_CAP:
            raise ValueError(f"max_path_length must be in 1..{MAX_PATH_LENGTH_CAP}")
        if not 0.0 <= self.similarity_threshold <= 1.0:
            raise ValueError("similarity_threshold must be in [0, 1]")
        if self.sample_cap < 1 or self.top_k < 1:
            raise ValueError("sample_cap and top_k must be >= 1")


@dataclass(frozen=True)
class PropertyPath:
    steps: tuple[str, ...]
    support: int = 0
    similarity: float | None = None

    @property
    def path_str(self) -> str:
        return "/".join(self.steps)


def gestalt_similarity(a: str, b: str) -> float:
    """Ratcliff/Obershelp ratio: 2*matched / (len(a) + len(b)).

    1.0 iff the strings are equal; 0.0 when exactly one is empty or nothing
    matches. Backed by difflib with the junk heuristics disabled, which
    performs the literal longest-common-substring recursion.
    """
    return difflib.SequenceMatcher(None, a, b, autojunk=False).ratio()


_CAMEL = re.compile(r"(?<=[a-z0-9])(?=[A-Z])|(?<=[A-Z])(?=[A-Z][a-z])")


def normalize_label(raw: str) -> str:
    """Strip any namespace, split camelCase/underscores, lowercase. Idempotent."""
    tail = re.split(r"[/#:]", raw)[-1]
    spaced = _CAMEL.sub(" ", tail).replace("_", " ")
    return " ".join(spaced.lower().split())


# -- path enumeration ---------------------------------------------------------


def _as_subject_id(subject) -> str:
    return subject.id if isinstance(subject, Node) else subject


def _as_target(obj) -> str | Literal:
    return obj.id if isinstance(obj, Node) else obj


def values_match(found: Value, wanted: str | Literal) -> bool:
    """Terminal match for path search: node ids exactly, literals by value.

    Dates compare at the coarser of the two precisions; plain and
    language-tagged strings match on their text.
    """
    if isinstance(wanted, str):
        return isinstance(found, Node) and found.id == wanted
    if isinstance(found, Node):
        return False
    a, b = found, wanted
    if a.kind is ValueKind.DATE and b.kind is ValueKind.DATE:
        rank = {"year": 0, "month": 1, "day": 2}
        depth = min(rank[a.precision], rank[b.precision])
        fields_a = (a.year, a.month, a.day)[:depth + 1]
        fields_b = (b.year, b.month, b.day)[:depth + 1]
        return fields_a == fields_b
    if a.kind is ValueKind.QUANTITY and b.kind is ValueKind.QUANTITY:
        return a.magnitude == b.magnitude
    if a.kind in (ValueKind.STRING, ValueKind.MONOLINGUAL) and \
            b.kind in (ValueKind.STRING, ValueKind.MONOLINGUAL):
        return a.text == b.text
    return a == b


def _sample_pairs(pairs: set[tuple[str, str | Literal]],
                  cfg: AlignConfig) -> list[tuple[str, str | Literal]]:
    ordered = sorted(pairs, key=lambda p: (p[0], _target_sort_key(p[1])))
    if len(ordered) <= cfg.sample_cap:
        return ordered
    if cfg.sample_seed is not None:
        rng = random.Random(cfg.sample_seed)
        picked = rng.sample(ordered, cfg.sample_cap)
        return sorted(picked, key=lambda p: (p[0], _target_sort_key(p[1])))
    return ordered[:cfg.sample_cap]


def _target_sort_key(target: str | Literal):
    return (0, target, "", 0, 0, 0, 0.0) if isinstance(target, str) else value_sort_key(target)


def _pair_paths(graph: Graph, start_id: str, target: str | Literal,
                max_len: int) -> set[tuple[str, ...]]:
    """All property sequences realized by a simple path start -> target.

    Cycle avoidance is per traversal: a branch never revisits a node, so a
    sequence counts once per pair no matter how many node instantiations
    realize it. Intermediate literals end their branch.
    """
    start = graph.node(start_id)
    if start is None:
        return set()
    found: set[tuple[str, ...]] = set()

    def walk(node: Node, seq: tuple[str, ...], visited: set[Node]) -> None:
        depth = len(seq) + 1
        for prop, objs in graph.out_edges(node).items():
            for obj in objs:
                if isinstance(obj, Node):
                    if obj in visited:
                        continue
                    if values_match(obj, target):
                        found.add(seq + (prop,))
                        continue  # no simple path re-reaches the target
                    if depth < max_len:
                        visited.add(obj)
                        walk(obj, seq + (prop,), visited)
                        visited.remove(obj)
                elif values_match(obj, target):
                    found.add(seq + (prop,))

    walk(start, (), {start})
    return found


def enumerate_paths(graph: Graph, pairs: Iterable[tuple], cfg: AlignConfig) -> list[PropertyPath]:
    """Rank property paths by the number of known pairs they connect.

    Pairs beyond ``sample_cap`` are dropped deterministically (sorted by
    subject id, first N; or a seeded random sample when configured). Output
    is sorted by (support desc, steps asc).
    """
    normalized = {( _as_subject_id(s), _as_target(o)) for s, o in pairs}
    support: Counter[tuple[str, ...]] = Counter()
    for subject_id, target in _sample_pairs(normalized, cfg):
        for seq in _pair_paths(graph, subject_id, target, cfg.max_path_length):
            support[seq] += 1
    ranked = [PropertyPath(steps=seq, support=count) for seq, count in support.items()]
    ranked.sort(key=lambda p: (-p.support, p.steps))
    return ranked


# -- selection ----------------------------------------------------------------


def path_label(graph: Graph, path: PropertyPath) -> str:
    return " ".join(normalize_label(graph.label(step)) for step in path.steps)


def score_candidates(graph: Graph, target_label: str,
                     candidates: Sequence[PropertyPath]) -> list[PropertyPath]:
    target_norm = normalize_label(target_label)
    return [replace(p, similarity=gestalt_similarity(target_norm, path_label(graph, p)))
            for p in candidates]


def _best_by_similarity(scored: Sequence[PropertyPath]) -> PropertyPath:
    best = scored[0]
    for cand in scored[1:]:
        if cand.similarity > best.similarity:
            best = cand
    return best


def select_path(candidates: Sequence[PropertyPath], target_label: str,
                graph: Graph, cfg: AlignConfig) -> PropertyPath | None:
    """Pick the aligned path per mode; None when there are no candidates.

    Hybrid: rerank the top_k most supported candidates by similarity; take
    the lexical winner if it clears the threshold, else fall back to the
    top-1 by support. Frequency-only: top-1 by support. String-only: the
    most similar candidate over the whole list, support ignored.
    """
    if not candidates:
        return None
    if cfg.mode is AlignMode.FREQUENCY_ONLY:
        return score_candidates(graph, target_label, candidates[:1])[0]
    if cfg.mode is AlignMode.STRING_ONLY:
        return _best_by_similarity(score_candidates(graph, target_label, candidates))
    scored = score_candidates(graph, target_label, candidates[:cfg.top_k])
    best = _best_by_similarity(scored)
    if best.similarity >= cfg.similarity_threshold:
        return best
    return scored[0]
