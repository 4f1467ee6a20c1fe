"""Declarative pipeline configuration.

One YAML (or JSON) file per experiment with sections: graphs, prefixes,
mappings, alignment, validation, gaps, output. Everything has a default
except the graph paths and the per-external-graph link mapping.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import yaml

from .align import AlignConfig, AlignMode
from .errors import ConfigError
from .resolve import IdTransform
from .store import (DEFAULT_LABEL_PROPERTIES, DEFAULT_MALFORMED_THRESHOLD,
                    Graph, load_edge_tsv, load_ntriples)
from .validate import ValidationSettings, ValueTypeConstraint, load_constraints

MODE_ALIASES = {
    "hybrid": AlignMode.HYBRID,
    "freq": AlignMode.FREQUENCY_ONLY,
    "frequency": AlignMode.FREQUENCY_ONLY,
    "string": AlignMode.STRING_ONLY,
}


@dataclass
class GraphSpec:
    path: str
    tag: str
    format: str = ""  # "nt" | "tsv"; inferred from the suffix when empty
    label_properties: tuple[str, ...] = DEFAULT_LABEL_PROPERTIES
    malformed_threshold: float = DEFAULT_MALFORMED_THRESHOLD

    def resolved_format(self) -> str:
        if self.format:
            return self.format
        suffix = Path(self.path).suffix.lower()
        if suffix in (".nt", ".ntriples"):
            return "nt"
        return "tsv"


@dataclass
class MappingSpec:
    link_property: str
    prefix: str = ""
    suffix: str = ""

    def transform(self) -> IdTransform:
        return IdTransform(prefix=self.prefix, suffix=self.suffix)


@dataclass
class GapSettings:
    type_property: str = "P31"
    no_value_sentinel: str | None = None


@dataclass
class OutputSettings:
    directory: str = "out"
    format: str = "tsv"  # "tsv" | "json"
    include_timings: bool = True


@dataclass
class PipelineConfig:
    target: GraphSpec
    externals: list[GraphSpec] = field(default_factory=list)
    prefixes: dict[str, str] = field(default_factory=dict)
    mappings: dict[str, MappingSpec] = field(default_factory=dict)
    alignment: AlignConfig = field(default_factory=AlignConfig)
    validation: ValidationSettings = field(default_factory=ValidationSettings)
    constraints_path: str | None = None
    gaps: GapSettings = field(default_factory=GapSettings)
    output: OutputSettings = field(default_factory=OutputSettings)

    def mapping_for(self, graph_tag: str) -> MappingSpec:
        try:
            return self.mappings[graph_tag]
        except KeyError:
            raise ConfigError(f"missing config key: mappings.{graph_tag}") from None

    def load_constraint_table(self) -> dict[str, ValueTypeConstraint]:
        if not self.constraints_path:
            return {}
        return load_constraints(self.constraints_path)


def _require(section: Mapping, key: str, where: str):
    if key not in section:
        raise ConfigError(f"missing config key: {where}.{key}")
    return section[key]


def _graph_spec(raw: Mapping, where: str) -> GraphSpec:
    return GraphSpec(
        path=str(_require(raw, "path", where)),
        tag=str(_require(raw, "tag", where)),
        format=str(raw.get("format", "")),
        label_properties=tuple(raw.get("label_properties", DEFAULT_LABEL_PROPERTIES)),
        malformed_threshold=float(raw.get("malformed_threshold",
                                          DEFAULT_MALFORMED_THRESHOLD)),
    )


def config_from_dict(data: Mapping) -> PipelineConfig:
    graphs = _require(data, "graphs", "<root>")
    target = _graph_spec(_require(graphs, "target", "graphs"), "graphs.target")
    externals = [_graph_spec(raw, f"graphs.externals[{i}]")
                 for i, raw in enumerate(graphs.get("externals", []))]

    mappings = {}
    for tag, raw in (data.get("mappings") or {}).items():
        transform = raw.get("transform") or {}
        mappings[tag] = MappingSpec(
            link_property=str(_require(raw, "link_property", f"mappings.{tag}")),
            prefix=str(raw.get("prefix", transform.get("prefix", ""))),
            suffix=str(raw.get("suffix", transform.get("suffix", ""))),
        )

    align_raw = data.get("alignment") or {}
    mode_name = str(align_raw.get("mode", "hybrid")).lower()
    if mode_name not in MODE_ALIASES:
        raise ConfigError(f"alignment.mode must be one of {sorted(MODE_ALIASES)}")
    alignment = AlignConfig(
        max_path_length=int(align_raw.get("max_path_length", 1)),
        sample_cap=int(align_raw.get("sample_cap", 200_000)),
        top_k=int(align_raw.get("top_k", 10)),
        similarity_threshold=float(align_raw.get("similarity_threshold", 0.9)),
        mode=MODE_ALIASES[mode_name],
        sample_seed=align_raw.get("sample_seed"),
    )

    val_raw = data.get("validation") or {}
    validation = ValidationSettings(
        cutoff_year=int(val_raw.get("cutoff_year", 2022)),
        depth_cap=int(val_raw.get("depth_cap", 20)),
        instance_of=str(val_raw.get("instance_of", "P31")),
        subclass_of=str(val_raw.get("subclass_of", "P279")),
    )

    gaps_raw = data.get("gaps") or {}
    gap_settings = GapSettings(
        type_property=str(gaps_raw.get("type_property", "P31")),
        no_value_sentinel=gaps_raw.get("no_value_sentinel"),
    )

    out_raw = data.get("output") or {}
    output = OutputSettings(
        directory=str(out_raw.get("directory", "out")),
        format=str(out_raw.get("format", "tsv")),
        include_timings=bool(out_raw.get("include_timings", True)),
    )

    return PipelineConfig(
        target=target, externals=externals,
        prefixes=dict(data.get("prefixes") or {}),
        mappings=mappings, alignment=alignment, validation=validation,
        constraints_path=val_raw.get("constraints"),
        gaps=gap_settings, output=output,
    )


def load_config(path: str | Path) -> PipelineConfig:
    with open(path, encoding="utf-8") as fh:
        data = yaml.safe_load(fh)
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: config must be a mapping")
    cfg = config_from_dict(data)
    # paths in the file are relative to the file's directory
    base = Path(path).parent
    cfg.target.path = str((base / cfg.target.path))
    for spec in cfg.externals:
        spec.path = str(base / spec.path)
    if cfg.constraints_path:
        cfg.constraints_path = str(base / cfg.constraints_path)
    return cfg


def load_graph(spec: GraphSpec, prefixes: Mapping[str, str] | None = None) -> Graph:
    loader = load_ntriples if spec.resolved_format() == "nt" else load_edge_tsv
    return loader(spec.path, spec.tag, prefixes=prefixes,
                  label_properties=spec.label_properties,
                  malformed_threshold=spec.malformed_threshold)
