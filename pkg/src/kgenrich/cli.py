"""Command-line interface.

Subcommands mirror the pipeline stages (load-check, detect-gaps, resolve,
align, retrieve, validate) plus the orchestrated runs (enrich, batch,
consistency, report). Exit codes: 0 success, 1 usage/config error, 2 data
error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import pipeline
from .align import enumerate_paths, score_candidates, select_path
from .config import PipelineConfig, load_config, load_graph
from .consistency import Granularity, write_scatter_csv
from .errors import ConfigError, DataFormatError, UsageError
from .gaps import detect_gaps
from .resolve import build_mapping, inverse_resolve, resolve
from .retrieve import read_candidates, retrieve, write_candidates
from .store import Graph, load_edge_tsv, load_ntriples
from .validate import validate_detailed, write_verdicts


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # route argparse failures to exit code 1
        raise UsageError(message)


def _load_graph_arg(path: str, fmt: str, tag: str, cfg: PipelineConfig | None) -> Graph:
    prefixes = cfg.prefixes if cfg else None
    if fmt == "nt" or (not fmt and path.endswith(".nt")):
        return load_ntriples(path, tag, prefixes=prefixes)
    return load_edge_tsv(path, tag, prefixes=prefixes)


def _config(args) -> PipelineConfig:
    if not getattr(args, "config", None):
        raise UsageError("this command requires --config")
    return load_config(args.config)


def _target_graph(cfg: PipelineConfig) -> Graph:
    return load_graph(cfg.target, cfg.prefixes)


def _external_graph(cfg: PipelineConfig, tag: str | None) -> Graph:
    if not cfg.externals:
        raise ConfigError("missing config key: graphs.externals")
    if tag is None:
        return load_graph(cfg.externals[0], cfg.prefixes)
    for spec in cfg.externals:
        if spec.tag == tag:
            return load_graph(spec, cfg.prefixes)
    raise ConfigError(f"no external graph with tag {tag!r} in config")


def _out(args, default_name: str) -> Path:
    directory = Path(getattr(args, "out_dir", None) or ".")
    directory.mkdir(parents=True, exist_ok=True)
    return directory / default_name


# -- subcommand handlers -------------------------------------------------------


def _cmd_load_check(args) -> int:
    cfg = load_config(args.config) if args.config else None
    graph = _load_graph_arg(args.graph, args.format, args.tag, cfg)
    print(f"graph {graph.tag}: {graph.edge_count} edges, {graph.node_count} nodes, "
          f"{graph.stats.skipped} malformed lines skipped")
    return 0


def _cmd_detect_gaps(args) -> int:
    cfg = load_config(args.config) if args.config else None
    graph = _load_graph_arg(args.graph, args.format, args.tag, cfg)
    entity_filter = (args.entity_class, args.type_prop) if args.entity_class else None
    sentinel = cfg.gaps.no_value_sentinel if cfg else None
    partition = detect_gaps(graph, args.property, entity_filter,
                            no_value_sentinel=sentinel)
    lines = [(node.id, "known") for node in partition.known_subjects]
    lines += [(node.id, "unknown") for node in partition.unknown_subjects]
    out = "\n".join(f"{nid}\t{status}" for nid, status in sorted(lines))
    _write_or_print(args.out, "subject\tstatus\n" + out + ("\n" if out else ""))
    return 0


def _cmd_resolve(args) -> int:
    cfg = _config(args)
    target = _target_graph(cfg)
    spec = cfg.mapping_for(args.graph_tag)
    mapping = build_mapping(target, spec.link_property, spec.transform())
    ids = [line.strip() for line in Path(args.nodes).read_text(encoding="utf-8").splitlines()
           if line.strip()]
    if args.inverse:
        inv = inverse_resolve(mapping, ids)
        rows = [(ext, ",".join(sorted(n.id for n in nodes)),
                 "ambiguous" if ext in inv.ambiguous else "-")
                for ext, nodes in sorted(inv.mapped.items())]
        body = "\n".join("\t".join(r) for r in rows)
        _write_or_print(args.out, "external\ttargets\tflags\n" + body + ("\n" if body else ""))
    else:
        from .store import Node
        nodes = {target.node(i) or Node(i, target.tag) for i in ids}
        res = resolve(mapping, nodes)
        rows = [(node.id, ",".join(sorted(exts)))
                for node, exts in sorted(res.mapped.items(), key=lambda kv: kv[0].id)]
        body = "\n".join("\t".join(r) for r in rows)
        _write_or_print(args.out, "node\texternals\n" + body + ("\n" if body else "")
                        + f"#coverage={res.coverage:.4f}\n")
    return 0


def _align_config(cfg: PipelineConfig, args):
    from dataclasses import replace

    from .config import MODE_ALIASES
    align = cfg.alignment
    if args.max_len is not None:
        align = replace(align, max_path_length=args.max_len)
    if args.sample_cap is not None:
        align = replace(align, sample_cap=args.sample_cap)
    if args.threshold is not None:
        align = replace(align, similarity_threshold=args.threshold)
    if args.mode is not None:
        align = replace(align, mode=MODE_ALIASES[args.mode])
    return align


def _cmd_align(args) -> int:
    cfg = _config(args)
    cfg.alignment = _align_config(cfg, args)
    target = _target_graph(cfg)
    external = _external_graph(cfg, args.external)
    spec = cfg.mapping_for(external.tag)
    mapping = build_mapping(target, spec.link_property, spec.transform())
    sentinel = cfg.gaps.no_value_sentinel
    partition = detect_gaps(target, args.property, None, no_value_sentinel=sentinel)
    pairs = pipeline.alignment_pairs(partition, mapping)
    candidates = enumerate_paths(external, pairs, cfg.alignment)
    selected = select_path(candidates, target.label(args.property), external, cfg.alignment)
    scored = score_candidates(external, target.label(args.property), candidates)
    lines = ["path\tsupport\tsimilarity\tselected"]
    for cand in scored:
        flag = "true" if selected and cand.steps == selected.steps else "false"
        lines.append(f"{cand.path_str}\t{cand.support}\t{cand.similarity:.4f}\t{flag}")
    _write_or_print(args.out, "\n".join(lines) + "\n")
    return 0


def _parse_path_arg(path_arg: str) -> "pipeline.PropertyPath":
    from .align import PropertyPath
    candidate = Path(path_arg)
    if candidate.exists():
        with open(candidate, encoding="utf-8") as fh:
            header = fh.readline().rstrip("\n").split("\t")
            col = {name: header.index(name) for name in ("path", "selected")}
            for line in fh:
                fields = line.rstrip("\n").split("\t")
                if len(fields) > col["selected"] and fields[col["selected"]] == "true":
                    return PropertyPath(steps=tuple(fields[col["path"]].split("/")))
        raise DataFormatError(f"{path_arg}: no selected path row")
    return PropertyPath(steps=tuple(path_arg.split("/")))


def _cmd_retrieve(args) -> int:
    cfg = _config(args)
    target = _target_graph(cfg)
    external = _external_graph(cfg, args.external)
    spec = cfg.mapping_for(external.tag)
    mapping = build_mapping(target, spec.link_property, spec.transform())
    partition = detect_gaps(target, args.property, None,
                            no_value_sentinel=cfg.gaps.no_value_sentinel)
    unknown_map = resolve(mapping, partition.unknown_subjects).mapped
    path = _parse_path_arg(args.path)
    candidates = retrieve(external, unknown_map, args.property, path, mapping)
    write_candidates(candidates, args.out or "candidates.tsv")
    print(f"{len(candidates)} candidates written")
    return 0


def _cmd_validate(args) -> int:
    cfg = _config(args)
    if args.cutoff_year is not None:
        from dataclasses import replace
        cfg.validation = replace(cfg.validation, cutoff_year=args.cutoff_year)
    target = _target_graph(cfg)
    external_tag = args.external or (cfg.externals[0].tag if cfg.externals else "external")
    candidates = read_candidates(args.candidates, cfg.target.tag, external_tag)
    partition = detect_gaps(target, args.property, None,
                            no_value_sentinel=cfg.gaps.no_value_sentinel)
    constraints = cfg.load_constraint_table()
    if args.constraints:
        from .validate import load_constraints
        constraints = load_constraints(args.constraints)
    outcome = validate_detailed(target, candidates, partition.known,
                                constraints.get(args.property), cfg.validation)
    write_verdicts(outcome.verdicts, args.out or "verdicts.tsv")
    print(f"{len(outcome.accepted)} of {len(candidates)} candidates accepted")
    return 0


def _cmd_enrich(args) -> int:
    cfg = _config(args)
    target = _target_graph(cfg)
    external = _external_graph(cfg, args.external)
    constraints = cfg.load_constraint_table()
    result = pipeline.enrich_property(target, external, args.property, cfg,
                                      entity_class=args.entity_class,
                                      constraints=constraints)
    include_timings = cfg.output.include_timings and not args.no_timings
    fmt = cfg.output.format
    pipeline.write_statements(result.statements, _out(args, "statements.tsv"))
    pipeline.emit_report([result], fmt, _out(args, f"report.{fmt}"),
                         include_timings=include_timings)
    print(f"{result.property}: status={result.status} s_w={result.s_w} "
          f"s_g={result.s_g} s_e={result.s_e}")
    return 0


def _cmd_batch(args) -> int:
    cfg = _config(args)
    target = _target_graph(cfg)
    externals = [load_graph(spec, cfg.prefixes) for spec in cfg.externals]
    if not externals:
        raise ConfigError("missing config key: graphs.externals")
    properties = _property_list(args)
    batch = pipeline.batch_enrich(target, externals, properties, cfg,
                                  entity_class=args.entity_class)
    include_timings = cfg.output.include_timings and not args.no_timings
    fmt = cfg.output.format
    pipeline.write_statements(batch.statements(), _out(args, "statements.tsv"))
    summary = {"median_novel_statements": batch.median_novel,
               "properties": len(properties)}
    pipeline.emit_report(batch.all_rows, fmt, _out(args, f"report.{fmt}"),
                         include_timings=include_timings, summary=summary)
    print(f"batch: {len(batch.rows)} rows, {len(batch.statements())} validated statements")
    return 0


def _property_list(args) -> list[str]:
    if args.properties:
        return [p.strip() for p in args.properties.split(",") if p.strip()]
    if args.properties_file:
        return [line.strip() for line in
                Path(args.properties_file).read_text(encoding="utf-8").splitlines()
                if line.strip()]
    raise UsageError("batch needs --properties or --properties-file")


def _cmd_consistency(args) -> int:
    cfg = _config(args)
    target = _target_graph(cfg)
    external = _external_graph(cfg, args.external)
    granularity = Granularity(args.granularity) if args.granularity else None
    outcome = pipeline.run_consistency(target, external, args.property, cfg,
                                       granularity, entity_class=args.entity_class)
    report_path = _out(args, "consistency.json")
    report_path.write_text(json.dumps(outcome.report_dict(), indent=2, sort_keys=True)
                           + "\n", encoding="utf-8")
    if outcome.literal_report is not None:
        write_scatter_csv(outcome.literal_report, _out(args, "scatter.csv"))
    print(json.dumps(outcome.report_dict(), sort_keys=True))
    return 0


def _cmd_report(args) -> int:
    with open(args.results, encoding="utf-8") as fh:
        doc = json.load(fh)
    rows = []
    for raw in doc.get("results", []):
        from .align import PropertyPath
        path = PropertyPath(steps=tuple(raw["path"].split("/"))) if raw.get("path") else None
        rows.append(pipeline.EnrichmentResult(
            property=raw["property"], graph=raw["graph"], status=raw.get("status", "ok"),
            s_w=raw.get("s_w", 0), s_g=raw.get("s_g", 0), s_e=raw.get("s_e", 0),
            n_k=raw.get("n_k", 0), n_u=raw.get("n_u", 0),
            n_f=raw.get("n_f", 0), n_c=raw.get("n_c", 0),
            selected_path=path, timings=raw.get("timings", {})))
    pipeline.emit_report(rows, args.format, args.out or f"report.{args.format}",
                         include_timings=not args.no_timings,
                         summary=doc.get("summary"))
    return 0


def _write_or_print(out: str | None, text: str) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# -- wiring --------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="kgenrich",
                     description="Knowledge-graph enrichment from linked-data sources")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(handler=handler)
        return p

    p = add("load-check", _cmd_load_check, help="load a graph and print stats")
    p.add_argument("--graph", required=True)
    p.add_argument("--format", choices=("nt", "tsv"), default="")
    p.add_argument("--tag", default="graph")
    p.add_argument("--config")

    p = add("detect-gaps", _cmd_detect_gaps, help="partition subjects into known/unknown")
    p.add_argument("--graph", required=True)
    p.add_argument("--format", choices=("nt", "tsv"), default="")
    p.add_argument("--tag", default="graph")
    p.add_argument("--property", required=True)
    p.add_argument("--class", dest="entity_class")
    p.add_argument("--type-prop", default="P31")
    p.add_argument("--config")
    p.add_argument("--out")

    p = add("resolve", _cmd_resolve, help="map node ids through an entity mapping")
    p.add_argument("--config", required=True)
    p.add_argument("--graph-tag", required=True)
    p.add_argument("--nodes", required=True, help="file with one node id per line")
    p.add_argument("--inverse", action="store_true")
    p.add_argument("--out")

    p = add("align", _cmd_align, help="rank and select external property paths")
    p.add_argument("--config", required=True)
    p.add_argument("--property", required=True)
    p.add_argument("--external", help="external graph tag (default: first)")
    p.add_argument("--max-len", type=int)
    p.add_argument("--sample-cap", type=int)
    p.add_argument("--threshold", type=float)
    p.add_argument("--mode", choices=("hybrid", "freq", "frequency", "string"))
    p.add_argument("--out")

    p = add("retrieve", _cmd_retrieve, help="collect candidate statements over a path")
    p.add_argument("--config", required=True)
    p.add_argument("--property", required=True)
    p.add_argument("--path", required=True,
                   help="align output file or slash-joined steps")
    p.add_argument("--external")
    p.add_argument("--out")

    p = add("validate", _cmd_validate, help="validate a candidate file")
    p.add_argument("--config", required=True)
    p.add_argument("--property", required=True)
    p.add_argument("--candidates", required=True)
    p.add_argument("--constraints")
    p.add_argument("--cutoff-year", type=int)
    p.add_argument("--external")
    p.add_argument("--out")

    p = add("enrich", _cmd_enrich, help="run the full pipeline for one property")
    p.add_argument("--config", required=True)
    p.add_argument("--property", required=True)
    p.add_argument("--class", dest="entity_class")
    p.add_argument("--external")
    p.add_argument("--out-dir")
    p.add_argument("--no-timings", action="store_true")

    p = add("batch", _cmd_batch, help="run the pipeline for many properties")
    p.add_argument("--config", required=True)
    p.add_argument("--properties", help="comma-separated property ids")
    p.add_argument("--properties-file")
    p.add_argument("--class", dest="entity_class")
    p.add_argument("--out-dir")
    p.add_argument("--no-timings", action="store_true")

    p = add("consistency", _cmd_consistency, help="agreement on overlapping subjects")
    p.add_argument("--config", required=True)
    p.add_argument("--property", required=True)
    p.add_argument("--granularity", choices=("year", "day"))
    p.add_argument("--class", dest="entity_class")
    p.add_argument("--external")
    p.add_argument("--out-dir")

    p = add("report", _cmd_report, help="re-render a JSON report")
    p.add_argument("--results", required=True)
    p.add_argument("--format", choices=("tsv", "json"), default="tsv")
    p.add_argument("--no-timings", action="store_true")
    p.add_argument("--out")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.handler(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (DataFormatError, OSError, ValueError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
