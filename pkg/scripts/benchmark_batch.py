#!/usr/bin/env python3
"""Batch throughput benchmark on a synthetic 100k-edge external graph.

Generates 20 properties' worth of known pairs, gaps, and noise, runs the
full batch pipeline, and prints per-stage runtime statistics (average /
median / std across properties).
"""

from __future__ import annotations

import argparse
import random
import statistics
import sys
import time

from kgenrich.align import AlignConfig
from kgenrich.config import (GapSettings, GraphSpec, MappingSpec, OutputSettings,
                             PipelineConfig)
from kgenrich.pipeline import TIMING_KEYS, batch_enrich
from kgenrich.store import Graph, Literal
from kgenrich.validate import ValidationSettings, ValueTypeConstraint


def build_fixture(n_entities, n_values, n_props, knowns, gaps, edge_target, seed):
    rng = random.Random(seed)
    target = Graph("wd")
    external = Graph("dbp")
    for i in range(n_entities):
        target.add_edge(f"E{i}", "P31", "CLS")
        target.add_edge(f"E{i}", "sitelink", Literal.string(f"X{i}"))
    for j in range(n_values):
        target.add_edge(f"V{j}", "P31", "GOODT" if j % 5 else "BADT")
        target.add_edge(f"V{j}", "sitelink", Literal.string(f"Y{j}"))

    properties = [f"P9{k:02d}" for k in range(n_props)]
    constraints = {}
    for k, prop in enumerate(properties):
        target.add_edge(prop, "label", Literal.string(f"prop{k}"))
        constraints[prop] = ValueTypeConstraint(prop, frozenset({"GOODT"}))
        for idx, ent in enumerate(rng.sample(range(n_entities), knowns + gaps)):
            value = (ent + k) % n_values
            external.add_edge(f"dbr:X{ent}", f"dbp:prop{k}", f"dbr:Y{value}")
            if idx < knowns:
                target.add_edge(f"E{ent}", prop, f"V{value}")

    noise_props = [f"dbp:noise{m}" for m in range(30)]
    nodes = ([f"dbr:X{i}" for i in range(n_entities)]
             + [f"dbr:Y{j}" for j in range(n_values)]
             + [f"dbr:N{m}" for m in range(2000)])
    while external.edge_count < edge_target:
        external.add_edge(rng.choice(nodes), rng.choice(noise_props), rng.choice(nodes))
    return target, external, properties, constraints


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--entities", type=int, default=3000)
    parser.add_argument("--values", type=int, default=500)
    parser.add_argument("--properties", type=int, default=20)
    parser.add_argument("--knowns", type=int, default=400)
    parser.add_argument("--gaps", type=int, default=150)
    parser.add_argument("--edges", type=int, default=100_000)
    parser.add_argument("--max-path-length", type=int, default=2)
    parser.add_argument("--seed", type=int, default=99)
    args = parser.parse_args()

    print(f"building fixture ({args.edges} external edges)...")
    target, external, properties, constraints = build_fixture(
        args.entities, args.values, args.properties,
        args.knowns, args.gaps, args.edges, args.seed)
    print(f"target: {target.edge_count} edges; external: {external.edge_count} edges")

    cfg = PipelineConfig(
        target=GraphSpec(path="", tag="wd"),
        externals=[GraphSpec(path="", tag="dbp")],
        mappings={"dbp": MappingSpec(link_property="sitelink", prefix="dbr:")},
        alignment=AlignConfig(max_path_length=args.max_path_length),
        validation=ValidationSettings(),
        gaps=GapSettings(),
        output=OutputSettings(),
    )
    started = time.monotonic()
    batch = batch_enrich(target, [external], properties, cfg,
                         entity_class="CLS", constraints=constraints)
    elapsed = time.monotonic() - started

    print(f"\nbatch of {len(batch.rows)} property runs in {elapsed:.2f}s; "
          f"{len(batch.statements())} validated statements; "
          f"median novel per property: {batch.median_novel}")
    print(f"\n{'stage':<24}{'average':>10}{'median':>10}{'std':>10}")
    for key in TIMING_KEYS:
        samples = [row.timings.get(key, 0.0) for row in batch.rows]
        std = statistics.pstdev(samples) if len(samples) > 1 else 0.0
        print(f"{key:<24}{statistics.mean(samples):>10.2f}"
              f"{statistics.median(samples):>10.2f}{std:>10.2f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
