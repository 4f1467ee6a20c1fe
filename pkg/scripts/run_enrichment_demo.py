#!/usr/bin/env python3
"""End-to-end demo on a small company/industry fixture.

Builds a target graph with one company missing its industry value and an
external graph that knows it, writes everything to a workspace directory,
then drives the CLI: align -> enrich -> consistency. Inspect the workspace
afterwards to see every intermediate file.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from kgenrich.cli import main as cli_main
from kgenrich.store import Graph, Literal, write_edge_tsv

CONFIG = """\
graphs:
  target: {path: target.tsv, tag: wd}
  externals:
    - {path: external.tsv, tag: dbp}
mappings:
  dbp: {link_property: sitelink, prefix: "dbr:"}
alignment: {max_path_length: 1, similarity_threshold: 0.9, top_k: 10}
validation: {constraints: constraints.tsv, cutoff_year: 2022}
gaps: {type_property: P31}
output: {directory: out, format: tsv}
"""

CONSTRAINTS = (
    "#mode=both\n"
    "property\tallowed_class\n"
    + "".join(f"P452\t{c}\n"
              for c in ("Q8148", "Q268592", "Q8187769", "Q3958441", "Q121359"))
)


def build_target() -> Graph:
    g = Graph("wd")
    companies = [f"Q100{i}" for i in range(1, 7)]
    for i, company in enumerate(companies):
        g.add_edge(company, "P31", "Q783794")
        g.add_edge(company, "sitelink", Literal.string(f"Company{'ABCDEF'[i]}"))
    for i in range(1, 6):
        industry = f"Q200{i}"
        g.add_edge(industry, "P31", "Q8148")
        g.add_edge(industry, "sitelink", Literal.string(f"Industry{'ABCDE'[i - 1]}"))
        g.add_edge(companies[i - 1], "P452", industry)
    for company, year in zip(companies[:3], (1990, 1985, 2001)):
        g.add_edge(company, "P571", Literal.date(year))
    g.add_edge("P452", "label", Literal.string("industry"))
    g.add_edge("P571", "label", Literal.string("inception"))
    g.add_edge("Q783794", "label", Literal.string("company"))
    return g


def build_external() -> Graph:
    g = Graph("dbp")
    for company, industry in zip("ABCDEF", "ABCDEB"):
        g.add_edge(f"dbr:Company{company}", "dbp:industry", f"dbr:Industry{industry}")
    for company, year in zip("ABC", (1990, 1985, 2001)):
        g.add_edge(f"dbr:Company{company}", "dbp:founded", Literal.date(year))
    g.add_edge("dbr:CompanyA", "dbp:product", "dbr:IndustryA")
    g.add_edge("dbp:industry", "label", Literal.string("industry"))
    return g


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--workspace", default="demo_workspace")
    args = parser.parse_args()

    ws = Path(args.workspace)
    ws.mkdir(parents=True, exist_ok=True)
    write_edge_tsv(build_target(), ws / "target.tsv")
    write_edge_tsv(build_external(), ws / "external.tsv")
    (ws / "constraints.tsv").write_text(CONSTRAINTS)
    (ws / "config.yaml").write_text(CONFIG)
    cfg = str(ws / "config.yaml")

    print("== candidate property paths for P452 (industry) ==")
    cli_main(["align", "--config", cfg, "--property", "P452"])

    print("\n== enrich P452 for companies (Q783794) ==")
    code = cli_main(["enrich", "--config", cfg, "--property", "P452",
                     "--class", "Q783794", "--out-dir", str(ws / "out")])
    if code != 0:
        return code
    print("\nvalidated statements:")
    print((ws / "out" / "statements.tsv").read_text())

    print("== agreement with existing values (overlap mode) ==")
    cli_main(["consistency", "--config", cfg, "--property", "P452",
              "--class", "Q783794", "--out-dir", str(ws / "out")])

    print(f"\nworkspace written to {ws}/ (see out/ for reports)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
