#!/usr/bin/env python3
"""Build the bundled schema.org vocabulary snapshot.

Input: a schema.org release directory containing
schemaorg-current-http-types.csv and schemaorg-current-http-properties.csv
(release 12.0 as shipped in the `schemaorg` PyPI package).

Only core terms are kept (pending/attic/extension terms dropped). The Event
hierarchy is pinned to its 2016 shape: EventSeries, Hackathon and
UserInteraction (with all descendants) are removed.
"""
import csv
import json
import sys

RELEASE = "12.0"
REMOVED_ROOTS = {
    "http://schema.org/EventSeries",
    "http://schema.org/Hackathon",
    "http://schema.org/UserInteraction",
}


def split(cell):
    return [x.strip() for x in cell.split(",") if x.strip()]


def main(release_dir, out_path):
    types = list(csv.DictReader(open(f"{release_dir}/schemaorg-current-http-types.csv")))
    props = list(csv.DictReader(open(f"{release_dir}/schemaorg-current-http-properties.csv")))
    core_types = {r["id"]: r for r in types if not r["isPartOf"]}
    children = {}
    for iri, r in core_types.items():
        for p in split(r["subTypeOf"]):
            children.setdefault(p, []).append(iri)
    removed = set()
    stack = list(REMOVED_ROOTS)
    while stack:
        t = stack.pop()
        if t in removed:
            continue
        removed.add(t)
        stack.extend(children.get(t, []))
    kept = {iri for iri in core_types if iri not in removed}
    out_types = []
    for iri in sorted(kept):
        parents = [p for p in split(core_types[iri]["subTypeOf"]) if p in kept]
        out_types.append({"iri": iri, "parents": parents})
    out_props = []
    for r in sorted(props, key=lambda r: r["id"]):
        if r["isPartOf"]:
            continue
        out_props.append({
            "iri": r["id"],
            "domain": [d for d in split(r["domainIncludes"]) if d in kept],
            "range": [d for d in split(r["rangeIncludes"]) if d in kept],
        })
    snapshot = {
        "version": f"schema.org-{RELEASE}-core/events-2016",
        "types": out_types,
        "properties": out_props,
    }
    with open(out_path, "w") as f:
        json.dump(snapshot, f, indent=0, separators=(",", ":"))
        f.write("\n")
    print(f"{len(out_types)} types, {len(out_props)} properties -> {out_path}")


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
