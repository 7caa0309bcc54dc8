#!/usr/bin/env python3
"""Runs the CLI across representative flag sets and validates every JSON
report against the published schema."""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema

V_SERIES = {"series": [{"name": "api", "t": [0, 1, 2, 3, 4], "q": [1, 0.5, 1, 0.3, 0.9]}]}
FIGURE_DOC = {
    "data": [
        {"name": "api", "x": [0, 1, 2, 3, 4], "y": [1, 0.5, 1, 0.3, 0.9]},
        {"note": "styling only"},
    ]
}
TRAPEZOID = {
    "series": [
        {
            "name": "trap",
            "t": list(range(33)),
            "q": [1.0] * 9
            + [1 - 0.5 * i / 8 for i in range(1, 9)]
            + [0.5 + 0.5 * i / 8 for i in range(1, 9)]
            + [1.0] * 8,
        }
    ]
}


def run_case(cli: str, schema: dict, workdir: Path, name: str, input_doc: dict,
             extra_flags: list[str]) -> None:
    input_path = workdir / f"{name}_in.json"
    out_path = workdir / f"{name}_out.json"
    input_path.write_text(json.dumps(input_doc))
    cmd = [cli, "--input", str(input_path), "--out-json", str(out_path), *extra_flags]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    if proc.returncode != 0:
        sys.exit(f"{name}: exit {proc.returncode}\nstderr: {proc.stderr}")
    report = json.loads(out_path.read_text())
    try:
        jsonschema.validate(report, schema)
    except jsonschema.ValidationError as err:
        sys.exit(f"{name}: schema violation at {list(err.absolute_path)}: {err.message}")
    print(f"ok: {name}")


def main() -> None:
    if len(sys.argv) != 3:
        sys.exit("usage: validate_schema.py <cli-binary> <schema.json>")
    cli, schema_path = sys.argv[1], sys.argv[2]
    schema = json.loads(Path(schema_path).read_text())
    jsonschema.Draft7Validator.check_schema(schema)

    with tempfile.TemporaryDirectory(prefix="resil_schema_") as tmp:
        workdir = Path(tmp)
        run_case(cli, schema, workdir, "minimal", V_SERIES, ["--auc"])
        run_case(cli, schema, workdir, "full", V_SERIES, [
            "--auc", "--kernel", "exp", "--half-life", "2", "--threshold", "0.8",
            "--derivatives", "--dips", "--dip-metrics", "all", "--antifragility",
            "--emit-timings", "--filter-delta", "0.01",
        ])
        run_case(cli, schema, workdir, "linreg", TRAPEZOID, [
            "--dips", "linreg", "--smooth", "--dip-metrics", "irm", "--antifragility",
            "--antifragility-metrics", "r,aucd",
        ])
        run_case(cli, schema, workdir, "figure_warnings", FIGURE_DOC, [
            "--format", "figure", "--auc", "--kernel", "inverse", "--kernel-scale", "2",
            "--window", "0:4",
        ])
    print("all reports conform to the schema")


if __name__ == "__main__":
    main()
