#!/usr/bin/env python3
"""Run every subcommand once on a small scenario and validate the JSON it writes."""
import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema

SCENARIO = {
    "p": 20, "T": 1200, "seed": 17, "sample_rate_hz": 1000,
    "events": [{"kind": "spike", "tau": 600, "channels": [1, 2, 3, 4, 5, 6, 7, 8],
                "strength": 800}],
}
NULL_CONFIG = {"validation": {"p": 10, "n1": 40, "n2": 40, "esd_p": 20, "esd_n1": 100,
                              "esd_n2": 100}}


def check(schema_dir, name, doc_path):
    schema = json.loads((schema_dir / f"{name}.schema.json").read_text())
    doc = json.loads(pathlib.Path(doc_path).read_text())
    jsonschema.Draft202012Validator(schema).validate(doc)
    print(f"ok {name}: {doc_path}")


def main(binary, schema_dir):
    schema_dir = pathlib.Path(schema_dir)
    with tempfile.TemporaryDirectory() as tmp:
        tmp = pathlib.Path(tmp)
        sc = tmp / "scenario.json"
        sc.write_text(json.dumps(SCENARIO))
        check(schema_dir, "scenario", sc)
        data = tmp / "data.csv"

        def run(*args):
            subprocess.run([binary, *map(str, args)], check=True)

        run("simulate", "--scenario", sc, "--out", data)
        run("screen", "--data", data, "--out-dir", tmp / "screen")
        check(schema_dir, "report", tmp / "screen" / "report.json")
        for method in ("dele", "deht", "mp"):
            out = tmp / method
            run("detect", "--data", data, "--method", method, "--truth", tmp / "data.truth.json",
                "--sample-rate", 1000, "--out-dir", out)
            check(schema_dir, "report", out / "report.json")
        cfg = tmp / "null.json"
        cfg.write_text(json.dumps(NULL_CONFIG))
        run("validate-null", "--config", cfg, "--reps", 100, "--out-dir", tmp / "null")
        check(schema_dir, "calibration", tmp / "null" / "calibration.json")
        run("bench", "--data", data, "--runs", 1, "--out-dir", tmp / "bench")
        check(schema_dir, "timings", tmp / "bench" / "timings.json")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1], sys.argv[2]))
