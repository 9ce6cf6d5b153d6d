"""Run each CLI command, validate the JSON report against the shipped schema,
and check the key order and the exit code."""

import json
import subprocess
import sys
from pathlib import Path

try:
    import jsonschema
except ImportError:
    print("jsonschema not installed; skipping")
    sys.exit(77)

KEY_ORDER = ["name", "L", "l_max_data", "sup_residual", "rel_residual", "passed", "tolerance"]

RUNS = [
    ("kr", ["kr", "--lmax", "16", "--t-end", "0.01"], 0),
    ("flow", ["flow", "--lmax", "8", "--t-end", "0.05"], 0),
    ("blowup", ["flow", "--lmax", "6", "--t-end", "0.6"], 3),
    ("convergence", ["convergence", "--lmax-list", "16,24"], 0),
    # the mutation run produces precondition failures, hence null residuals
    ("mutant", ["verify", "--lmax", "16", "--inject-z-bug"], 1),
]


def main() -> int:
    cli, schema_path, out_dir = sys.argv[1], Path(sys.argv[2]), Path(sys.argv[3])
    schema = json.loads(schema_path.read_text())
    validator = jsonschema.Draft202012Validator(schema)
    failures = 0
    for tag, args, want in RUNS:
        report = out_dir / f"schema_{tag}.json"
        report.unlink(missing_ok=True)
        code = subprocess.run([cli, *args, "--report", str(report)], capture_output=True).returncode
        doc = json.loads(report.read_text())
        errors = [e.message for e in validator.iter_errors(doc)]
        order_ok = all(list(r.keys()) == KEY_ORDER for r in doc["reports"])
        ok = code == want and not errors and order_ok
        if tag == "blowup":
            ok = ok and "failure" in doc and doc["all_passed"] is False
        if tag == "mutant":
            ok = ok and any(r["rel_residual"] is None for r in doc["reports"])
        print(f"{'PASS' if ok else 'FAIL'} {tag}: exit {code} (want {want}), "
              f"{len(errors)} schema errors, key order {'ok' if order_ok else 'wrong'}")
        for e in errors:
            print("   ", e)
        failures += not ok
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
