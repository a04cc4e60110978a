#!/usr/bin/env python3
"""End-to-end checks of the scoreci binary.

  check_cli.py BINARY SCHEMA_DIR            fast contract checks
  check_cli.py BINARY SCHEMA_DIR --examples  Monte Carlo checks of documented CLI behaviour
"""

import argparse
import csv
import json
import math
import pathlib
import random
import statistics
import subprocess
import sys
import tempfile

import jsonschema
import referencing

# The Monte Carlo examples sample with a finer Langevin step than the default
# h = 0.1, whose discretization widens the generated conditionals by ~20%.
FINE = ["--h", "0.02", "--steps", "1000"]
FAST = ["--epochs", "2", "--hidden", "8", "--B", "19", "--steps", "10", "--permutations", "19"]

failures = []


def check(cond, what):
    print(("ok    " if cond else "FAIL  ") + what)
    if not cond:
        failures.append(what)


def load_registry(schema_dir):
    resources = []
    for path in pathlib.Path(schema_dir).glob("*.schema.json"):
        schema = json.loads(path.read_text())
        resources.append((schema["$id"], referencing.Resource.from_contents(schema)))
    return referencing.Registry().with_resources(resources)


def validate(registry, schema_id, doc, what):
    schema = registry.contents(schema_id)
    try:
        jsonschema.Draft202012Validator(schema, registry=registry).validate(doc)
        check(True, what)
    except jsonschema.ValidationError as e:
        check(False, f"{what}: {e.message}")


def run(binary, *args, env=None):
    return subprocess.run([binary, *args], capture_output=True, text=True, env=env)


def gaussian_csv(path, n, rng):
    # x | z ~ N(z, 1), y independent noise.
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["x_0", "y_0", "z_0"])
        for _ in range(n):
            z = rng.gauss(0, 1)
            w.writerow([repr(z + rng.gauss(0, 1)), repr(rng.gauss(0, 1)), repr(z)])


def nonlinear_csv(path, n, rng):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["x_0", "y_0", "z_0", "z_1"])
        for _ in range(n):
            z0, z1 = rng.gauss(0, 1), rng.gauss(0, 1)
            x = math.tanh(2 * z0) + 0.5 * z1 * z1 + 0.5 * rng.gauss(0, 1)
            w.writerow([repr(x), repr(rng.gauss(0, 1)), repr(z0), repr(z1)])


def fast_checks(binary, registry, tmp):
    data = tmp / "chain.csv"
    r = run(binary, "synth", "chain", "--n", "200", "--dz", "2", "--seed", "3", "--output", str(data))
    check(r.returncode == 0 and data.exists(), "synth writes a dataset")

    a = run(binary, "test", str(data), "--seed", "42", *FAST)
    b = run(binary, "test", str(data), "--seed", "42", *FAST)
    check(a.returncode == 0, "test exits 0")
    check(a.stdout == b.stdout, "test --seed 42 twice gives byte-identical JSON")
    report = json.loads(a.stdout)
    validate(registry, "report.schema.json", report, "report validates")
    del report["p_value"]
    validator = jsonschema.Draft202012Validator(registry.contents("report.schema.json"), registry=registry)
    check(not validator.is_valid(report), "report without p_value is rejected by the schema")

    out1, out2 = tmp / "o1", tmp / "o2"
    for out in (out1, out2):
        r = run(binary, "test", str(data), "--seed", "5", "--out", str(out), *FAST)
        check(r.returncode == 0, f"test --out {out.name}")
    for name in ("report.json", "losstrace.csv", "pvalues.csv"):
        p1, p2 = out1 / name, out2 / name
        check(p1.exists() and p1.read_bytes() == p2.read_bytes(), f"{name} written and reproducible")

    r = run(binary, "gof", str(data), "--seed", "1", *FAST)
    check(r.returncode == 0, "gof exits 0")
    doc = json.loads(r.stdout)
    validate(registry, "gof.schema.json", doc, "gof JSON validates")
    check(doc["num_permutations"] == 19, "gof echoes num_permutations")

    r = run(binary, "gen", str(data), "--out", str(tmp / "gen"), "--raw-space", *FAST)
    check(r.returncode == 0, "gen exits 0")
    doc = json.loads(r.stdout)
    validate(registry, "gen.schema.json", doc, "gen JSON validates")
    with open(tmp / "gen" / "ensemble.csv") as f:
        rows = sum(1 for _ in f) - 1
    check(rows == 200 * 19, "ensemble.csv has n * B rows")

    r = run(binary, "bench", "chain", "--dz", "1..2", "--n", "150", "--trials", "2",
            "--out", str(tmp / "bench"), *FAST)
    check(r.returncode == 0, "bench exits 0")
    doc = json.loads(r.stdout)
    validate(registry, "bench.schema.json", doc, "bench JSON validates")
    check(len(doc["summaries"]) == 2, "bench --dz 1..2 gives two summaries")
    check((tmp / "bench" / "pvalues.csv").exists(), "bench writes pvalues.csv")

    bad = tmp / "bad.csv"
    bad.write_text("x_0,z_0\n1,2\n3,4\n")
    r = run(binary, "test", str(bad))
    check(r.returncode == 1 and "y_" in r.stderr, "missing y_ column is a pipeline error naming y_")
    r = run(binary, "test", str(data), "--alpha", "2")
    check(r.returncode == 2, "invalid alpha is a usage error")


def example_checks(binary, tmp):
    rng = random.Random(11)

    # Gaussian oracle: per z-bin moments of exported samples against N(z, 1),
    # over the central bins |z| < 1 where the training data is dense.
    data = tmp / "gauss.csv"
    gaussian_csv(data, 3000, rng)
    r = run(binary, "gen", str(data), "--out", str(tmp / "g"), "--raw-space", "--B", "20",
            "--epochs", "200", "--lr", "1e-3", "--seed", "2", *FINE)
    check(r.returncode == 0, "gen on Gaussian data")
    z = []
    with open(data) as f:
        for row in csv.DictReader(f):
            z.append(float(row["z_0"]))
    bins = {}
    with open(tmp / "g" / "ensemble.csv") as f:
        for row in csv.DictReader(f):
            zi = z[int(row["row_id"])]
            key = math.floor(zi / 0.5)
            if -2 <= key < 2:
                bins.setdefault(key, []).append((zi, float(row["x_0"])))
    for key in sorted(bins):
        residuals = [x - zi for zi, x in bins[key]]
        zbar = statistics.fmean(zi for zi, _ in bins[key])
        mean = statistics.fmean(x for _, x in bins[key])
        var = statistics.pvariance(residuals)
        check(abs(mean - zbar) <= 0.1 * max(1.0, abs(zbar)) and abs(var - 1.0) <= 0.1,
              f"z-bin [{key * 0.5:+.1f}, {key * 0.5 + 0.5:+.1f}): mean {mean:.3f} vs {zbar:.3f}, var {var:.3f}")

    # Well-specified Gaussian data passes GOF in most seeded runs.
    passes = 0
    runs = 20
    for seed in range(runs):
        data = tmp / f"gof{seed}.csv"
        gaussian_csv(data, 1000, random.Random(100 + seed))
        r = run(binary, "gof", str(data), "--seed", str(seed), "--epochs", "200", "--lr", "1e-3", *FINE)
        passes += json.loads(r.stdout)["pass"]
    check(passes >= 0.9 * runs, f"gof passes on {passes}/{runs} Gaussian runs")

    # An under-trained model fits nonlinear data worse.
    trained, short = [], []
    for seed in range(10):
        data = tmp / f"nl{seed}.csv"
        nonlinear_csv(data, 1000, random.Random(200 + seed))
        for epochs, sink in (("100", trained), ("1", short)):
            r = run(binary, "gof", str(data), "--seed", str(seed), "--epochs", epochs, "--lr", "1e-3", *FINE)
            sink.append(json.loads(r.stdout)["p_value"])
    check(statistics.median(short) < statistics.median(trained),
          f"median gof p-value: --epochs 1 {statistics.median(short):.3f} "
          f"< trained {statistics.median(trained):.3f}")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("binary")
    parser.add_argument("schema_dir")
    parser.add_argument("--examples", action="store_true")
    args = parser.parse_args()
    with tempfile.TemporaryDirectory() as d:
        tmp = pathlib.Path(d)
        if args.examples:
            example_checks(args.binary, tmp)
        else:
            fast_checks(args.binary, load_registry(args.schema_dir), tmp)
    if failures:
        print(f"{len(failures)} check(s) failed")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
