"""Checks the delayed-gain sweep: every point runs and has a positive fitted rate."""

import csv
import sys


def main(path):
    with open(path) as f:
        rows = [line for line in f if not line.startswith("#")]
    table = list(csv.DictReader(rows, delimiter="\t"))
    problems = []
    if len(table) != 3:
        problems.append(f"expected 3 rows, got {len(table)}")
    for row in table:
        label = f"mu2 = {row['problem.mu2']}"
        if row["status"] != "ok":
            problems.append(f"{label}: status {row['status']}")
        elif not float(row["k"]) > 0.0:
            problems.append(f"{label}: k = {row['k']}")
        else:
            print(f"{label}: k = {float(row['k']):.4f}, r2 = {float(row['r2']):.6f}")
    for p in problems:
        print("FAIL:", p)
    return 1 if problems else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1]))
