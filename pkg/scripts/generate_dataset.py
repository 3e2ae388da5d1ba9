#!/usr/bin/env python3
"""Generate the bundled stand-in student dataset (data/students.csv).

The original course-outcome survey data is not redistributable here, so the
repository ships a synthetic stand-in with the same documented shape: 287
rows, 183 pass / 104 fail, 20 integer-coded raw feature columns of which
"College" and "High School (Village)" carry no signal and are dropped by
default, leaving 18 model inputs.

Labels are the top 183 rows of a noisy weighted feature score, so the task is
learnable but not separable: a handful of boundary students are mislabelled
relative to their features, capping attainable accuracy in the high 90s.

Fully deterministic; rerunning reproduces the file byte for byte.
"""

import argparse
import csv
import os

import numpy as np

SEED = 287287
N_ROWS = 287
N_PASS = 183

COLUMNS = [
    # (name, low, high, score weight); weight 0 means pure noise
    ("Gender", 1, 2, 0.1),
    ("Age", 18, 25, -0.1),
    ("College", 1, 6, 0.0),
    ("Department", 1, 8, 0.1),
    ("Stage", 1, 4, 0.1),
    ("High School (Town)", 0, 1, 0.2),
    ("High School (Village)", 0, 1, 0.0),
    ("Father Education", 1, 5, 0.5),
    ("Mother Education", 1, 5, 0.5),
    ("Family Income", 1, 4, 0.4),
    ("Family Size", 1, 10, -0.2),
    ("Study Hours", 0, 5, 1.6),
    ("Attendance", 1, 5, 1.8),
    ("English Background", 1, 5, 1.5),
    ("Prior GPA", 200, 400, 1.7),
    ("Entry Score", 50, 100, 1.2),
    ("Tutor Experience", 1, 20, 0.7),
    ("Tutor Qualification", 1, 4, 0.6),
    ("Motivation", 1, 5, 1.0),
    ("Absences", 0, 20, -1.6),
]

NOISE_SIGMA = 0.55


def generate():
    rng = np.random.default_rng(SEED)
    values = np.column_stack(
        [rng.integers(low, high + 1, size=N_ROWS) for _, low, high, _ in COLUMNS]
    )
    spans = np.array([high - low for _, low, high, _ in COLUMNS], dtype=float)
    lows = np.array([low for _, low, high, _ in COLUMNS], dtype=float)
    weights = np.array([w for _, _, _, w in COLUMNS])

    scaled = (values - lows) / spans
    score = scaled @ weights + rng.normal(0.0, NOISE_SIGMA, size=N_ROWS)
    threshold = np.sort(score)[::-1][N_PASS - 1]
    labels = np.where(score >= threshold, "pass", "fail")
    assert int(np.sum(labels == "pass")) == N_PASS
    return values, labels


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    default_out = os.path.join(
        os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
        "data", "students.csv",
    )
    parser.add_argument("--out", default=default_out)
    args = parser.parse_args()

    values, labels = generate()
    os.makedirs(os.path.dirname(args.out), exist_ok=True)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([name for name, *_ in COLUMNS] + ["Result"])
        for row, label in zip(values, labels):
            writer.writerow([int(v) for v in row] + [label])
    print(f"wrote {args.out}: {len(values)} rows, "
          f"{int(np.sum(labels == 'pass'))} pass / {int(np.sum(labels == 'fail'))} fail")


if __name__ == "__main__":
    main()
