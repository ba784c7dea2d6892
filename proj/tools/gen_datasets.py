#!/usr/bin/env python3
"""Regenerates the CSV files under models/data/ (seeded, reproducible)."""

import csv
import random
from pathlib import Path

DATA = Path(__file__).resolve().parent.parent / "models" / "data"


def ddos(rng):
    # Inter-arrival gap in steps and its change from the previous gap.
    rows = []
    for i in range(200):
        attack = i % 2
        gap = rng.randint(1, 3) if attack else rng.randint(6, 16)
        jitter = round(rng.uniform(0.0, 3.0), 3)
        rows.append((gap, jitter, attack))
    rng.shuffle(rows)
    return ["gap", "jitter", "attack"], rows


def thermostat(rng):
    rows = []
    for _ in range(120):
        outdoor = round(rng.uniform(-10.0, 20.0), 2)
        setpoint = round(rng.uniform(18.0, 23.0), 1)
        power = round(0.8 * (setpoint - outdoor) + 1.5 + rng.gauss(0.0, 0.4), 3)
        rows.append((outdoor, setpoint, power))
    return ["outdoor", "setpoint", "power"], rows


def write(name, header, rows):
    with open(DATA / name, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


if __name__ == "__main__":
    DATA.mkdir(parents=True, exist_ok=True)
    write("ddos.csv", *ddos(random.Random(7)))
    write("thermostat.csv", *thermostat(random.Random(11)))
