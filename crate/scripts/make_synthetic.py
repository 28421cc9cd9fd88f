#!/usr/bin/env python3
"""Regenerate the bundled synthetic data in crates/core/data.

Writes 10 day-ahead price days (EUR/MWh, several with negative midday hours)
and 20 household net-demand days (kW, load minus PV) at hourly resolution.
Output is fully determined by SEED.

    python3 scripts/make_synthetic.py
"""

import math
import random
from pathlib import Path

SEED = 20240611
HOURS = 24
DATA = Path(__file__).resolve().parent.parent / "crates" / "core" / "data"


def write_series(path, values):
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w") as f:
        f.write("t,value\n")
        for t, v in enumerate(values, start=1):
            f.write(f"{t},{v:.2f}\n")


def price_day(rng, day):
    base = rng.uniform(35.0, 70.0)
    evening = rng.uniform(20.0, 60.0)
    # windy-and-sunny days: a broad, noisy midday trough well below zero
    negative = day % 3 != 1
    depth = rng.uniform(60.0, 120.0) if negative else rng.uniform(10.0, 40.0)
    width = rng.uniform(14.0, 28.0) if negative else rng.uniform(4.0, 8.0)
    noise = 15.0 if negative else 3.0
    out = []
    for h in range(HOURS):
        p = base
        p += evening * math.exp(-((h - 19) ** 2) / 5.0)
        p -= depth * math.exp(-((h - 13) ** 2) / width)
        p += rng.uniform(-noise, noise)
        out.append(p)
    return out


def net_demand_day(rng):
    load_level = rng.uniform(0.4, 1.2)
    pv_peak = rng.uniform(1.5, 6.0) if rng.random() < 0.8 else rng.uniform(0.2, 1.0)
    out = []
    for h in range(HOURS):
        load = load_level
        load += 0.8 * math.exp(-((h - 7.5) ** 2) / 3.0)
        load += 1.6 * math.exp(-((h - 19) ** 2) / 6.0)
        load += abs(rng.gauss(0.0, 0.2))
        pv = pv_peak * max(0.0, math.sin(math.pi * (h - 6) / 13.0)) if 6 <= h <= 19 else 0.0
        pv *= rng.uniform(0.7, 1.0)
        out.append(load - pv)
    return out


def main():
    rng = random.Random(SEED)
    for day in range(1, 11):
        write_series(DATA / "prices" / f"day{day:02}.csv", price_day(rng, day))
    for day in range(1, 21):
        write_series(DATA / "net_demand" / f"house{day:02}.csv", net_demand_day(rng))


if __name__ == "__main__":
    main()
