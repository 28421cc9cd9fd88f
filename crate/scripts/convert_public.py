#!/usr/bin/env python3
"""Convert locally downloaded public datasets into the bench input layout.

Nothing is fetched here. Download the inputs yourself:

  * Day-ahead prices for bidding zone DK1 from the ENTSO-e Transparency
    Platform (Market > Day-ahead Prices, CSV export, one file per year is
    fine). The export has a time column such as "MTU (CET/CEST)" holding
    "DD.MM.YYYY HH:MM - DD.MM.YYYY HH:MM" and a price column such as
    "Day-ahead Price [EUR/MWh]".
  * The household PV/battery database used for the tracking benchmark:
      - a demand file: one row per hour, a column of household demand (kW)
      - a PV file: one column per day, 24 rows of per-unit PV output
      - a battery file: one row per battery
    Column names differ between releases; override them with the flags below.

Output (default ./public-data):

    prices/YYYY-MM-DD.csv     t,value (EUR/MWh)
    net_demand/dayNNN.csv     t,value (kW), demand minus PV
    batteries.jsonl           one battery per line
    scheduling.json           bench config, MILP/HCHLP/TLP/TLPu
    tracking.json             bench config, MIQP/HCHLP/TLPSOC

Example:

    python3 scripts/convert_public.py \\
        --prices entsoe_dk1_2023.csv entsoe_dk1_2024.csv \\
        --demand demand.csv --pv pv.csv --batteries batteries.csv
    STORAGE_CUTS_PUBLIC_DATA=public-data cargo test --release --test acceptance
"""

import argparse
import csv
import json
import sys
from datetime import datetime
from pathlib import Path

# DK1 days with negative prices used for the scheduling benchmark
PRICE_DAYS = [
    "2023-07-02",
    "2024-01-01",
    "2024-06-02",
    "2024-06-08",
    "2024-06-09",
    "2024-06-15",
    "2024-06-16",
    "2024-06-28",
    "2024-07-04",
    "2024-07-07",
]
PV_PEAK_KW = 35.0
PV_DAYS = 200
HOURS = 24

BATTERY_FIELDS = ["p_dis_max", "p_ch_max", "soc_min", "soc_max", "eta_c", "eta_d", "soc_init"]


def die(msg):
    print(f"error: {msg}", file=sys.stderr)
    sys.exit(1)


def write_series(path, values):
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["t", "value"])
        for t, v in enumerate(values, start=1):
            w.writerow([t, repr(float(v))])


def read_prices(files, time_col, price_col):
    by_day = {}
    for name in files:
        with open(name, newline="", encoding="utf-8-sig") as f:
            for row in csv.DictReader(f):
                if time_col not in row or price_col not in row:
                    die(f"{name}: expected columns {time_col!r} and {price_col!r}, got {list(row)}")
                start = row[time_col].split(" - ")[0].strip()
                raw = row[price_col].strip()
                if not raw or raw in {"-", "N/A"}:
                    continue
                stamp = datetime.strptime(start, "%d.%m.%Y %H:%M")
                day = stamp.strftime("%Y-%m-%d")
                # sub-hourly exports: keep the first value of each hour
                by_day.setdefault(day, {}).setdefault(stamp.hour, float(raw))
    return by_day


def price_vectors(by_day, days):
    out = {}
    for day in days:
        hours = by_day.get(day)
        if hours is None:
            die(f"no prices for {day}")
        # DST days have 23 or 25 hours; the benchmark uses 24 periods
        values = [hours[h] for h in sorted(hours)][:HOURS]
        if len(values) < HOURS:
            values += [values[-1]] * (HOURS - len(values))
        out[day] = values
    return out


def read_column(name, col):
    with open(name, newline="", encoding="utf-8-sig") as f:
        rows = list(csv.DictReader(f))
    if not rows or col not in rows[0]:
        die(f"{name}: missing column {col!r}")
    return [float(r[col]) for r in rows]


def read_pv_days(name, count):
    with open(name, newline="", encoding="utf-8-sig") as f:
        r = csv.reader(f)
        header = next(r)
        rows = [[float(v) for v in row] for row in r if row]
    if len(rows) != HOURS:
        die(f"{name}: expected {HOURS} hourly rows, found {len(rows)}")
    days = [[row[j] for row in rows] for j in range(len(header))]
    return days[:count]


def read_batteries(name, mapping, delta):
    out = []
    with open(name, newline="", encoding="utf-8-sig") as f:
        for i, row in enumerate(csv.DictReader(f), start=1):
            try:
                b = {field: float(row[mapping[field]]) for field in BATTERY_FIELDS}
            except KeyError as e:
                die(f"{name}: missing column {e} (see --battery-columns)")
            b["delta"] = delta
            b["horizon"] = HOURS
            if not b["soc_min"] <= b["soc_init"] <= b["soc_max"]:
                die(f"{name}: battery {i} starts outside its SoC bounds")
            out.append(b)
    return out


def write_config(path, batteries, instances, problem, presets, output):
    cfg = {
        "battery_files": [batteries],
        "instance_files": [instances],
        "problem": problem,
        "presets": presets,
        "threshold": 1e-4,
        "output": output,
        "parallelism": 1,
        "timing": True,
    }
    path.write_text(json.dumps(cfg, indent=2) + "\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--prices", nargs="+", required=True, help="ENTSO-e day-ahead price CSV exports")
    ap.add_argument("--time-column", default="MTU (CET/CEST)")
    ap.add_argument("--price-column", default="Day-ahead Price [EUR/MWh]")
    ap.add_argument("--demand", required=True, help="hourly household demand CSV")
    ap.add_argument("--demand-column", default="demand")
    ap.add_argument("--pv", required=True, help="per-unit PV CSV, one column per day")
    ap.add_argument("--pv-days", type=int, default=PV_DAYS)
    ap.add_argument("--pv-peak", type=float, default=PV_PEAK_KW, help="installed PV (kW)")
    ap.add_argument("--batteries", required=True, help="battery parameter CSV")
    ap.add_argument(
        "--battery-columns",
        default=",".join(BATTERY_FIELDS),
        help="source column names, in the order " + ",".join(BATTERY_FIELDS),
    )
    ap.add_argument("--delta", type=float, default=1.0, help="period length (h)")
    ap.add_argument("--out", default="public-data")
    args = ap.parse_args()

    cols = args.battery_columns.split(",")
    if len(cols) != len(BATTERY_FIELDS):
        die(f"--battery-columns needs {len(BATTERY_FIELDS)} names")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    for day, values in price_vectors(read_prices(args.prices, args.time_column, args.price_column), PRICE_DAYS).items():
        write_series(out / "prices" / f"{day}.csv", values)

    demand = read_column(args.demand, args.demand_column)
    if len(demand) < HOURS:
        die(f"{args.demand}: fewer than {HOURS} hourly rows")
    pv_days = read_pv_days(args.pv, args.pv_days)
    for i, pv in enumerate(pv_days, start=1):
        start = ((i - 1) * HOURS) % max(len(demand) - HOURS + 1, 1)
        load = demand[start : start + HOURS]
        write_series(out / "net_demand" / f"day{i:03d}.csv", [d - args.pv_peak * p for d, p in zip(load, pv)])

    batteries = read_batteries(args.batteries, dict(zip(BATTERY_FIELDS, cols)), args.delta)
    with (out / "batteries.jsonl").open("w") as f:
        for b in batteries:
            f.write(json.dumps(b) + "\n")

    write_config(out / "scheduling.json", "batteries.jsonl", "prices", "scheduling",
                 ["MILP", "HCHLP", "TLP", "TLPu"], "reports/scheduling.md")
    write_config(out / "tracking.json", "batteries.jsonl", "net_demand", "tracking",
                 ["MIQP", "HCHLP", "TLPSOC"], "reports/tracking.md")
    print(f"{len(PRICE_DAYS)} price days, {len(pv_days)} net-demand days, {len(batteries)} batteries -> {out}")


if __name__ == "__main__":
    main()
