"""Deterministic miniature datasets, schema-compatible with the evaluation
sets: a 94-column product table, an 8-column student score table and a
29-column flight table, all desk-scale (<= 1,000 rows). An insurance-like
table supports the stepwise refinement scenario.
"""

from __future__ import annotations

import csv
import random
from pathlib import Path

DATASET_NAMES = ("products", "students", "flights")

_STUDENT_COLUMNS = [
    "gender",
    "race/ethnicity",
    "parental level of education",
    "lunch",
    "test preparation course",
    "math score",
    "reading score",
    "writing score",
]

_EDUCATION = [
    "some high school",
    "high school",
    "some college",
    "associate's degree",
    "bachelor's degree",
    "master's degree",
]

_CARRIERS = ["AA", "UA", "DL", "WN", "US", "NW", "CO", "B6"]
_AIRPORTS = ["ATL", "ORD", "DFW", "DEN", "LAX", "PHX", "IAH", "LAS", "DTW", "SFO", "EWR", "MCO"]

_FLIGHT_COLUMNS = [
    "Year", "Month", "DayofMonth", "DayOfWeek", "DepTime", "CRSDepTime",
    "ArrTime", "CRSArrTime", "UniqueCarrier", "FlightNum", "TailNum",
    "ActualElapsedTime", "CRSElapsedTime", "AirTime", "ArrDelay", "DepDelay",
    "Origin", "Dest", "Distance", "TaxiIn", "TaxiOut", "Cancelled",
    "CancellationCode", "Diverted", "CarrierDelay", "WeatherDelay",
    "NASDelay", "SecurityDelay", "LateAircraftDelay",
]


def _clip(value: float, lo: int, hi: int) -> int:
    return int(max(lo, min(hi, round(value))))


def write_students(path: str | Path, rows: int = 1000, seed: int = 7) -> Path:
    rng = random.Random(seed)
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(_STUDENT_COLUMNS)
        for _ in range(rows):
            prepared = rng.random() < 0.35
            base = rng.gauss(66, 15)
            bump = 6 if prepared else 0
            writer.writerow(
                [
                    rng.choice(["female", "male"]),
                    f"group {rng.choice('ABCDE')}",
                    rng.choice(_EDUCATION),
                    rng.choice(["standard", "free/reduced"]),
                    "completed" if prepared else "none",
                    _clip(base + bump + rng.gauss(0, 6), 0, 100),
                    _clip(base + bump + rng.gauss(2, 6), 0, 100),
                    _clip(base + bump + rng.gauss(1, 6), 0, 100),
                ]
            )
    return path


def write_products(path: str | Path, rows: int = 400, seed: int = 11) -> Path:
    rng = random.Random(seed)
    path = Path(path)
    columns = ["id"] + [f"feat_{i}" for i in range(1, 94)]
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for i in range(1, rows + 1):
            feats = []
            for _ in range(93):
                feats.append(int(rng.expovariate(0.7)) if rng.random() < 0.55 else 0)
            writer.writerow([i] + feats)
    return path


def write_flights(path: str | Path, rows: int = 600, seed: int = 23) -> Path:
    rng = random.Random(seed)
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(_FLIGHT_COLUMNS)
        for i in range(rows):
            month = rng.randint(1, 12)
            crs_dep = rng.randint(6, 21) * 100 + rng.choice([0, 15, 30, 45])
            dep_delay = _clip(rng.gauss(9, 22), -12, 240)
            arr_delay = _clip(dep_delay + rng.gauss(-1, 11), -35, 260)
            distance = rng.choice([212, 337, 451, 594, 733, 862, 1024, 1245, 1605, 1946, 2475])
            airtime = _clip(distance / 7.5 + rng.gauss(0, 8), 25, 400)
            taxi_in = rng.randint(2, 14)
            taxi_out = rng.randint(6, 30)
            elapsed = airtime + taxi_in + taxi_out
            cancelled = 1 if rng.random() < 0.03 else 0
            origin = rng.choice(_AIRPORTS)
            dest = rng.choice([a for a in _AIRPORTS if a != origin])
            late = max(0, arr_delay)
            carrier_delay = rng.randint(0, late) if late else 0
            writer.writerow(
                [
                    2008,
                    month,
                    rng.randint(1, 28),
                    rng.randint(1, 7),
                    crs_dep + dep_delay,
                    crs_dep,
                    crs_dep + elapsed + arr_delay,
                    crs_dep + elapsed,
                    rng.choice(_CARRIERS),
                    1000 + i,
                    f"N{rng.randint(100, 999)}{rng.choice('ABCDEFGH')}{rng.choice('ABCDEFGH')}{i}",
                    elapsed + (arr_delay - dep_delay),
                    elapsed,
                    airtime,
                    arr_delay,
                    dep_delay,
                    origin,
                    dest,
                    distance,
                    taxi_in,
                    taxi_out,
                    cancelled,
                    rng.choice("ABC") if cancelled else "NA",
                    0,
                    carrier_delay,
                    0,
                    max(0, late - carrier_delay),
                    0,
                    0,
                ]
            )
    return path


def write_insurance(path: str | Path, rows: int = 300, seed: int = 5) -> Path:
    rng = random.Random(seed)
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["age", "sex", "bmi", "children", "smoker", "region", "charges"])
        for _ in range(rows):
            age = rng.randint(18, 64)
            bmi = round(rng.uniform(16.0, 45.0), 1)
            smoker = rng.random() < 0.2
            base = 250 * age + 400 * (bmi - 25)
            charge = base + (24000 if smoker else 0) + rng.gauss(0, 1800)
            writer.writerow(
                [
                    age,
                    rng.choice(["female", "male"]),
                    bmi,
                    rng.randint(0, 5),
                    "yes" if smoker else "no",
                    rng.choice(["northeast", "northwest", "southeast", "southwest"]),
                    round(max(1000.0, charge), 2),
                ]
            )
    return path


def write_pack(directory: str | Path) -> dict[str, Path]:
    """All three benchmark datasets; returns name -> path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    return {
        "products": write_products(directory / "products.csv"),
        "students": write_students(directory / "students.csv"),
        "flights": write_flights(directory / "flights.csv"),
    }
