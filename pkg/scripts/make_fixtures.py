"""Regenerate the bundled example files under src/icebreaker/fixtures."""

import json
from pathlib import Path

import numpy as np

from icebreaker.data import AnnualSeries, MonthlySeries
from icebreaker.ingest import format_annual_csv, format_monthly_fixedwidth
from icebreaker.rng import normals, rng_stream

OUT = Path(__file__).resolve().parents[1] / "src" / "icebreaker" / "fixtures"


def rounded(x):
    return np.round(x, 3)


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    # mean 0 through 1850, mean 3 from 1851 on
    y = normals(rng_stream(7, 0), 100) + np.r_[np.zeros(50), np.full(50, 3.0)]
    step = AnnualSeries("step", 1801, rounded(y))
    (OUT / "step.csv").write_text(format_annual_csv(step))

    for k in range(5):
        s = AnnualSeries("iid", 1701, rounded(normals(rng_stream(11, k), 200)))
        (OUT / f"iid{k}.csv").write_text(format_annual_csv(s))

    e = normals(rng_stream(13, 0), 400)
    x = np.empty_like(e)
    x[0] = e[0]
    for t in range(1, e.size):
        x[t] = 0.5 * x[t - 1] + e[t]
    (OUT / "ar1.csv").write_text(format_annual_csv(AnnualSeries("ar1", 1601, rounded(x[100:]))))

    (OUT / "constant.csv").write_text(format_annual_csv(AnnualSeries("constant", 1801, np.full(60, 1.5))))

    # monthly table, 1751-1850, seasonal cycle plus noise, two sentinels
    months = np.arange(12)
    cycle = 9.0 - 10.0 * np.cos(2 * np.pi * (months + 0.5) / 12)
    vals = cycle + normals(rng_stream(17, 0), (100, 12), scale=1.5)
    vals = np.round(vals, 1)
    miss = np.zeros_like(vals, dtype=bool)
    miss[10, 1] = miss[40, 7] = True
    vals[miss] = -99.9
    m = MonthlySeries("monthly", 1751, vals, miss)
    (OUT / "monthly.dat").write_text("Synthetic monthly temperatures, degrees C\n" + format_monthly_fixedwidth(m))

    (OUT / "scenario.txt").write_text(
        "# 0.5 SD step at the midpoint of 200 years\n"
        "n = 200\nsegments = 100:0, 100:0.5\ndetector = BP\nreplicates = 100\nseed = 2014\n"
    )
    cfg = {
        "seed": 1,
        "output_dir": "report",
        "datasets": [{"name": "step", "path": "step.csv"}],
        "analyses": [
            "describe",
            {"id": "anova", "params": {"block_len": 20, "iterations": 2000, "burnin": 500}},
            {"id": "breaks", "params": {"nperm": 200}},
            {"id": "ar1", "params": {"end_year": None}},
            {"id": "mds", "params": {"windows": "full", "bootstrap": 100}},
            "smooth",
            {"id": "slutsky", "params": {"n": 200}},
        ],
    }
    (OUT / "report.json").write_text(json.dumps(cfg, indent=2) + "\n")


if __name__ == "__main__":
    main()
