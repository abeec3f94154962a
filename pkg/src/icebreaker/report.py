"""Config-driven report: every table and figure analogue in one run."""

from __future__ import annotations

import hashlib
import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path

from . import analyses
from .errors import IcebreakerError
from .ingest import read_series

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
DATA_DIR_ENV = "ICEBREAKER_DATA_DIR"
# execution order; global analyses ignore the dataset list
ORDER = ("describe", "anova", "icc", "breaks", "ar1", "mds", "smooth", "slutsky", "power")
GLOBAL = {"slutsky", "power"}


def resolve_path(path):
    p = Path(path)
    if not p.is_absolute() and not p.exists():
        root = os.environ.get(DATA_DIR_ENV)
        if root:
            p = Path(root) / p
    return p


@dataclass
class Dataset:
    name: str
    path: Path
    format: str = None
    season: str = "raw"


@dataclass
class ReportConfig:
    datasets: list
    analyses: list
    output_dir: Path
    seed: int = 0
    params: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, raw, base_dir=None):
        base = Path(base_dir) if base_dir else Path(".")
        datasets = []
        for d in raw.get("datasets", []):
            path = Path(d["path"])
            if not path.is_absolute() and (base / path).exists():
                path = base / path
            datasets.append(
                Dataset(
                    name=d.get("name") or path.stem,
                    path=resolve_path(path),
                    format=d.get("format"),
                    season=d.get("season", "raw"),
                )
            )
        ids, params = [], {}
        for a in raw.get("analyses", []):
            if isinstance(a, str):
                ids.append(a)
            else:
                ids.append(a["id"])
                params[a["id"]] = dict(a.get("params", {}))
        out = Path(raw.get("output_dir", "report"))
        if not out.is_absolute():
            out = base / out
        cfg = cls(datasets, ids, out, int(raw.get("seed", 0)), params)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path):
        path = Path(path)
        return cls.from_dict(json.loads(path.read_text(encoding="utf-8")), base_dir=path.parent)

    def validate(self):
        unknown = [a for a in self.analyses if a not in ORDER]
        if unknown:
            raise IcebreakerError(f"unknown analyses {unknown}; known: {list(ORDER)}")
        for d in self.datasets:
            if not d.path.exists():
                raise IcebreakerError(f"dataset {d.name!r}: file not found: {d.path}")


def _run_one(analysis, series, params, seed):
    p = dict(params)
    if analysis == "describe":
        return analyses.run_describe(series)
    if analysis == "anova":
        p.setdefault("block_len", 50)
        return analyses.run_anova(series, seed=seed, name="anova", **p)
    if analysis == "icc":
        p.setdefault("block_len", 10)
        p.setdefault("end_year", 1900)
        return analyses.run_anova(series, seed=seed, name="icc", **p)
    if analysis == "breaks":
        return analyses.run_breaks(series, seed=seed, **p)
    if analysis == "ar1":
        end = p.pop("end_year", 1900)
        from .ingest import window

        s = series
        if end is not None and s.first_year <= end < s.last_year:
            s = window(s, s.first_year, end)
        return analyses.run_ar1(s)
    if analysis == "mds":
        wins = p.pop("windows", "paper")
        if wins == "paper":
            wins = analyses.paper_windows(series)
        elif wins == "full":
            wins = None
        else:
            wins = [tuple(w) for w in wins]
        return analyses.run_mds(series, windows=wins, seed=seed, **p)
    if analysis == "smooth":
        if "windows" in p:
            p["windows"] = tuple(p["windows"])
        return analyses.run_smooth(series, **p)
    raise IcebreakerError(f"analysis {analysis!r} has no per-dataset runner")


def _run_global(analysis, params, seed):
    p = dict(params)
    if analysis == "slutsky":
        p.setdefault("seed", seed)
        if "windows" in p:
            p["windows"] = tuple(p["windows"])
        return analyses.run_slutsky(**p)
    if analysis == "power":
        p.setdefault("seed", seed)
        return analyses.run_power_table(**p)
    raise IcebreakerError(analysis)


def run_report(cfg):
    """Execute the configured analyses and write the manifest.

    Returns ``(ok, manifest)``. A failing analysis is recorded and the
    remaining ones still run.
    """
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs, failures = [], []

    def emit(files):
        for name, text in files.items():
            target = out_dir / name
            target.write_text(text, encoding="utf-8", newline="\n")
            outputs.append(
                {"path": name, "sha256": hashlib.sha256(text.encode("utf-8")).hexdigest()}
            )

    loaded = {}
    for d in cfg.datasets:
        try:
            loaded[d.name] = read_series(d.path, d.format, d.season, name=d.name)
        except Exception as exc:  # noqa: BLE001 - recorded in the manifest
            failures.append({"analysis": "load", "dataset": d.name, "error": str(exc)})

    for analysis in [a for a in ORDER if a in cfg.analyses]:
        params = cfg.params.get(analysis, {})
        if analysis in GLOBAL:
            try:
                files = _run_global(analysis, params, cfg.seed)
                emit(files)
            except Exception as exc:  # noqa: BLE001
                log.error("%s failed: %s", analysis, exc)
                failures.append({"analysis": analysis, "dataset": None, "error": str(exc)})
            continue
        for name, series in loaded.items():
            try:
                files = _run_one(analysis, series, params, cfg.seed)
                emit({f"{name}_{k}": v for k, v in files.items()})
            except Exception as exc:  # noqa: BLE001
                log.error("%s on %s failed: %s", analysis, name, exc)
                failures.append({"analysis": analysis, "dataset": name, "error": str(exc)})

    manifest = {
        "schema_version": SCHEMA_VERSION,
        "seed": cfg.seed,
        "datasets": [
            {"name": d.name, "path": str(d.path), "format": d.format, "season": d.season}
            for d in cfg.datasets
        ],
        "analyses": [a for a in ORDER if a in cfg.analyses],
        "params": cfg.params,
        "outputs": outputs,
        "failures": failures,
    }
    text = json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    (out_dir / "manifest.json").write_text(text, encoding="utf-8", newline="\n")
    return not failures, manifest
