"""Seeded Monte Carlo studies of detection power and test size.

Replicate ``r`` of a study draws from ``rng_stream(seed, r)``, so a rate
depends only on the scenario and its seed, never on execution order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .changepoint import bai_perron, cbs
from .errors import IcebreakerError
from .rng import normals, rng_stream, seed_from

DETECTORS = ("BP", "CBS", "BCP")


@dataclass(frozen=True)
class PowerScenario:
    """Piecewise-constant mean in units of the (unit) noise SD.

    ``segments`` is a sequence of ``(length, mean)`` pairs.
    """

    n: int
    segments: tuple
    detector: str
    replicates: int = 1000
    seed: int = 0
    detection_rule: str = "any"
    params: dict = field(default_factory=dict, hash=False, compare=False)

    def __post_init__(self):
        segs = tuple((int(a), float(b)) for a, b in self.segments)
        object.__setattr__(self, "segments", segs)
        object.__setattr__(self, "detector", self.detector.upper())
        if sum(a for a, _ in segs) != self.n:
            raise IcebreakerError(f"segment lengths sum to {sum(a for a, _ in segs)}, not n={self.n}")
        if any(a < 1 for a, _ in segs):
            raise IcebreakerError("segment lengths must be positive")
        if self.replicates < 1:
            raise IcebreakerError("replicates must be >= 1")
        if self.detector not in DETECTORS:
            raise IcebreakerError(f"detector must be one of {DETECTORS}")

    @property
    def means(self):
        return np.repeat([b for _, b in self.segments], [a for a, _ in self.segments])

    @property
    def true_breaks(self):
        """Last index of every segment whose mean differs from the next."""
        out, pos = [], 0
        for (a, b), (_, b2) in zip(self.segments[:-1], self.segments[1:]):
            pos += a
            if b != b2:
                out.append(pos - 1)
        return out

    @property
    def is_null(self):
        return not self.true_breaks


@dataclass
class PowerResult:
    scenario: object
    detection_rate: float
    mc_stderr: float
    detections: int = 0
    replicates: int = 0


def _rate(hits, reps, scenario):
    r = hits / reps
    return PowerResult(
        scenario=scenario,
        detection_rate=r,
        mc_stderr=math.sqrt(r * (1.0 - r) / reps),
        detections=hits,
        replicates=reps,
    )


def simulate_replicate(sc, r):
    return sc.means + normals(rng_stream(sc.seed, r), sc.n)


def detect(sc, y, r):
    """Apply the scenario's detector and rule to one simulated series."""
    p = sc.params
    if sc.detector == "BP":
        model = bai_perron(y, p.get("min_seg_frac", 0.15), p.get("k_max", 5))
        return model.chosen_k > 0
    if sc.detector == "CBS":
        res = cbs(
            y,
            alpha=p.get("alpha", 0.01),
            n_perm=p.get("n_perm", 1000),
            seed=seed_from(sc.seed) * 1_000_003 + r,
            early_stop=True,
        )
        return len(res.change_indices) > 0
    from .bayes import barry_hartigan

    res = barry_hartigan(
        y,
        iterations=p.get("iterations", 550),
        burnin=p.get("burnin", 50),
        p0=p.get("p0", 0.2),
        w0=p.get("w0", 0.2),
        seed=seed_from(sc.seed) * 1_000_003 + r,
    )
    threshold = p.get("threshold", 0.15)
    radius = p.get("radius", 10)
    if sc.is_null:
        return bool(res.change_prob.max() >= threshold)
    return any(res.max_prob_near(b, radius) >= threshold for b in sc.true_breaks)


def run_power(sc):
    """Fraction of replicates in which the detector flags a change.

    Null scenarios count any detection as a false positive. With a true
    break, BP and CBS succeed on any reported break; BCP succeeds when the
    posterior change probability reaches the threshold (0.15) within the
    radius (10) of a true break.
    """
    hits = 0
    for r in range(sc.replicates):
        hits += bool(detect(sc, simulate_replicate(sc, r), r))
    return _rate(hits, sc.replicates, sc)


@dataclass(frozen=True)
class SizeScenario:
    test: str
    n: int
    replicates: int
    level: float
    seed: int


def run_size(test, n, replicates=500, level=0.05, seed=0, **test_kw):
    """Rejection frequency of a dependence test on iid N(0, 1) data."""
    from .dependence import run_test

    if n < 30:
        raise IcebreakerError("size studies need n >= 30")
    sc = SizeScenario(test.upper(), n, replicates, level, seed)
    hits = 0
    for r in range(replicates):
        y = normals(rng_stream(seed, r), n)
        kw = dict(test_kw)
        kw.setdefault("seed", seed_from(seed) * 1_000_003 + r)
        hits += run_test(test, y, **kw).p_value < level
    return _rate(hits, replicates, sc)


# ---------------------------------------------------------------------------
# scenario files


def _parse_segments(text):
    segs = []
    for part in text.replace(";", ",").split(","):
        part = part.strip()
        if not part:
            continue
        length, _, mean = part.partition(":")
        segs.append((int(length), float(mean or 0.0)))
    return tuple(segs)


def parse_scenario(text):
    """Read ``key = value`` lines into a :class:`PowerScenario`.

    ``segments`` is written ``150:0, 150:0.5``. Unknown keys are passed to
    the detector as parameters.
    """
    kv = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise IcebreakerError(f"line {lineno}: expected key = value")
        kv[key.strip().lower()] = value.strip()
    missing = {"n", "segments", "detector"} - kv.keys()
    if missing:
        raise IcebreakerError(f"scenario is missing {sorted(missing)}")
    params = {}
    for key in set(kv) - {"n", "segments", "detector", "replicates", "seed", "detection_rule"}:
        raw = kv[key]
        try:
            params[key] = int(raw)
        except ValueError:
            params[key] = float(raw)
    return PowerScenario(
        n=int(kv["n"]),
        segments=_parse_segments(kv["segments"]),
        detector=kv["detector"],
        replicates=int(kv.get("replicates", 1000)),
        seed=int(kv.get("seed", 0)),
        detection_rule=kv.get("detection_rule", "any"),
        params=params,
    )


def format_scenario(sc):
    segs = ", ".join(f"{a}:{b:g}" for a, b in sc.segments)
    lines = [
        f"n = {sc.n}",
        f"segments = {segs}",
        f"detector = {sc.detector}",
        f"replicates = {sc.replicates}",
        f"seed = {sc.seed}",
    ]
    lines += [f"{k} = {v}" for k, v in sorted(sc.params.items())]
    return "\n".join(lines) + "\n"


def paper_scenarios(replicates=1000, seed=2014):
    """The mean-shift designs of the power study, with published rates
    (percent) for BP and CBS."""
    designs = [
        ("null-300", ((300, 0.0),), (1.8, 1.4)),
        ("step-150+150-0.5", ((150, 0.0), (150, 0.5)), (90, 64)),
        ("step-100+100-0.5", ((100, 0.0), (100, 0.5)), (71, 43)),
        ("bump-50of150-1.0", ((50, 0.0), (50, 1.0), (50, 0.0)), (96, 95)),
        ("bump-50of150-0.75", ((50, 0.0), (50, 0.75), (50, 0.0)), (71, 65)),
        ("bump-50of150-0.5", ((50, 0.0), (50, 0.5), (50, 0.0)), (28, 22)),
        ("bump-33of100-1.0", ((33, 0.0), (33, 1.0), (34, 0.0)), (84, 77)),
        ("bump-33of100-0.75", ((33, 0.0), (33, 0.75), (34, 0.0)), (52, 40)),
        ("bump-33of100-0.5", ((33, 0.0), (33, 0.5), (34, 0.0)), (21, 13)),
    ]
    out = []
    for label, segs, (bp, vo) in designs:
        n = sum(a for a, _ in segs)
        for det, published in (("BP", bp), ("CBS", vo)):
            out.append(
                (label, PowerScenario(n, segs, det, replicates, seed), published / 100.0)
            )
    return out
