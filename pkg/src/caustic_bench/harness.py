"""Sweeps over a dyadic ladder, exponent fits and pass/fail reports."""

from __future__ import annotations

import io
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .fitting import FitResult, fit_with_retrench
from .scenarios import SCENARIOS, SUITE, Scenario, ladder_points

MIN_POINTS = 5
R2_MIN = 0.98
FLAT_RESIDUAL_MAX = 0.1
THREADS_ENV = "CAUSTIC_BENCH_THREADS"


class SweepError(RuntimeError):
    pass


@dataclass(frozen=True)
class SweepConfig:
    scenario: str
    parameter: str
    ladder: Tuple[float, float, float]  # log2 min, log2 max, log2 step
    fixed: Mapping[str, object] = field(default_factory=dict)
    tolerance: float = 0.03
    seed: int = 0

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if len(self.points()) < MIN_POINTS:
            raise ValueError(f"ladder needs at least {MIN_POINTS} points")

    def points(self) -> List[float]:
        lo, hi, step = self.ladder
        return ladder_points(lo, hi, step)


def make_config(name: str, overrides: Optional[Mapping[str, object]] = None, *,
                ladder: Optional[Tuple[float, float]] = None, tolerance: Optional[float] = None,
                seed: int = 0) -> SweepConfig:
    """Scenario defaults with ``overrides`` applied to the fixed parameters."""
    sc = SCENARIOS[name]
    fixed = dict(sc.defaults)
    fixed.update(overrides or {})
    lad = sc.ladder if ladder is None else (ladder[0], ladder[1], sc.ladder[2])
    return SweepConfig(name, sc.parameter, lad, fixed, sc.tolerance if tolerance is None else tolerance, seed)


@dataclass(frozen=True)
class SweepPoint:
    param_log2: float
    value: float
    err_estimate: float


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
    n = int(raw)
    if n < 0:
        raise ValueError(f"{THREADS_ENV} must be >= 0")
    return n if n > 0 else (os.cpu_count() or 1)


def measure_ladder(config: SweepConfig) -> List[SweepPoint]:
    """Evaluate the scenario at each ladder point; results come back in ladder order."""
    sc = SCENARIOS[config.scenario]
    pts = config.points()

    def one(lp: float) -> SweepPoint:
        try:
            value, err = sc.measure(2.0 ** lp, config.fixed)
        except Exception as exc:  # name the failing point
            raise SweepError(f"{config.scenario}: measurement failed at {config.parameter}=2^{lp:g}: {exc}") from exc
        return SweepPoint(lp, float(value), float(err))

    workers = min(worker_count(), len(pts))
    if workers <= 1:
        return [one(p) for p in pts]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, pts))


def fit_points(points: Sequence[SweepPoint]) -> FitResult:
    good = [(p.param_log2, math.log2(p.value)) for p in points if p.value > 0 and math.isfinite(p.value)]
    if len(good) < MIN_POINTS:
        raise SweepError(f"only {len(good)} usable ladder points, need {MIN_POINTS}")
    return fit_with_retrench(sorted(good), R2_MIN)


def run_sweep(config: SweepConfig) -> Tuple[FitResult, List[SweepPoint]]:
    points = measure_ladder(config)
    return fit_points(points), points


@dataclass(frozen=True)
class Report:
    scenario: str
    label: str
    predicted: Fraction
    citation: str
    fitted: FitResult
    tolerance: float
    passed: bool
    seed: int
    runtime_seconds: float
    points: Tuple[SweepPoint, ...] = ()

    def to_dict(self, reproducible: bool = False) -> dict:
        return {
            "scenario": self.scenario,
            "predicted": str(self.predicted),
            "fitted": self.fitted.slope,
            "r2": self.fitted.r_squared,
            "pass": self.passed,
            "citation": self.citation,
            "seed": self.seed,
            "runtime_s": 0.0 if reproducible else round(self.runtime_seconds, 3),
            "label": self.label,
            "tolerance": self.tolerance,
            "residual_max": self.fitted.residual_max,
            "dropped_points": self.fitted.dropped,
        }


def judge(fit: FitResult, predicted: Fraction, tolerance: float) -> bool:
    """Slope within tolerance and a good fit.

    A flat prediction has no variance to explain, so there ``r2`` is replaced by
    a bound on the largest log2 residual.
    """
    if abs(fit.slope - float(predicted)) > tolerance:
        return False
    if predicted == 0:
        return fit.r_squared >= R2_MIN or fit.residual_max <= FLAT_RESIDUAL_MAX
    return fit.r_squared >= R2_MIN


def config_label(config: SweepConfig) -> str:
    keys = [k for k in ("q", "m", "l") if k in config.fixed]
    if not keys:
        return config.scenario
    return config.scenario + "[" + ",".join(f"{k}={config.fixed[k]}" for k in keys) + "]"


def verify(config: SweepConfig) -> Report:
    sc = SCENARIOS[config.scenario]
    predicted = sc.predict(config.fixed)
    start = time.perf_counter()
    fit, points = run_sweep(config)
    runtime = time.perf_counter() - start
    return Report(config.scenario, config_label(config), predicted, sc.citation, fit, config.tolerance,
                  judge(fit, predicted, config.tolerance), config.seed, runtime, tuple(points))


def suite_configs(name: str, seed: int = 0) -> List[SweepConfig]:
    if name == "all":
        return [make_config(s, o, seed=seed) for s, o in SUITE]
    if name not in SCENARIOS:
        raise ValueError(f"unknown suite {name!r}")
    entries = [(s, o) for s, o in SUITE if s == name] or [(name, {})]
    return [make_config(s, o, seed=seed) for s, o in entries]


# --------------------------------------------------------------------------
# output formats
# --------------------------------------------------------------------------

CSV_HEADER = "param_log2,value,abs_value,err_estimate"


def _num(x: float) -> str:
    return format(x, ".17g")


def sweep_csv(points: Sequence[SweepPoint]) -> str:
    buf = io.StringIO(newline="")
    buf.write(CSV_HEADER + "\n")
    for p in points:
        buf.write(",".join([_num(p.param_log2), _num(p.value), _num(abs(p.value)), _num(p.err_estimate)]) + "\n")
    return buf.getvalue()


def reports_json(reports: Sequence[Report], reproducible: bool = False) -> str:
    payload = [r.to_dict(reproducible) for r in reports]
    body = payload[0] if len(payload) == 1 else payload
    return json.dumps(body, indent=2, sort_keys=False) + "\n"


def write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# --------------------------------------------------------------------------
# config files
# --------------------------------------------------------------------------

def read_config_file(path: str) -> Dict[str, str]:
    """``key = value`` lines with ``#`` comments; keys use CLI flag spelling without dashes."""
    out: Dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out
