import json
from fractions import Fraction

import pytest

from caustic_bench import harness
from caustic_bench.fitting import FitResult
from caustic_bench.harness import (CSV_HEADER, SweepConfig, SweepError, SweepPoint, config_label, judge,
                                   make_config, reports_json, run_sweep, sweep_csv, verify, worker_count)
from caustic_bench.scenarios import SCENARIOS, SUITE, Scenario

BUILTINS = {"fold-sup", "cusp-sup", "nondeg-sup", "fold-lq", "piece-sup-sigma", "piece-l2-sigma", "vanishing",
            "sublevel", "atom-factor", "precaustic-gap"}


def test_registry_complete():
    assert set(SCENARIOS) == BUILTINS
    for sc in SCENARIOS.values():
        assert isinstance(sc.predict(sc.defaults), Fraction)
        assert sc.citation and sc.tolerance > 0
        assert len(make_config(sc.name).points()) >= 5
    assert {name for name, _ in SUITE} == BUILTINS


def test_config_validation():
    with pytest.raises(ValueError):
        SweepConfig("nope", "tau", (0, 8, 1))
    with pytest.raises(ValueError):
        SweepConfig("vanishing", "sigma", (-4, -1, 1))
    with pytest.raises(ValueError):
        SweepConfig("vanishing", "sigma", (-8, -1, 1), tolerance=0)


@pytest.fixture
def synthetic(monkeypatch):
    def measure(x, fixed):
        return 3.0 * x ** float(fixed["s"]), 0.0

    sc = Scenario("synthetic", "lambda", (2, 12, 1), 0.01, "synthetic", {"s": 0.37},
                  lambda f: Fraction(37, 100), measure)
    monkeypatch.setitem(SCENARIOS, "synthetic", sc)
    return sc


def test_pipeline_recovers_exact_power_law(synthetic):
    fit, points = run_sweep(make_config("synthetic"))
    assert abs(fit.slope - 0.37) <= 1e-9
    assert [p.param_log2 for p in points] == list(range(2, 13))
    report = verify(make_config("synthetic"))
    assert report.passed and report.to_dict()["predicted"] == "37/100"


def test_threaded_sweep_matches_serial(synthetic, monkeypatch):
    monkeypatch.setenv(harness.THREADS_ENV, "1")
    serial = sweep_csv(run_sweep(make_config("synthetic"))[1])
    monkeypatch.setenv(harness.THREADS_ENV, "4")
    assert worker_count() == 4
    assert sweep_csv(run_sweep(make_config("synthetic"))[1]) == serial
    monkeypatch.setenv(harness.THREADS_ENV, "-1")
    with pytest.raises(ValueError):
        worker_count()


def test_failing_point_is_named(monkeypatch):
    def measure(x, fixed):
        if x > 100:
            raise ArithmeticError("boom")
        return x, 0.0

    monkeypatch.setitem(SCENARIOS, "broken", Scenario("broken", "tau", (0, 8, 1), 0.1, "x", {},
                                                       lambda f: Fraction(1), measure))
    with pytest.raises(SweepError, match=r"tau=2\^7"):
        run_sweep(make_config("broken"))


def test_too_few_usable_points(monkeypatch):
    monkeypatch.setitem(SCENARIOS, "sparse", Scenario("sparse", "tau", (0, 5, 1), 0.1, "x", {},
                                                       lambda f: Fraction(0),
                                                       lambda x, f: (0.0 if x > 4 else 1.0, 0.0)))
    with pytest.raises(SweepError, match="usable"):
        run_sweep(make_config("sparse"))


def _fit(slope, r2, resid=0.0):
    return FitResult(slope, 0.0, r2, resid, ())


def test_judge():
    assert judge(_fit(0.17, 0.99), Fraction(1, 6), 0.03)
    assert not judge(_fit(0.21, 0.99), Fraction(1, 6), 0.03)
    assert not judge(_fit(0.17, 0.9), Fraction(1, 6), 0.03)
    # flat predictions fall back to the residual bound
    assert judge(_fit(0.001, 0.2, 0.01), Fraction(0), 0.03)
    assert not judge(_fit(0.001, 0.2, 0.5), Fraction(0), 0.03)


def test_csv_format():
    text = sweep_csv([SweepPoint(1.0, 0.1, 1e-17), SweepPoint(2.0, -2.5, 0.0)])
    lines = text.split("\n")
    assert lines[0] == CSV_HEADER and lines[-1] == "" and "\r" not in text
    assert lines[1] == "1,0.10000000000000001,0.10000000000000001,1.0000000000000001e-17"
    assert lines[2].split(",")[2] == "2.5"


def test_report_json_schema():
    report = verify(make_config("vanishing", {"m": 2}))
    d = json.loads(reports_json([report], reproducible=True))
    for key, kind in (("scenario", str), ("predicted", str), ("fitted", float), ("r2", float), ("pass", bool),
                      ("citation", str), ("seed", int), ("runtime_s", float)):
        assert isinstance(d[key], kind)
    assert d["predicted"] == "1/2" and d["pass"] and d["runtime_s"] == 0.0
    assert config_label(make_config("vanishing", {"m": 2})) == "vanishing[m=2]"


def test_sweep_deterministic():
    cfg = make_config("sublevel", seed=3)
    assert sweep_csv(run_sweep(cfg)[1]) == sweep_csv(run_sweep(cfg)[1])
