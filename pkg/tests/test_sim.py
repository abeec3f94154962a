import numpy as np
import pytest

from icebreaker.errors import IcebreakerError
from icebreaker.sim import (
    PowerScenario,
    format_scenario,
    paper_scenarios,
    parse_scenario,
    run_power,
    run_size,
    simulate_replicate,
)


def test_scenario_geometry():
    sc = PowerScenario(150, [(50, 0), (50, 1.0), (50, 0)], "bp")
    assert sc.detector == "BP"
    assert sc.true_breaks == [49, 99]
    assert not sc.is_null
    assert PowerScenario(30, [(30, 0)], "CBS").is_null


def test_scenario_validation():
    with pytest.raises(IcebreakerError):
        PowerScenario(100, [(50, 0), (40, 1)], "BP")
    with pytest.raises(IcebreakerError):
        PowerScenario(100, [(100, 0)], "XYZ")


def test_replicates_are_order_free():
    sc = PowerScenario(60, [(30, 0), (30, 1)], "BP", replicates=5, seed=3)
    np.testing.assert_array_equal(simulate_replicate(sc, 4), simulate_replicate(sc, 4))
    assert not np.array_equal(simulate_replicate(sc, 3), simulate_replicate(sc, 4))


def test_power_result():
    sc = PowerScenario(200, [(100, 0), (100, 2.0)], "BP", replicates=40, seed=1)
    res = run_power(sc)
    assert res.detection_rate == 1.0 and res.mc_stderr == 0.0
    assert run_power(sc) == res


def test_bcp_detector_runs():
    sc = PowerScenario(100, [(50, 0), (50, 3.0)], "BCP", replicates=5, seed=2)
    assert run_power(sc).detection_rate == 1.0


@pytest.mark.slow
def test_bp_null_rate():
    res = run_power(PowerScenario(300, [(300, 0)], "BP", replicates=1000, seed=11))
    assert abs(res.detection_rate - 0.018) <= 0.015


def test_size_level_zero():
    assert run_size("Q", 100, replicates=20, level=0.0).detection_rate == 0.0


@pytest.mark.slow
@pytest.mark.parametrize("test,n", [("Q", 300), ("AVR", 100)])
def test_size_band(test, n):
    rate = run_size(test, n, replicates=500, seed=5).detection_rate
    assert 0.02 <= rate <= 0.09


def test_size_needs_length():
    with pytest.raises(IcebreakerError):
        run_size("Q", 20)


def test_scenario_file_round_trip():
    sc = PowerScenario(100, [(33, 0), (33, 0.75), (34, 0)], "CBS", replicates=50, seed=4,
                       params={"n_perm": 200})
    back = parse_scenario(format_scenario(sc))
    assert back == sc and back.params == {"n_perm": 200}


def test_scenario_parse_errors():
    with pytest.raises(IcebreakerError, match="missing"):
        parse_scenario("n = 10\n")
    with pytest.raises(IcebreakerError, match="line 1"):
        parse_scenario("n 10\n")


def test_paper_designs():
    designs = paper_scenarios(replicates=10)
    assert len(designs) == 18
    assert {sc.n for _, sc, _ in designs} == {100, 150, 200, 300}
