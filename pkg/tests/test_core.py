import json
import math

import numpy as np
import pytest

from qwdirac.algebra import qubit, random_qubit
from qwdirac.config import all_multi_indices
from qwdirac.core import CrossCheck, DiracProblem, WalkProblem, default_threads
from qwdirac.dirac import GridSpec
from qwdirac.exceptions import ConvergenceError
from qwdirac.paths import Asymptotic, FiniteTime, KSpace, Law, RealSpace
from qwdirac.walk import coin1, coin2

SQRT_HALF = math.sqrt(0.5)
FIG5B = qubit(tuple(z / (2.0 * math.sqrt(2.0)) for z in (-(1 + 1j), -(1 + 1j), 1 + 1j, 1 - 1j)))


@pytest.mark.parametrize("d", [1, 2])
def test_asymptotic_and_law_paths_agree(d, rng):
    """Momentum-space and velocity-space moments agree through order 4"""
    for q in (FIG5B, random_qubit(4, rng)):
        check = CrossCheck(DiracProblem(d=d, cutoff_ratio=1.0, q=q), {"threads": 2})
        for entry in check.run(all_multi_indices(d, 4)):
            assert entry.converged
            assert entry.deviations["asymptotic~law"] <= 1e-6


@pytest.mark.slow
@pytest.mark.parametrize("d", [1, 2, 3])
@pytest.mark.parametrize(
    "q",
    [qubit((1, 0, 0, 0)), qubit((SQRT_HALF, SQRT_HALF, 0, 0)), FIG5B],
    ids=["up", "superposed", "weighted"],
)
def test_asymptotic_and_law_paths_agree_at_unit_cutoff(d, q):
    check = CrossCheck(DiracProblem(d=d, cutoff_ratio=1.0, q=q))
    for entry in check.run(all_multi_indices(d, 4)):
        assert entry.deviations["asymptotic~law"] <= 1e-6


@pytest.mark.slow
def test_asymptotic_and_law_paths_agree_in_3d(rng):
    check = CrossCheck(DiracProblem(d=3, cutoff_ratio=2.0, q=random_qubit(4, rng)))
    for entry in check.run(all_multi_indices(3, 4)):
        assert entry.deviations["asymptotic~law"] <= 1e-6


def test_known_second_moment_in_1d():
    check = CrossCheck(DiracProblem(d=1, cutoff_ratio=1.0, q=qubit((1, 0, 0, 0))))
    (entry,) = check.run([(2,)])
    assert [r.path for r in entry.results] == ["asymptotic", "law"]
    for result in entry.results:
        assert result.value == pytest.approx(1.0 - math.pi / 4.0, abs=1e-9)


def test_results_do_not_depend_on_thread_count(rng):
    problem = DiracProblem(d=2, cutoff_ratio=3.0, q=random_qubit(4, rng))
    alphas = all_multi_indices(2, 3)
    single = CrossCheck(problem, {"threads": 1}).run(alphas)
    pooled = CrossCheck(problem, {"threads": 4}).run(alphas)
    assert [e.alpha for e in single] == [e.alpha for e in pooled] == list(alphas)
    for a, b in zip(single, pooled):
        assert [r.value for r in a.results] == [r.value for r in b.results]


def test_duplicate_indices_collapse():
    check = CrossCheck(DiracProblem(d=1, cutoff_ratio=1.0, q=qubit((1, 0, 0, 0))))
    entries = check.run([(2,), (1,), (2,)])
    assert [e.alpha for e in entries] == [(2,), (1,)]
    assert len(entries[0].results) == 2
    assert [r.path for r in entries[0].results] == ["asymptotic", "law"]
    assert list(entries[0].deviations) == ["asymptotic~law"]


def test_path_registration():
    problem = DiracProblem(d=1, cutoff_ratio=1.0, q=qubit((1, 0, 0, 0)))
    check = CrossCheck(problem)
    assert list(check.paths) == ["asymptotic", "law"]
    assert isinstance(check.get_path("asymptotic"), Asymptotic)
    assert isinstance(check.get_path("law"), Law)
    assert check.get_path("finitetime") is None

    timed = CrossCheck(DiracProblem(d=1, cutoff_ratio=1.0, q=qubit((1, 0, 0, 0)), times=(10.0,)))
    assert isinstance(timed.get_path("finitetime"), FiniteTime)

    walk = CrossCheck(WalkProblem(coin=coin1(SQRT_HALF, SQRT_HALF), q=qubit((1, 0)), t=4))
    assert isinstance(walk.get_path("realspace"), RealSpace)
    assert isinstance(walk.get_path("kspace"), KSpace)
    assert walk.get_path("kspace").role == "kspace"


def test_disabled_path_is_skipped():
    problem = DiracProblem(d=1, cutoff_ratio=1.0, q=qubit((1, 0, 0, 0)))
    check = CrossCheck(problem, {"paths": {"law": {"enabled": False}}})
    assert list(check.paths) == ["asymptotic"]
    (entry,) = check.run([(2,)])
    assert entry.deviations == {}


def test_compare_with():
    check = CrossCheck(DiracProblem(d=1, cutoff_ratio=1.0, q=qubit((1, 0, 0, 0))))
    deviations = check.get_path("asymptotic").compare_with("law", (2,))
    assert len(deviations) == 1
    assert deviations[0] <= 1e-9
    assert check.get_path("law").compare_with("finitetime", (2,)) == ()


def test_coarse_grid_is_reported_not_raised():
    problem = DiracProblem(d=1, cutoff_ratio=1.0, q=qubit((1, 0, 0, 0)), times=(50.0,), grid=GridSpec(points_per_axis=8))
    (entry,) = CrossCheck(problem).run([(2,)])
    finite = [r for r in entry.results if r.path == "finitetime"]
    assert len(finite) == 1
    assert not finite[0].converged
    assert math.isnan(finite[0].value)
    assert "too coarse" in finite[0].details["message"]
    assert not entry.converged
    assert "law~finitetime@t=50" in entry.deviations


def test_strict_mode_raises():
    problem = DiracProblem(d=1, cutoff_ratio=1.0, q=qubit((1, 0, 0, 0)), times=(50.0,), grid=GridSpec(points_per_axis=8))
    with pytest.raises(ConvergenceError):
        CrossCheck(problem, {"strict": True}).run([(2,)])


def test_finite_time_path_approaches_the_limit():
    problem = DiracProblem(d=1, cutoff_ratio=1.0, q=qubit((1, 0, 0, 0)), times=(25.0, 100.0))
    (entry,) = CrossCheck(problem).run([(2,)])
    limit = entry.results[0].value
    finite = [r for r in entry.results if r.path == "finitetime"]
    assert [r.t for r in finite] == [25.0, 100.0]
    gaps = [abs(r.value - limit) for r in finite]
    assert gaps[1] < gaps[0]
    assert gaps[1] < 0.01
    assert "shell_mass" in finite[0].as_dict()


@pytest.mark.parametrize("t", [0, 3, 12])
def test_walk_paths_agree(rng, t):
    coin = coin1(1j * math.sqrt(0.7), 1j * math.sqrt(0.3))
    check = CrossCheck(WalkProblem(coin=coin, q=random_qubit(2, rng), t=t))
    for entry in check.run([(1,), (2,), (3,)]):
        assert entry.deviations["realspace@t={}~kspace@t={}".format(t, t)] <= 1e-6


def test_walk_paths_agree_in_2d(rng):
    check = CrossCheck(WalkProblem(coin=coin2(0.25), q=random_qubit(4, rng), t=5))
    for entry in check.run(all_multi_indices(2, 2)):
        (deviation,) = entry.deviations.values()
        assert deviation <= 1e-6


def test_report_schema():
    check = CrossCheck(DiracProblem(d=1, cutoff_ratio=1.0, q=qubit((1, 0, 0, 0))))
    report = check.report([(0,), (2,)])
    assert report["schema"] == 1
    assert report["paths"] == ["asymptotic", "law"]
    assert report["converged"] is True
    assert [e["alpha"] for e in report["entries"]] == [[0], [2]]
    assert report["entries"][0]["results"][0]["value"] == 1.0
    assert "laws.law_moment" in report["timings"]["operations"]
    json.dumps(report)


def test_default_threads(monkeypatch):
    monkeypatch.setenv("QWDIRAC_THREADS", "3")
    assert default_threads() == 3
    monkeypatch.setenv("QWDIRAC_THREADS", "zero")
    assert 1 <= default_threads() <= 8
    monkeypatch.setenv("QWDIRAC_THREADS", "0")
    assert 1 <= default_threads() <= 8
    monkeypatch.delenv("QWDIRAC_THREADS")
    assert 1 <= default_threads() <= 8


def test_problem_properties():
    problem = DiracProblem(d=2, cutoff_ratio=2.0, q=FIG5B)
    assert problem.ball.d == 2
    assert problem.ball.cutoff == pytest.approx(2.0)
    assert problem.law.coeffs == pytest.approx((-0.5, 0.5))
    assert WalkProblem(coin=coin2(0.5), q=qubit((0.5, 0.5, 0.5, 0.5)), t=1).d == 2
    np.testing.assert_allclose(problem.law.v_max, 2.0 / math.sqrt(5.0))
