import math

import pytest

import citest


def test_u_statistic_fixture():
    xs = [0, 0, 1, 1]
    ys = [0, 0, 1, 1]
    assert citest.u_statistic(xs, ys, 2, 2) == pytest.approx(2 / 3, abs=1e-12)
    assert citest.u_statistic_naive(xs, ys, 2, 2) == pytest.approx(2 / 3, abs=1e-12)


def test_fast_matches_naive_on_random_data():
    import random

    rng = random.Random(7)
    for _ in range(20):
        n = rng.randint(4, 9)
        xs = [rng.randrange(3) for _ in range(n)]
        ys = [rng.randrange(2) for _ in range(n)]
        fast = citest.u_statistic(xs, ys, 3, 2)
        naive = citest.u_statistic_naive(xs, ys, 3, 2)
        assert fast == pytest.approx(naive, abs=1e-12)


def test_too_few_samples_raises():
    with pytest.raises(citest.InsufficientSampleError):
        citest.u_statistic([0, 1, 0], [1, 0, 1], 2, 2)
    with pytest.raises(citest.Error):
        citest.u_statistic([0, 1, 0, 1], [1, 0, 1, 5], 2, 2)


def test_bin_count():
    assert citest.bin_count("fixed_discrete", 1000)["d"] == 16
    plan = citest.bin_count("continuous", 400, s=1.0)
    assert plan["d_prime"] == 6


def test_generate_is_reproducible():
    a = citest.generate("discrete-alt", 200, seed=3)
    b = citest.generate("discrete-alt", 200, seed=3)
    assert a == b
    assert len(a["x"]) == 200
    assert set(a["x"]) <= {0.0, 1.0}
    assert all(0.0 <= z <= 1.0 for z in a["z"])


def test_run_test_report():
    data = citest.generate("discrete-alt", 2000, seed=11)
    report = citest.run_test(data["x"], data["y"], data["z"], mode="scaling_discrete", permutations=50, seed=5)
    assert report["decision"] == "reject"
    assert 0.0 <= report["p_value"] <= 0.05
    again = citest.run_test(data["x"], data["y"], data["z"], mode="scaling_discrete", permutations=50, seed=5)
    assert report == again


def test_bad_mode_raises():
    with pytest.raises(citest.ConfigError):
        citest.run_test([0.0] * 8, [0.0] * 8, [0.5] * 8, mode="nope")


def test_simulate_rows():
    rows = citest.simulate("fig3", alternative=False, sizes=[100], replications=10, permutations=20, seed=1)
    assert len(rows) == 1
    assert 0.0 <= rows[0]["rejection_rate"] <= 1.0


def test_couple_stays_close():
    data = citest.generate("continuous-alt", 500, seed=2)
    coupled = citest.couple(data["x"], data["y"], data["z"], m=10, seed=4)
    bound = math.sqrt(3) * 2 / 10
    for k in ("x", "y", "z"):
        for a, b in zip(data[k], coupled[k]):
            assert abs(a - b) <= bound + 1e-12


def test_smoothness_null_constant():
    report = citest.smoothness("continuous-null", "tv", 256)
    assert report["estimate"] == pytest.approx(2.0, rel=0.05)
