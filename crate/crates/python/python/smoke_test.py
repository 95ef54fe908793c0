"""Smoke test for the gwo_de_py extension module."""

import math

import gwo_de_py as g


def main():
    functions = g.list_functions()
    assert len(functions) == 10, functions
    names = [f["name"] for f in functions]
    assert "sphere" in names and "penalized_f13" in names

    assert g.evaluate("sphere", [0.0] * 30) == 0.0
    assert g.evaluate("rosenbrock", [0.0, 0.0]) == 1.0
    assert g.evaluate("penalized_f12", [-1.0] * 30) == 0.0

    config = g.RunConfig(np=20, max_iterations=60, dimension=5, seed=7)
    assert config.budget() == 20 * 61
    trace = g.run_trial("gwo_de", "sphere", config)
    assert trace["evaluations_used"] == config.budget()
    assert len(trace["best_per_generation"]) == 61
    assert trace["mode_timeline"][0] == (0, "gwo")
    assert trace["error"] < trace["best_per_generation"][0]
    again = g.run_trial("gwo_de", "sphere", config)
    assert again["best_per_generation"] == trace["best_per_generation"], "not deterministic"

    result = g.minimize(lambda x: sum((v - 0.5) ** 2 for v in x), [-2.0] * 3, [2.0] * 3, np=20, max_iterations=80)
    assert result["best"] < 1e-6, result["best"]
    assert all(abs(v - 0.5) < 1e-3 for v in result["best_position"])

    campaign = g.run_experiment(["gwo_de", "jde"], ["sphere", "ackley"], g.RunConfig(np=10, max_iterations=20, trials=2, dimension=3))
    assert len(campaign["mean_errors"]) == 2 and len(campaign["mean_errors"][0]) == 2

    table1 = [
        [1.84e-1, 0, 5.95e-12, 1.12e-4, 1.94e-4, 3.89e-4, 0, 0],
        [5.22e4, 1.38e-6, 9.90e-4, 6.74e1, 7.86e-99, 1.32e-99, 2.04e-9, 6.24e2],
        [3.26e3, 2.77e1, 2.57e1, 4.70e1, 2.59e1, 7.72e-5, 2.20e1, 9.55e1],
        [2.03e1, 3.49e-4, 2.25, 7.64, 7.32e-15, 7.03e-15, 1.34e-5, 7.11],
        [4.51e2, 1.49e-2, 1.05e-2, 1.60, 1.27e-3, 1.28e-3, 1.49e-8, 5.64],
        [3.55e1, 1.24e-2, 3.71e-1, 1.34e1, 6.23e-1, 4.67e-1, 1.50e-3, 1.14e1],
        [3.77e2, 1.91e1, 3.07, 2.53e2, 0, 2.63, 4.73e1, 7.64e1],
        [3.42e2, 2.30e1, 5.52, 2.21e2, 2.80e-1, 2.78, 3.03e1, 7.30e1],
        [2.17e8, 6.83e-3, 4.35e-2, 3.49e1, 8.61e-3, 1.07e-31, 2.00e-10, 5.67e1],
        [5.35e8, 1.61e-5, 2.65e-4, 5.40e3, 6.88e-2, 4.02e-32, 8.25e-10, 6.68e3],
    ]
    algs = ["ABC", "PSO", "TLBO", "Jaya", "GWO", "GWO-DE", "jDE", "DE/best/1/bin"]
    ranks = {r["algorithm"]: r for r in g.friedman_ranks(algs, table1)}
    assert ranks["GWO-DE"]["rank"] == 1
    assert math.isclose(ranks["GWO-DE"]["average_rank"], 2.3)

    for bad in (lambda: g.evaluate("nope", [0.0]), lambda: g.RunConfig(trials=0)):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")

    def broken(_x):
        raise RuntimeError("boom")

    try:
        g.minimize(broken, [0.0], [1.0], np=4, max_iterations=1)
    except RuntimeError as e:
        assert "boom" in str(e)
    else:
        raise AssertionError("expected RuntimeError")

    print("smoke test passed")


if __name__ == "__main__":
    main()
