"""Smoke test for the windipp extension module.

Build it first:  (cd crates/python && maturin develop)
"""

import math

import windipp


def main():
    h = windipp.Hyperparams(30.0, 1.0, 400.0)
    assert math.isclose(windipp.kernel((0.0, 0.0), (0.0, 0.0), h), 900.0)

    rho = [[1.0, 0.8], [0.8, 1.0]]
    mi = windipp.mutual_information(rho, [0], [1])
    assert abs(mi - 0.51083) < 1e-5, mi
    assert windipp.entropy([[1.0]]) > 0

    xs = [(0.0, 0.0), (300.0, 100.0), (800.0, 900.0)]
    ys = [-60.0, -55.0, -70.0]
    mean, cov = windipp.gp_predict(h, xs, ys, [(300.0, 100.0), (5000.0, 5000.0)], prior_mean=-50.0)
    assert abs(mean[0] - ys[1]) < 2.0 and cov[0][0] < cov[1][1]
    assert math.isfinite(windipp.log_marginal_likelihood(h, xs, ys))

    locations, objective = windipp.place_tasks(1000.0, 2, 250.0, windipp.Hyperparams(30.0, 0.1, 600.0), seed=3)
    assert len(locations) == 2 and objective > 0

    assert math.isclose(windipp.edge_cost((0.0, 5000.0), (1000.0, 5000.0), 100.0, 10.0, 270.0), 9.0)
    assert math.isclose(windipp.edge_cost((1000.0, 5000.0), (0.0, 5000.0), 100.0, 10.0, 270.0), 11.0)

    n, m = 4, 2
    costs = [[0.0 if i == j else 1.0 + ((7 * i + 3 * j) % 11) for j in range(n + m)] for i in range(n + m)]
    cm = windipp.CostMatrix(n, m, costs)
    exact = windipp.brute_force(cm)
    ga = windipp.solve_ga(cm, seed=1, generations=200)
    assert sorted(t for tour in ga.tours for t in tour) == list(range(n))
    assert ga.c_max <= exact.c_max * 1.05 + 1e-9

    x, y, heading = windipp.step_dubins((0.0, 0.0), 0.0, 100.0, 50.0, (300.0, 0.0))
    assert math.isclose(x, 10.0) and abs(y) < 1e-12 and heading == 0.0

    assert windipp.path_loss_db(1000.0, 2.0, 1.0) > 0

    try:
        windipp.edge_cost((0.0, 0.0), (10.0, 0.0), 5.0, 10.0, 0.0)
    except ValueError:
        pass
    else:
        raise AssertionError("slow airspeed must raise ValueError")
    print("windipp python smoke test passed")


if __name__ == "__main__":
    main()
