"""Smoke test for the syssamp_py extension module.

Build and install first:

    pip install --no-build-isolation -e crates/python
"""

import math
import os
import tempfile

import syssamp_py as ss

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    m = ss.Moments.from_file(os.path.join(ROOT, "data", "murthy.json")).with_intra(0.871)
    assert m.k == 11
    assert close(m.theta, 175 / 2816, 1e-15)

    coeffs = m.coefficients()
    assert close(coeffs["c0"] ** 2, 4.2466, 1e-4)

    best = ss.optimum(m, "t3", K=0.1, L=2.0)
    assert close(best["pre"], 407.4884, 0.05), best["pre"]

    hh = ss.mse(m, {"kind": "hh_mean"}, K=0.1, L=2.0)
    assert close(hh["mse"], m.variance_hh(0.1, 2.0), 1e-9)

    table = ss.pre_table(m, [0.1, 0.4], [2.0, 3.5])
    statuses = {c["family"]: c["status"] for c in table["discrepancy"]["columns"]}
    assert statuses["t3"] == "PASS" and statuses["t1"] == "FLAGGED", statuses

    assert close(ss.estimate({"kind": "ratio"}, 15.5, 5.0, 4.0), 12.4, 1e-12)
    try:
        ss.estimate({"kind": "t2", "a": -3.0, "b": 0.0, "p": 0.5}, 1.0, 1.0, 2.0)
    except ValueError:
        pass
    else:
        raise AssertionError("negative base under a fractional power should fail")

    toy = ss.Population([1.0, 2.0, 3.0, 4.0], [2.0, 3.0, 5.0, 9.0])
    assert close(toy.enumerate_variance(2), 0.25, 1e-15)

    pop = ss.synthesize(800, 16, 0.87, intra=0.6, sorted=True, nr_fraction=0.25, seed=7)
    pm = pop.moments(16)
    assert close(pm.rho, 0.87, 1e-9) and close(pm.rho_y_intra, 0.6, 1e-9)
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "pop.csv")
        pop.write_csv(path)
        assert ss.Population.load_csv(path).y == pop.y

    sim = ss.simulate(pop, 16, reps=2000, K=0.1, L=2.0, seed=42, estimators="ratio,t3")
    for row in sim["comparison"]["rows"]:
        assert math.isfinite(row["empirical_mse"]) and row["theoretical_mse"] > 0
    again = ss.simulate(pop, 16, reps=2000, K=0.1, L=2.0, seed=42, estimators="ratio,t3")
    assert sim == again

    print("syssamp_py smoke test passed")


if __name__ == "__main__":
    main()
