"""Smoke test for the qdiscord extension module.

Build and install first, e.g. `maturin develop --release` from crates/py.
"""

import json
import math

import qdiscord


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    assert close(qdiscord.binary_entropy(0.25), 0.8112781244591328, 1e-12)

    w = qdiscord.DensityMatrix.werner(0.5)
    assert w.dims == (2, 2)
    r = qdiscord.quantum_discord(w, oracle_resolution=40)
    assert close(r["classical_correlation"], 1 - qdiscord.binary_entropy(0.75), 1e-9)
    assert close(r["discord"], r["mutual_information"] - r["classical_correlation"], 0.0)
    assert r["converged"] and r["bell_fast_path"]
    assert abs(r["oracle_gap"]) < 1e-5

    rand = qdiscord.DensityMatrix.tabulated_random()
    nm = qdiscord.quantum_discord(rand)
    assert close(nm["min_conditional_entropy_nats"], 0.24, 0.01), nm
    oracle = qdiscord.grid_oracle(rand, 100)
    assert close(oracle["refined_min"] * math.log(2), 0.24, 0.01)

    again = qdiscord.DensityMatrix.from_json(w.to_json())
    re, im = again.to_lists()
    assert close(re[1][2], -0.25, 1e-15) and all(v == 0 for row in im for v in row)
    z = qdiscord.measurement_direction([0.0, 0.0, 0.0])
    assert close(z[2], 1.0, 1e-15)

    try:
        qdiscord.DensityMatrix.werner(1.5)
    except ValueError as e:
        assert "outside" in str(e)
    else:
        raise AssertionError("werner(1.5) should fail")

    csv = qdiscord.sweep("werner", 0.0, 1.0, 0.25)
    lines = csv.strip().splitlines()
    assert lines[0].startswith("param,mutual_information") and len(lines) == 6

    print(json.dumps({"werner_0.5": r["discord"], "random_state_nats": nm["min_conditional_entropy_nats"]}))
    print("smoke test passed")


if __name__ == "__main__":
    main()
