"""Smoke test of the Python bindings: build with `maturin develop` (or
`pip install --no-build-isolation crates/python`) and run this file."""

import json
import math

import hypersticks_py as hs


def main():
    o = hs.HPoint(0.0, 0.0)
    p = hs.HPoint(2.0, 1.0)
    assert abs(hs.dist(o, p) - 2.0) < 1e-12
    assert abs(hs.ball_volume(1.0) - 2 * math.pi * (math.cosh(1.0) - 1)) < 1e-12

    L = 5.0
    m = hs.mu_box((0.0, 1.0), (0.0, math.pi), (-L / 2, L / 2), L)
    assert abs(m - 2 * L / math.pi) < 1e-12
    assert abs(hs.offspring_mean(1.0, L) - 2 * L * L / math.pi) < 1e-9
    assert abs(hs.gw_extinction_probability(1 - math.exp(-1)) - 0.338697) < 1e-5

    s = hs.Stick(hs.HPoint(1.0, 0.3), 1.2, 3.0)
    t = s.hit_triple(0.0)
    if t is not None:
        back = hs.stick_from_triple(*t, 3.0)
        assert back.meets(s)

    sticks = hs.sample(0.3, 2.0, 3.0, seed=7)
    labels = hs.cluster_labels(sticks)
    assert len(labels) == len(sticks)
    assert hs.sample(0.3, 2.0, 3.0, seed=7)[0].center.rho == sticks[0].center.rho
    print(f"sample: {len(sticks)} sticks, {max(labels) + 1} clusters, "
          f"{hs.crossing_clusters(sticks, 1.0, 3.0)} crossing")

    out = hs.run_experiment("kind=measure_verify\nn=20000\nseed=3\n")
    lines = [json.loads(l) for l in out.splitlines()]
    assert lines[0]["schema"] == "hypersticks-results/1"
    summary = lines[-1]["summary"]
    assert summary["pass"] and summary["control_fails"]
    print("measure check:", "PASS" if summary["pass"] else "FAIL",
          f"chi2={summary['chi2']:.2f}")
    print("smoke test ok")


if __name__ == "__main__":
    main()
