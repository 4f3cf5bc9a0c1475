"""Smoke test for the nasearch extension module.

Build first, then run from the repo root:

    cargo build --release -p nasearch-py --features extension-module
    python3 python/smoke_test.py

The script loads target/release/libnasearch.so unless `nasearch` is already
importable (e.g. after `pip install ./crates/py`).
"""

import importlib.machinery
import importlib.util
import json
import math
import pathlib
import sys


def load():
    try:
        import nasearch

        return nasearch
    except ImportError:
        pass
    root = pathlib.Path(__file__).resolve().parent.parent
    for name in ("libnasearch.so", "libnasearch.dylib", "nasearch.dll"):
        lib = root / "target" / "release" / name
        if lib.exists():
            loader = importlib.machinery.ExtensionFileLoader("nasearch", str(lib))
            spec = importlib.util.spec_from_loader("nasearch", loader)
            mod = importlib.util.module_from_spec(spec)
            loader.exec_module(mod)
            return mod
    sys.exit("nasearch extension not found; build it first (see module docstring)")


def main():
    ns = load()
    print("nasearch", ns.__version__)

    s = ns.ScheduleI(5000, epsilon=1.0, alpha=1.0)
    assert abs(s.tau - math.pi * 5000 / (2 * math.sqrt(4999))) < 1e-9
    tr = ns.simulate_i(s, ns.uniform_grid(2 * s.tau, 201))
    assert len(tr) == 201
    assert tr.p_s[100] > 0.99, tr.p_s[100]
    assert tr.max_norm_drift < 1e-8
    print(f"ScheduleI N=5000: P_s(tau) = {tr.p_s[100]:.6f}, drift {tr.max_norm_drift:.1e}")

    s2 = ns.ScheduleII(1_000_000, 5.0, 4.5)
    ts = ns.uniform_grid(3.0, 31)
    ode = ns.simulate_ii(s2, ts)
    pcf = ns.alg_ii_amplitudes(s2, ts)
    worst = max(abs(abs(a_s) ** 2 - p) for (a_s, _), p in zip(pcf, ode.p_s))
    assert worst < 1e-5, worst
    print(f"ScheduleII PCF vs ODE: max |dP_s| = {worst:.1e}")

    p = ns.limit_prob(5.0, 4.5, n=1_000_000)
    assert p.accurate and abs(p.value - 0.43704) < 1e-4, p
    assert float(ns.limit_prob(1.0, 4.5)) > 0.9
    print(f"p(a=5, b=4.5, N=1e6) = {p.value:.6f}")

    a, b, grid = ns.sweep_ab((0.2, 25.0), (0.0, 10.0), (4, 3), n=100, workers=2)
    assert len(a) == 4 and len(b) == 3 and len(grid) == 3 and len(grid[0]) == 4
    assert grid[1][2] == ns.limit_prob(a[2], b[1], n=100).value

    d = ns.pcf_d(2.0, 0.7)
    assert abs(d - (0.7**2 - 1) * math.exp(-0.7**2 / 4)) < 1e-14
    assert abs(ns.complex_gamma(5.0) - 24.0) < 1e-12
    assert abs(ns.kummer_m(1.0, 1.0, 0.5) - math.exp(0.5)) < 1e-14

    for bad in (lambda: ns.ScheduleI(1), lambda: ns.limit_prob(-1.0, 0.0)):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")

    ok, report = ns.verify("specfun", fast=True)
    assert ok, report
    print(f"verify specfun: {len(json.loads(report)['checks'])} checks passed")
    print("smoke test OK")


if __name__ == "__main__":
    main()
