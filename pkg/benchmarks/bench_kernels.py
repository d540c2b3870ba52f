"""Compare the compiled kernels with the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Prints the best-of-N wall time per kernel for each available backend and
the speed-up of the compiled one.
"""
import argparse
import timeit

import numpy as np

from ecokin import _kernels_py
from ecokin._backend import compiled_kernels


def cases(n_events: int, n_steps: int):
    rng = np.random.default_rng(0)
    tau, l = rng.normal(size=(2, n_events))
    tau_b, l_b = rng.normal(size=(2, n_events))
    out_a, out_b = np.empty(n_events), np.empty(n_events)
    vs = rng.uniform(-0.9, 0.9, n_events)
    dts = rng.uniform(0.1, 1.0, n_events)
    prof = np.empty(n_steps + 1)
    K = rng.uniform(0.05, 1.0, size=(8, 8))
    return {
        f"boost_many ({n_events} events)": lambda k: k.boost_many(tau, l, 0.6, out_a, out_b),
        f"interval_many ({n_events} pairs)": lambda k: k.interval_many(tau, l, tau_b, l_b, out_a),
        f"proper_quantity ({n_events} legs)": lambda k: k.proper_quantity(vs, dts),
        f"rk4_growth ({n_steps} steps)": lambda k: k.rk4_growth(1.0, 0.1, 1e-3, n_steps, prof),
        "power_iteration (8x8)": lambda k: k.power_iteration(K, np.full(8, 0.125), 1e-12, 100_000),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--events", type=int, default=100_000)
    ap.add_argument("--steps", type=int, default=100_000)
    args = ap.parse_args(argv)

    backends = [("python", _kernels_py)]
    compiled = compiled_kernels()
    if compiled is not None:
        backends.append(("cython", compiled))
    else:
        print("compiled kernels not built; timing the fallback only")

    print(f"{'kernel':<34}" + "".join(f"{name:>12}" for name, _ in backends) + "   speed-up")
    for label, fn in cases(args.events, args.steps).items():
        times = []
        for _, mod in backends:
            fn(mod)  # warm-up
            times.append(min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat)))
        cells = "".join(f"{t * 1e3:>10.2f}ms" for t in times)
        speed = f"{times[0] / times[1]:>9.1f}x" if len(times) == 2 else ""
        print(f"{label:<34}{cells}   {speed}")


if __name__ == "__main__":
    main()
