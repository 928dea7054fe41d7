"""Time the compiled and pure-Python orbit kernels on the same workloads.

    python3 benchmarks/bench_kernels.py [--repeat N] [--skip-slow]
"""
import argparse
import time

from keanelab import kernels
from keanelab.analysis import KeaneTower, orbit_geometry
from keanelab.dimension import recurrence_statistic
from keanelab.keane import column_mass, generate


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def workloads(skip_slow):
    seq4 = generate("minimal", 4)
    tower4 = KeaneTower(seq4, 4)
    yield "induce level 2, K=4", lambda: KeaneTower(seq4, 4).level(2)
    yield "orbit geometry k=2, K=4", lambda: orbit_geometry(seq4, 4, 2, tower=tower4)
    left, length = tower4.level(2).subinterval(2)
    x = left + length / 2
    horizon = column_mass(seq4, 2, 2) - 1
    yield "recurrence records k=2, K=4", lambda: recurrence_statistic(tower4.base, x, horizon)
    if not skip_slow:
        seq6 = generate("minimal", 6)
        tower6 = KeaneTower(seq6, 6)
        tower6.level(3)
        yield "orbit geometry k=3, K=6", lambda: orbit_geometry(seq6, 6, 3, tower=tower6)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--skip-slow", action="store_true", help="skip the 11.5M-step workload")
    args = parser.parse_args()
    if kernels.compiled_backend is None:
        raise SystemExit("compiled kernels are not built; run pip install -e . --no-build-isolation")
    print(f"{'workload':32} {'compiled s':>11} {'python s':>11} {'speedup':>8}")
    for name, fn in workloads(args.skip_slow):
        with kernels.backend("compiled"):
            fast = _best(fn, args.repeat)
        with kernels.backend("python"):
            slow = _best(fn, 1 if "k=3" in name else args.repeat)
        print(f"{name:32} {fast:11.4f} {slow:11.4f} {slow / fast:8.1f}x")


if __name__ == "__main__":
    main()
