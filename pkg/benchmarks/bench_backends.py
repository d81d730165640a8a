"""Compare the compiled engine with the pure-Python code paths.

    python benchmarks/bench_backends.py [--depth 6] [--repeat 3]

Each kernel runs once per backend (after a warm-up) and the best of
``--repeat`` wall times is printed with the speed-up.
"""

import argparse
import time

from hexshell import _backend
from hexshell.compat import PartialMesh
from hexshell.fixtures import named
from hexshell.iso import canonical_form
from hexshell.search import SearchLimits, search_exhaustive
from hexshell.tablegen import generate_shellings


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def kernels(depth):
    trap = named("trapezohedron")
    table = generate_shellings(min(depth, 6), backend="native" if _backend.HAVE_NATIVE else None)
    boundaries = [table.boundary(i) for i in range(0, len(table), max(1, len(table) // 200))]
    # 2x2x2 block of lattice cells on a 3x3x3 vertex grid
    grid = [tuple(x + dx for x in (0, 1, 3, 4, 9, 10, 12, 13)) for dx in (0, 1, 3, 4, 9, 10, 12, 13)]

    native = _backend.engine("native")

    def canon(b):
        fn = canonical_form if b == "python" else native.canonical_form
        return [fn(Q) for Q in boundaries]

    def compat(b):
        for _ in range(50):
            if b == "python":
                M = PartialMesh()
                for h in grid:
                    M.is_compatible(h) and M.add_hex(h)
            else:
                placed = []
                for h in grid:
                    native.is_compatible(placed, h) and placed.append(h)

    return {
        f"generate_shellings({depth})": lambda b: generate_shellings(depth, backend=b),
        "exhaustive trapezohedron h=7": lambda b: search_exhaustive(trap, SearchLimits(7), "all", backend=b),
        f"canonical_form x{len(boundaries)}": canon,
        "compat 2x2x2 grid x50": compat,
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--depth", type=int, default=6)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not _backend.HAVE_NATIVE:
        raise SystemExit("the compiled engine is not built; run `python setup.py build_ext --inplace`")
    print(f"{'kernel':34} {'python':>10} {'native':>10} {'speed-up':>9}")
    for name, fn in kernels(args.depth).items():
        row = {}
        for b in ("python", "native"):
            row[b] = best_of(lambda: fn(b), args.repeat)
        print(f"{name:34} {row['python']:10.4f} {row['native']:10.4f} {row['python'] / row['native']:8.1f}x")


if __name__ == "__main__":
    main()
