"""Time the compiled kernels against the numpy fallback on one simulated replication.

    python3 benchmarks/bench_kernels.py [--n 200] [--p 1000] [--repeat 3]
"""
import argparse
import timeit

import numpy as np

from condscreen import _fallback
from condscreen.screening import _standardize, build_moment_table
from condscreen.simgen import ScenarioSpec, generate

try:
    from condscreen import _core
except ImportError:
    _core = None


def _parts(result):
    return result if isinstance(result, tuple) else (result,)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--p", type=int, default=1000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    data = generate(ScenarioSpec("ex2case1", n=args.n, p=args.p, seed=7)).data
    table = build_moment_table(data)
    xs = np.ascontiguousarray(_standardize(data.x)[table.order, :].T)
    csirs_args = (table.weights_by_response, xs, table.group_end, table.group_size, 1e-12)
    y = data.y / np.max(np.abs(data.y))
    ydist = np.abs(y[:, None] - y[None, :])
    xt = np.ascontiguousarray((data.x / np.max(np.abs(data.x), axis=0)).T)

    kernels = {"csirs_columns": csirs_args, "dcov_columns": (xt, ydist)}
    backends = {"python": _fallback}
    if _core is not None:
        backends["cython"] = _core
    else:
        print("compiled extension not built; timing the fallback only")

    print(f"n={args.n} p={args.p} best of {args.repeat}")
    print(f"{'kernel':<15}{'backend':<9}{'seconds':>10}{'speedup':>10}")
    for name, kargs in kernels.items():
        times = {}
        for bname, mod in backends.items():
            fn = getattr(mod, name)
            times[bname] = min(timeit.repeat(lambda: fn(*kargs), number=1, repeat=args.repeat))
        if len(backends) == 2:
            a, b = getattr(_fallback, name)(*kargs), getattr(_core, name)(*kargs)
            for u, v in zip(_parts(a), _parts(b)):
                np.testing.assert_allclose(u, v, rtol=1e-10, atol=1e-14)
        for bname, t in times.items():
            print(f"{name:<15}{bname:<9}{t:>10.4f}{times['python'] / t:>9.1f}x")


if __name__ == "__main__":
    main()
