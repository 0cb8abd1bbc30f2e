"""Compare the compiled table kernels with the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from ggk import _accel, _kernels_py
from ggk.finite_core import cyclic_group, direct_product, symmetric_group


def cases():
    s4 = symmetric_group(4)
    big = direct_product(cyclic_group(4), s4)  # order 96
    for G in (s4, big):
        inv = np.asarray(G.inverse, dtype=np.int64)
        members = list(range(G.order))
        everyone = list(range(G.order))
        ident = np.arange(G.order, dtype=np.int64)
        yield f"find_nonassociative |G|={G.order}", "find_nonassociative", (G.table,)
        yield f"closure |G|={G.order}", "closure", (G.table, [1, 2], G.identity)
        yield f"find_nonnormal |G|={G.order}", "find_nonnormal", (G.table, inv, members, everyone)
        yield f"find_nonhomomorphic |G|={G.order}", "find_nonhomomorphic", (G.table, G.table, ident)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    compiled = _accel.compiled_kernels
    if compiled is None:
        print("compiled kernels not built; only the Python timings are shown")
    print(f"{'kernel':36} {'python ms':>10} {'cython ms':>10} {'speedup':>8}")
    for label, fn, fargs in cases():
        t_py = min(timeit.repeat(lambda: getattr(_kernels_py, fn)(*fargs), number=1, repeat=args.repeat))
        if compiled is not None:
            assert getattr(compiled, fn)(*fargs) == getattr(_kernels_py, fn)(*fargs)
            t_cy = min(timeit.repeat(lambda: getattr(compiled, fn)(*fargs), number=1, repeat=args.repeat))
            print(f"{label:36} {t_py * 1e3:10.2f} {t_cy * 1e3:10.3f} {t_py / t_cy:7.0f}x")
        else:
            print(f"{label:36} {t_py * 1e3:10.2f} {'-':>10} {'-':>8}")


if __name__ == "__main__":
    main()
