"""Time the numba kernels against their pure-numpy counterparts.

    python3 benchmarks/bench_kernels.py [--repeats N]

Each kernel is called once before timing so JIT compilation (or the
on-disk cache load) is excluded.  Both variants are checked to agree.
"""
import argparse
import time

import numpy as np

from songprint import _accel, kernels


def best_of(fn, repeats):
    fn()
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(rng):
    X24 = rng.normal(0, 10, (33, 20))
    ref = X24[:16].mean(axis=0)
    a, b = rng.normal(size=200), rng.normal(size=200)

    Xt = rng.normal(0, 2, (33, 20))
    yt = (Xt[:, 0] + 0.5 * rng.normal(size=33) > 0).astype(np.int64)
    keys = rng.random((67, 20))

    Xm = rng.uniform(0, 1, (32, 20))
    Tm = np.column_stack([Xm[:, 0] > 0.5, Xm[:, 0] <= 0.5]).astype(np.float64)
    W = [rng.uniform(-0.5, 0.5, s) for s in ((20, 11), (11,), (11, 2), (2,))]

    yield ("dtw 200x200", lambda k: k.dtw_cost(a, b))
    yield ("dtw 33 fingerprints", lambda k: k.dtw_to_reference(X24, ref))
    yield ("grow tree 33x20 all attrs", lambda k: k.grow_tree(Xt, yt, 2, 20, keys))
    yield ("grow tree 33x20 mtry=5", lambda k: k.grow_tree(Xt, yt, 1, 5, keys))
    yield ("mlp 500 epochs", lambda k: k.mlp_train(Xm, Tm, *(w.copy() for w in W),
                                                   0.3, 0.2, 500, False))


class Backend:
    def __init__(self, suffix):
        for name in ("dtw_cost", "dtw_to_reference", "grow_tree", "tree_predict", "mlp_train"):
            setattr(self, name, getattr(kernels, name + suffix))


def agree(u, v):
    u = u if isinstance(u, tuple) else (u,)
    v = v if isinstance(v, tuple) else (v,)
    return all(np.allclose(x, y, rtol=1e-9, atol=1e-12) for x, y in zip(u, v))


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)

    if not _accel.HAVE_NUMBA:
        print("numba is not installed; both columns time the numpy kernels")
    nb, npy = Backend("_nb"), Backend("_np")
    print(f"{'kernel':<28}{'numba ms':>10}{'numpy ms':>10}{'speedup':>9}  agree")
    for label, call in cases(np.random.default_rng(args.seed)):
        t_nb = best_of(lambda: call(nb), args.repeats)
        t_np = best_of(lambda: call(npy), args.repeats)
        ok = agree(call(nb), call(npy))
        print(f"{label:<28}{1e3 * t_nb:>10.3f}{1e3 * t_np:>10.3f}{t_np / t_nb:>8.1f}x  {ok}")


if __name__ == "__main__":
    main()
