"""Time the compiled and pure-Python kernel backends on the same inputs.

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from fiberinfo import _pykernels

try:
    from fiberinfo import _ckernels
except ImportError:
    _ckernels = None


def cases():
    rng = np.random.default_rng(0)
    x = np.concatenate([rng.uniform(1e-6, 2.0, 50_000), rng.uniform(2.0, 80.0, 50_000)])
    mu = np.ascontiguousarray(rng.exponential(1.5, size=(2000, 256)))
    return {"k0 (1e5 points)": ("k0", (x,)), "ensemble_row_sums (2000 x 256)": ("ensemble_row_sums", (mu,))}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    backends = {"python": _pykernels}
    if _ckernels is not None:
        backends["cython"] = _ckernels
    else:
        print("compiled extension not built; timing the fallback only")
    print(f"{'kernel':<32}" + "".join(f"{b:>14}" for b in backends) + ("   speedup" if len(backends) == 2 else ""))
    for label, (name, call_args) in cases().items():
        best = {}
        for b, mod in backends.items():
            fn = getattr(mod, name)
            out = fn(*call_args)
            best[b] = min(timeit.repeat(lambda: fn(*call_args), number=1, repeat=args.repeat))
            if b == "cython":
                ref = getattr(_pykernels, name)(*call_args)
                assert np.allclose(out, ref, rtol=1e-13, atol=0), f"{name}: backends disagree"
        row = f"{label:<32}" + "".join(f"{best[b] * 1e3:>11.2f} ms" for b in backends)
        if len(best) == 2:
            row += f"   {best['python'] / best['cython']:7.1f}x"
        print(row)


if __name__ == "__main__":
    main()
