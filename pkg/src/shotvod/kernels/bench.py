"""Benchmark the compiled kernels against the pure-Python fallback.

Run with: python -m shotvod.kernels.bench
"""

import time

from shotvod.kernels import _pure

try:
    from shotvod.kernels import _native
except ImportError:
    _native = None


def _time(fn, reps: int) -> float:
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(width: int = 320, height: int = 240, frames: int = 200, reps: int = 5):
    print(f"kernel benchmark: {frames} frames of {width}x{height}, best of {reps}")
    backends = [("pure", _pure)] + ([("native", _native)] if _native else [])
    if _native is None:
        print("compiled extension not built; benchmarking pure fallback only")

    results = {}
    for name, mod in backends:
        t = _time(
            lambda m=mod: [m.fill_pattern(width, height, 7 * i) for i in range(frames)],
            reps,
        )
        results[("fill_pattern", name)] = t
        raster = mod.fill_pattern(width, height, 0)
        t = _time(
            lambda m=mod, r=raster: [m.pack_dib_rows(r, width, height) for _ in range(frames)],
            reps,
        )
        results[("pack_dib_rows", name)] = t

    for (kernel, name), t in sorted(results.items()):
        rate = frames * width * height / t / 1e6
        print(f"  {kernel:14s} {name:7s} {t * 1e3:8.2f} ms  ({rate:8.1f} Mpx/s)")
    for kernel in ("fill_pattern", "pack_dib_rows"):
        if (kernel, "native") in results:
            speedup = results[(kernel, "pure")] / results[(kernel, "native")]
            print(f"  {kernel}: native is {speedup:.1f}x the pure fallback")


if __name__ == "__main__":
    main()
