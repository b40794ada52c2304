"""Compare the compiled and numpy wavelet kernels.

Times a 4-level 2D round trip on 256x256 input for each available
backend, and checks that both give identical output.

    python benchmarks/bench_kernels.py [--repeat 20] [--size 256]
"""

import argparse
import timeit

import numpy as np

from aquadenoise.wavelet import _backend, dwt2d, reconstruct


def round_trip(x, basis, levels, kernels):
    return reconstruct(dwt2d(x, basis, levels, kernels=kernels), kernels=kernels)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=20)
    parser.add_argument("--size", type=int, default=256)
    parser.add_argument("--levels", type=int, default=4)
    args = parser.parse_args(argv)

    x = np.random.default_rng(0).uniform(0, 255, size=(args.size, args.size))
    names = _backend.available()
    print(f"backends: {', '.join(names)} (default: {_backend.BACKEND})")
    if len(names) == 2:
        ref = {n: round_trip(x, "sym8", args.levels, _backend.load(n)) for n in names}
        same = np.array_equal(ref["cython"], ref["python"])
        print(f"round-trip outputs identical across backends: {same}")

    print(f"{'basis':>8}  " + "  ".join(f"{n + ' (ms)':>14}" for n in names) + "  speedup")
    for basis in ("haar", "sym4", "db10", "bior3.5"):
        times = []
        for name in names:
            kernels = _backend.load(name)
            t = timeit.repeat(lambda: round_trip(x, basis, args.levels, kernels), number=1, repeat=args.repeat)
            times.append(min(t) * 1e3)
        speedup = f"{times[1] / times[0]:7.2f}x" if len(times) == 2 else "      -"
        print(f"{basis:>8}  " + "  ".join(f"{t:14.3f}" for t in times) + f"  {speedup}")


if __name__ == "__main__":
    main()
