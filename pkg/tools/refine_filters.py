"""Recompute Daubechies/symlet scaling filters at high precision.

For each basis the script factors the Daubechies half-band polynomial with
mpmath, enumerates every admissible root selection, and keeps the one closest
to the published double-precision table in ``filters.py``. It prints the
polished coefficients and how far each published value moved.

Usage::

    python tools/refine_filters.py            # report
    python tools/refine_filters.py --emit     # print a replacement table
"""

import argparse
import itertools
import math

import mpmath as mp

from aquadenoise.wavelet.filters import _ORTHOGONAL

mp.mp.dps = 60


def _poly_mul(a, b):
    out = [mp.mpc(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def candidates(n_moments):
    """Yield every real scaling filter with ``n_moments`` vanishing moments."""
    N = n_moments
    # P(y) = sum_k C(N-1+k, k) y^k, y = sin^2(w/2)
    coeffs = [mp.binomial(N - 1 + k, k) for k in range(N)]
    yroots = mp.polyroots(coeffs[::-1], maxsteps=200, extraprec=200) if N > 1 else []
    groups = []
    used = [False] * len(yroots)
    for i, y in enumerate(yroots):
        if used[i]:
            continue
        used[i] = True
        if abs(mp.im(y)) < mp.mpf(10) ** -40:
            groups.append([mp.re(y)])
        else:
            j = min(
                (k for k in range(len(yroots)) if not used[k]),
                key=lambda k: abs(yroots[k] - mp.conj(y)),
            )
            used[j] = True
            groups.append([y, yroots[j]])
    for choice in itertools.product((0, 1), repeat=len(groups)):
        poly = [mp.mpc(1)]
        for _ in range(N):
            poly = _poly_mul(poly, [1, 1])
        for pick, group in zip(choice, groups):
            for y in group:
                # z + 1/z = 2 - 4y
                b = 2 - 4 * y
                disc = mp.sqrt(b * b - 4)
                z1, z2 = (b + disc) / 2, (b - disc) / 2
                z = z1 if (abs(z1) < 1) == bool(pick) else z2
                poly = _poly_mul(poly, [1, -z])
        real = [mp.re(c) for c in poly]
        s = sum(real)
        yield [c * mp.sqrt(2) / s for c in real]


def polish(name, table):
    n_moments = len(table) // 2
    best = None
    for cand in candidates(n_moments):
        for variant in (cand, cand[::-1]):
            dist = max(abs(variant[i] - table[i]) for i in range(len(table)))
            if best is None or dist < best[0]:
                best = (dist, variant)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--emit", action="store_true")
    args = parser.parse_args()
    for name, table in _ORTHOGONAL.items():
        if name == "haar":
            continue
        dist, coeffs = polish(name, table)
        vals = [float(c) for c in coeffs]
        if args.emit:
            print(f'    "{name}": (')
            for v in vals:
                print(f"        {v!r},")
            print("    ),")
        else:
            orth = max(
                abs(sum(coeffs[i] * coeffs[i + 2 * k] for i in range(len(coeffs) - 2 * k)))
                for k in range(1, len(coeffs) // 2)
            )
            print(f"{name:6s} max|published - polished| = {float(dist):.3e}  orthogonality residual {float(orth):.1e}")
            if dist > 1e-8:
                print(f"  WARNING: {name} does not match any factorization closely")
    if not args.emit:
        print(f"(haar is exact: 1/sqrt(2) = {1 / math.sqrt(2)!r})")


if __name__ == "__main__":
    main()
