"""Generate the bundled 256x256 test scene ``src/aquadenoise/data/diver256.pgm``.

The scene is procedural (no photographs, no randomness): a diver silhouette
with an air tank and fins, a rising bubble trail and a rippled seabed over
uniform water, softened by a Gaussian blur to mimic forward scattering. It
stands in for an unpublished diver photograph and is free of any copyright.

Usage::

    python tools/make_test_image.py [output.pgm]
"""

import sys
from pathlib import Path

import numpy as np
from scipy import ndimage

from aquadenoise.image import save_image

SIZE = 256


def ellipse(x, y, cx, cy, rx, ry, angle=0.0):
    c, s = np.cos(angle), np.sin(angle)
    u = (x - cx) * c + (y - cy) * s
    v = -(x - cx) * s + (y - cy) * c
    return (u / rx) ** 2 + (v / ry) ** 2 <= 1.0


def scene(n: int = SIZE) -> np.ndarray:
    y, x = np.mgrid[0:n, 0:n] / n
    img = np.full((n, n), 80.0)
    bed = 0.82 + 0.04 * np.sin(2 * np.pi * x * 1.5)
    img = np.where(y > bed, 70 + 25 * np.sin(6 * x) * np.cos(3 * y), img)
    diver = (
        ellipse(x, y, 0.50, 0.45, 0.18, 0.07, 0.3)
        | ellipse(x, y, 0.33, 0.38, 0.05, 0.05)
        | ellipse(x, y, 0.68, 0.55, 0.14, 0.03, 0.5)
        | ellipse(x, y, 0.68, 0.60, 0.14, 0.03, 0.2)
    )
    tank = ellipse(x, y, 0.50, 0.40, 0.12, 0.03, 0.3)
    img = np.where(diver, 30.0, img)
    img = np.where(tank, 190.0, img)
    for bx, by, r in [(0.30, 0.25, 0.015), (0.28, 0.18, 0.012), (0.31, 0.11, 0.010), (0.27, 0.05, 0.008)]:
        img = np.where(ellipse(x, y, bx, by, r, r), 220.0, img)
    return ndimage.gaussian_filter(img, 1.2, mode="wrap")


def main():
    default = Path(__file__).resolve().parents[1] / "src" / "aquadenoise" / "data" / "diver256.pgm"
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else default
    save_image(scene(), out)
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
