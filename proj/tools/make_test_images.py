#!/usr/bin/env python3
"""Regenerates the 512x512 grayscale PGM test images in tests/data from scikit-image's sample data."""
import pathlib

import numpy as np
import skimage.data
from skimage.color import rgb2gray


def save_pgm(path, pixels):
    pixels = np.asarray(pixels, dtype=np.uint8)
    with open(path, "wb") as f:
        f.write(b"P5\n%d %d\n255\n" % (pixels.shape[1], pixels.shape[0]))
        f.write(pixels.tobytes())


def main():
    out = pathlib.Path(__file__).resolve().parent.parent / "tests" / "data"
    save_pgm(out / "camera.pgm", skimage.data.camera())
    save_pgm(out / "astronaut.pgm", np.round(rgb2gray(skimage.data.astronaut()) * 255))


if __name__ == "__main__":
    main()
