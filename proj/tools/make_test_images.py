#!/usr/bin/env python3
"""Regenerate the bundled 128x128 grayscale test crops in tests/data/heldout.

Source photographs ship with scikit-image (BSD/CC0). Each crop is the central
128x128 window of the grayscale image at native resolution, stored as 8-bit
binary PGM.
"""
import os
import sys

import numpy as np
import skimage.data
from skimage import color, io

NAMES = [
    "camera.png", "astronaut.png", "coffee.png", "chelsea.png", "coins.png",
    "moon.png", "rocket.jpg", "hubble_deep_field.jpg", "retina.jpg", "ihc.png",
]


def main(out_dir):
    src = os.path.dirname(skimage.data.__file__)
    os.makedirs(out_dir, exist_ok=True)
    for name in NAMES:
        im = io.imread(os.path.join(src, name))
        if im.ndim == 3:
            im = (color.rgb2gray(im[..., :3]) * 255.0).round()
        im = np.asarray(im, dtype=np.float64)
        h, w = im.shape
        crop = im[h // 2 - 64:h // 2 + 64, w // 2 - 64:w // 2 + 64]
        crop = np.clip(crop, 0, 255).astype(np.uint8)
        stem = os.path.splitext(name)[0]
        with open(os.path.join(out_dir, stem + ".pgm"), "wb") as f:
            f.write(b"P5\n128 128\n255\n")
            f.write(crop.tobytes())


def fixtures(out_dir):
    # Small PNGs for the image reader tests.
    from PIL import Image
    os.makedirs(out_dir, exist_ok=True)
    g8 = (np.arange(16 * 12).reshape(12, 16) % 256).astype(np.uint8)
    Image.fromarray(g8, mode="L").save(os.path.join(out_dir, "gray8.png"))
    g16 = (np.arange(16 * 12).reshape(12, 16) * 300).astype(np.uint16)
    Image.fromarray(g16).save(os.path.join(out_dir, "gray16.png"))
    rgb = np.zeros((4, 5, 3), np.uint8)
    rgb[..., 0] = 255
    Image.fromarray(rgb, "RGB").save(os.path.join(out_dir, "red.png"))
    with open(os.path.join(out_dir, "not_an_image.png"), "wb") as f:
        f.write(b"\x89PNG\r\n\x1a\nthis is not png data")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/data/heldout")
    fixtures("tests/data/fixtures")
