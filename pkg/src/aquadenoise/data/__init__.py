"""Bundled test data.

``diver256.pgm`` is a 256x256 procedural underwater scene generated by
``tools/make_test_image.py`` (no photographic content, no copyright).
"""

from importlib import resources
from pathlib import Path

from aquadenoise.image import Image, load_image

TEST_IMAGE_NAME = "diver256.pgm"


def test_image_path() -> Path:
    return Path(str(resources.files(__name__).joinpath(TEST_IMAGE_NAME)))


def test_image() -> Image:
    return load_image(test_image_path())
