"""Wavelet denoising of grayscale images corrupted by underwater ambient noise."""

__version__ = "0.1.0"
