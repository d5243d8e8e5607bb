"""Image and sinogram export as 8-bit PGM and flat CSV."""

from __future__ import annotations

import numpy as np

__all__ = ["write_pgm", "read_pgm", "write_csv_vector", "write_sinogram_csv"]


def write_pgm(path, image, lo=0.0, hi=1.0):
    """Binary 8-bit PGM, row-major, values linearly mapped from ``[lo, hi]`` to ``0..255``."""
    img = np.asarray(image, dtype=float)
    if img.ndim != 2:
        raise ValueError("expected a 2-D image")
    scaled = np.clip((img - lo) / (hi - lo), 0.0, 1.0)
    data = np.round(scaled * 255).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{img.shape[1]} {img.shape[0]}\n255\n".encode("ascii"))
        fh.write(data.tobytes())


def read_pgm(path):
    """Read a binary PGM written by :func:`write_pgm` into a ``uint8`` array."""
    with open(path, "rb") as fh:
        raw = fh.read()
    fields = raw.split(maxsplit=4)
    if fields[0] != b"P5":
        raise ValueError("not a binary PGM file")
    w, h = int(fields[1]), int(fields[2])
    return np.frombuffer(fields[4][:w * h], dtype=np.uint8).reshape(h, w)


def write_csv_vector(path, values):
    """One value per line, full precision."""
    np.savetxt(path, np.asarray(values, dtype=float).ravel(), fmt="%.17g")


def write_sinogram_csv(path, sinogram, n_angles):
    """One row per angle, one column per detector."""
    np.savetxt(path, np.asarray(sinogram, dtype=float).reshape(n_angles, -1), fmt="%.17g", delimiter=",")
