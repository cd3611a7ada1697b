"""Shared helpers for the little-endian binary container formats."""

import numpy as np

__all__ = ["FileFormatError", "read_exact", "write_array", "read_array"]


class FileFormatError(RuntimeError):
    """Raised when a binary artifact is malformed or truncated."""


def read_exact(fh, nbytes, section):
    """Read exactly nbytes or raise naming the missing section."""
    data = fh.read(nbytes)
    if len(data) != nbytes:
        raise FileFormatError(
            f"truncated file: expected {nbytes} bytes for {section}, got {len(data)}"
        )
    return data


def write_array(fh, arr, dtype="<f8"):
    fh.write(np.ascontiguousarray(arr, dtype=dtype).tobytes())


def read_array(fh, shape, section, dtype="<f8"):
    count = int(np.prod(shape)) if shape else 1
    itemsize = np.dtype(dtype).itemsize
    data = read_exact(fh, itemsize * count, section)
    return np.frombuffer(data, dtype=dtype).reshape(shape).copy()
