"""Allocator tuning for the many short-lived ~256 KB arrays of batched training.

With glibc defaults, freeing such a temporary trims the heap and the next
allocation page-faults it back in, which costs more than the matrix product
that produced it. Raising the trim and mmap thresholds keeps the memory mapped.
"""

import ctypes
import ctypes.util
import sys

_M_TRIM_THRESHOLD = -1
_M_MMAP_THRESHOLD = -3
_THRESHOLD = 64 * 1024 * 1024


def tune_allocator() -> bool:
    if not sys.platform.startswith("linux"):
        return False
    try:
        libc = ctypes.CDLL(ctypes.util.find_library("c") or "libc.so.6")
        mallopt = libc.mallopt
    except (OSError, AttributeError):
        return False
    return bool(mallopt(_M_TRIM_THRESHOLD, _THRESHOLD)) and bool(mallopt(_M_MMAP_THRESHOLD, _THRESHOLD))
