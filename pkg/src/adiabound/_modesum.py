"""Deterministic reduction over momentum modes.

Modes are processed in fixed-size chunks. Inside a chunk, contributions are
added in ascending mode order starting from zero; chunk partials are then added
in ascending chunk order. The grouping depends only on the mode count, never on
the number of worker threads, so results are bitwise reproducible.
"""
from __future__ import annotations

import numpy as np

CHUNK = 256


def chunks(n_modes: int, size: int = CHUNK):
    for start in range(0, n_modes, size):
        yield start, min(start + size, n_modes)


def sequential_sum(columns, shape) -> np.ndarray:
    acc = np.zeros(shape)
    for col in columns:
        acc = acc + col
    return acc


def repeated_sum(x: np.ndarray, count: int) -> np.ndarray:
    """Sum of ``count`` copies of ``x`` with the grouping used for distinct modes.

    Lets the identical-modes shortcut reproduce a brute-force sum bitwise.
    """
    x = np.asarray(x, dtype=float)
    partials = {}
    total = np.zeros(x.shape)
    for start, stop in chunks(count):
        m = stop - start
        if m not in partials:
            partials[m] = sequential_sum((x for _ in range(m)), x.shape)
        total = total + partials[m]
    return total
