"""Permanent-based transition amplitudes, independent of the operator algebra.

Works on plain occupation tuples over a fixed 4-mode basis: inputs ordered
(s+, s-, i+, i-), outputs (a+, a-, b+, b-). Only the composed transform and the
input Fock amplitudes are consumed.
"""

from __future__ import annotations

import itertools
import math
from typing import Iterator, Mapping

import numpy as np

from .optical_elements import ModeTransform

PHOTON_CAP = 6
MAX_PERMANENT_SIZE = 12


def permanent(m) -> complex:
    """Ryser's inclusion-exclusion formula, Gray-code ordered, O(2^n n)."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"permanent needs a square matrix, got shape {m.shape}")
    n = m.shape[0]
    if n == 0:
        return 1.0 + 0j
    if n > MAX_PERMANENT_SIZE:
        raise ValueError(f"matrix too large for exact permanent ({n} > {MAX_PERMANENT_SIZE})")
    row_sums = np.zeros(n, dtype=complex)
    total = 0j
    gray = 0
    for k in range(1, 2 ** n):
        # flip the column given by the lowest set bit of k
        j = (k & -k).bit_length() - 1
        gray ^= 1 << j
        if gray >> j & 1:
            row_sums += m[:, j]
        else:
            row_sums -= m[:, j]
        total += (-1) ** gray.bit_count() * np.prod(row_sums)
    return (-1) ** n * total


def compositions(total: int, parts: int = 4) -> Iterator[tuple[int, ...]]:
    """All occupation tuples of ``parts`` modes holding ``total`` photons."""
    for bars in itertools.combinations(range(total + parts - 1), parts - 1):
        prev = -1
        counts = []
        for b in bars:
            counts.append(b - prev - 1)
            prev = b
        counts.append(total + parts - 2 - prev)
        yield tuple(counts)


def _matrix(u) -> np.ndarray:
    m = u.entries if isinstance(u, ModeTransform) else np.asarray(u, dtype=complex)
    if m.shape != (4, 4):
        raise ValueError(f"oracle works on a single 4x4 transform, got shape {m.shape}")
    return m


def transition_amplitude(u, inp: tuple[int, ...], out: tuple[int, ...]) -> complex:
    """<out| U |inp> = per(U[out rows, inp cols]) / sqrt(prod n! prod m!)."""
    m = _matrix(u)
    if sum(inp) != sum(out):
        return 0j
    rows = [k for k, c in enumerate(out) for _ in range(c)]
    cols = [j for j, c in enumerate(inp) for _ in range(c)]
    norm = math.prod(math.factorial(c) for c in inp) * math.prod(math.factorial(c) for c in out)
    return permanent(m[np.ix_(rows, cols)]) / math.sqrt(norm)


def output_amplitudes(u, input_state: Mapping[tuple[int, ...], complex]) -> dict[tuple[int, ...], complex]:
    numbers = {sum(k) for k in input_state}
    if not numbers:
        raise ValueError("empty input state")
    if max(numbers) > PHOTON_CAP:
        raise ValueError(f"photon number {max(numbers)} exceeds oracle cap {PHOTON_CAP}")
    out = {}
    for n in sorted(numbers):
        for pattern in compositions(n, 4):
            out[pattern] = sum(a * transition_amplitude(u, k, pattern) for k, a in input_state.items() if sum(k) == n)
    return out


def full_distribution(u, input_state: Mapping[tuple[int, ...], complex]) -> dict[tuple[int, ...], float]:
    return {k: abs(a) ** 2 for k, a in output_amplitudes(u, input_state).items()}
