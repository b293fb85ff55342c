"""Lexicographic packing of symbol sequences into flat indices.

Every module that flattens length-n tuples (tensor axes, LP variable
names, observable alphabets) uses the same convention: position 1 is
the most significant digit, so index = sum_i a_i * size^(n-i) and
index 0 is the all-zero sequence.
"""

from __future__ import annotations

from itertools import product
from typing import Iterator


def seq_to_index(seq: tuple[int, ...], size: int) -> int:
    idx = 0
    for a in seq:
        if not 0 <= a < size:
            raise ValueError(f"symbol {a} out of range for alphabet of size {size}")
        idx = idx * size + a
    return idx


def index_to_seq(idx: int, size: int, length: int) -> tuple[int, ...]:
    if not 0 <= idx < size**length:
        raise ValueError(f"index {idx} out of range for {size}^{length} sequences")
    out = []
    for _ in range(length):
        idx, a = divmod(idx, size)
        out.append(a)
    return tuple(reversed(out))


def all_sequences(size: int, length: int) -> Iterator[tuple[int, ...]]:
    """All length-`length` tuples over {0..size-1} in lexicographic order."""
    return product(range(size), repeat=length)
