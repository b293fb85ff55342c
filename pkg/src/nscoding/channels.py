"""Discrete memoryless channels with an i.i.d. (or block) random state.

A channel is a conditional kernel N(y|x,s) over finite alphabets
together with a state distribution P_S.  Kernels are stored as nested
tuples of Fractions indexed ``kernel[s][x][y]`` — the same layout the
file format uses — so every probability in the model is exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .rational import as_rational, format_rational

__all__ = [
    "ChannelWithState",
    "BlockStateSource",
    "make_channel",
    "lift_csir",
    "block_kernel",
    "builtin_z0z1",
    "builtin_product_xs",
    "builtin_channel",
    "load_channel_file",
    "save_channel_file",
    "BUILTIN_CHANNELS",
]

ONE = Fraction(1)


@dataclass(frozen=True)
class BlockStateSource:
    """A joint distribution over length-n state sequences.

    Used when the state is not i.i.d. across channel uses; `atoms` maps
    each supported sequence to its probability.
    """

    n: int
    atoms: tuple[tuple[tuple[int, ...], Fraction], ...]

    def validate(self, s_size: int) -> None:
        if self.n < 1:
            raise ValueError(f"block length must be >= 1, got {self.n}")
        total = Fraction(0)
        seen = set()
        for seq, p in self.atoms:
            if len(seq) != self.n:
                raise ValueError(f"state sequence {seq} does not have length {self.n}")
            if any(not 0 <= s < s_size for s in seq):
                raise ValueError(f"state sequence {seq} leaves the alphabet of size {s_size}")
            if seq in seen:
                raise ValueError(f"state sequence {seq} listed twice")
            seen.add(seq)
            if p < 0 or p > 1:
                raise ValueError(f"probability of state sequence {seq} is {p}, outside [0, 1]")
            total += p
        if total != ONE:
            raise ValueError(f"block state probabilities sum to {total}, expected 1")

    def prob(self, seq: tuple[int, ...]) -> Fraction:
        for atom, p in self.atoms:
            if atom == seq:
                return p
        return Fraction(0)

    def support(self) -> tuple[tuple[int, ...], ...]:
        return tuple(seq for seq, p in self.atoms if p > 0)


@dataclass(frozen=True)
class ChannelWithState:
    """Kernel N(y|x,s) plus a per-letter state distribution P_S."""

    x_size: int
    y_size: int
    s_size: int
    kernel: tuple[tuple[tuple[Fraction, ...], ...], ...]  # [s][x][y]
    state_dist: tuple[Fraction, ...]
    block_state: Optional[BlockStateSource] = None

    # -- access ---------------------------------------------------------

    def prob(self, y: int, x: int, s: int) -> Fraction:
        """N(y|x,s)."""
        return self.kernel[s][x][y]

    def state_prob(self, s: int) -> Fraction:
        return self.state_dist[s]

    def kernel_array(self) -> np.ndarray:
        """Float view of the kernel, shape (s_size, x_size, y_size)."""
        return np.array(
            [[[float(p) for p in row] for row in state] for state in self.kernel],
            dtype=float,
        )

    def state_array(self) -> np.ndarray:
        return np.array([float(p) for p in self.state_dist], dtype=float)

    # -- validation ------------------------------------------------------

    def validate(self) -> None:
        for name, size in (("x_size", self.x_size), ("y_size", self.y_size), ("s_size", self.s_size)):
            if size < 1:
                raise ValueError(f"{name} must be >= 1, got {size}")
        if len(self.kernel) != self.s_size:
            raise ValueError(f"kernel has {len(self.kernel)} state slices, expected {self.s_size}")
        for s, state_slice in enumerate(self.kernel):
            if len(state_slice) != self.x_size:
                raise ValueError(f"kernel slice s={s} has {len(state_slice)} rows, expected {self.x_size}")
            for x, row in enumerate(state_slice):
                if len(row) != self.y_size:
                    raise ValueError(f"kernel row s={s}, x={x} has {len(row)} entries, expected {self.y_size}")
                total = Fraction(0)
                for y, p in enumerate(row):
                    if p < 0 or p > 1:
                        raise ValueError(f"kernel entry N({y}|{x},{s}) = {p} outside [0, 1]")
                    total += p
                if total != ONE:
                    raise ValueError(f"kernel row s={s}, x={x} sums to {total}, expected 1")
        if len(self.state_dist) != self.s_size:
            raise ValueError(f"state_dist has {len(self.state_dist)} entries, expected {self.s_size}")
        for s, p in enumerate(self.state_dist):
            if p < 0 or p > 1:
                raise ValueError(f"state_dist[{s}] = {p} outside [0, 1]")
        if sum(self.state_dist, Fraction(0)) != ONE:
            raise ValueError(f"state_dist sums to {sum(self.state_dist, Fraction(0))}, expected 1")
        if self.block_state is not None:
            self.block_state.validate(self.s_size)

    # -- block quantities --------------------------------------------------

    def iid_block_prob(self, ss: Sequence[int]) -> Fraction:
        p = Fraction(1)
        for s in ss:
            p *= self.state_dist[s]
        return p

    def state_block_prob(self, ss: Sequence[int]) -> Fraction:
        """P(S^n = ss): the block source if attached, else the i.i.d. product."""
        ss = tuple(ss)
        if self.block_state is not None:
            if len(ss) != self.block_state.n:
                raise ValueError(
                    f"sequence length {len(ss)} does not match block source length {self.block_state.n}"
                )
            return self.block_state.prob(ss)
        return self.iid_block_prob(ss)


def make_channel(
    kernel: Sequence[Sequence[Sequence[object]]],
    state_dist: Sequence[object],
    block_state: Optional[BlockStateSource] = None,
) -> ChannelWithState:
    """Build and validate a channel from nested [s][x][y] kernel entries.

    Entries may be Fractions, ints or rational strings ("1/2", "0.25").
    """
    kern = tuple(
        tuple(tuple(as_rational(p) for p in row) for row in state_slice) for state_slice in kernel
    )
    dist = tuple(as_rational(p) for p in state_dist)
    s_size = len(kern)
    x_size = len(kern[0]) if s_size else 0
    y_size = len(kern[0][0]) if x_size else 0
    ch = ChannelWithState(
        x_size=x_size,
        y_size=y_size,
        s_size=s_size,
        kernel=kern,
        state_dist=dist,
        block_state=block_state,
    )
    ch.validate()
    return ch


def lift_csir(ch: ChannelWithState) -> ChannelWithState:
    """Reveal the state at the receiver.

    The lifted channel outputs the pair [y, s] (flat index y * s_size + s,
    y-major) with kernel N'([y,s']|x,s) = N(y|x,s) * 1[s'=s].
    """
    zero = Fraction(0)
    kern = []
    for s in range(ch.s_size):
        state_slice = []
        for x in range(ch.x_size):
            row = [zero] * (ch.y_size * ch.s_size)
            for y in range(ch.y_size):
                row[y * ch.s_size + s] = ch.kernel[s][x][y]
            state_slice.append(tuple(row))
        kern.append(tuple(state_slice))
    return ChannelWithState(
        x_size=ch.x_size,
        y_size=ch.y_size * ch.s_size,
        s_size=ch.s_size,
        kernel=tuple(kern),
        state_dist=ch.state_dist,
        block_state=ch.block_state,
    )


def block_kernel(
    ch: ChannelWithState,
    xs: Sequence[int],
    ss: Sequence[int],
    ys: Sequence[int],
) -> Fraction:
    """N^{(x)n}(ys|xs,ss) = prod_i N(y_i|x_i,s_i) for a memoryless block."""
    if not len(xs) == len(ss) == len(ys):
        raise ValueError(f"sequence lengths differ: {len(xs)}, {len(ss)}, {len(ys)}")
    p = Fraction(1)
    for x, s, y in zip(xs, ss, ys):
        p *= ch.kernel[s][x][y]
        if not p:
            return p
    return p


# -- builtins -------------------------------------------------------------


def builtin_z0z1() -> ChannelWithState:
    """Binary channel that is a Z-channel in each state.

    State 0: input 0 is noiseless, input 1 flips with probability 1/2.
    State 1: the mirror image (input 1 noiseless).  Uniform state.
    """
    h = Fraction(1, 2)
    return make_channel(
        kernel=[
            [[1, 0], [h, h]],  # s = 0
            [[h, h], [0, 1]],  # s = 1
        ],
        state_dist=[h, h],
    )


def builtin_product_xs() -> ChannelWithState:
    """Noiseless product channel y = x*s with a three-sequence block state.

    The block source is uniform over {(0,1,1), (1,0,1), (1,1,0)} at
    n = 3; the per-letter state_dist records the matching single-letter
    marginal (each position is 0 in exactly one of the three atoms).
    """
    third = Fraction(1, 3)
    atoms = (
        ((0, 1, 1), third),
        ((1, 0, 1), third),
        ((1, 1, 0), third),
    )
    return make_channel(
        # y = x*s: s=0 forces y=0; s=1 copies x.
        kernel=[
            [[1, 0], [1, 0]],  # s = 0
            [[1, 0], [0, 1]],  # s = 1
        ],
        state_dist=[third, 2 * third],
        block_state=BlockStateSource(n=3, atoms=atoms),
    )


BUILTIN_CHANNELS = {
    "z0z1": builtin_z0z1,
    "product-xs": builtin_product_xs,
}


def builtin_channel(name: str) -> ChannelWithState:
    try:
        factory = BUILTIN_CHANNELS[name]
    except KeyError:
        raise ValueError(
            f"unknown builtin channel {name!r}; available: {', '.join(sorted(BUILTIN_CHANNELS))}"
        ) from None
    return factory()


# -- file format ----------------------------------------------------------


def load_channel_file(path: str) -> ChannelWithState:
    """Load a channel from a JSON file.

    Fields: x_size, y_size, s_size, kernel ([s][x][y] nested arrays of
    rational strings or numbers), state_dist, and optionally
    block_state = {"n": ..., "atoms": [[sequence, probability], ...]}.
    Decimal literals in the file convert to exact rationals (they are
    parsed from the text directly, never through a binary float).
    """
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh, parse_float=Fraction)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not valid JSON: {exc}") from exc
    for field in ("x_size", "y_size", "s_size", "kernel", "state_dist"):
        if field not in doc:
            raise ValueError(f"{path}: missing field {field!r}")
    block = None
    if "block_state" in doc and doc["block_state"] is not None:
        raw = doc["block_state"]
        block = BlockStateSource(
            n=int(raw["n"]),
            atoms=tuple((tuple(int(s) for s in seq), as_rational(p)) for seq, p in raw["atoms"]),
        )
    ch = make_channel(doc["kernel"], doc["state_dist"], block_state=block)
    declared = (int(doc["x_size"]), int(doc["y_size"]), int(doc["s_size"]))
    if declared != (ch.x_size, ch.y_size, ch.s_size):
        raise ValueError(
            f"{path}: declared sizes {declared} do not match kernel shape "
            f"({ch.x_size}, {ch.y_size}, {ch.s_size})"
        )
    return ch


def save_channel_file(ch: ChannelWithState, path: str) -> None:
    """Write a channel as JSON; load_channel_file(save(...)) is the identity."""
    doc = {
        "x_size": ch.x_size,
        "y_size": ch.y_size,
        "s_size": ch.s_size,
        "kernel": [
            [[format_rational(p) for p in row] for row in state_slice] for state_slice in ch.kernel
        ],
        "state_dist": [format_rational(p) for p in ch.state_dist],
    }
    if ch.block_state is not None:
        doc["block_state"] = {
            "n": ch.block_state.n,
            "atoms": [[list(seq), format_rational(p)] for seq, p in ch.block_state.atoms],
        }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
