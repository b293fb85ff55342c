"""Finite-blocklength assisted coding schemes built on type mapping.

The construction: the state sequence is causally mapped onto a fixed
composition (see `type_mapping`); on the positions carrying each kept
state value sigma the encoder draws inputs i.i.d. from a chosen
P_{X|S=sigma}, and placeholder positions get uniform inputs.  The
decoder-side test maps the outputs on each sigma-block onto a fixed
composition as well and then checks joint typicality of the kept
(input, mapped-output) pairs against P_{XY|S=sigma}, for every sigma.

Because both mappings always produce their exact target composition,
the probability that a fresh independent input block passes the test
is a constant mu^-1 independent of everything observed.  Scaling the
acceptance by lambda = mu / M then makes each of the M messages decode
correctly with conditional probability exactly 1/M, which is what the
non-signaling marginal condition requires.

Everything here is exact rational arithmetic except the Monte Carlo
estimators, which are explicitly estimators.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .channels import BlockStateSource, ChannelWithState, builtin_product_xs
from .indexing import index_to_seq, seq_to_index
from .rational import as_rational, rational_ceil
from .type_mapping import Budgets, budgets, map_with_budgets, placeholder
from .typicality import jointly_typical

__all__ = [
    "AuthScheme",
    "SchemeTensor",
    "ConditionReport",
    "SuccessDecomposition",
    "DegenerateSchemeError",
    "build_auth_scheme",
    "compute_mu",
    "mu_by_enumeration",
    "estimate_mu",
    "typicality_pass_probability",
    "zeta",
    "t_function",
    "materialize_tensor",
    "verify_conditions",
    "success_probability",
    "success_decomposition",
    "toy_product_scheme",
    "TENSOR_ENTRY_CAP",
    "EXACT_SUCCESS_CAP",
    "MU_TYPE_ENUM_CAP",
    "MU_BRUTE_FORCE_CAP",
]

ZERO = Fraction(0)
ONE = Fraction(1)

TENSOR_ENTRY_CAP = 10_000_000
EXACT_SUCCESS_CAP = 4_000_000
MU_TYPE_ENUM_CAP = 64
MU_BRUTE_FORCE_CAP = 2**16


class DegenerateSchemeError(ValueError):
    """No input block can pass the typicality test: mu would be infinite."""


InputStrategy = tuple[tuple[Fraction, ...], ...]


def _clean_strategy(ch: ChannelWithState, strategy: Sequence[Sequence[object]]) -> InputStrategy:
    rows = tuple(tuple(as_rational(p) for p in row) for row in strategy)
    if len(rows) != ch.s_size:
        raise ValueError(f"{len(rows)} strategy rows for {ch.s_size} states")
    for s, row in enumerate(rows):
        if len(row) != ch.x_size:
            raise ValueError(f"strategy row {s} has {len(row)} entries for {ch.x_size} inputs")
        if any(p < 0 for p in row) or sum(row, ZERO) != 1:
            raise ValueError(f"strategy row {s} is not a probability distribution: {row}")
    return rows


def _output_tables(
    ch: ChannelWithState, strategy: InputStrategy
) -> tuple[list[list[Fraction]], list[list[list[Fraction]]]]:
    """Per-state output law p_y[s][y] and joint law p_xy[s][x][y]."""
    p_y = [[ZERO] * ch.y_size for _ in range(ch.s_size)]
    p_xy = [[[ZERO] * ch.y_size for _ in range(ch.x_size)] for _ in range(ch.s_size)]
    for s in range(ch.s_size):
        for x in range(ch.x_size):
            px = strategy[s][x]
            for y in range(ch.y_size):
                v = px * ch.prob(y, x, s)
                p_xy[s][x][y] = v
                p_y[s][y] += v
    return p_y, p_xy


@dataclass(frozen=True)
class AuthScheme:
    """A fully parameterized scheme instance.

    `message_count` defaults to ceil(mu) but may be any integer at least
    that large; `acceptance` (the lambda scaling) is mu / message_count
    and always lies in (0, 1].
    """

    channel: ChannelWithState
    strategy: InputStrategy
    n: int
    eps: Fraction
    state_budgets: Budgets
    y_budgets: tuple[Optional[Budgets], ...]
    p_y_given_s: tuple[tuple[Fraction, ...], ...]
    p_xy_given_s: tuple[tuple[tuple[Fraction, ...], ...], ...]
    mu: Fraction
    message_count: int
    acceptance: Fraction

    def rate(self) -> float:
        return math.log2(self.message_count) / self.n

    def kept_block_lengths(self) -> tuple[int, ...]:
        """Per-state length of the typicality test block (the n-tilde values)."""
        return tuple(
            sum(b.per_symbol) if b is not None else 0 for b in self.y_budgets
        )


# -- mu ---------------------------------------------------------------------


def typicality_pass_probability(
    p_x: Sequence[object],
    p_xy: Sequence[Sequence[object]],
    y_type: Sequence[int],
    eps: object,
    method: str = "types",
) -> Fraction:
    """Probability that i.i.d. inputs drawn from `p_x`, paired with a fixed
    output block of composition `y_type`, land in the joint typical set.

    The pairs in distinct output-symbol groups are independent, and the
    typicality window constrains each pair count separately, so the
    probability is a product over output symbols of bounded multinomial
    sums ("types").  The "enumerate" method instead walks every input
    block against a canonical arrangement of `y_type` — exponential, but
    an independent cross-check.
    """
    eps = as_rational(eps)
    if not ZERO < eps < ONE:
        raise ValueError(f"eps must be in (0, 1), got {eps}")
    px = [as_rational(p) for p in p_x]
    joint = [[as_rational(v) for v in row] for row in p_xy]
    x_size = len(px)
    y_size = len(joint[0]) if joint else 0
    counts = list(y_type)
    if len(counts) != y_size:
        raise ValueError(f"{len(counts)} output counts for {y_size} output symbols")
    n_tilde = sum(counts)
    if n_tilde == 0:
        return ONE

    if method == "enumerate":
        if x_size**n_tilde > MU_BRUTE_FORCE_CAP:
            raise ValueError(
                f"{x_size}^{n_tilde} input blocks exceed the enumeration cap {MU_BRUTE_FORCE_CAP}"
            )
        canonical = [y for y in range(y_size) for _ in range(counts[y])]
        total = ZERO
        for xs in itertools.product(range(x_size), repeat=n_tilde):
            prob = ONE
            for x in xs:
                prob *= px[x]
            if prob and jointly_typical(xs, canonical, joint, eps):
                total += prob
        return total
    if method != "types":
        raise ValueError(f"method must be 'types' or 'enumerate', got {method!r}")

    if n_tilde > MU_TYPE_ENUM_CAP:
        raise ValueError(
            f"kept block length {n_tilde} exceeds the exact cap {MU_TYPE_ENUM_CAP};"
            " use estimate_mu for a Monte Carlo estimate"
        )
    result = ONE
    for y in range(y_size):
        m = counts[y]
        column = [joint[x][y] for x in range(x_size)]
        if m == 0:
            # A pair cell with positive probability must appear at least
            # n_tilde * p * (1 - eps) > 0 times, but this group is empty.
            if any(column):
                return ZERO
            continue
        windows = []
        for x in range(x_size):
            lo_b = n_tilde * column[x] * (1 - eps)
            hi_b = n_tilde * column[x] * (1 + eps)
            lo = max(0, rational_ceil(lo_b))
            hi = min(m, math.floor(hi_b))
            if lo > hi:
                return ZERO
            windows.append(range(lo, hi + 1))
        factor = ZERO
        for combo in itertools.product(*windows):
            if sum(combo) != m:
                continue
            term = Fraction(math.factorial(m))
            for x, k in enumerate(combo):
                if k:
                    if px[x] == 0:
                        term = ZERO
                        break
                    term *= px[x] ** k
                term /= math.factorial(k)
            factor += term
        if factor == 0:
            return ZERO
        result *= factor
    return result


def _scheme_tables(ch: ChannelWithState, strategy: InputStrategy, n: int, eps: Fraction):
    state_b = budgets(n, ch.s_size, ch.state_dist, eps)
    p_y, p_xy = _output_tables(ch, strategy)
    y_b: list[Optional[Budgets]] = []
    for s in range(ch.s_size):
        n_s = state_b.per_symbol[s]
        y_b.append(budgets(n_s, ch.y_size, p_y[s], eps) if n_s > 0 else None)
    return state_b, tuple(y_b), p_y, p_xy


def compute_mu(
    ch: ChannelWithState,
    strategy: Sequence[Sequence[object]],
    n: int,
    eps: object,
    method: str = "types",
) -> Fraction:
    """The reciprocal of the probability that an independent input block
    passes every per-state typicality test; always >= 1.

    Raises DegenerateSchemeError when that probability is zero, and
    ValueError past the exact-arithmetic caps (estimate_mu covers those).
    """
    eps = as_rational(eps)
    strat = _clean_strategy(ch, strategy)
    _, y_b, _, p_xy = _scheme_tables(ch, strat, n, eps)
    prob = ONE
    for s in range(ch.s_size):
        if y_b[s] is None:
            continue
        prob *= typicality_pass_probability(
            strat[s], p_xy[s], y_b[s].per_symbol, eps, method=method
        )
    if prob == 0:
        raise DegenerateSchemeError(
            "no input block passes the typicality test for these parameters"
        )
    return 1 / prob


def mu_by_enumeration(
    ch: ChannelWithState, strategy: Sequence[Sequence[object]], n: int, eps: object
) -> Fraction:
    """compute_mu with every per-state factor found by brute-force input
    enumeration instead of type counting; for cross-checks on small blocks."""
    return compute_mu(ch, strategy, n, eps, method="enumerate")


def estimate_mu(
    ch: ChannelWithState,
    strategy: Sequence[Sequence[object]],
    n: int,
    eps: object,
    samples: int = 100_000,
    seed: int = 0,
) -> tuple[float, tuple[float, float]]:
    """Monte Carlo estimate of mu with a 95% confidence interval.

    Samples fresh input blocks against the fixed canonical output
    compositions and inverts the estimated pass probability; the upper
    endpoint is inf when the lower pass-frequency bound hits zero.
    """
    eps = as_rational(eps)
    strat = _clean_strategy(ch, strategy)
    _, y_b, _, p_xy = _scheme_tables(ch, strat, n, eps)
    blocks = []
    for s in range(ch.s_size):
        if y_b[s] is None:
            continue
        counts = y_b[s].per_symbol
        canonical = [y for y in range(ch.y_size) for _ in range(counts[y])]
        if canonical:
            weights = [float(p) for p in strat[s]]
            blocks.append((s, canonical, weights))
    if not blocks:
        return 1.0, (1.0, 1.0)
    rng = random.Random(seed)
    wins = 0
    for _ in range(samples):
        ok = True
        for s, canonical, weights in blocks:
            xs = rng.choices(range(ch.x_size), weights=weights, k=len(canonical))
            if not jointly_typical(xs, canonical, p_xy[s], eps):
                ok = False
                break
        wins += ok
    p_hat = wins / samples
    half = 1.96 * math.sqrt(max(p_hat * (1 - p_hat), 0.0) / samples)
    lo_p, hi_p = max(p_hat - half, 0.0), min(p_hat + half, 1.0)
    mu_est = math.inf if p_hat == 0 else 1 / p_hat
    mu_hi = math.inf if lo_p == 0 else 1 / lo_p
    mu_lo = 1 / hi_p if hi_p > 0 else math.inf
    return mu_est, (mu_lo, mu_hi)


def build_auth_scheme(
    ch: ChannelWithState,
    strategy: Sequence[Sequence[object]],
    n: int,
    eps: object,
    message_count: Optional[int] = None,
) -> AuthScheme:
    """Derive every scheme parameter from (channel, P_{X|S}, n, eps).

    The message count defaults to ceil(mu); any larger integer is also
    valid (the acceptance scaling shrinks to compensate), which is how a
    block length too short to support two messages on its own is still
    given a meaningful multi-message scheme.
    """
    eps = as_rational(eps)
    strat = _clean_strategy(ch, strategy)
    state_b, y_b, p_y, p_xy = _scheme_tables(ch, strat, n, eps)
    prob = ONE
    for s in range(ch.s_size):
        if y_b[s] is None:
            continue
        prob *= typicality_pass_probability(strat[s], p_xy[s], y_b[s].per_symbol, eps)
    if prob == 0:
        raise DegenerateSchemeError(
            "no input block passes the typicality test for these parameters"
        )
    mu = 1 / prob
    minimum = rational_ceil(mu)
    if message_count is None:
        message_count = minimum
    elif message_count < minimum:
        raise ValueError(f"message_count must be at least ceil(mu) = {minimum}, got {message_count}")
    lam = mu / message_count
    assert ZERO < lam <= ONE and lam * message_count == mu
    return AuthScheme(
        channel=ch,
        strategy=strat,
        n=n,
        eps=eps,
        state_budgets=state_b,
        y_budgets=y_b,
        p_y_given_s=tuple(tuple(row) for row in p_y),
        p_xy_given_s=tuple(tuple(tuple(r) for r in rows) for rows in p_xy),
        mu=mu,
        message_count=message_count,
        acceptance=lam,
    )


# -- encoder and test -------------------------------------------------------


def zeta(scheme: AuthScheme, i: int, x: int, s_prefix: Sequence[int]) -> Fraction:
    """Probability the encoder puts symbol `x` at position `i`, given the
    first i states; uniform on placeholder positions, P_{X|S} otherwise."""
    if not 1 <= i <= scheme.n:
        raise ValueError(f"position {i} outside 1..{scheme.n}")
    if len(s_prefix) != i:
        raise ValueError(f"prefix of length {len(s_prefix)} for position {i}")
    if not 0 <= x < scheme.channel.x_size:
        raise ValueError(f"input symbol {x} out of range")
    mapped = map_with_budgets(s_prefix, scheme.state_budgets)
    kept = mapped.output[-1]
    if kept == placeholder(scheme.channel.s_size):
        return Fraction(1, scheme.channel.x_size)
    return scheme.strategy[kept][x]


def _input_weight(scheme: AuthScheme, xs: Sequence[int], mapped_states: Sequence[int]) -> Fraction:
    phi = placeholder(scheme.channel.s_size)
    uniform = Fraction(1, scheme.channel.x_size)
    w = ONE
    for x, s in zip(xs, mapped_states):
        w *= uniform if s == phi else scheme.strategy[s][x]
        if not w:
            break
    return w


def _kept_pairs(scheme: AuthScheme, ys: Sequence[int], mapped_states: Sequence[int]):
    """Per state sigma: positions whose mapped output survives, with that
    output value, plus the output-mapper flags."""
    phi_y = placeholder(scheme.channel.y_size)
    result = []
    flags = []
    for s in range(scheme.channel.s_size):
        b = scheme.y_budgets[s]
        if b is None:
            continue
        block = [i for i, v in enumerate(mapped_states) if v == s]
        mapped = map_with_budgets([ys[i] for i in block], b)
        flags.append(mapped.flag)
        kept_positions = []
        kept_outputs = []
        for j, v in enumerate(mapped.output):
            if v != phi_y:
                kept_positions.append(block[j])
                kept_outputs.append(v)
        result.append((s, kept_positions, kept_outputs))
    return result, flags


def _accepts(scheme: AuthScheme, xs: Sequence[int], ys: Sequence[int], mapped_states) -> bool:
    kept, _ = _kept_pairs(scheme, ys, mapped_states)
    for s, positions, outputs in kept:
        inputs = [xs[i] for i in positions]
        if not jointly_typical(inputs, outputs, scheme.p_xy_given_s[s], scheme.eps):
            return False
    return True


def t_function(scheme: AuthScheme, xs: Sequence[int], ys: Sequence[int], ss: Sequence[int]) -> Fraction:
    """The acceptance weight: `acceptance` if every per-state block of kept
    (input, mapped output) pairs is jointly typical, else 0."""
    for name, seq in (("x", xs), ("y", ys), ("s", ss)):
        if len(seq) != scheme.n:
            raise ValueError(f"{name}-sequence has length {len(seq)}, expected {scheme.n}")
    mapped_states = map_with_budgets(ss, scheme.state_budgets).output
    return scheme.acceptance if _accepts(scheme, xs, ys, mapped_states) else ZERO


# -- dense tensor -----------------------------------------------------------


@dataclass
class SchemeTensor:
    """Dense table Z(x^n, w-hat | w, s^n, y^n), exact rationals.

    `entries` has shape (|X|^n, M, M, |S|^n, |Y|^n) with blocks indexed
    as in `indexing` (position 1 most significant).
    """

    message_count: int
    n: int
    x_size: int
    s_size: int
    y_size: int
    entries: np.ndarray

    def entry(self, xs, w_hat: int, w: int, ss, ys) -> Fraction:
        return self.entries[
            seq_to_index(xs, self.x_size),
            w_hat,
            w,
            seq_to_index(ss, self.s_size),
            seq_to_index(ys, self.y_size),
        ]

    def validate(self) -> None:
        nx, m1, m2, ns, ny = self.entries.shape
        expected = (self.x_size**self.n, self.message_count, self.message_count,
                    self.s_size**self.n, self.y_size**self.n)
        if (nx, m1, m2, ns, ny) != expected:
            raise ValueError(f"entry shape {self.entries.shape} does not match {expected}")
        if any(v < 0 for v in self.entries.flat):
            raise ValueError("negative tensor entry")
        sums = self.entries.sum(axis=(0, 1))
        for w in range(m2):
            for si in range(ns):
                for yi in range(ny):
                    if sums[w, si, yi] != 1:
                        raise ValueError(
                            f"entries for (w={w}, s_index={si}, y_index={yi}) sum to"
                            f" {sums[w, si, yi]}, not 1"
                        )

    def message_marginals(self) -> np.ndarray:
        """Z(w-hat | w, s^n, y^n): entries summed over the input block."""
        return self.entries.sum(axis=0)


def materialize_tensor(scheme: AuthScheme, cap: int = TENSOR_ENTRY_CAP) -> SchemeTensor:
    """Write the scheme out as a dense tensor (small blocks only)."""
    ch = scheme.channel
    n, m = scheme.n, scheme.message_count
    nx, ns, ny = ch.x_size**n, ch.s_size**n, ch.y_size**n
    total = nx * m * m * ns * ny
    if total > cap:
        raise ValueError(f"{total} tensor entries exceed the cap {cap}")
    entries = np.empty((nx, m, m, ns, ny), dtype=object)
    for si in range(ns):
        ss = index_to_seq(si, ch.s_size, n)
        mapped_states = map_with_budgets(ss, scheme.state_budgets).output
        weights = [
            _input_weight(scheme, index_to_seq(xi, ch.x_size, n), mapped_states)
            for xi in range(nx)
        ]
        for yi in range(ny):
            ys = index_to_seq(yi, ch.y_size, n)
            for xi in range(nx):
                zeta_w = weights[xi]
                if m == 1:
                    entries[xi, 0, 0, si, yi] = zeta_w
                    continue
                xs = index_to_seq(xi, ch.x_size, n)
                t = scheme.acceptance if (
                    zeta_w and _accepts(scheme, xs, ys, mapped_states)
                ) else ZERO
                miss = (1 - t) / (m - 1)
                for w in range(m):
                    for wh in range(m):
                        entries[xi, wh, w, si, yi] = (zeta_w * t if wh == w
                                                      else zeta_w * miss)
    return SchemeTensor(
        message_count=m, n=n,
        x_size=ch.x_size, s_size=ch.s_size, y_size=ch.y_size,
        entries=entries,
    )


# -- condition checks -------------------------------------------------------


@dataclass
class ConditionReport:
    """Exhaustive exact check results; each list holds violated cells."""

    c1: list[str]
    c2: list[str]
    c3: list[str]
    combined: list[str]

    def all_pass(self) -> bool:
        return not (self.c1 or self.c2 or self.c3 or self.combined)


def verify_conditions(tensor: SchemeTensor) -> ConditionReport:
    """Check the three invariance conditions cell by cell.

    The first: the guess marginal may not react to the output block.
    The second: the input-block marginal may not react to the message or
    the state block.  The third, for every split point i: the law of the
    first i inputs may not react to states after the split — and,
    combined with the second, not to the outputs either.
    """
    z = tensor.entries
    nx, m, _, ns, ny = z.shape
    n, xk, sk = tensor.n, tensor.x_size, tensor.s_size
    c1, c2, c3, combined = [], [], [], []

    guess = z.sum(axis=1)  # (x, w, s, y)
    for xi in range(nx):
        for w in range(m):
            for si in range(ns):
                ref = guess[xi, w, si, 0]
                for yi in range(1, ny):
                    if guess[xi, w, si, yi] != ref:
                        c1.append(f"c1[x={xi},w={w},s={si},y={yi}]")

    inputs = z.sum(axis=0)  # (wh, w, s, y)
    for wh in range(m):
        for yi in range(ny):
            ref = inputs[wh, 0, 0, yi]
            for w in range(m):
                for si in range(ns):
                    if inputs[wh, w, si, yi] != ref:
                        c2.append(f"c2[wh={wh},w={w},s={si},y={yi}]")

    for i in range(1, n):
        head_x, tail_x = xk**i, xk ** (n - i)
        head_s, tail_s = sk**i, sk ** (n - i)
        # law of the first i inputs, jointly with the guess
        g = z.reshape(head_x, tail_x, m, m, head_s, tail_s, ny).sum(axis=1)
        for hx in range(head_x):
            for wh in range(m):
                for w in range(m):
                    for hs in range(head_s):
                        for yi in range(ny):
                            ref = g[hx, wh, w, hs, 0, yi]
                            for ts in range(1, tail_s):
                                if g[hx, wh, w, hs, ts, yi] != ref:
                                    c3.append(
                                        f"c3[i={i},x^i={hx},wh={wh},w={w},"
                                        f"s^i={hs},tail={ts},y={yi}]"
                                    )
        h = g.sum(axis=1)  # (head_x, w, head_s, tail_s, y)
        for hx in range(head_x):
            for w in range(m):
                for hs in range(head_s):
                    ref = h[hx, w, hs, 0, 0]
                    for ts in range(tail_s):
                        for yi in range(ny):
                            if h[hx, w, hs, ts, yi] != ref:
                                combined.append(
                                    f"combined[i={i},x^i={hx},w={w},s^i={hs},"
                                    f"tail={ts},y={yi}]"
                                )
    return ConditionReport(c1=c1, c2=c2, c3=c3, combined=combined)


# -- success probability ----------------------------------------------------


def _resolve_block_state(
    ch: ChannelWithState, block_state: Optional[BlockStateSource], n: int
):
    source = block_state if block_state is not None else ch.block_state
    if source is not None and source.n != n:
        raise ValueError(f"block state source has length {source.n}, scheme has n = {n}")
    return source


def _state_blocks(ch: ChannelWithState, source: Optional[BlockStateSource], n: int):
    if source is not None:
        for ss, p in source.atoms:
            if p:
                yield list(ss), p
        return
    support = [s for s in range(ch.s_size) if ch.state_prob(s)]
    for ss in itertools.product(support, repeat=n):
        p = ONE
        for s in ss:
            p *= ch.state_prob(s)
        yield list(ss), p


def _tensor_success(
    tensor: SchemeTensor, ch: ChannelWithState, source: Optional[BlockStateSource]
) -> Fraction:
    n, m = tensor.n, tensor.message_count
    nx, ny = ch.x_size**n, ch.y_size**n
    total = ZERO
    inv_m = Fraction(1, m)
    for ss, p_s in _state_blocks(ch, source, n):
        si = seq_to_index(ss, ch.s_size)
        for xi in range(nx):
            xs = index_to_seq(xi, ch.x_size, n)
            for yi in range(ny):
                cell = sum((tensor.entries[xi, w, w, si, yi] for w in range(m)), ZERO)
                if not cell:
                    continue
                ys = index_to_seq(yi, ch.y_size, n)
                p_y = ONE
                for x, s, y in zip(xs, ss, ys):
                    p_y *= ch.prob(y, x, s)
                    if not p_y:
                        break
                if p_y:
                    total += p_s * p_y * inv_m * cell
    return total


def _walk_outputs(ch: ChannelWithState, xs, ss):
    """Yield (y^n, probability) over blocks with positive channel weight."""
    supports = []
    for x, s in zip(xs, ss):
        row = [(y, ch.prob(y, x, s)) for y in range(ch.y_size) if ch.prob(y, x, s)]
        supports.append(row)
    for combo in itertools.product(*supports):
        p = ONE
        for _, q in combo:
            p *= q
        yield [y for y, _ in combo], p


def _scheme_success_exact(
    scheme: AuthScheme,
    source: Optional[BlockStateSource],
    cap: int,
    ch: Optional[ChannelWithState] = None,
) -> Fraction:
    ch = ch if ch is not None else scheme.channel
    n = scheme.n
    y_max = max(
        sum(1 for y in range(ch.y_size) if ch.prob(y, x, s))
        for s in range(ch.s_size)
        for x in range(ch.x_size)
    )
    s_count = sum(1 for _ in _state_blocks(ch, source, n))
    if s_count * (ch.x_size**n) * (y_max**n) > cap:
        raise ValueError(
            f"about {s_count * ch.x_size ** n * y_max ** n} terms exceed the exact cap {cap};"
            " use monte_carlo mode"
        )
    total = ZERO
    for ss, p_s in _state_blocks(ch, source, n):
        mapped_states = map_with_budgets(ss, scheme.state_budgets).output
        for xs in itertools.product(range(ch.x_size), repeat=n):
            w_in = _input_weight(scheme, xs, mapped_states)
            if not w_in:
                continue
            for ys, p_y in _walk_outputs(ch, xs, ss):
                if scheme.message_count == 1:
                    total += p_s * w_in * p_y
                elif _accepts(scheme, xs, ys, mapped_states):
                    total += p_s * w_in * p_y * scheme.acceptance
    return total


def _sample_states(ch, source, n, rng):
    if source is not None:
        atoms = [list(ss) for ss, _ in source.atoms]
        weights = [float(p) for _, p in source.atoms]
        return atoms[rng.choices(range(len(atoms)), weights=weights, k=1)[0]]
    weights = [float(p) for p in ch.state_dist]
    return rng.choices(range(ch.s_size), weights=weights, k=n)


def _scheme_success_monte_carlo(
    scheme: AuthScheme,
    source: Optional[BlockStateSource],
    samples: int,
    seed: int,
    ch: Optional[ChannelWithState] = None,
) -> tuple[float, tuple[float, float]]:
    ch = ch if ch is not None else scheme.channel
    n = scheme.n
    rng = random.Random(seed)
    phi = placeholder(ch.s_size)
    uniform = [1.0] * ch.x_size
    strat_w = [[float(p) for p in row] for row in scheme.strategy]
    kernel_w = [
        [[float(ch.prob(y, x, s)) for y in range(ch.y_size)] for x in range(ch.x_size)]
        for s in range(ch.s_size)
    ]
    lam = float(scheme.acceptance)
    wins = 0
    for _ in range(samples):
        ss = _sample_states(ch, source, n, rng)
        mapped_states = map_with_budgets(ss, scheme.state_budgets).output
        xs = [
            rng.choices(
                range(ch.x_size),
                weights=uniform if ms == phi else strat_w[ms],
                k=1,
            )[0]
            for ms in mapped_states
        ]
        ys = [
            rng.choices(range(ch.y_size), weights=kernel_w[s][x], k=1)[0]
            for x, s in zip(xs, ss)
        ]
        if scheme.message_count == 1:
            wins += 1
        elif _accepts(scheme, xs, ys, mapped_states) and rng.random() < lam:
            wins += 1
    p_hat = wins / samples
    half = 1.96 * math.sqrt(max(p_hat * (1 - p_hat), 0.0) / samples)
    return p_hat, (max(p_hat - half, 0.0), min(p_hat + half, 1.0))


def success_probability(
    target: Union[AuthScheme, SchemeTensor],
    channel: Optional[ChannelWithState] = None,
    block_state: Optional[BlockStateSource] = None,
    mode: str = "exact",
    samples: int = 100_000,
    seed: int = 0,
    cap: int = EXACT_SUCCESS_CAP,
):
    """Probability that the decoded message equals the sent one.

    Exact mode returns a Fraction: the average over messages of the
    diagonal tensor entries weighted by the state source and the channel
    law.  Monte Carlo mode (schemes only) samples the whole pipeline
    forward and returns (estimate, 95% confidence interval).
    """
    if isinstance(target, SchemeTensor):
        if channel is None:
            raise ValueError("a channel is required to evaluate a bare tensor")
        if mode != "exact":
            raise ValueError("bare tensors only support exact evaluation")
        source = _resolve_block_state(channel, block_state, target.n)
        return _tensor_success(target, channel, source)
    ch = channel if channel is not None else target.channel
    source = _resolve_block_state(ch, block_state, target.n)
    if mode == "exact":
        return _scheme_success_exact(target, source, cap, ch)
    if mode == "monte_carlo":
        return _scheme_success_monte_carlo(target, source, samples, seed, ch)
    raise ValueError(f"mode must be 'exact' or 'monte_carlo', got {mode!r}")


@dataclass
class SuccessDecomposition:
    """Exact pieces of the success probability around the flag event F
    (all mappers finish without hitting their fallback branch)."""

    success: Fraction
    acceptance: Fraction
    p_flag: Fraction
    p_accept_given_flag: Fraction

    def lower_bound(self) -> Fraction:
        return self.acceptance * self.p_flag * self.p_accept_given_flag


def success_decomposition(
    scheme: AuthScheme,
    block_state: Optional[BlockStateSource] = None,
    cap: int = EXACT_SUCCESS_CAP,
) -> SuccessDecomposition:
    """One exact pass computing the success probability together with the
    flag probability and the conditional acceptance rate, so that
    success >= acceptance * P(F=1) * P(accept | F=1) can be checked."""
    ch = scheme.channel
    source = _resolve_block_state(ch, block_state, scheme.n)
    y_max = max(
        sum(1 for y in range(ch.y_size) if ch.prob(y, x, s))
        for s in range(ch.s_size)
        for x in range(ch.x_size)
    )
    s_count = sum(1 for _ in _state_blocks(ch, source, scheme.n))
    if s_count * (ch.x_size**scheme.n) * (y_max**scheme.n) > cap:
        raise ValueError(f"exact decomposition exceeds the cap {cap}")
    p_accept = ZERO
    p_flag = ZERO
    p_both = ZERO
    for ss, p_s in _state_blocks(ch, source, scheme.n):
        s_mapped = map_with_budgets(ss, scheme.state_budgets)
        mapped_states = s_mapped.output
        for xs in itertools.product(range(ch.x_size), repeat=scheme.n):
            w_in = _input_weight(scheme, xs, mapped_states)
            if not w_in:
                continue
            for ys, p_y in _walk_outputs(ch, xs, ss):
                weight = p_s * w_in * p_y
                _, y_flags = _kept_pairs(scheme, ys, mapped_states)
                flag = bool(s_mapped.flag) and all(y_flags)
                accept = _accepts(scheme, xs, ys, mapped_states)
                if accept:
                    p_accept += weight
                if flag:
                    p_flag += weight
                    if accept:
                        p_both += weight
    given = p_both / p_flag if p_flag else ZERO
    return SuccessDecomposition(
        success=scheme.acceptance * p_accept,
        acceptance=scheme.acceptance,
        p_flag=p_flag,
        p_accept_given_flag=given,
    )


# -- hand-built toy scheme --------------------------------------------------


def _canonical_state_block(ss: Sequence[int]) -> tuple[int, ...]:
    """Extend the three supported state blocks to all of {0,1}^3 by mapping
    every block to the supported one it shares its decisive prefix with."""
    if ss[0] == 0:
        return (0, 1, 1)
    if ss[1] == 0:
        return (1, 0, 1)
    return (1, 1, 0)


def toy_product_scheme() -> SchemeTensor:
    """A hand-built 4-message, 3-use scheme for the y = x*s channel with
    the correlated source supported on blocks with exactly one zero.

    Inputs are uniform (weight 1/8); the test demands y_i = x_i on every
    position where the canonical state block is 1.  On the supported
    blocks the channel wipes exactly the one position the test ignores,
    so the right message is decoded with certainty.
    """
    ch = builtin_product_xs()
    m, n = 4, 3
    nx, ns, ny = 8, 8, 8
    eighth = Fraction(1, 8)
    entries = np.empty((nx, m, m, ns, ny), dtype=object)
    for si in range(ns):
        rep = _canonical_state_block(index_to_seq(si, 2, n))
        for xi in range(nx):
            xs = index_to_seq(xi, 2, n)
            for yi in range(ny):
                ys = index_to_seq(yi, 2, n)
                t = ONE if all(
                    y == x for x, y, s in zip(xs, ys, rep) if s == 1
                ) else ZERO
                miss = (1 - t) / (m - 1)
                for w in range(m):
                    for wh in range(m):
                        entries[xi, wh, w, si, yi] = eighth * (t if wh == w else miss)
    return SchemeTensor(message_count=m, n=n, x_size=2, s_size=2, y_size=2, entries=entries)
