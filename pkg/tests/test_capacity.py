import numpy as np
import pytest
from fractions import Fraction
from math import log2

from nscoding.capacity import (
    BlahutArimotoResult,
    CapacityReport,
    blahut_arimoto,
    capacity_table,
    conditional_mi,
    gp_noncausal_capacity,
    ns_capacity,
    shannon_causal_capacity,
    strategy_channel,
)
from nscoding.capacity import ConvergenceError
from nscoding.channels import builtin_z0z1, lift_csir, make_channel

H = Fraction(1, 2)


def hb(p):
    return 0.0 if p in (0.0, 1.0) else -p * log2(p) - (1 - p) * log2(1 - p)


def mi_oracle(joint):
    """Direct summation over the joint table, 0*log(0) = 0."""
    joint = np.asarray(joint, float)
    px = joint.sum(1)
    py = joint.sum(0)
    total = 0.0
    for i in range(joint.shape[0]):
        for j in range(joint.shape[1]):
            if joint[i, j] > 0:
                total += joint[i, j] * log2(joint[i, j] / (px[i] * py[j]))
    return total


def grid_search_binary_capacity(rows, step=1e-6):
    """Capacity of a 2-input channel by brute grid over the input simplex."""
    rows = np.asarray(rows, float)
    p = np.arange(0.0, 1.0 + step, step)
    joint0 = p[:, None] * rows[0][None, :]
    joint1 = (1 - p)[:, None] * rows[1][None, :]
    py = joint0 + joint1
    def ent(m):
        out = np.zeros_like(m)
        np.multiply(m, np.log2(m, out=np.zeros_like(m), where=m > 0), out=out, where=m > 0)
        return -out.sum(axis=1)
    hy = ent(py)
    hy_x = p * ent(rows[0][None, :])[0] + (1 - p) * ent(rows[1][None, :])[0]
    return float(np.max(hy - hy_x))


def test_conditional_mi_matches_direct_summation():
    ch = builtin_z0z1()
    strat = [[0.5, 0.5], [0.5, 0.5]]
    got = conditional_mi(ch, strat)
    # oracle: sum over the 8-cell joint P(s)P(x|s)N(y|x,s)
    expect = 0.0
    for s in (0, 1):
        joint = np.array([[0.5 * float(ch.prob(y, x, s)) for y in (0, 1)] for x in (0, 1)])
        expect += 0.5 * mi_oracle(joint)
    assert got == pytest.approx(expect, abs=1e-15)
    assert got == pytest.approx(hb(0.25) - 0.5, abs=1e-12)  # = 0.311278124459133
    assert got == pytest.approx(0.311278124459133, abs=1e-12)


def test_conditional_mi_identity_channel():
    ident = [[1, 0], [0, 1]]
    ch = make_channel([ident, ident], [H, H])
    assert conditional_mi(ch, [[0.5, 0.5], [0.5, 0.5]]) == pytest.approx(1.0, abs=1e-12)


def test_conditional_mi_validates_strategy():
    ch = builtin_z0z1()
    with pytest.raises(ValueError, match="shape"):
        conditional_mi(ch, [[1.0, 0.0]])
    with pytest.raises(ValueError, match="probability"):
        conditional_mi(ch, [[0.9, 0.3], [0.5, 0.5]])


def test_blahut_arimoto_known_channels():
    # noiseless binary channel
    res = blahut_arimoto(np.eye(2))
    assert res.value == pytest.approx(1.0, abs=1e-9)
    # useless channel
    res = blahut_arimoto(np.array([[0.5, 0.5], [0.5, 0.5]]))
    assert res.value == pytest.approx(0.0, abs=1e-12)
    # BSC(1/8)
    res = blahut_arimoto(np.array([[0.875, 0.125], [0.125, 0.875]]))
    assert res.value == pytest.approx(1 - hb(0.125), abs=1e-9)
    assert res.input_dist == pytest.approx([0.5, 0.5], abs=1e-6)


def test_blahut_arimoto_trace_monotone():
    rows = np.array([[0.7, 0.2, 0.1], [0.1, 0.1, 0.8]])
    res = blahut_arimoto(rows)
    diffs = np.diff(res.trace)
    assert np.all(diffs >= -1e-12)
    assert res.trace[-1] >= res.trace[0]


def test_blahut_arimoto_nonconvergence_reports_gap():
    with pytest.raises(ConvergenceError, match="iterations"):
        blahut_arimoto(np.array([[1.0, 0.0], [0.5, 0.5]]), tol=1e-15, max_iter=3)


def test_ns_capacity_z0z1_grid_oracle():
    ch = builtin_z0z1()
    res = ns_capacity(ch)
    # each state is a Z-channel; capacity by brute grid, then average
    grid = 0.0
    for s in (0, 1):
        rows = [[float(ch.prob(y, x, s)) for y in (0, 1)] for x in (0, 1)]
        grid += 0.5 * grid_search_binary_capacity(rows)
    assert res.value == pytest.approx(grid, abs=1e-6)
    assert res.value == pytest.approx(log2(5 / 4), abs=1e-9)
    # maximizer puts 2/5 on the noisy input in each state
    assert res.p_x_given_s[0] == pytest.approx([0.6, 0.4], abs=1e-5)
    assert res.p_x_given_s[1] == pytest.approx([0.4, 0.6], abs=1e-5)


def test_strategy_channel_rows():
    rows, maps = strategy_channel(builtin_z0z1())
    assert maps == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert rows == pytest.approx(np.array([[0.75, 0.25], [0.5, 0.5], [0.5, 0.5], [0.25, 0.75]]))


def test_shannon_causal_z0z1():
    # the constant maps form an effective BSC(1/4); the mixed maps are useless
    got = shannon_causal_capacity(builtin_z0z1())
    assert got == pytest.approx(1 - hb(0.25), abs=1e-8)
    # no sampled strategy-channel input beats the reported value
    rows, _ = strategy_channel(builtin_z0z1())
    rng = np.random.default_rng(0)
    for _ in range(200):
        p = rng.dirichlet(np.ones(4))
        assert mi_oracle(p[:, None] * rows) <= got + 1e-8


def test_strategy_channel_cap():
    ch = make_channel([[[1, 0]] * 8] * 5, [Fraction(1, 5)] * 5)  # 8^5 = 32768 letters
    with pytest.raises(ValueError, match="cap"):
        strategy_channel(ch)


def test_gp_bound_sandwich_z0z1():
    ch = builtin_z0z1()
    causal = shannon_causal_capacity(ch)
    ns = ns_capacity(ch).value
    gp = gp_noncausal_capacity(ch, restarts=8, seed=0)
    assert causal - 1e-9 <= gp <= ns + 1e-9


def test_gp_state_independent_channel_recovers_capacity():
    bsc = [[Fraction(7, 8), Fraction(1, 8)], [Fraction(1, 8), Fraction(7, 8)]]
    ch = make_channel([bsc, bsc], [H, H])
    gp = gp_noncausal_capacity(ch, restarts=4, seed=0)
    assert gp == pytest.approx(1 - hb(0.125), abs=1e-3)


def test_capacity_table_csir_lift_collapses():
    rep = capacity_table(lift_csir(builtin_z0z1()))
    cells = list(rep.cells().values())
    for v in cells:
        assert v == pytest.approx(log2(5 / 4), abs=1e-3)
    assert rep.ns_causal == rep.ns_noncausal
    assert rep.classical_noncausal_is_lower_bound


def test_capacity_table_ordering_z0z1():
    rep = capacity_table(builtin_z0z1())
    assert rep.classical_causal <= rep.classical_noncausal + 1e-9
    assert rep.classical_noncausal <= rep.ns_causal + 1e-9
    assert rep.ns_causal == rep.ns_noncausal
