"""Exhaustive classical encoder search on small instances.

The headline numbers: with two uses of the two-state builtin and the
receiver informed of the states, the best deterministic causal strategy
succeeds with probability exactly 7/8 (the state-correcting repetition
strategy is a maximizer), while without receiver state information the
optimum drops to 3/4 — below the assisted causal value 13/16, as it
must be.
"""

import random
from fractions import Fraction as F

import pytest

from nscoding.channels import builtin_z0z1, lift_csir, make_channel
from nscoding.classical import (
    classical_opt_success,
    encoder_table_lines,
    evaluate_strategy,
    explicit_z0z1_strategy,
)
from nscoding.ns_lp import build_lp2
from nscoding.simplex import solve_exact

CSIR_OPT = F(7, 8)
PLAIN_OPT = F(3, 4)


def test_explicit_strategy_value_and_breakdown():
    strat = explicit_z0z1_strategy()
    assert strat.success == CSIR_OPT
    assert strat.per_message == (F(1), F(3, 4))


def test_explicit_strategy_agrees_with_direct_evaluation():
    # the success field is itself produced by the generic evaluator; force
    # the comparison anyway so a refactor of either side gets caught
    strat = explicit_z0z1_strategy()
    success, per_message = evaluate_strategy(
        builtin_z0z1(), strat.encoder, strat.decoder, csir=True
    )
    assert success == strat.success
    assert per_message == strat.per_message


def test_explicit_encoder_sends_state_xor_message():
    enc = explicit_z0z1_strategy().encoder
    assert enc.input_block(0, (0, 1)) == (0, 1)
    assert enc.input_block(1, (0, 1)) == (1, 0)
    assert enc.input_symbol(2, 1, (1, 1)) == 0


def test_enumeration_reaches_the_explicit_value():
    value, witness = classical_opt_success(builtin_z0z1(), 2, 2, csir=True)
    assert value == CSIR_OPT
    # the witness must actually achieve the optimum when re-evaluated:
    # decode by MAP is implicit, so rebuild a MAP decoder from weights
    ch = builtin_z0z1()
    decoder = {}
    for yi in range(4):
        for si in range(4):
            weights = []
            for w in range(2):
                ss = (si >> 1, si & 1)
                xs = witness.input_block(w, ss)
                p = ch.state_block_prob(ss)
                for x, s, y in zip(xs, ss, ((yi >> 1), yi & 1)):
                    p *= ch.prob(y, x, s)
                weights.append(p)
            decoder[(yi, si)] = 0 if weights[0] >= weights[1] else 1
    success, _ = evaluate_strategy(ch, witness, decoder, csir=True)
    assert success == CSIR_OPT


def test_receiver_state_info_is_worth_one_sixteenth():
    plain, _ = classical_opt_success(builtin_z0z1(), 2, 2, csir=False)
    assert plain == PLAIN_OPT
    assert plain < CSIR_OPT


def test_csir_flag_equals_lifted_channel():
    flagged, _ = classical_opt_success(builtin_z0z1(), 2, 2, csir=True)
    lifted, _ = classical_opt_success(lift_csir(builtin_z0z1()), 2, 2, csir=False)
    assert flagged == lifted == CSIR_OPT


def test_classical_never_beats_the_assisted_causal_value():
    assisted = solve_exact(build_lp2(builtin_z0z1(), M=2, n=2)).value
    plain, _ = classical_opt_success(builtin_z0z1(), 2, 2, csir=False)
    assert plain <= assisted
    assert (assisted, plain) == (F(13, 16), F(3, 4))


def test_single_message_always_succeeds():
    value, enc = classical_opt_success(builtin_z0z1(), 1, 3)
    assert value == F(1)
    assert enc.message_count == 1 and enc.n == 3


def test_noiseless_single_use_is_perfect():
    noiseless = make_channel(kernel=[[[1, 0], [0, 1]]], state_dist=[1])
    value, _ = classical_opt_success(noiseless, 2, 1)
    assert value == F(1)


def test_indistinguishable_messages_cap_at_a_coin_flip():
    # the channel ignores its input, so MAP ties land on message 0 and
    # the optimum is exactly 1/2 whatever the encoder does
    constant = make_channel(kernel=[[[1, 0], [1, 0]]], state_dist=[1])
    for csir in (False, True):
        value, _ = classical_opt_success(constant, 2, 2, csir=csir)
        assert value == F(1, 2)


def test_parallel_chunks_match_sequential():
    seq_value, seq_enc = classical_opt_success(builtin_z0z1(), 2, 2, csir=True)
    par_value, par_enc = classical_opt_success(
        builtin_z0z1(), 2, 2, csir=True, workers=3
    )
    assert (par_value, par_enc) == (seq_value, seq_enc)


def test_work_cap_rejects_large_instances():
    with pytest.raises(ValueError, match="exceeds the cap"):
        classical_opt_success(builtin_z0z1(), 2, 3, csir=False)
    with pytest.raises(ValueError, match="exceeds the cap"):
        classical_opt_success(builtin_z0z1(), 2, 2, csir=True, work_cap=10)


def test_more_than_two_messages_rejected():
    with pytest.raises(ValueError, match="M in"):
        classical_opt_success(builtin_z0z1(), 3, 2)


def test_witness_table_covers_every_cell():
    _, enc = classical_opt_success(builtin_z0z1(), 2, 2, csir=True)
    lines = encoder_table_lines(enc)
    assert len(lines) == 2 * 2 + 2 * 4
    assert lines[0].startswith("x_1(w=0, s^1=0) = ")


def test_missing_decoder_cells_fall_back_to_message_zero():
    noiseless = make_channel(kernel=[[[1, 0], [0, 1]]], state_dist=[1])
    enc = classical_opt_success(noiseless, 2, 1)[1]
    success, per_message = evaluate_strategy(noiseless, enc, {}, csir=False)
    assert per_message[0] == F(1)
    assert success == F(1, 2)


def _random_two_state_channel(seed):
    rng = random.Random(seed)

    def row():
        a = rng.randint(0, 4)
        return [F(a, 4), F(4 - a, 4)]

    b = rng.randint(1, 3)
    return make_channel(
        kernel=[[row(), row()], [row(), row()]],
        state_dist=[F(b, 4), F(4 - b, 4)],
    )


def test_state_info_never_hurts_on_random_channels():
    for seed in range(8):
        ch = _random_two_state_channel(seed)
        plain, _ = classical_opt_success(ch, 2, 2, csir=False)
        informed, _ = classical_opt_success(ch, 2, 2, csir=True)
        assert F(1, 2) <= plain <= informed <= F(1)
