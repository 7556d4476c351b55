"""Key-recovery reduction: padding, key conversion, oracle, full chain."""

import random

import pytest

from elcx.bits import BitString
from elcx.ciphers import SP8
from elcx.engine import ElasticRoundMachine, cycle_int, cycle_key_bits
from elcx.reduction import (
    BruteForceOracle,
    PairSet,
    ReductionFailedError,
    RoundKey,
    SpaceBoundError,
    convert_round_key,
    last_whitening_masks,
    make_planted_instance,
    pad_pairs,
    reduce_to_cycle_keys,
    run_cycle,
    verify_cycle_keys,
)


class TestPadPairs:
    def test_y_zero_is_identity(self):
        plains = [BitString.from_hex("ab")]
        padded = pad_pairs(plains, plains, 0)
        assert padded.plain == tuple(plains)

    def test_zero_extension(self):
        padded = pad_pairs([BitString.from_hex("ab")], [BitString.from_hex("cd")], 2)
        assert padded.plain[0] == BitString.from_hex("ab") + BitString.zeros(2)
        assert padded.cipher_left[0] == BitString.from_hex("cd")

    def test_ciphertext_tail_is_wildcard(self):
        # the oracle must accept a candidate whatever tail the real run
        # produced, because only the left part is compared
        inst = make_planted_instance(SP8, 1, 2, 1, 3, seed=21)
        assert any(t.to_int() != 0 for t in inst.recorded_tails)
        plains = [p for p, _ in inst.pairs.pairs]
        targets = [c for _, c in inst.pairs.pairs]
        candidates = BruteForceOracle(SP8, 1)(pad_pairs(plains, targets, 2), 1)
        assert candidates


class TestWhiteningMasks:
    @pytest.mark.parametrize("m", [0, 1, 2])
    def test_mask_flips_exactly_one_output_bit(self, m):
        rng = random.Random(m)
        spec = SP8.spec
        width = (1 << m) * spec.L
        gbits = cycle_key_bits(m, spec)
        masks = last_whitening_masks(m, spec)
        for _ in range(10):
            key = rng.getrandbits(gbits)
            state = rng.getrandbits(width)
            base = cycle_int(SP8, state, m, key)
            for p in rng.sample(range(width), min(6, width)):
                tweaked = key
                for offset in masks[p]:
                    tweaked ^= 1 << (gbits - 1 - offset)
                assert cycle_int(SP8, state, m, tweaked) == base ^ (1 << (width - 1 - p))

    def test_level0_is_last_round_key(self):
        masks = last_whitening_masks(0, SP8.spec)
        assert masks == tuple((p,) for p in range(8))


class TestConvertRoundKey:
    def test_zero_tail_key_changes_nothing(self):
        kc = BitString.from_hex("5a")
        assert convert_round_key(kc, BitString.zeros(2), 0, SP8, 0) == kc

    def test_touches_exactly_the_window_of_the_final_whitening(self):
        kc = BitString.zeros(8)
        got = convert_round_key(kc, BitString((1, 1)), 0, SP8, 0)
        assert got == BitString((1, 1, 0, 0, 0, 0, 0, 0))

    def test_wrapped_window(self):
        kc = BitString.zeros(8)
        got = convert_round_key(kc, BitString((1, 1)), 7, SP8, 0)
        assert got == BitString((1, 0, 0, 0, 0, 0, 0, 1))

    @pytest.mark.parametrize("m,j,y", [(0, 0, 2), (0, 5, 3), (1, 9, 4)])
    def test_converted_key_shifts_cycle_output(self, m, j, y):
        # C(converted, P) == C(original, P) xor tail key at the window
        rng = random.Random(17)
        spec = SP8.spec
        width = (1 << m) * spec.L
        gbits = cycle_key_bits(m, spec)
        for _ in range(50):
            kc = BitString.from_int(rng.getrandbits(gbits), gbits)
            kw = BitString.from_int(rng.getrandbits(y), y)
            converted = convert_round_key(kc, kw, j, SP8, m)
            state = BitString.from_int(rng.getrandbits(width), width)
            want = run_cycle(SP8, m, kc, state).to_int()
            for t in range(y):
                if kw[t]:
                    want ^= 1 << (width - 1 - (j + t) % width)
            assert run_cycle(SP8, m, converted, state).to_int() == want

    def test_window_out_of_range(self):
        with pytest.raises(ValueError):
            convert_round_key(BitString.zeros(8), BitString.zeros(2), 8, SP8, 0)


class TestBruteForceOracle:
    def test_planted_key_among_candidates(self):
        inst = make_planted_instance(SP8, 1, 2, 1, 4, seed=3)
        plains = [p for p, _ in inst.pairs.pairs]
        targets = [c for _, c in inst.pairs.pairs]
        oracle = BruteForceOracle(SP8, 1)
        candidates = oracle(pad_pairs(plains, targets, 2), 1)
        packed = {tuple(rk.packed() for rk in c) for c in candidates}
        assert tuple(rk.packed() for rk in inst.round_keys) in packed
        assert oracle.op_cost > 0

    def test_inconsistent_pairs_give_empty_set(self):
        pairs = [BitString.from_int(1, 8), BitString.from_int(1, 8)]
        targets = [BitString.from_int(2, 8), BitString.from_int(3, 8)]
        assert BruteForceOracle(SP8, 1)(pad_pairs(pairs, targets, 2), 1) == []

    def test_candidates_are_sound(self):
        inst = make_planted_instance(SP8, 1, 2, 1, 4, seed=5)
        plains = [p for p, _ in inst.pairs.pairs]
        targets = [c for _, c in inst.pairs.pairs]
        padded = pad_pairs(plains, targets, 2)
        machine = ElasticRoundMachine(SP8, 1, 2)
        for candidate in BruteForceOracle(SP8, 1)(padded, 1):
            for plain, target in zip(padded.plain, padded.cipher_left):
                out = machine.apply(plain.to_int(), [rk.packed() for rk in candidate])
                assert out >> 2 == target.to_int()

    def test_space_bound_refusal(self):
        padded = pad_pairs([BitString.zeros(8)], [BitString.zeros(8)], 2)
        with pytest.raises(SpaceBoundError):
            BruteForceOracle(SP8, 1, space_bound=8)(padded, 1)
        with pytest.raises(SpaceBoundError):
            BruteForceOracle(SP8, 1)(padded, 3)  # 30 joint bits


class TestReduce:
    def test_single_round_base_case(self):
        inst = make_planted_instance(SP8, 1, 2, 1, 4, seed=7)
        oracle = BruteForceOracle(SP8, 1)
        result = reduce_to_cycle_keys(inst.pairs, oracle, SP8, 1, 2)
        assert len(result.cycle_keys) == 1
        assert verify_cycle_keys(inst.pairs, result.cycle_keys, SP8, 0)
        assert result.cost.oracle_calls == 1
        assert result.cost.cycle_evals == 4
        assert result.cost.en_rounds == 4

    def test_two_round_chain(self):
        inst = make_planted_instance(SP8, 1, 2, 2, 4, seed=11)
        oracle = BruteForceOracle(SP8, 1)
        result = reduce_to_cycle_keys(inst.pairs, oracle, SP8, 1, 2)
        assert len(result.cycle_keys) == 2
        assert verify_cycle_keys(inst.pairs, result.cycle_keys, SP8, 0)
        assert result.cost.oracle_calls == 2
        assert result.cost.cycle_evals <= 2 * 4
        assert result.cost.en_rounds <= 4 * 2 * 3 // 2

    def test_unaligned_windows_break_the_restart(self):
        # random plaintexts almost surely differ in the swap window after
        # round one; the zero-padded restart then has no consistent key
        rng = random.Random(13)
        machine = ElasticRoundMachine(SP8, 1, 2)
        keys = [(rng.getrandbits(8), rng.getrandbits(2)) for _ in range(2)]
        plains = [BitString.from_int(v, 8)
                  for v in rng.sample(range(256), 4)]
        mids = [run_cycle(SP8, 0, convert_round_key(
            BitString.from_int(keys[0][0], 8), BitString.from_int(keys[0][1], 2),
            0, SP8, 0), p) for p in plains]
        assert len({m[0:2] for m in mids}) > 1  # windows really differ
        pairs = []
        for plain in plains:
            out = machine.apply((plain + BitString.zeros(2)).to_int(), keys)
            pairs.append((plain, BitString.from_int(out >> 2, 8)))
        with pytest.raises(ReductionFailedError):
            reduce_to_cycle_keys(PairSet(tuple(pairs), 2),
                                 BruteForceOracle(SP8, 1), SP8, 1, 2)

    def test_wrong_width_pairs(self):
        pairs = PairSet(((BitString.zeros(4), BitString.zeros(4)),), 1)
        with pytest.raises(ValueError):
            reduce_to_cycle_keys(pairs, BruteForceOracle(SP8, 1), SP8, 1, 2)


class TestPlantedInstances:
    def test_aligned_windows_after_round_one(self):
        inst = make_planted_instance(SP8, 1, 2, 2, 4, seed=19)
        first = inst.round_keys[0]
        folded = convert_round_key(first.cycle_key, first.tail_key,
                                   first.swap_offset, SP8, 0)
        windows = {run_cycle(SP8, 0, folded, p)[0:2]
                   for p, _ in inst.pairs.pairs}
        assert len(windows) == 1

    def test_pairs_are_reproducible_and_distinct(self):
        a = make_planted_instance(SP8, 1, 2, 2, 4, seed=23)
        b = make_planted_instance(SP8, 1, 2, 2, 4, seed=23)
        assert a.pairs == b.pairs
        plains = [p.to_int() for p, _ in a.pairs.pairs]
        assert len(set(plains)) == 4

    def test_rejects_unsupported_shapes(self):
        with pytest.raises(ValueError):
            make_planted_instance(SP8, 1, 2, 3, 4)
        with pytest.raises(ValueError):
            make_planted_instance(SP8, 1, 2, 2, 0)


def test_verify_cycle_keys_rejects_wrong_keys():
    inst = make_planted_instance(SP8, 1, 2, 1, 2, seed=29)
    wrong = (BitString.zeros(8),)
    assert not verify_cycle_keys(inst.pairs, wrong, SP8, 0)


def test_round_key_packing():
    rk = RoundKey(BitString.from_hex("3c"), BitString((1, 0)), 0)
    assert rk.packed() == (0x3C, 2)
