"""Flip experiments, influence matrices, diffusion search, distinguisher."""

import random
from fractions import Fraction

import pytest

from elcx.ciphers import SP8, SP16
from elcx.diffusion import (
    DiffusionCounts,
    RandomPermutationOracle,
    complete_diffusion_rounds,
    distinguish,
    experiment_a,
    experiment_b,
    influence_matrix,
)
from elcx.engine import ElasticRoundMachine

# frozen by tools/oracles/diffusion_counts.py: exhaustive counts on one
# sp8 round with key 0x00
FROZEN_SP8_COUNTS = {
    (0, 0): (16, 32, 64, 16),
    (0, 3): (32, 32, 32, 32),
    (1, 6): (32, 16, 48, 32),
    (4, 2): (16, 64, 32, 16),
    (7, 5): (0, 64, 64, 0),
}


def sp8_zero_key(state):
    return SP8.round_int(state, 0x00)


def rounds_factory(cipher, level, y):
    def factory(rounds, rng):
        if level == 0:
            keys = [rng.getrandbits(cipher.spec.lkr0) for _ in range(rounds)]

            def fn(state):
                for key in keys:
                    state = cipher.round_int(state, key)
                return state
            return fn
        machine = ElasticRoundMachine(cipher, level, y)
        keys = [(rng.getrandbits(machine.cycle_bits), rng.getrandbits(y))
                for _ in range(rounds)]
        return lambda state: machine.apply(state, keys)
    if level == 0:
        return factory, cipher.spec.L
    return factory, (1 << (level - 1)) * cipher.spec.L + y


class TestExperimentA:
    def test_identity_function(self):
        hit = experiment_a(lambda x: x, 8, 3, 3)
        assert hit.n_c == hit.context_count == 128
        miss = experiment_a(lambda x: x, 8, 3, 5)
        assert miss.n_c == 0 and miss.n_e == 128

    def test_constant_function(self):
        counts = experiment_a(lambda x: 0xA5, 8, 2, 6)
        assert counts.n01 == counts.n10 == 0
        assert counts.p_e == 1

    def test_frozen_sp8_counts(self):
        for (i, j), expect in FROZEN_SP8_COUNTS.items():
            got = experiment_a(sp8_zero_key, 8, i, j)
            assert (got.n00, got.n01, got.n10, got.n11) == expect, (i, j)

    def test_counter_invariant(self):
        with pytest.raises(ValueError):
            DiffusionCounts(1, 1, 1, 1, 5)

    def test_cost_guard(self):
        with pytest.raises(ValueError):
            experiment_a(lambda x: x, 22, 0, 0)

    def test_sampled_needs_samples(self):
        with pytest.raises(ValueError):
            experiment_a(lambda x: x, 8, 0, 0, mode="sampled", samples=0)
        with pytest.raises(ValueError):
            experiment_b(sp8_zero_key, 8, 2, 0, 0, mode="sampled", samples=0)
        with pytest.raises(ValueError):
            influence_matrix(lambda rng: sp8_zero_key, 8, samples=0)

    def test_sampled_mode(self):
        got = experiment_a(sp8_zero_key, 8, 0, 0, mode="sampled", samples=512, seed=1)
        assert got.context_count == 512
        assert got.n_c > 0


class TestExperimentB:
    def test_window_probability_is_exactly_half(self):
        for j in (0, 1):
            got = experiment_b(sp8_zero_key, 8, 2, i=0, j=j, k=0)
            assert got.p_c == Fraction(1, 2), j
            assert got.context_count == 1 << 9

    def test_window_half_holds_for_arbitrary_function(self):
        rng = random.Random(2)
        table = [rng.getrandbits(8) for _ in range(256)]
        got = experiment_b(lambda x: table[x], 8, 3, i=5, j=1, k=0)
        assert got.p_c == Fraction(1, 2)

    def test_outside_window_scales_by_tail_space(self):
        for (i, j), expect in FROZEN_SP8_COUNTS.items():
            if j < 2:
                continue
            got = experiment_b(sp8_zero_key, 8, 2, i=i, j=j, k=0)
            assert (got.n00, got.n01, got.n10, got.n11) == tuple(4 * v for v in expect)
            assert got.p_c == experiment_a(sp8_zero_key, 8, i, j).p_c

    def test_window_identities_against_experiment_a(self):
        y = 2
        for i in range(8):
            for j in (0, 1):
                a = experiment_a(sp8_zero_key, 8, i, j)
                b = experiment_b(sp8_zero_key, 8, y, i, j, k=0)
                assert 2 * b.n00 == (a.n00 + a.n01) << y
                assert 2 * b.n11 == (a.n11 + a.n10) << y
                assert 2 * b.n01 == (a.n01 + a.n00) << y
                assert 2 * b.n10 == (a.n10 + a.n11) << y

    def test_shifted_window(self):
        got = experiment_b(sp8_zero_key, 8, 2, i=0, j=4, k=3)
        assert got.p_c == Fraction(1, 2)

    def test_window_must_fit(self):
        with pytest.raises(ValueError):
            experiment_b(sp8_zero_key, 8, 3, i=0, j=0, k=6)

    def test_empty_tail_degenerates_to_plain_experiment(self):
        for i, j in ((0, 0), (4, 2)):
            assert experiment_b(sp8_zero_key, 8, 0, i, j, 0) == \
                experiment_a(sp8_zero_key, 8, i, j)


class TestInfluenceMatrix:
    def test_identity_is_diagonal(self):
        m = influence_matrix(lambda rng: (lambda s: s), 8, mode="exhaustive")
        assert m.influenced_set() == frozenset((i, i) for i in range(8))
        assert not m.fully_influenced()

    def test_exhaustive_sp8_round_matches_nibble_structure(self):
        m = influence_matrix(lambda rng: sp8_zero_key, 8, mode="exhaustive")
        # input i reaches exactly the permuted positions of its own nibble
        for i in range(8):
            group = range(0, 4) if i < 4 else range(4, 8)
            expect = frozenset((3 * src) % 8 for src in group)
            got = frozenset(j for j in range(8) if m.influenced(i, j))
            assert got == expect

    def test_csv_rows(self):
        m = influence_matrix(lambda rng: (lambda s: s), 4, mode="exhaustive")
        rows = list(m.csv_rows())
        assert len(rows) == 16
        assert rows[0] == (0, 0, m.flips[0][0], 16)

    def test_monotone_for_base_cipher(self):
        factory, width = rounds_factory(SP16, 0, 0)
        sets = []
        for rounds in (1, 2):
            m = influence_matrix(lambda rng: factory(rounds, rng), width,
                                 samples=2048, seed=0)
            sets.append(m.influenced_set())
        assert sets[0] <= sets[1]

    def test_monotone_for_elastic_beyond_first_round(self):
        # between rounds 1 and 2 the swap relocates the tail's entry point,
        # so monotonicity is only claimed from round 2 on
        factory, width = rounds_factory(SP16, 1, 8)
        sets = []
        for rounds in (2, 3):
            m = influence_matrix(lambda rng: factory(rounds, rng), width,
                                 samples=2048, seed=0)
            sets.append(m.influenced_set())
        assert sets[0] <= sets[1]

    def test_tail_bits_touch_only_their_window_slot_after_one_round(self):
        factory, width = rounds_factory(SP16, 1, 8)
        m = influence_matrix(lambda rng: factory(1, rng), width,
                             samples=2048, seed=3)
        for t in range(8):
            influenced = frozenset(j for j in range(width) if m.influenced(16 + t, j))
            assert influenced == frozenset({t}), t


class TestCompleteDiffusion:
    def test_identity_never_converges(self):
        got = complete_diffusion_rounds(lambda rounds, rng: (lambda s: s), 8,
                                        max_rounds=3, samples=64, seed=0)
        assert not got.converged and got.rounds == 3
        assert got.missing_by_round == (56, 56, 56)

    def test_sp16_reaches_full_diffusion_in_two_cycles(self):
        factory, width = rounds_factory(SP16, 0, 0)
        got = complete_diffusion_rounds(factory, width, max_rounds=4,
                                        samples=2048, seed=1)
        assert got.converged and got.rounds == 2

    def test_elastic_bound_over_sp16(self):
        base_factory, base_width = rounds_factory(SP16, 0, 0)
        q = complete_diffusion_rounds(base_factory, base_width, 6,
                                      samples=2048, seed=1)
        factory, width = rounds_factory(SP16, 1, 8)
        got = complete_diffusion_rounds(factory, width, 6, samples=2048, seed=1)
        assert got.converged and q.converged
        assert got.rounds <= q.rounds + 1

    def test_second_level_bound_over_sp8(self):
        e1_factory, e1_width = rounds_factory(SP8, 1, 8)
        e1 = complete_diffusion_rounds(e1_factory, e1_width, 6, samples=2048, seed=1)
        e2_factory, e2_width = rounds_factory(SP8, 2, 8)
        e2 = complete_diffusion_rounds(e2_factory, e2_width, 6, samples=2048, seed=1)
        assert e1.converged and e2.converged
        assert e2.rounds <= e1.rounds + 1


class TestDistinguisher:
    def weak_box(self, seed=42):
        rng = random.Random(seed)
        machine = ElasticRoundMachine(SP16, 1, 8)
        keys = [(rng.getrandbits(machine.cycle_bits), rng.getrandbits(8))]
        return lambda s: machine.apply(s, keys)

    def test_weak_round_shows_elastic_signature(self):
        report = distinguish(self.weak_box(), 24, 8, trials=1 << 13, seed=5)
        assert report.verdict == "elastic-like"
        assert report.window == 0
        for j in range(8):
            assert abs(report.probabilities[j] - 0.5) <= 0.05
        assert any(abs(p - 0.5) > 0.05 for p in report.probabilities[8:])

    def test_full_rounds_show_no_separation(self):
        rng = random.Random(7)
        machine = ElasticRoundMachine(SP16, 1, 8)
        keys = [(rng.getrandbits(machine.cycle_bits), rng.getrandbits(8))
                for _ in range(6)]
        box = lambda s: machine.apply(s, keys)
        report = distinguish(box, 24, 8, trials=1 << 13, seed=5)
        assert report.verdict == "no-separation"
        assert report.window is None

    def test_random_permutation_shows_no_separation(self):
        report = distinguish(RandomPermutationOracle(24, seed=9), 24, 8,
                             trials=1 << 13, seed=5)
        assert report.verdict == "no-separation"

    def test_requires_enough_trials(self):
        with pytest.raises(ValueError):
            distinguish(self.weak_box(), 24, 8, trials=10)

    def test_table_and_csv(self):
        report = distinguish(self.weak_box(), 24, 8, trials=1024, seed=5)
        assert "verdict" in report.table()
        assert len(list(report.csv_rows())) == 24
