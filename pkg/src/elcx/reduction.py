"""Key-recovery reduction harness.

Converts any round-key oracle for the reduced elastic extension into a
cycle-key recovery for the level below, with operation accounting. The
reduced extension is the bare round body (cycle, tail key, swap): no
whitening and no key-dependent permutation.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .bits import BitString
from .engine import ElasticRoundMachine, cycle_int, cycle_inv_int, cycle_key_bits

JOINT_SPACE_LIMIT_BITS = 24


class ReductionFailedError(RuntimeError):
    """The oracle produced no usable candidate for some stage."""


class SpaceBoundError(ValueError):
    """Brute-force enumeration would exceed the configured key space."""


@dataclass(frozen=True)
class PairSet:
    """s (plaintext, ciphertext) pairs related by `rounds` cycles."""

    pairs: tuple
    rounds: int

    def __post_init__(self):
        if len(self.pairs) < 1 or self.rounds < 1:
            raise ValueError("need at least one pair and one round")
        widths = {len(p) for pair in self.pairs for p in pair}
        if len(widths) != 1:
            raise ValueError("all pair members must share one bit length")

    @property
    def width(self) -> int:
        return len(self.pairs[0][0])


@dataclass(frozen=True)
class PaddedPairSet:
    """Zero-padded plaintexts against ciphertexts whose tails are free."""

    plain: tuple        # BitStrings of width + y bits
    cipher_left: tuple  # BitStrings of width bits; the y-bit tail is a wildcard
    y: int


@dataclass(frozen=True)
class RoundKey:
    """One reduced-extension round: cycle key, tail key, swap offset."""

    cycle_key: BitString
    tail_key: BitString
    swap_offset: int

    def packed(self) -> tuple:
        return (self.cycle_key.to_int(), self.tail_key.to_int())


@dataclass
class CostReport:
    """Operation accounting for one reduction run."""

    oracle_calls: int = 0
    cycle_evals: int = 0
    en_rounds: int = 0
    oracle_ops: int = 0
    wall_time: float = 0.0

    def table(self) -> str:
        rows = [("oracle calls", self.oracle_calls),
                ("cycle evaluations", self.cycle_evals),
                ("reduced-extension rounds", self.en_rounds),
                ("oracle pair verifications", self.oracle_ops),
                ("wall time (s)", f"{self.wall_time:.3f}")]
        width = max(len(k) for k, _ in rows)
        return "\n".join(f"{k:<{width}}  {v}" for k, v in rows)


@dataclass(frozen=True)
class ReductionResult:
    cycle_keys: tuple
    cost: CostReport


def pad_pairs(plains, cipher_lefts, y: int) -> PaddedPairSet:
    """Extend plaintexts with y zero bits; ciphertext tails stay free."""
    if y < 0:
        raise ValueError("y must be >= 0")
    zeros = BitString.zeros(y)
    return PaddedPairSet(tuple(p + zeros for p in plains),
                         tuple(cipher_lefts), y)


def last_whitening_masks(m: int, spec) -> tuple:
    """Key-bit offsets whose joint flip flips exactly one cycle output bit.

    Index p of the result lists the offsets, within a level-m cycle key,
    that realize the output tweak e_p. At level 0 this is the final round
    key itself; above that the left half rides on the second-iteration
    mix key and the right half needs the recursive mask plus a canceling
    mix-key bit.
    """
    if m == 0:
        base = (spec.x - 1) * spec.lkr0
        return tuple((base + p,) for p in range(spec.L))
    half = (1 << (m - 1)) * spec.L
    g_sub = cycle_key_bits(m - 1, spec)
    sub = last_whitening_masks(m - 1, spec)
    mix2 = 2 * g_sub + half          # second-iteration mix key
    sub2 = g_sub + half              # second-iteration recursive key
    left = [(mix2 + p,) for p in range(half)]
    right = [tuple(sub2 + o for o in sub[q]) + (mix2 + q,) for q in range(half)]
    return tuple(left + right)


def convert_round_key(kc_prime: BitString, kw_prime: BitString, j: int,
                      cipher, m: int) -> BitString:
    """Fold a tail key into the cycle key's final whitening at window j.

    The adjusted key satisfies C(adjusted, P) = C(original, P) xor the
    tail key embedded at the wrapped window, for every P.
    """
    spec = cipher.spec
    width = (1 << m) * spec.L
    if len(kc_prime) != cycle_key_bits(m, spec):
        raise ValueError("cycle key has the wrong width")
    if not 0 <= j < width:
        raise ValueError(f"swap offset {j} outside 0..{width - 1}")
    if len(kw_prime) > width:
        raise ValueError("tail key wider than the cycle output")
    masks = last_whitening_masks(m, spec)
    adjusted = list(kc_prime)
    for t, bit in enumerate(kw_prime):
        if bit:
            for offset in masks[(j + t) % width]:
                adjusted[offset] ^= 1
    return BitString(adjusted)


def run_cycle(cipher, m: int, cycle_key: BitString, state: BitString) -> BitString:
    """One level-m cycle under an explicit cycle key."""
    out = cycle_int(cipher, state.to_int(), m, cycle_key.to_int())
    return BitString.from_int(out, len(state))


def run_cycle_inv(cipher, m: int, cycle_key: BitString, state: BitString) -> BitString:
    out = cycle_inv_int(cipher, state.to_int(), m, cycle_key.to_int())
    return BitString.from_int(out, len(state))


class BruteForceOracle:
    """Exhaustive round-key recovery for desk-scale reduced extensions.

    Stands in for an arbitrary attack: enumerates every joint round-key
    assignment and returns all of them consistent with the padded pairs,
    ciphertext tails treated as wildcards.
    """

    def __init__(self, cipher, n: int, space_bound: int = JOINT_SPACE_LIMIT_BITS):
        self.cipher = cipher
        self.n = n
        self.space_bound = space_bound
        self.op_cost = 0    # (candidate, pair) verifications performed

    def __call__(self, padded: PaddedPairSet, rounds: int) -> list:
        machine = ElasticRoundMachine(self.cipher, self.n, padded.y)
        kbits = machine.round_key_bits
        if kbits > self.space_bound:
            raise SpaceBoundError(
                f"per-round space 2^{kbits} over bound 2^{self.space_bound}")
        if kbits * rounds > JOINT_SPACE_LIMIT_BITS:
            raise SpaceBoundError(
                f"joint space 2^{kbits * rounds} over limit 2^{JOINT_SPACE_LIMIT_BITS}")
        y = padded.y
        plains = [p.to_int() for p in padded.plain]
        targets = [c.to_int() for c in padded.cipher_left]
        nkeys = 1 << kbits
        lead_plain, lead_target = plains[0], targets[0]
        found = []
        prefix = [0] * rounds

        def search(depth: int, state: int, j: int) -> None:
            if depth == rounds:
                self.op_cost += 1
                if state >> y != lead_target:
                    return
                for plain, target in zip(plains[1:], targets[1:]):
                    self.op_cost += 1
                    out = machine.apply(plain, map(machine.split_round_key, prefix))
                    if out >> y != target:
                        return
                found.append(tuple(prefix))
                return
            for key in range(nkeys):
                prefix[depth] = key
                ck, tk = machine.split_round_key(key)
                search(depth + 1, machine.round_int(state, ck, tk, j),
                       (j + 1) % machine.left_bits)

        search(0, lead_plain, 0)
        return [self._round_key_set(packed, machine) for packed in found]

    def _round_key_set(self, packed, machine) -> tuple:
        keys = []
        for t, key in enumerate(packed):
            ck, tk = machine.split_round_key(key)
            keys.append(RoundKey(BitString.from_int(ck, machine.cycle_bits),
                                 BitString.from_int(tk, machine.y),
                                 t % machine.left_bits))
        return tuple(keys)


def reduce_to_cycle_keys(pairs: PairSet, oracle, cipher, n: int, y: int) -> ReductionResult:
    """Recover one cycle key per round by repeated padded oracle calls.

    Each stage pads the current plaintexts, asks the oracle for the
    reduced extension's round keys, converts the first round's key into a
    cycle key, advances every pair one cycle, and recurses on one round
    fewer. The returned keys map every plaintext to its ciphertext
    through `pairs.rounds` cycles of the level below.
    """
    spec = cipher.spec
    width = (1 << (n - 1)) * spec.L
    if pairs.width != width:
        raise ValueError(f"pairs must be {width} bits for level {n}")
    machine = ElasticRoundMachine(cipher, n, y)
    cost = CostReport()
    started = time.perf_counter()
    current = [p for p, _ in pairs.pairs]
    targets = [c for _, c in pairs.pairs]
    recovered = []

    for remaining in range(pairs.rounds, 0, -1):
        padded = pad_pairs(current, targets, y)
        cost.oracle_calls += 1
        candidates = oracle(padded, remaining)
        if not candidates:
            raise ReductionFailedError(
                f"no consistent round keys with {remaining} rounds left "
                "(oracle unsound or pairs inconsistent)")
        chosen = min(candidates, key=lambda ks: tuple(rk.packed() for rk in ks))
        _verify_candidate(machine, padded, chosen, cost)
        first = chosen[0]
        converted = convert_round_key(first.cycle_key, first.tail_key,
                                      first.swap_offset, cipher, n - 1)
        recovered.append(converted)
        current = [run_cycle(cipher, n - 1, converted, p) for p in current]
        cost.cycle_evals += len(current)

    if current != targets:
        raise ReductionFailedError("recovered keys fail to reach the ciphertexts")
    cost.oracle_ops = getattr(oracle, "op_cost", 0)
    cost.wall_time = time.perf_counter() - started
    return ReductionResult(tuple(recovered), cost)


def _verify_candidate(machine, padded: PaddedPairSet, candidate, cost: CostReport) -> None:
    """Replay every pair through the candidate keys, round by round."""
    keys = [rk.packed() for rk in candidate]
    for plain, target in zip(padded.plain, padded.cipher_left):
        states = machine.apply_trace(plain.to_int(), keys)
        cost.en_rounds += len(states)
        if states[-1] >> machine.y != target.to_int():
            raise ReductionFailedError("oracle returned an unsound candidate")


def verify_cycle_keys(pairs: PairSet, cycle_keys, cipher, m: int) -> bool:
    """Do the keys carry every plaintext to its ciphertext in r cycles?"""
    for plain, target in pairs.pairs:
        state = plain
        for key in cycle_keys:
            state = run_cycle(cipher, m, key, state)
        if state != target:
            return False
    return True


@dataclass(frozen=True)
class PlantedInstance:
    """A reduction exercise with known keys and aligned swap windows."""

    pairs: PairSet
    round_keys: tuple
    recorded_tails: tuple   # actual output tails, for debugging only


def make_planted_instance(cipher, n: int, y: int, rounds: int, s: int,
                          seed: int = 0) -> PlantedInstance:
    """Build pairs the full reduction chain can solve.

    Round keys are random. For two rounds the plaintexts are chosen so
    every pair shows the same swap-window value after round one; without
    that alignment the restarted stage has no consistent key, since
    zero-padding discards the pair-dependent swapped-out tails.
    """
    import random as _random
    if rounds not in (1, 2):
        raise ValueError("planted instances cover 1 or 2 rounds")
    if s < 1:
        raise ValueError("need at least one pair")
    rng = _random.Random(seed)
    machine = ElasticRoundMachine(cipher, n, y)
    width = machine.left_bits
    if s > 1 << (width - y):
        raise ValueError("too many pairs to keep plaintexts distinct")
    round_keys = tuple(
        RoundKey(BitString.from_int(rng.getrandbits(machine.cycle_bits), machine.cycle_bits),
                 BitString.from_int(rng.getrandbits(y), y),
                 t % width)
        for t in range(rounds))

    if rounds == 1:
        seen = set()
        plains = []
        while len(plains) < s:
            candidate = rng.getrandbits(width)
            if candidate not in seen:
                seen.add(candidate)
                plains.append(BitString.from_int(candidate, width))
    else:
        first = round_keys[0]
        folded = convert_round_key(first.cycle_key, first.tail_key,
                                   first.swap_offset, cipher, n - 1)
        window = rng.getrandbits(y)
        suffixes = rng.sample(range(1 << (width - y)), s)
        plains = []
        for suffix in suffixes:
            mid = BitString.from_int((window << (width - y)) | suffix, width)
            plains.append(run_cycle_inv(cipher, n - 1, folded, mid))

    packed = [rk.packed() for rk in round_keys]
    pairs = []
    tails = []
    for plain in plains:
        out = machine.apply((plain + BitString.zeros(y)).to_int(), packed)
        pairs.append((plain, BitString.from_int(out >> y, width)))
        tails.append(BitString.from_int(out & ((1 << y) - 1), y))
    return PlantedInstance(PairSet(tuple(pairs), rounds), round_keys, tuple(tails))
