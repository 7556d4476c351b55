"""Fixed-length toy SPN ciphers behind a uniform round contract.

A round is: 4-bit S-box on every nibble, bit spread i -> (mult*i) mod L,
then XOR with the round key. Keying last keeps the whitening-last shape
the elastic construction requires. Integers carry states in the hot
paths with bit 0 of the BitString view mapped to the top integer bit.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .bits import BitString

# PRESENT S-box; any 4-bit bijection would satisfy the contract.
PRESENT_SBOX = (0xC, 0x5, 0x6, 0xB, 0x9, 0x0, 0xA, 0xD,
                0x3, 0xE, 0xF, 0x8, 0x4, 0x7, 0x1, 0x2)


@dataclass(frozen=True)
class CipherSpec:
    """Parameters of an underlying fixed-length cipher."""

    name: str
    L: int      # block length in bits
    x: int      # rounds per cycle
    c0: int     # cycle count
    lkr0: int   # key bits per round

    def __post_init__(self):
        if min(self.L, self.x, self.c0, self.lkr0) < 1:
            raise ValueError("all cipher parameters must be >= 1")

    @property
    def r0(self) -> int:
        return self.c0 * self.x

    def table(self) -> str:
        rows = [("cipher", self.name), ("block bits (L)", self.L),
                ("rounds/cycle (x)", self.x), ("cycles (c0)", self.c0),
                ("rounds (r0)", self.r0), ("key bits/round", self.lkr0)]
        width = max(len(k) for k, _ in rows)
        return "\n".join(f"{k:<{width}}  {v}" for k, v in rows)


def _spread(value: int, group: int, width: int, mult: int) -> int:
    """Place the 4 bits of a nibble at their permuted positions."""
    out = 0
    for t in range(4):
        if (value >> (3 - t)) & 1:
            dest = (mult * (4 * group + t)) % width
            out |= 1 << (width - 1 - dest)
    return out


class SpnRound:
    """Round contract implementation: forward/inverse plus int kernels."""

    def __init__(self, spec: CipherSpec, mult: int, sbox=PRESENT_SBOX):
        if spec.L % 4:
            raise ValueError("SPN width must be a multiple of 4")
        if spec.lkr0 != spec.L:
            raise ValueError("round key width must match the block")
        self.spec = spec
        self.mult = mult
        self.sbox = tuple(sbox)
        inv = [0] * 16
        for i, v in enumerate(self.sbox):
            inv[v] = i
        self.inv_sbox = tuple(inv)
        L = spec.L
        groups = L // 4
        self._shift = tuple(L - 4 * (g + 1) for g in range(groups))
        self._fwd = tuple(
            tuple(_spread(self.sbox[v], g, L, mult) for v in range(16))
            for g in range(groups)
        )
        inv_mult = pow(mult, -1, L)
        self._unperm = tuple(
            tuple(_spread(v, g, L, inv_mult) for v in range(16))
            for g in range(groups)
        )
        self._mask = (1 << L) - 1

    def round_int(self, state: int, key: int) -> int:
        out = 0
        for sh, table in zip(self._shift, self._fwd):
            out |= table[(state >> sh) & 0xF]
        return out ^ key

    def inv_round_int(self, state: int, key: int) -> int:
        mixed = state ^ key
        perm = 0
        for sh, table in zip(self._shift, self._unperm):
            perm |= table[(mixed >> sh) & 0xF]
        out = 0
        for sh in self._shift:
            out |= self.inv_sbox[(perm >> sh) & 0xF] << sh
        return out

    def forward(self, state: BitString, key: BitString) -> BitString:
        self._check(state, key)
        return BitString.from_int(self.round_int(state.to_int(), key.to_int()), self.spec.L)

    def inverse(self, state: BitString, key: BitString) -> BitString:
        self._check(state, key)
        return BitString.from_int(self.inv_round_int(state.to_int(), key.to_int()), self.spec.L)

    def _check(self, state: BitString, key: BitString) -> None:
        if len(state) != self.spec.L:
            raise ValueError(f"state must be {self.spec.L} bits, got {len(state)}")
        if len(key) != self.spec.lkr0:
            raise ValueError(f"round key must be {self.spec.lkr0} bits, got {len(key)}")


SP16 = SpnRound(CipherSpec("sp16", L=16, x=1, c0=4, lkr0=16), mult=5)
SP8 = SpnRound(CipherSpec("sp8", L=8, x=1, c0=2, lkr0=8), mult=3)

CIPHERS = {"sp16": SP16, "sp8": SP8}


def get_cipher(name: str) -> SpnRound:
    try:
        return CIPHERS[name]
    except KeyError:
        raise ValueError(f"unknown cipher {name!r}; choose from {sorted(CIPHERS)}") from None


@dataclass(frozen=True)
class CycleDetection:
    """Result of the cycle-length search; length = r0 when not converged."""

    length: int
    converged: bool


def detect_cycle_length(cipher, samples: int = 4096, mode: str = "auto",
                        seed: int = 0) -> CycleDetection:
    """Least run of consecutive rounds after which every output bit depends
    on at least two input bits.

    Influence is witnessed by single-bit flips over enumerated or sampled
    contexts with freshly sampled round keys; exhaustive context
    enumeration is used up to 16-bit blocks.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    spec = cipher.spec
    L = spec.L
    if mode == "auto":
        mode = "exhaustive" if L <= 16 else "sampled"
    rng = random.Random(seed)
    for nrounds in range(1, spec.r0 + 1):
        if _influence_converged(cipher, nrounds, mode, samples, rng):
            return CycleDetection(nrounds, True)
    return CycleDetection(spec.r0, False)


def _influence_converged(cipher, nrounds, mode, samples, rng) -> bool:
    spec = cipher.spec
    L = spec.L
    need = 2
    counts = [0] * L          # influencing inputs per output bit
    seen = [[False] * L for _ in range(L)]

    def run(state, keys):
        for k in keys:
            state = cipher.round_int(state, k)
        return state

    def consume(state, keys) -> bool:
        base = run(state, keys)
        for i in range(L):
            diff = run(state ^ (1 << (L - 1 - i)), keys) ^ base
            j = 0
            while diff:
                if diff & 1:
                    out_bit = L - 1 - j
                    if not seen[i][out_bit]:
                        seen[i][out_bit] = True
                        counts[out_bit] += 1
                j += 1
                diff >>= 1
        return all(c >= need for c in counts)

    if mode == "exhaustive":
        for _ in range(2):  # fresh key draws; contexts enumerated in full
            keys = [rng.getrandbits(spec.lkr0) for _ in range(nrounds)]
            for state in range(1 << L):
                if consume(state, keys):
                    return True
    elif mode == "sampled":
        for _ in range(samples):
            keys = [rng.getrandbits(spec.lkr0) for _ in range(nrounds)]
            if consume(rng.getrandbits(L), keys):
                return True
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return False
