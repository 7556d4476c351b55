"""Level-n elastic cipher engine.

Derives per-length parameters, accounts for key consumption, and runs
encryption/decryption plus the recursive cycle function and its inverse.
The outermost state is a BitString; cycle bodies run on integers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .bits import BitString, replace_wrapping, rotate, slice_wrapping
from .ciphers import CipherSpec


class UnsupportedLengthError(ValueError):
    """Message length not handled by the elastic extension."""


class KeyUnderrunError(ValueError):
    """Key cursor ran out of expanded-key material."""


@dataclass(frozen=True)
class ElasticParams:
    """Derived parameters of the level-n extension for one message length."""

    n: int     # level
    y: int     # expansion bits beyond 2^(n-1)*L
    rn: int    # rounds
    b: int     # block length = 2^(n-1)*L + y
    lk: int    # total key bits

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("level must be >= 1")
        if not 0 <= self.y <= self.b - self.y:
            raise ValueError("expansion bits out of range")


def perm_key_bits(b: int) -> int:
    """Key bits consumed by one key-dependent permutation: ceil(log2 b)."""
    return (b - 1).bit_length()


def cycle_key_bits(m: int, spec: CipherSpec) -> int:
    """Key bits one level-m cycle consumes: 2^m * (x*lkr0 + m*L)."""
    return (spec.x * spec.lkr0 + m * spec.L) << m


def cycle_key_bits_recursive(m: int, spec: CipherSpec) -> int:
    """Recurrence form of cycle_key_bits, kept for cross-checking."""
    g = spec.x * spec.lkr0
    for level in range(1, m + 1):
        g = 2 * (g + (1 << (level - 1)) * spec.L)
    return g


def key_length(params: ElasticParams, spec: CipherSpec) -> int:
    """Total key bits consumed by one encryption."""
    half = 1 << (params.n - 1)
    per_round = params.y + half * (spec.L * (params.n - 1) + spec.lkr0 * spec.x)
    ends = (1 << params.n) * spec.L + 2 * params.y
    return per_round * params.rn + ends + 2 * perm_key_bits(params.b)


def init_params(plain_len: int, spec: CipherSpec) -> ElasticParams:
    """Pick the least level covering plain_len and derive the parameters."""
    if plain_len <= spec.L:
        raise UnsupportedLengthError(
            f"length {plain_len} not supported: must exceed L={spec.L}")
    n = 1
    while (1 << n) * spec.L < plain_len:
        n += 1
    half_bits = (1 << (n - 1)) * spec.L
    y = plain_len - half_bits
    rn = spec.c0 + -(-spec.c0 * y // half_bits)
    partial = ElasticParams(n=n, y=y, rn=rn, b=plain_len, lk=0)
    return ElasticParams(n=n, y=y, rn=rn, b=plain_len, lk=key_length(partial, spec))


def rounds_at_level(params: ElasticParams, m: int, spec: CipherSpec) -> int:
    """How many level-m rounds one encryption runs."""
    if not 0 <= m <= params.n:
        raise ValueError(f"level {m} outside 0..{params.n}")
    if m == 0:
        return params.rn * (1 << (params.n - 1)) * spec.x
    return params.rn * (1 << (params.n - m))


class KeyCursor:
    """Forward pointer into expanded-key material."""

    def __init__(self, material: BitString):
        self._material = material
        self.pos = 0

    def take(self, nbits: int) -> BitString:
        if self.pos + nbits > len(self._material):
            raise KeyUnderrunError(
                f"need {nbits} key bits at offset {self.pos}, "
                f"have {len(self._material) - self.pos}")
        out = self._material[self.pos:self.pos + nbits]
        self.pos += nbits
        return out


class ReverseKeyCursor:
    """Walks the expanded key backwards, returning forward-order slices."""

    def __init__(self, material: BitString):
        self._material = material
        self.pos = len(material)

    def take_back(self, nbits: int) -> BitString:
        if nbits > self.pos:
            raise KeyUnderrunError(
                f"need {nbits} key bits before offset {self.pos}")
        out = self._material[self.pos - nbits:self.pos]
        self.pos -= nbits
        return out


@dataclass
class EncryptionTrace:
    """Per-call instrumentation: cycle invocations, round counts, key use."""

    cycle_calls: dict = field(default_factory=dict)
    round0_calls: int = 0
    top_rounds: int = 0
    key_bits_consumed: int = 0

    def note_cycle(self, level: int) -> None:
        self.cycle_calls[level] = self.cycle_calls.get(level, 0) + 1


def measured_rounds_at_level(trace: EncryptionTrace, params: ElasticParams,
                             m: int) -> int:
    """Round count at level m recovered from an instrumented run."""
    if m == 0:
        return trace.round0_calls
    if m == params.n:
        return trace.top_rounds
    return 2 * trace.cycle_calls.get(m, 0)  # one cycle = two rounds


def _key_slice(key: int, offset: int, length: int, total: int) -> int:
    return (key >> (total - offset - length)) & ((1 << length) - 1)


def cycle_int(cipher, state: int, m: int, key: int,
              trace: EncryptionTrace | None = None) -> int:
    """Level-m cycle on a 2^m*L-bit integer state; key has g(m) bits."""
    spec = cipher.spec
    if trace is not None:
        trace.note_cycle(m)
    total = cycle_key_bits(m, spec)
    if m == 0:
        for t in range(spec.x):
            state = cipher.round_int(state, _key_slice(key, t * spec.lkr0, spec.lkr0, total))
            if trace is not None:
                trace.round0_calls += 1
        return state
    half_bits = (1 << (m - 1)) * spec.L
    gsub = cycle_key_bits(m - 1, spec)
    mask = (1 << half_bits) - 1
    a = state >> half_bits
    b = state & mask
    pos = 0
    for _ in range(2):
        a = cycle_int(cipher, a, m - 1, _key_slice(key, pos, gsub, total), trace)
        pos += gsub
        b ^= _key_slice(key, pos, half_bits, total)
        pos += half_bits
        a, b = a ^ b, a
    return (a << half_bits) | b


def cycle_inv_int(cipher, state: int, m: int, key: int) -> int:
    """Inverse of cycle_int for the same key."""
    spec = cipher.spec
    total = cycle_key_bits(m, spec)
    if m == 0:
        for t in reversed(range(spec.x)):
            state = cipher.inv_round_int(state, _key_slice(key, t * spec.lkr0, spec.lkr0, total))
        return state
    half_bits = (1 << (m - 1)) * spec.L
    gsub = cycle_key_bits(m - 1, spec)
    mask = (1 << half_bits) - 1
    a = state >> half_bits
    b = state & mask
    for it in (1, 0):
        base = it * (gsub + half_bits)
        a_mid = b                # the half that went through the sub-cycle
        b_mid = a ^ b
        b = b_mid ^ _key_slice(key, base + gsub, half_bits, total)
        a = cycle_inv_int(cipher, a_mid, m - 1, _key_slice(key, base, gsub, total))
    return (a << half_bits) | b


def cycle_function(state: BitString, m: int, cursor: KeyCursor, cipher,
                   trace: EncryptionTrace | None = None) -> BitString:
    """BitString face of cycle_int, consuming g(m) bits from the cursor."""
    _check_cycle_width(state, m, cipher.spec)
    key = cursor.take(cycle_key_bits(m, cipher.spec))
    return BitString.from_int(cycle_int(cipher, state.to_int(), m, key.to_int(), trace),
                              len(state))


def cycle_function_inv(state: BitString, m: int, cursor: ReverseKeyCursor,
                       cipher) -> BitString:
    """Inverse cycle; the cursor hands back this cycle's key region."""
    _check_cycle_width(state, m, cipher.spec)
    key = cursor.take_back(cycle_key_bits(m, cipher.spec))
    return BitString.from_int(cycle_inv_int(cipher, state.to_int(), m, key.to_int()),
                              len(state))


def _check_cycle_width(state: BitString, m: int, spec: CipherSpec) -> None:
    want = (1 << m) * spec.L
    if len(state) != want:
        raise ValueError(f"level-{m} cycle needs {want} bits, got {len(state)}")


def key_dependent_permutation(state: BitString, key: BitString,
                              inverse: bool = False) -> BitString:
    """Placeholder key-dependent permutation: rotation by the key value.

    Replaceable behind this interface; any keyed bijection with an inverse
    fits the surrounding construction.
    """
    amount = key.to_int() % len(state)
    return rotate(state, -amount if inverse else amount)


def _material(expanded_key) -> BitString:
    return expanded_key if isinstance(expanded_key, BitString) else expanded_key.material


def encrypt(plain: BitString, expanded_key, cipher, params: ElasticParams,
            trace: EncryptionTrace | None = None) -> BitString:
    """Encrypt one block of exactly params.b bits."""
    material = _material(expanded_key)
    _check_call(plain, material, params)
    spec = cipher.spec
    left_bits = params.b - params.y
    lp = perm_key_bits(params.b)
    cur = KeyCursor(material)
    if trace is not None:
        trace.top_rounds = params.rn

    state = plain ^ cur.take(params.b)
    state = key_dependent_permutation(state, cur.take(lp))
    j = 0
    for _ in range(params.rn):
        left = cycle_function(state[:left_bits], params.n - 1, cur, cipher, trace)
        state = state.replace(0, left)
        if params.y:
            tail = state[left_bits:] ^ cur.take(params.y)
            window = slice_wrapping(state, j, params.y, left_bits)
            state = replace_wrapping(state, j, window ^ tail, left_bits)
            state = state.replace(left_bits, window)
            j = (j + 1) % left_bits
    state = key_dependent_permutation(state, cur.take(lp))
    state = state ^ cur.take(params.b)

    if cur.pos != params.lk:
        raise KeyUnderrunError(f"consumed {cur.pos} bits, layout says {params.lk}")
    if trace is not None:
        trace.key_bits_consumed = cur.pos
    return state


def decrypt(cipher_text: BitString, expanded_key, cipher,
            params: ElasticParams) -> BitString:
    """Inverse of encrypt for the same expanded key."""
    material = _material(expanded_key)
    _check_call(cipher_text, material, params)
    left_bits = params.b - params.y
    lp = perm_key_bits(params.b)
    cur = ReverseKeyCursor(material)

    state = cipher_text ^ cur.take_back(params.b)
    state = key_dependent_permutation(state, cur.take_back(lp), inverse=True)
    for i in reversed(range(params.rn)):
        if params.y:
            j = i % left_bits
            window = state[left_bits:]  # the swap parked the old window here
            keyed_tail = slice_wrapping(state, j, params.y, left_bits) ^ window
            state = replace_wrapping(state, j, window, left_bits)
            state = state.replace(left_bits, keyed_tail ^ cur.take_back(params.y))
        left = cycle_function_inv(state[:left_bits], params.n - 1, cur, cipher)
        state = state.replace(0, left)
    state = key_dependent_permutation(state, cur.take_back(lp), inverse=True)
    state = state ^ cur.take_back(params.b)

    if cur.pos != 0:
        raise KeyUnderrunError(f"{cur.pos} key bits left unconsumed")
    return state


def _check_call(block: BitString, material: BitString, params: ElasticParams) -> None:
    if len(block) != params.b:
        raise ValueError(f"block must be {params.b} bits, got {len(block)}")
    if len(material) != params.lk:
        raise ValueError(f"expanded key must be {params.lk} bits, got {len(material)}")


class ElasticRoundMachine:
    """Iterated elastic round body (cycle, tail key, swap) on integers.

    No whitening and no key-dependent permutation: this is the keyed core
    the diffusion lab and the reduction harness study. State integers hold
    2^(n-1)*L left bits followed by y tail bits.
    """

    def __init__(self, cipher, n: int, y: int):
        if n < 1:
            raise ValueError("level must be >= 1")
        self.cipher = cipher
        self.n = n
        self.left_bits = (1 << (n - 1)) * cipher.spec.L
        if not 0 <= y <= self.left_bits:
            raise ValueError(f"y must lie in 0..{self.left_bits}")
        self.y = y
        self.width = self.left_bits + y
        self.cycle_bits = cycle_key_bits(n - 1, cipher.spec)
        self.round_key_bits = self.cycle_bits + y
        self._tail_mask = (1 << y) - 1

    def round_int(self, state: int, cycle_key: int, tail_key: int, j: int) -> int:
        y = self.y
        left = cycle_int(self.cipher, state >> y, self.n - 1, cycle_key)
        if y == 0:
            return left
        tail = (state & self._tail_mask) ^ tail_key
        window = self._extract(left, j)
        left ^= self._embed(tail, j)
        return (left << y) | window

    def apply(self, state: int, round_keys, start_j: int = 0) -> int:
        """Run one round per (cycle_key, tail_key) pair, advancing j."""
        j = start_j
        for cycle_key, tail_key in round_keys:
            state = self.round_int(state, cycle_key, tail_key, j)
            j = (j + 1) % self.left_bits
        return state

    def apply_trace(self, state: int, round_keys, start_j: int = 0) -> list:
        """Like apply, but returns the state after every round."""
        states = []
        j = start_j
        for cycle_key, tail_key in round_keys:
            state = self.round_int(state, cycle_key, tail_key, j)
            states.append(state)
            j = (j + 1) % self.left_bits
        return states

    def split_round_key(self, key: int) -> tuple:
        """(cycle_key, tail_key) halves of a packed round key."""
        return key >> self.y, key & self._tail_mask

    def _extract(self, left: int, j: int) -> int:
        y, lb = self.y, self.left_bits
        if j + y <= lb:
            return (left >> (lb - j - y)) & self._tail_mask
        out = 0
        for t in range(y):
            out = (out << 1) | ((left >> (lb - 1 - (j + t) % lb)) & 1)
        return out

    def _embed(self, value: int, j: int) -> int:
        y, lb = self.y, self.left_bits
        if j + y <= lb:
            return value << (lb - j - y)
        out = 0
        for t in range(y):
            if (value >> (y - 1 - t)) & 1:
                out |= 1 << (lb - 1 - (j + t) % lb)
        return out
