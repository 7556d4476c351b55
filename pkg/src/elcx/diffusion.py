"""Diffusion measurement lab.

Single-bit flip experiments on a keyed black box, the per-(input, output)
influence matrix, complete-diffusion round measurement, and the
tail-window distinguisher. Functions under test are int -> int callables
with the key already bound; bit 0 is the leftmost bit of the integer view.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

MAX_EXHAUSTIVE_CONTEXT_BITS = 20
DEFAULT_SAMPLES = 1 << 14
DEFAULT_THRESHOLD = 0.05


@dataclass(frozen=True)
class DiffusionCounts:
    """Outcome tallies of one flip experiment: (value at 0, value at 1)."""

    n00: int
    n01: int
    n10: int
    n11: int
    context_count: int

    def __post_init__(self):
        if self.n00 + self.n01 + self.n10 + self.n11 != self.context_count:
            raise ValueError("counters must sum to the context count")

    @property
    def n_c(self) -> int:
        return self.n01 + self.n10

    @property
    def n_e(self) -> int:
        return self.n00 + self.n11

    @property
    def p_c(self) -> Fraction:
        return Fraction(self.n_c, self.context_count)

    @property
    def p_e(self) -> Fraction:
        return Fraction(self.n_e, self.context_count)


def _insert_bit(packed: int, width: int, position: int, bit: int) -> int:
    """Expand a (width-1)-bit context by inserting `bit` at `position`."""
    low_bits = width - 1 - position
    low = packed & ((1 << low_bits) - 1)
    return ((packed >> low_bits) << (low_bits + 1)) | (bit << low_bits) | low


def _bit(value: int, width: int, position: int) -> int:
    return (value >> (width - 1 - position)) & 1


def _guard_exhaustive(context_bits: int) -> None:
    if context_bits > MAX_EXHAUSTIVE_CONTEXT_BITS:
        raise ValueError(
            f"refusing exhaustive run over 2^{context_bits} contexts "
            f"(limit 2^{MAX_EXHAUSTIVE_CONTEXT_BITS})")


def experiment_a(f, width: int, i: int, j: int, mode: str = "exhaustive",
                 samples: int = DEFAULT_SAMPLES, seed: int = 0) -> DiffusionCounts:
    """Tally how output bit j reacts to flipping input bit i of f.

    Every context fixes the other width-1 input bits; both settings of
    bit i are evaluated and the (before, after) pair is counted.
    """
    if not (0 <= i < width and 0 <= j < width):
        raise ValueError("bit positions outside the block")
    tally = [0, 0, 0, 0]
    if mode == "exhaustive":
        _guard_exhaustive(width - 1)
        contexts = range(1 << (width - 1))
        draw = None
    elif mode == "sampled":
        if samples < 1:
            raise ValueError("samples must be >= 1")
        rng = random.Random(seed)
        contexts = range(samples)
        draw = lambda: rng.getrandbits(width - 1)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    for c in contexts:
        ctx = c if draw is None else draw()
        x0 = _insert_bit(ctx, width, i, 0)
        v0 = _bit(f(x0), width, j)
        v1 = _bit(f(x0 | (1 << (width - 1 - i))), width, j)
        tally[(v0 << 1) | v1] += 1
    return DiffusionCounts(tally[0], tally[1], tally[2], tally[3], len(contexts))


def experiment_b(f, width: int, y: int, i: int, j: int, k: int = 0,
                 mode: str = "exhaustive", samples: int = DEFAULT_SAMPLES,
                 seed: int = 0) -> DiffusionCounts:
    """Flip experiment on f wrapped in the elastic exor step.

    The input grows by y tail bits that bypass f; f's output bits in the
    window [k, k+y) pick up the tail exor. Bit i is flipped in f's own
    input; the flipped evaluation carries the tail exor while the
    reference evaluation stays bare, so the window tallies split exactly
    in half across the tail enumeration.
    """
    if not (0 <= i < width and 0 <= j < width):
        raise ValueError("bit positions outside the block")
    if y < 0 or k < 0 or k + y > width:
        raise ValueError("exor window must fit inside the block")
    in_window = k <= j < k + y
    tail_shift = y - 1 - (j - k) if in_window else 0
    flip_mask = 1 << (width - 1 - i)

    def record(ctx_left: int, tail: int, tally) -> None:
        x0 = _insert_bit(ctx_left, width, i, 0)
        v0 = _bit(f(x0), width, j)
        v1 = _bit(f(x0 | flip_mask), width, j)
        if in_window:
            v1 ^= (tail >> tail_shift) & 1
        tally[(v0 << 1) | v1] += 1

    tally = [0, 0, 0, 0]
    if mode == "exhaustive":
        _guard_exhaustive(width + y - 1)
        for ctx_left in range(1 << (width - 1)):
            for tail in range(1 << y):
                record(ctx_left, tail, tally)
        total = 1 << (width + y - 1)
    elif mode == "sampled":
        if samples < 1:
            raise ValueError("samples must be >= 1")
        rng = random.Random(seed)
        for _ in range(samples):
            record(rng.getrandbits(width - 1), rng.getrandbits(y), tally)
        total = samples
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return DiffusionCounts(tally[0], tally[1], tally[2], tally[3], total)


@dataclass(frozen=True)
class InfluenceMatrix:
    """Per-(input bit, output bit) flip tallies over a common context count."""

    width: int
    flips: tuple          # flips[i][j]
    contexts: int

    def influenced(self, i: int, j: int) -> bool:
        return self.flips[i][j] > 0

    def probability(self, i: int, j: int) -> float:
        return self.flips[i][j] / self.contexts

    def influenced_pairs(self) -> int:
        return sum(1 for row in self.flips for v in row if v > 0)

    def fully_influenced(self) -> bool:
        return self.influenced_pairs() == self.width * self.width

    def influenced_set(self) -> frozenset:
        return frozenset((i, j) for i in range(self.width)
                         for j in range(self.width) if self.flips[i][j] > 0)

    def csv_rows(self):
        for i in range(self.width):
            for j in range(self.width):
                yield i, j, self.flips[i][j], self.contexts

    def table(self) -> str:
        head = "in\\out " + " ".join(f"{j:2d}" for j in range(self.width))
        lines = [head]
        for i in range(self.width):
            cells = " ".join(" x" if self.flips[i][j] else " ." for j in range(self.width))
            lines.append(f"{i:6d} {cells}")
        return "\n".join(lines)


def influence_matrix(make_instance, width: int, mode: str = "sampled",
                     samples: int = DEFAULT_SAMPLES, seed: int = 0) -> InfluenceMatrix:
    """Measure which input bits influence which output bits.

    make_instance(rng) returns a keyed int -> int function; sampled mode
    draws a fresh instance (fresh keys) and base input per trial, while
    exhaustive mode enumerates every input against one instance.
    """
    rng = random.Random(seed)
    flips = [[0] * width for _ in range(width)]

    def tally(fn, base: int) -> None:
        out0 = fn(base)
        for i in range(width):
            diff = fn(base ^ (1 << (width - 1 - i))) ^ out0
            row = flips[i]
            while diff:
                low = diff & -diff
                row[width - low.bit_length()] += 1
                diff ^= low

    if mode == "exhaustive":
        _guard_exhaustive(width)
        fn = make_instance(rng)
        for base in range(1 << width):
            tally(fn, base)
        contexts = 1 << width
    elif mode == "sampled":
        if samples < 1:
            raise ValueError("samples must be >= 1")
        for _ in range(samples):
            tally(make_instance(rng), rng.getrandbits(width))
        contexts = samples
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return InfluenceMatrix(width, tuple(tuple(r) for r in flips), contexts)


@dataclass(frozen=True)
class CompleteDiffusion:
    """Least round count reaching a fully influenced matrix."""

    rounds: int
    converged: bool
    missing_by_round: tuple   # uninfluenced (i, j) pairs after each count


def complete_diffusion_rounds(make_rounds_instance, width: int, max_rounds: int,
                              mode: str = "sampled", samples: int = DEFAULT_SAMPLES,
                              seed: int = 0) -> CompleteDiffusion:
    """Scan round counts 1..max_rounds for full (input, output) influence.

    make_rounds_instance(rounds, rng) returns the keyed function iterated
    for that many rounds; the same seed is replayed per round count.
    """
    if max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    missing = []
    for rounds in range(1, max_rounds + 1):
        matrix = influence_matrix(lambda rng: make_rounds_instance(rounds, rng),
                                  width, mode=mode, samples=samples, seed=seed)
        missing.append(width * width - matrix.influenced_pairs())
        if missing[-1] == 0:
            return CompleteDiffusion(rounds, True, tuple(missing))
    return CompleteDiffusion(max_rounds, False, tuple(missing))


@dataclass(frozen=True)
class DistinguisherReport:
    """Per-output-bit flip estimates and the elastic-window verdict."""

    width: int
    y: int
    trials: int
    threshold: float
    probabilities: tuple
    flagged: tuple          # |p - 1/2| <= threshold per output bit
    window: int | None      # start of the flagged y-window, if any
    verdict: str            # "elastic-like" or "no-separation"

    def csv_rows(self):
        for j in range(self.width):
            yield j, self.probabilities[j], int(self.flagged[j])

    def table(self) -> str:
        lines = ["bit  p(flip)  near-1/2"]
        for j in range(self.width):
            mark = "yes" if self.flagged[j] else "no"
            lines.append(f"{j:3d}  {self.probabilities[j]:.4f}  {mark}")
        lines.append(f"verdict: {self.verdict}"
                     + (f" (window at {self.window})" if self.window is not None else ""))
        return "\n".join(lines)


def distinguish(blackbox, width: int, y: int, trials: int = DEFAULT_SAMPLES,
                threshold: float = DEFAULT_THRESHOLD, seed: int = 0) -> DistinguisherReport:
    """Probe a keyed permutation for the elastic tail-window signature.

    Each trial queries a pair of inputs differing in one non-tail bit and
    in a freshly drawn tail, then tallies per-output-bit flips. Output
    bits fed by the tail exor sit at 1/2 exactly; if only a contiguous
    y-window does while the rest deviate, the box looks elastic.
    """
    if trials < 1000:
        raise ValueError("need at least 1000 trials")
    if not 0 < y < width:
        raise ValueError("tail width must satisfy 0 < y < width")
    rng = random.Random(seed)
    flips = [0] * width
    tail_mask = (1 << y) - 1
    for _ in range(trials):
        x = rng.getrandbits(width)
        i = rng.randrange(width - y)
        x2 = (x ^ (1 << (width - 1 - i))) & ~tail_mask | rng.getrandbits(y)
        diff = blackbox(x) ^ blackbox(x2)
        while diff:
            low = diff & -diff
            flips[width - low.bit_length()] += 1
            diff ^= low
    probs = tuple(c / trials for c in flips)
    flagged = tuple(abs(p - 0.5) <= threshold for p in probs)
    window = None
    for w in range(width - y + 1):
        inside = all(flagged[w:w + y])
        outside = not any(flagged[:w]) and not any(flagged[w + y:])
        if inside and outside:
            window = w
            break
    verdict = "elastic-like" if window is not None else "no-separation"
    return DistinguisherReport(width, y, trials, threshold, probs, flagged,
                               window, verdict)


class RandomPermutationOracle:
    """Lazily sampled random bijection, a structureless reference box."""

    def __init__(self, width: int, seed: int = 0):
        self.width = width
        self._rng = random.Random(seed)
        self._map = {}
        self._used = set()

    def __call__(self, x: int) -> int:
        if x not in self._map:
            while True:
                candidate = self._rng.getrandbits(self.width)
                if candidate not in self._used:
                    break
            self._map[x] = candidate
            self._used.add(candidate)
        return self._map[x]
