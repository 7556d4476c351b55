"""Bit-exact string arithmetic used by every other module.

Bit 0 is the leftmost (most significant) bit of any integer, hex or byte
view. Values are immutable; all edits go through copy-and-replace helpers.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Union


class BitString:
    """Immutable ordered sequence of bits, indexed from the leftmost bit."""

    __slots__ = ("_bits",)

    def __init__(self, bits: Iterable[int] = ()):
        tup = tuple(bits)
        if any(b not in (0, 1) for b in tup):
            raise ValueError("bits must be 0 or 1")
        self._bits = tup

    @classmethod
    def zeros(cls, n: int) -> "BitString":
        return cls((0,) * n)

    @classmethod
    def from_int(cls, value: int, width: int) -> "BitString":
        if value < 0 or value >> width:
            raise ValueError(f"value {value} does not fit in {width} bits")
        return cls((value >> (width - 1 - i)) & 1 for i in range(width))

    @classmethod
    def from_hex(cls, text: str, nbits: int | None = None) -> "BitString":
        """Parse big-endian hex; nbits trims right-padding for odd lengths."""
        text = text.strip().removeprefix("0x")
        total = 4 * len(text)
        if nbits is None:
            nbits = total
        if not 0 <= total - nbits < 4:
            raise ValueError(f"{len(text)} hex digits cannot carry {nbits} bits")
        full = cls.from_int(int(text, 16) if text else 0, total)
        if any(full._bits[nbits:]):
            raise ValueError("padding bits beyond the stated length must be zero")
        return full[:nbits]

    @classmethod
    def from_bytes(cls, data: bytes) -> "BitString":
        bits = []
        for byte in data:
            bits.extend((byte >> (7 - t)) & 1 for t in range(8))
        return cls(bits)

    @classmethod
    def random(cls, n: int, rng) -> "BitString":
        return cls.from_int(rng.getrandbits(n), n) if n else cls()

    def to_int(self) -> int:
        v = 0
        for b in self._bits:
            v = (v << 1) | b
        return v

    def to_hex(self) -> str:
        """Big-endian hex, right-padded with zero bits to a whole digit."""
        ndigits = (len(self) + 3) // 4
        padded = self.to_int() << (4 * ndigits - len(self))
        return format(padded, f"0{ndigits}x") if ndigits else ""

    def to_bytes(self) -> bytes:
        """Right-padded with zero bits to a whole number of octets."""
        nbytes = (len(self) + 7) // 8
        padded = self.to_int() << (8 * nbytes - len(self))
        return padded.to_bytes(nbytes, "big")

    def __len__(self) -> int:
        return len(self._bits)

    def __iter__(self) -> Iterator[int]:
        return iter(self._bits)

    def __getitem__(self, index: Union[int, slice]):
        if isinstance(index, slice):
            return BitString(self._bits[index])
        return self._bits[index]

    def __xor__(self, other: "BitString") -> "BitString":
        if len(self) != len(other):
            raise ValueError(f"xor length mismatch: {len(self)} vs {len(other)}")
        return BitString(a ^ b for a, b in zip(self._bits, other._bits))

    def __add__(self, other: "BitString") -> "BitString":
        return BitString(self._bits + other._bits)

    def __eq__(self, other) -> bool:
        return isinstance(other, BitString) and self._bits == other._bits

    def __hash__(self) -> int:
        return hash(self._bits)

    def __repr__(self) -> str:
        return f"BitString('{''.join(map(str, self._bits))}')"

    def flip(self, i: int) -> "BitString":
        return BitString(b ^ 1 if t == i else b for t, b in enumerate(self._bits))

    def replace(self, start: int, sub: "BitString") -> "BitString":
        """Copy with positions [start, start+len(sub)) replaced by sub."""
        if not 0 <= start <= len(self) - len(sub):
            raise ValueError("replacement runs past the end")
        return BitString(self._bits[:start] + sub._bits + self._bits[start + len(sub):])


def xor(a: BitString, b: BitString) -> BitString:
    return a ^ b


def slice_wrapping(s: BitString, start: int, count: int, modulus: int) -> BitString:
    """Bits at positions (start+t) mod modulus for t in [0, count)."""
    _check_window(s, start, count, modulus)
    return BitString(s[(start + t) % modulus] for t in range(count))


def replace_wrapping(s: BitString, start: int, sub: BitString, modulus: int) -> BitString:
    """Copy with the wrapped window starting at start replaced by sub."""
    _check_window(s, start, len(sub), modulus)
    out = list(s)
    for t, b in enumerate(sub):
        out[(start + t) % modulus] = b
    return BitString(out)


def rotate(s: BitString, amount: int) -> BitString:
    """Left rotation by amount mod len(s); empty strings pass through."""
    if len(s) == 0:
        return s
    amount %= len(s)
    return s[amount:] + s[:amount]


def _check_window(s: BitString, start: int, count: int, modulus: int) -> None:
    if modulus > len(s):
        raise ValueError(f"modulus {modulus} exceeds string length {len(s)}")
    if count > modulus:
        raise ValueError(f"window of {count} bits does not fit in region of {modulus}")
    if not 0 <= start < modulus:
        raise ValueError(f"start {start} outside region of {modulus} bits")
