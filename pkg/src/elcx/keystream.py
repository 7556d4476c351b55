"""Stand-alone pseudorandom key expansion plus the exact consumption layout.

Expansion is plain RC4 over the master key: deterministic, usable with any
underlying cipher, and cheap enough that the expanded-key rate stays a
small multiple of a fixed-length cipher's. The layout is the static
unrolling of every key-pointer advance one encryption performs.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bits import BitString
from .ciphers import CipherSpec
from .engine import ElasticParams, perm_key_bits


def rc4_keystream(key: bytes, nbytes: int) -> bytes:
    """First nbytes of the RC4 keystream (no drop-N hardening)."""
    if not 1 <= len(key) <= 256:
        raise ValueError("master key must be 1..256 octets")
    s = list(range(256))
    j = 0
    for i in range(256):
        j = (j + s[i] + key[i % len(key)]) & 0xFF
        s[i], s[j] = s[j], s[i]
    out = bytearray()
    i = j = 0
    for _ in range(nbytes):
        i = (i + 1) & 0xFF
        j = (j + s[i]) & 0xFF
        s[i], s[j] = s[j], s[i]
        out.append(s[(s[i] + s[j]) & 0xFF])
    return bytes(out)


def expand(master_key: bytes, nbits: int) -> BitString:
    """Deterministic expansion: the first nbits of the RC4 keystream."""
    if nbits < 0:
        raise ValueError("nbits must be >= 0")
    stream = rc4_keystream(master_key, (nbits + 7) // 8)
    return BitString.from_bytes(stream)[:nbits]


@dataclass(frozen=True)
class LayoutRecord:
    """One contiguous run of key bits and the step that consumes it."""

    tag: str
    offset: int
    length: int


@dataclass(frozen=True)
class ExpandedKey:
    """Expanded key material plus the byte-exact map of who consumes what."""

    material: BitString
    layout: tuple

    def __post_init__(self):
        pos = 0
        for rec in self.layout:
            if rec.offset != pos or rec.length <= 0:
                raise ValueError(f"layout record {rec.tag} breaks coverage at {pos}")
            pos += rec.length
        if pos != len(self.material):
            raise ValueError(f"layout covers {pos} bits, material has {len(self.material)}")

    def slice(self, tag: str) -> BitString:
        for rec in self.layout:
            if rec.tag == tag:
                return self.material[rec.offset:rec.offset + rec.length]
        raise KeyError(tag)

    def table(self) -> str:
        width = max(len(rec.tag) for rec in self.layout)
        lines = [f"{'consumer':<{width}}  offset  bits"]
        lines += [f"{rec.tag:<{width}}  {rec.offset:>6}  {rec.length:>4}"
                  for rec in self.layout]
        lines.append(f"{'total':<{width}}  {'':>6}  {len(self.material):>4}")
        return "\n".join(lines)


def layout_for(params: ElasticParams, spec: CipherSpec) -> tuple:
    """Layout records in exact consumption order for one encryption."""
    records = []
    pos = 0

    def add(tag: str, length: int) -> None:
        nonlocal pos
        if length:
            records.append(LayoutRecord(tag, pos, length))
            pos += length

    def walk_cycle(prefix: str, m: int) -> None:
        if m == 0:
            for t in range(spec.x):
                add(f"{prefix}.k{t}", spec.lkr0)
            return
        half_bits = (1 << (m - 1)) * spec.L
        for it in (1, 2):
            walk_cycle(f"{prefix}.c{it}", m - 1)
            add(f"{prefix}.b{it}", half_bits)

    lp = perm_key_bits(params.b)
    add("whiten.in", params.b)
    add("perm.in", lp)
    for i in range(params.rn):
        walk_cycle(f"round{i}.cycle", params.n - 1)
        add(f"round{i}.tail", params.y)
    add("perm.out", lp)
    add("whiten.out", params.b)
    if pos != params.lk:
        raise ValueError(f"layout totals {pos} bits but key length is {params.lk}")
    return tuple(records)


def expanded_key_for(master_key: bytes, params: ElasticParams,
                     spec: CipherSpec) -> ExpandedKey:
    """Expand a master key into the full keyed layout for one block length."""
    return ExpandedKey(expand(master_key, params.lk), layout_for(params, spec))


def expanded_key_from_material(material: BitString, params: ElasticParams,
                               spec: CipherSpec) -> ExpandedKey:
    """Wrap raw expanded-key bits (test vectors) in the layout."""
    if len(material) != params.lk:
        raise ValueError(f"material must be {params.lk} bits, got {len(material)}")
    return ExpandedKey(material, layout_for(params, spec))
