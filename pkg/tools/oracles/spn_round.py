#!/usr/bin/env python3
# Straight-line single-round reference for the two toy SPNs, written
# independently of the package. Bit 0 is the leftmost (most significant)
# bit everywhere. The round is: 4-bit S-box on each nibble, then the bit
# at position i moves to position (mult*i) mod width, then XOR the key.

SBOX = [0xC, 0x5, 0x6, 0xB, 0x9, 0x0, 0xA, 0xD,
        0x3, 0xE, 0xF, 0x8, 0x4, 0x7, 0x1, 0x2]


def to_bits(value, width):
    return [(value >> (width - 1 - i)) & 1 for i in range(width)]


def from_bits(bits):
    v = 0
    for b in bits:
        v = (v << 1) | b
    return v


def round_fn(state, key, width, mult):
    bits = to_bits(state, width)
    # S-box each nibble, leftmost nibble first
    sub = []
    for g in range(width // 4):
        nib = from_bits(bits[4 * g:4 * g + 4])
        sub.extend(to_bits(SBOX[nib], 4))
    # permute: bit i -> position (mult*i) mod width
    perm = [0] * width
    for i in range(width):
        perm[(mult * i) % width] = sub[i]
    return from_bits(perm) ^ key


print("sp16 round(0x0000, key=0x0000) = 0x%04X" % round_fn(0x0000, 0x0000, 16, 5))
print("sp16 round(0x1234, key=0xFEDC) = 0x%04X" % round_fn(0x1234, 0xFEDC, 16, 5))
print("sp8  round(0x00,   key=0x00)   = 0x%02X" % round_fn(0x00, 0x00, 8, 3))
print("sp8  round(0xA7,   key=0x3C)   = 0x%02X" % round_fn(0xA7, 0x3C, 8, 3))
