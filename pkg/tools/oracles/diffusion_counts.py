#!/usr/bin/env python3
# Straight-line exhaustive flip-count reference on one 8-bit SPN round
# (key fixed to 0x00), written independently of the package. For chosen
# (input bit, output bit) pairs it enumerates all 2^7 assignments of the
# other input bits and tallies the (value at 0, value at 1) outcomes.

SBOX = [0xC, 0x5, 0x6, 0xB, 0x9, 0x0, 0xA, 0xD,
        0x3, 0xE, 0xF, 0x8, 0x4, 0x7, 0x1, 0x2]


def sp8_round(state):
    bits = [(state >> (7 - i)) & 1 for i in range(8)]
    sub = []
    for g in (0, 1):
        nib = (bits[4 * g] << 3) | (bits[4 * g + 1] << 2) | \
              (bits[4 * g + 2] << 1) | bits[4 * g + 3]
        v = SBOX[nib]
        sub.extend(((v >> 3) & 1, (v >> 2) & 1, (v >> 1) & 1, v & 1))
    perm = [0] * 8
    for i in range(8):
        perm[(3 * i) % 8] = sub[i]
    out = 0
    for b in perm:
        out = (out << 1) | b
    return out  # key 0x00: XOR is a no-op


def counts(i, j):
    n = [0, 0, 0, 0]  # n00 n01 n10 n11
    for ctx in range(128):
        low = ctx & ((1 << (7 - i)) - 1)
        x0 = ((ctx >> (7 - i)) << (8 - i)) | low
        x1 = x0 | (1 << (7 - i))
        v0 = (sp8_round(x0) >> (7 - j)) & 1
        v1 = (sp8_round(x1) >> (7 - j)) & 1
        n[(v0 << 1) | v1] += 1
    return n


for i, j in [(0, 0), (0, 3), (1, 6), (4, 2), (7, 5)]:
    n00, n01, n10, n11 = counts(i, j)
    print(f"i={i} j={j}: n00={n00} n01={n01} n10={n10} n11={n11}")
