#!/usr/bin/env python3
# Straight-line reference for one full level-1 elastic encryption over the
# 16-bit toy SPN, written independently of the package. Specialised to a
# 24-bit message (n=1, y=8, 6 rounds) so everything is a flat loop over a
# list of bits. Bit 0 is the leftmost bit. Prints the 24-bit ciphertext
# for plaintext 0x000000 under master key 01 02 03 04 05.

L = 16
PLAIN_BITS = 24
Y = PLAIN_BITS - L          # 8
ROUNDS = 4 + -(-4 * Y // L)  # c0 + ceil(c0*y/L) = 6
PERM_BITS = (PLAIN_BITS - 1).bit_length()  # ceil(log2(24)) = 5
KEY_BITS = (Y + 16) * ROUNDS + 2 * PLAIN_BITS + 2 * PERM_BITS  # 202

SBOX = [0xC, 0x5, 0x6, 0xB, 0x9, 0x0, 0xA, 0xD,
        0x3, 0xE, 0xF, 0x8, 0x4, 0x7, 0x1, 0x2]


def rc4_bits(key, nbits):
    s = list(range(256))
    j = 0
    for i in range(256):
        j = (j + s[i] + key[i % len(key)]) % 256
        s[i], s[j] = s[j], s[i]
    i = j = 0
    bits = []
    while len(bits) < nbits:
        i = (i + 1) % 256
        j = (j + s[i]) % 256
        s[i], s[j] = s[j], s[i]
        b = s[(s[i] + s[j]) % 256]
        bits.extend((b >> (7 - t)) & 1 for t in range(8))
    return bits[:nbits]


def sp16_round_bits(bits16, keybits16):
    sub = []
    for g in range(4):
        nib = (bits16[4 * g] << 3) | (bits16[4 * g + 1] << 2) | \
              (bits16[4 * g + 2] << 1) | bits16[4 * g + 3]
        v = SBOX[nib]
        sub.extend(((v >> 3) & 1, (v >> 2) & 1, (v >> 1) & 1, v & 1))
    perm = [0] * 16
    for i in range(16):
        perm[(5 * i) % 16] = sub[i]
    return [p ^ k for p, k in zip(perm, keybits16)]


def rotate_left(bits, amount):
    amount %= len(bits)
    return bits[amount:] + bits[:amount]


master = bytes([0x01, 0x02, 0x03, 0x04, 0x05])
K = rc4_bits(master, KEY_BITS)
state = [0] * PLAIN_BITS
k = 0

# initial whitening
state = [s ^ K[k + t] for t, s in enumerate(state)]
k += PLAIN_BITS

# initial key-dependent permutation: left-rotate by the key value mod b
amt = 0
for t in range(PERM_BITS):
    amt = (amt << 1) | K[k + t]
k += PERM_BITS
state = rotate_left(state, amt)

j = 0
for _ in range(ROUNDS):
    state[0:L] = sp16_round_bits(state[0:L], K[k:k + L])
    k += L
    tail = [state[L + t] ^ K[k + t] for t in range(Y)]
    k += Y
    window = [state[(j + t) % L] for t in range(Y)]
    for t in range(Y):
        state[(j + t) % L] = window[t] ^ tail[t]
    state[L:] = window
    j = (j + 1) % L

amt = 0
for t in range(PERM_BITS):
    amt = (amt << 1) | K[k + t]
k += PERM_BITS
state = rotate_left(state, amt)

state = [s ^ K[k + t] for t, s in enumerate(state)]
k += PLAIN_BITS

assert k == KEY_BITS == 202, k
value = 0
for b in state:
    value = (value << 1) | b
print("bits consumed : %d" % k)
print("ciphertext    : 0x%06X" % value)
print("as bit string : %s" % "".join(str(b) for b in state))
