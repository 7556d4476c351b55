#!/usr/bin/env python3
# Straight-line RC4 reference, written independently of the package.
# Prints the first keystream bytes for the key 01 02 03 04 05 so the
# value can be frozen into the test suite.

key = bytes([0x01, 0x02, 0x03, 0x04, 0x05])

S = list(range(256))
j = 0
for i in range(256):
    j = (j + S[i] + key[i % len(key)]) % 256
    S[i], S[j] = S[j], S[i]

i = 0
j = 0
out = []
for _ in range(16):
    i = (i + 1) % 256
    j = (j + S[i]) % 256
    S[i], S[j] = S[j], S[i]
    out.append(S[(S[i] + S[j]) % 256])

print("keystream bytes:", " ".join("%02x" % b for b in out))
print("first 16 bits  :", "".join(format(b, "08b") for b in out[:2]))
