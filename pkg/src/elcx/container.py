"""Bit-exact ciphertext container: magic, version, cipher id, level, length.

The payload is stored right-padded to whole octets; the 8-octet bit-length
field is authoritative when stripping the padding back off.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

from .bits import BitString

MAGIC = b"ELCX"
VERSION = 1
_HEADER = struct.Struct(">4sBBBQ")

CIPHER_IDS = {"sp16": 1, "sp8": 2}
CIPHER_NAMES = {v: k for k, v in CIPHER_IDS.items()}


class ContainerError(ValueError):
    """Malformed or inconsistent container data."""


@dataclass(frozen=True)
class ContainerHeader:
    cipher: str
    level: int
    payload_bits: int

    def pack(self) -> bytes:
        if self.cipher not in CIPHER_IDS:
            raise ContainerError(f"unknown cipher {self.cipher!r}")
        return _HEADER.pack(MAGIC, VERSION, CIPHER_IDS[self.cipher],
                            self.level, self.payload_bits)


def build_container(header: ContainerHeader, payload: BitString) -> bytes:
    if len(payload) != header.payload_bits:
        raise ContainerError("payload length disagrees with the header")
    return header.pack() + payload.to_bytes()


def parse_container(blob: bytes) -> tuple:
    """Validate a container and return (header, payload BitString)."""
    if len(blob) < _HEADER.size:
        raise ContainerError("bad container length: truncated header")
    magic, version, cipher_id, level, payload_bits = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise ContainerError(f"bad magic {magic!r}")
    if version != VERSION:
        raise ContainerError(f"unsupported version {version}")
    if cipher_id not in CIPHER_NAMES:
        raise ContainerError(f"unknown cipher id {cipher_id}")
    nbytes = (payload_bits + 7) // 8
    if len(blob) != _HEADER.size + nbytes:
        raise ContainerError(
            f"bad container length: header promises {nbytes} payload octets, "
            f"found {len(blob) - _HEADER.size}")
    payload = BitString.from_bytes(blob[_HEADER.size:])[:payload_bits]
    header = ContainerHeader(CIPHER_NAMES[cipher_id], level, payload_bits)
    return header, payload
