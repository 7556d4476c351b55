"""Variable-input-length elastic cipher engine with analysis harnesses."""

from .bits import BitString, rotate, slice_wrapping, xor
from .ciphers import CIPHERS, CipherSpec, SP8, SP16, get_cipher
from .engine import (
    ElasticParams,
    decrypt,
    encrypt,
    init_params,
    key_length,
    rounds_at_level,
)
from .keystream import ExpandedKey, expand, expanded_key_for, layout_for

__all__ = [
    "BitString", "rotate", "slice_wrapping", "xor",
    "CIPHERS", "CipherSpec", "SP8", "SP16", "get_cipher",
    "ElasticParams", "decrypt", "encrypt", "init_params", "key_length",
    "rounds_at_level",
    "ExpandedKey", "expand", "expanded_key_for", "layout_for",
]

__version__ = "0.1.0"
