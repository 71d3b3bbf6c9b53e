"""Pure-Python hot-path kernels.

Mirror of the compiled extension (pap_lab._kernels); both backends must
produce bit-identical results for all inputs.
"""

BACKEND = "python"

_MASK64 = 0xFFFFFFFFFFFFFFFF

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3

_SPLITMIX_GAMMA = 0x9E3779B97F4A7C15

_CRC_POLY = 0x1021


def _build_crc_table():
    table = []
    for byte in range(256):
        crc = byte << 8
        for _ in range(8):
            if crc & 0x8000:
                crc = ((crc << 1) ^ _CRC_POLY) & 0xFFFF
            else:
                crc = (crc << 1) & 0xFFFF
        table.append(crc)
    return tuple(table)


_CRC_TABLE = _build_crc_table()


def fnv1a64(data):
    """FNV-1a 64-bit hash of a byte sequence."""
    h = _FNV_OFFSET
    for b in data:
        h = ((h ^ b) * _FNV_PRIME) & _MASK64
    return h


def auth_hash_u64(nonce, key):
    """FNV-1a-64 over the 16-byte big-endian concatenation nonce||key."""
    h = _FNV_OFFSET
    for shift in range(56, -8, -8):
        h = ((h ^ ((nonce >> shift) & 0xFF)) * _FNV_PRIME) & _MASK64
    for shift in range(56, -8, -8):
        h = ((h ^ ((key >> shift) & 0xFF)) * _FNV_PRIME) & _MASK64
    return h


def crc16(data):
    """CRC-16/CCITT-FALSE: poly 0x1021, init 0xFFFF, no reflection, xorout 0."""
    crc = 0xFFFF
    for b in data:
        crc = ((crc << 8) & 0xFFFF) ^ _CRC_TABLE[(crc >> 8) ^ b]
    return crc


def splitmix64_next(state):
    """One SplitMix64 step: returns (output, advanced state)."""
    state = (state + _SPLITMIX_GAMMA) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31), state
