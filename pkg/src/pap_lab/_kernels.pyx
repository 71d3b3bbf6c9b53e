# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled hot-path kernels (Cython).

Mirror of pap_lab._kernels_py; both backends must produce bit-identical
results for all inputs.
"""

from libc.stdint cimport uint16_t, uint64_t

BACKEND = "cython"

cdef uint64_t FNV_OFFSET = 0xCBF29CE484222325ULL
cdef uint64_t FNV_PRIME = 0x100000001B3ULL
cdef uint64_t SPLITMIX_GAMMA = 0x9E3779B97F4A7C15ULL

cdef uint16_t[256] CRC_TABLE

cdef void _build_crc_table() noexcept:
    cdef int byte, bit
    cdef uint16_t crc
    for byte in range(256):
        crc = <uint16_t>(byte << 8)
        for bit in range(8):
            if crc & 0x8000:
                crc = <uint16_t>((crc << 1) ^ 0x1021)
            else:
                crc = <uint16_t>(crc << 1)
        CRC_TABLE[byte] = crc

_build_crc_table()


cpdef uint64_t fnv1a64(const unsigned char[::1] data):
    """FNV-1a 64-bit hash of a byte sequence."""
    cdef uint64_t h = FNV_OFFSET
    cdef Py_ssize_t i
    for i in range(data.shape[0]):
        h = (h ^ data[i]) * FNV_PRIME
    return h


cpdef uint64_t auth_hash_u64(uint64_t nonce, uint64_t key):
    """FNV-1a-64 over the 16-byte big-endian concatenation nonce||key."""
    cdef uint64_t h = FNV_OFFSET
    cdef int shift
    for shift in range(56, -8, -8):
        h = (h ^ ((nonce >> shift) & 0xFF)) * FNV_PRIME
    for shift in range(56, -8, -8):
        h = (h ^ ((key >> shift) & 0xFF)) * FNV_PRIME
    return h


cpdef uint16_t crc16(const unsigned char[::1] data):
    """CRC-16/CCITT-FALSE: poly 0x1021, init 0xFFFF, no reflection, xorout 0."""
    cdef uint16_t crc = 0xFFFF
    cdef Py_ssize_t i
    for i in range(data.shape[0]):
        crc = <uint16_t>((crc << 8) ^ CRC_TABLE[(crc >> 8) ^ data[i]])
    return crc


cpdef tuple splitmix64_next(uint64_t state):
    """One SplitMix64 step: returns (output, advanced state)."""
    state = state + SPLITMIX_GAMMA
    cdef uint64_t z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31), state
