"""Kernel backend selection.

The compiled extension (pap_lab._kernels) is preferred when it was built;
otherwise the pure-Python mirror is used. Set PAP_LAB_PURE_PYTHON=1 to force
the fallback, e.g. for benchmarking or debugging.
"""

import os

from . import _kernels_py

if os.environ.get("PAP_LAB_PURE_PYTHON") == "1":
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py


def available_backends():
    names = ["python"]
    try:
        from . import _kernels  # noqa: F401
        names.append("cython")
    except ImportError:
        pass
    return names


def set_backend(name):
    """Rebind the kernel functions to the named backend ('python'/'cython')."""
    global _impl, BACKEND, fnv1a64, auth_hash_u64, crc16, splitmix64_next
    if name == "python":
        _impl = _kernels_py
    elif name == "cython":
        from . import _kernels
        _impl = _kernels
    else:
        raise ValueError(f"unknown kernel backend {name!r}")
    BACKEND = _impl.BACKEND
    fnv1a64 = _impl.fnv1a64
    auth_hash_u64 = _impl.auth_hash_u64
    crc16 = _impl.crc16
    splitmix64_next = _impl.splitmix64_next


BACKEND = _impl.BACKEND
fnv1a64 = _impl.fnv1a64
auth_hash_u64 = _impl.auth_hash_u64
crc16 = _impl.crc16
splitmix64_next = _impl.splitmix64_next
