"""Backend selection for the hot loops.

The compiled Cython module is used when it was built; otherwise, or when the
environment variable ``CHAOS_BOUNDS_PURE=1`` is set, the numpy twins run.
Callers always go through the wrappers here, which normalize dtypes and
memory layout.
"""
import os

import numpy as np

from . import _pykernels

_compiled = None
if os.environ.get("CHAOS_BOUNDS_PURE") != "1":
    try:
        from . import _ckernels as _compiled
    except ImportError:  # extension not built
        _compiled = None

BACKEND = "cython" if _compiled is not None else "numpy"


def _impl(pure):
    if pure or _compiled is None:
        return _pykernels
    return _compiled


def walsh_hadamard(w, *, pure=False):
    """Return the unnormalized Walsh-Hadamard transform of ``w`` (length 2**n)."""
    out = np.array(w, dtype=np.float64, copy=True, order="C")
    size = out.shape[0]
    if size & (size - 1):
        raise ValueError(f"length must be a power of two, got {size}")
    _impl(pure).walsh_hadamard(out)
    return out


def evaluate_batch(keys, coeffs, x, *, pure=False):
    """Evaluate ``sum_t coeffs[t] * prod_s x[:, keys[t, s]]`` row by row.

    ``keys`` holds 0-based column indices, one row per monomial.
    """
    keys = np.ascontiguousarray(keys, dtype=np.int64)
    coeffs = np.ascontiguousarray(coeffs, dtype=np.float64)
    x = np.ascontiguousarray(x, dtype=np.float64)
    if keys.ndim != 2 or x.ndim != 2:
        raise ValueError("keys and x must be two-dimensional")
    if keys.shape[0] == 0:
        return np.zeros(x.shape[0])
    return _impl(pure).evaluate_batch(keys, coeffs, x)


def elementary_symmetric(x, k, *, pure=False):
    """Return e_k of every row of ``x``."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    return _impl(pure).elementary_symmetric(x, int(k))
