"""Pure-numpy twins of the compiled kernels in ``_ckernels.pyx``.

The operation order inside each routine mirrors the compiled loop so both
backends return identical bits.
"""
import numpy as np


def walsh_hadamard(w):
    """In-place unnormalized Walsh-Hadamard transform of a length-2**n array."""
    size = w.shape[0]
    h = 1
    while h < size:
        view = w.reshape(-1, 2, h)
        a = view[:, 0, :].copy()
        b = view[:, 1, :].copy()
        view[:, 0, :] = a + b
        view[:, 1, :] = a - b
        h *= 2
    return w


def evaluate_batch(keys, coeffs, x):
    """Sum over keys of ``coeff * prod(x[:, key])`` for every row of ``x``."""
    z = np.zeros(x.shape[0], dtype=np.float64)
    for key, c in zip(keys, coeffs):
        prod = x[:, key[0]].copy()
        for idx in key[1:]:
            prod *= x[:, idx]
        z += c * prod
    return z


def elementary_symmetric(x, k):
    """Degree-k elementary symmetric polynomial of each row of ``x``."""
    rows, cols = x.shape
    e = np.zeros((k + 1, rows), dtype=np.float64)
    e[0] = 1.0
    for j in range(cols):
        xv = x[:, j]
        for d in range(k, 0, -1):
            e[d] = e[d] + xv * e[d - 1]
    return e[k].copy()
