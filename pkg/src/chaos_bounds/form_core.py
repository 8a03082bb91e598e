"""Homogeneous multilinear forms in independent symmetric variables.

A form of degree ``k`` in ``n`` variables is

    Z = sum over ordered tuples (j_1, ..., j_k) of distinct indices of
        a(j_1, ..., j_k) * x_{j_1} * ... * x_{j_k}

with ``a`` symmetric in its arguments. Only the value on the sorted key
``j_1 < ... < j_k`` is stored; every sorted key stands for ``k!`` ordered
tuples, and that multiplicity is applied when evaluating or computing the
variance constant. Indices are 1-based throughout the public API.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import permutations
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np

from . import kernels
from .errors import FormatError


def _check_key(key, k, n):
    if len(key) != k:
        raise ValueError(f"key {key} has {len(key)} indices, expected k={k}")
    if len(set(key)) != k:
        raise ValueError(f"key {key} repeats an index")
    for j in key:
        if not isinstance(j, (int, np.integer)) or not 1 <= j <= n:
            raise ValueError(f"key {key} has index {j!r} outside 1..{n}")


@dataclass(frozen=True)
class SymmetricMultilinearForm:
    """Degree-``k`` symmetric form in ``n`` variables, stored on sorted keys.

    Parameters
    ----------
    k : int
        Number of factors per term.
    n : int
        Number of variables, ``n >= k``.
    coeffs : mapping
        Strictly increasing 1-based ``k``-tuples to real coefficients.
        Zero coefficients are dropped; absent keys mean zero.
    """

    k: int
    n: int
    coeffs: Mapping[tuple, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"degree k must be positive, got {self.k}")
        if self.n < self.k:
            raise ValueError(f"need n >= k, got n={self.n}, k={self.k}")
        clean = {}
        for key, value in self.coeffs.items():
            key = (key,) if isinstance(key, (int, np.integer)) else tuple(key)
            _check_key(key, self.k, self.n)
            if list(key) != sorted(key):
                raise ValueError(f"key {key} is not strictly increasing")
            value = float(value)
            if not math.isfinite(value):
                raise ValueError(f"coefficient for {key} is not finite")
            if value != 0.0:
                clean[tuple(int(j) for j in key)] = value
        object.__setattr__(self, "coeffs", MappingProxyType(dict(sorted(clean.items()))))

    @cached_property
    def key_array(self) -> np.ndarray:
        """Sorted keys as a 0-based ``(K, k)`` int64 array."""
        if not self.coeffs:
            return np.zeros((0, self.k), dtype=np.int64)
        return np.array(list(self.coeffs), dtype=np.int64) - 1

    @cached_property
    def value_array(self) -> np.ndarray:
        return np.array(list(self.coeffs.values()), dtype=np.float64)

    @property
    def multiplicity(self) -> int:
        """Ordered tuples represented by each sorted key (``k!``)."""
        return math.factorial(self.k)

    def abs(self) -> SymmetricMultilinearForm:
        """Same support with every coefficient replaced by its absolute value."""
        return SymmetricMultilinearForm(
            self.k, self.n, {key: abs(v) for key, v in self.coeffs.items()}
        )

    def is_uniform_complete(self) -> bool:
        """True when every one of the C(n, k) keys carries the same value."""
        if len(self.coeffs) != math.comb(self.n, self.k):
            return False
        values = self.value_array
        return bool(np.all(values == values[0]))

    def evaluate_many(self, x) -> np.ndarray:
        """Evaluate the form at each row of a real ``(B, n)`` array.

        Uniform complete forms go through the elementary symmetric
        polynomial recursion, O(n k) per row instead of O(C(n, k) k).
        """
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.n:
            raise ValueError(f"expected an array of shape (B, {self.n}), got {x.shape}")
        if not self.coeffs:
            return np.zeros(x.shape[0])
        if self.is_uniform_complete():
            scale = self.multiplicity * self.value_array[0]
            return scale * kernels.elementary_symmetric(x, self.k)
        return self.multiplicity * kernels.evaluate_batch(self.key_array, self.value_array, x)


def symmetrize(raw: Mapping[tuple, float], k: int | None = None, n: int | None = None):
    """Average a coefficient array over all orderings of each index set.

    ``raw`` maps ordered tuples of distinct 1-based indices to reals; missing
    orderings count as zero. ``k`` and ``n`` are inferred from the keys when
    omitted.
    """
    keys = [tuple(key) for key in raw]
    if k is None:
        if not keys:
            raise ValueError("cannot infer k from an empty map")
        k = len(keys[0])
    if n is None:
        n = max((max(key) for key in keys), default=k)
    sums: dict[tuple, float] = {}
    for key, value in zip(keys, raw.values()):
        _check_key(key, k, n)
        canon = tuple(sorted(key))
        sums[canon] = sums.get(canon, 0.0) + float(value)
    kfact = math.factorial(k)
    return SymmetricMultilinearForm(k, n, {key: s / kfact for key, s in sums.items()})


def expand(form: SymmetricMultilinearForm) -> dict[tuple, float]:
    """Write the canonical coefficients back over every ordered tuple."""
    out = {}
    for key, value in form.coeffs.items():
        for perm in permutations(key):
            out[perm] = value
    return out


def v_squared(form: SymmetricMultilinearForm) -> float:
    """Sum of squared coefficients over all ordered distinct tuples."""
    return form.multiplicity * math.fsum(v * v for v in form.coeffs.values())


def _as_signs(signs, n):
    s = np.asarray(signs)
    if s.ndim != 1 or s.shape[0] != n:
        raise ValueError(f"sign vector has length {s.size}, form has n={n}")
    if not np.all((s == 1) | (s == -1)):
        raise ValueError("sign vector entries must be +1 or -1")
    return s.astype(np.float64)


def evaluate(form: SymmetricMultilinearForm, signs: Sequence[int]) -> float:
    """Value of the form at one realized sign vector."""
    s = _as_signs(signs, form.n)
    return float(form.evaluate_many(s[None, :])[0])


def form_to_document(form: SymmetricMultilinearForm) -> dict:
    return {
        "k": form.k,
        "n": form.n,
        "entries": [{"indices": list(key), "value": v} for key, v in form.coeffs.items()],
    }


def form_from_document(doc) -> SymmetricMultilinearForm:
    """Parse the JSON form document ``{"k", "n", "entries": [...]}``."""
    try:
        k = doc["k"]
        n = doc["n"]
        entries = doc["entries"]
    except (KeyError, TypeError) as exc:
        raise FormatError(f"form document missing field: {exc}") from None
    if not isinstance(k, int) or not isinstance(n, int) or isinstance(k, bool):
        raise FormatError("k and n must be integers")
    coeffs = {}
    for i, entry in enumerate(entries):
        try:
            idx = entry["indices"]
            value = entry["value"]
        except (KeyError, TypeError):
            raise FormatError(f"entry {i} needs 'indices' and 'value'") from None
        if not isinstance(idx, list) or not all(isinstance(j, int) for j in idx):
            raise FormatError(f"entry {i}: indices must be a list of integers")
        if any(a >= b for a, b in zip(idx, idx[1:])):
            raise FormatError(f"entry {i}: indices {idx} are unsorted or repeated")
        key = tuple(idx)
        if key in coeffs:
            raise FormatError(f"entry {i}: duplicate key {idx}")
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise FormatError(f"entry {i}: value must be a number")
        coeffs[key] = value
    try:
        return SymmetricMultilinearForm(k, n, coeffs)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def load_form(path) -> SymmetricMultilinearForm:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: invalid JSON ({exc})") from None
    return form_from_document(doc)


def dump_form(form: SymmetricMultilinearForm, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(form_to_document(form), fh, indent=2)
        fh.write("\n")
