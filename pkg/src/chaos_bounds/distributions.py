"""Symmetric sub-Gaussian inputs, Hermite polynomials and the sharpness demo.

A symmetric variable is sub-Gaussian here when all its odd moments vanish
and each even moment is at most the matching standard normal moment
``(2m - 1)!!``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy import stats

from .form_core import SymmetricMultilinearForm

DEFAULT_MOMENT_COUNT = 12


def _odd_double_factorial(m):
    return math.prod(range(1, m + 1, 2))


@dataclass(frozen=True)
class MomentSequence:
    """Even moments ``E x^2, E x^4, ..., E x^(2R)`` of a symmetric variable."""

    even_moments: tuple
    label: str = ""

    def __post_init__(self):
        moments = tuple(float(m) for m in self.even_moments)
        if any(m < 0 or not math.isfinite(m) for m in moments):
            raise ValueError("even moments must be finite and nonnegative")
        object.__setattr__(self, "even_moments", moments)

    @property
    def max_order(self) -> int:
        return 2 * len(self.even_moments)

    def moment(self, order: int) -> float:
        """``E x^order``; zero for odd orders by symmetry."""
        if order < 0:
            raise ValueError("order must be nonnegative")
        if order == 0:
            return 1.0
        if order % 2:
            return 0.0
        if order > self.max_order:
            raise ValueError(
                f"moment of order {order} requested but {self.label or 'sequence'} "
                f"only supplies moments up to order {self.max_order}"
            )
        return self.even_moments[order // 2 - 1]

    def table(self, max_order: int) -> np.ndarray:
        """Array ``t`` with ``t[e] = E x^e`` for ``e = 0..max_order``."""
        return np.array([self.moment(e) for e in range(max_order + 1)])

    def is_unit_modulus(self) -> bool:
        """All even moments equal 1, i.e. the variable is a random sign."""
        return all(m == 1.0 for m in self.even_moments)


def rademacher_moments(count=DEFAULT_MOMENT_COUNT):
    return MomentSequence((1.0,) * count, "rademacher")


def gaussian_moments(count=DEFAULT_MOMENT_COUNT):
    return MomentSequence(
        tuple(float(_odd_double_factorial(2 * m - 1)) for m in range(1, count + 1)),
        "gaussian",
    )


def uniform_moments(count=DEFAULT_MOMENT_COUNT):
    # uniform on [-sqrt(3), sqrt(3)]: E x^(2m) = 3^m / (2m + 1)
    return MomentSequence(
        tuple(3.0**m / (2 * m + 1) for m in range(1, count + 1)), "uniform"
    )


@dataclass(frozen=True)
class SubGaussianInput:
    """A named symmetric input: its moment sequence plus a seeded sampler.

    ``sampler(rng, size)`` draws ``size`` values from a
    ``numpy.random.Generator``.
    """

    name: str
    moments: MomentSequence
    sampler: Callable[[np.random.Generator, int], np.ndarray]

    def sample(self, rng, size):
        return np.asarray(self.sampler(rng, size), dtype=np.float64)


def _rademacher(rng, size):
    return 2.0 * rng.integers(0, 2, size=size) - 1.0


def _gaussian(rng, size):
    return rng.standard_normal(size)


def _uniform(rng, size):
    return rng.uniform(-math.sqrt(3.0), math.sqrt(3.0), size=size)


def builtin_inputs(count=DEFAULT_MOMENT_COUNT) -> dict[str, SubGaussianInput]:
    """Catalog of built-in inputs keyed by name."""
    return {
        "rademacher": SubGaussianInput("rademacher", rademacher_moments(count), _rademacher),
        "gaussian": SubGaussianInput("gaussian", gaussian_moments(count), _gaussian),
        "uniform": SubGaussianInput("uniform", uniform_moments(count), _uniform),
    }


def get_input(name: str) -> SubGaussianInput:
    catalog = builtin_inputs()
    try:
        return catalog[name]
    except KeyError:
        raise ValueError(
            f"unknown distribution {name!r}; choose from {sorted(catalog)}"
        ) from None


class SubGaussianCheck(NamedTuple):
    ok: bool
    first_failure: int | None  # m of the first violated E x^(2m), 1-based


def check_subgaussian(moments: MomentSequence) -> SubGaussianCheck:
    """Compare each ``E x^(2m)`` against the normal moment ``(2m - 1)!!``."""
    for m, value in enumerate(moments.even_moments, start=1):
        if value > _odd_double_factorial(2 * m - 1):
            return SubGaussianCheck(False, m)
    return SubGaussianCheck(True, None)


def hermite(k: int, x):
    """Probabilists' Hermite polynomial He_k with leading coefficient 1."""
    if k < 0:
        raise ValueError("degree must be nonnegative")
    x = np.asarray(x, dtype=np.float64)
    prev = np.ones_like(x)
    if k == 0:
        return prev if prev.ndim else float(prev)
    cur = x.copy()
    for j in range(1, k):
        prev, cur = cur, x * cur - j * prev
    return cur if cur.ndim else float(cur)


def sharpness_form(k: int, n: int, V: float) -> SymmetricMultilinearForm:
    """Constant form with coefficient ``V / sqrt(n (n-1) ... (n-k+1))``."""
    if n < k:
        raise ValueError(f"sharpness form needs n >= k, got n={n}, k={k}")
    if V <= 0:
        raise ValueError("V must be positive")
    value = V / math.sqrt(math.perm(n, k))
    keys = combinations(range(1, n + 1), k)
    return SymmetricMultilinearForm(k, n, dict.fromkeys(keys, value))


class SharpnessRow(NamedTuple):
    n: int
    ks_distance: float
    samples: int


def limit_comparison(
    k: int,
    n_list: Sequence[int],
    V: float,
    sample_count: int,
    seed: int,
    max_n: int = 5000,
) -> list[SharpnessRow]:
    """Empirical KS distance between ``Z_n`` and ``V * He_k(eta)`` for each n.

    ``Z_n`` is the sharpness form under Rademacher signs. Each n gets its own
    substream of ``seed`` and the Gaussian reference sample is redrawn per n.
    """
    from .montecarlo import sample_z

    if list(n_list) != sorted(set(n_list)):
        raise ValueError("n_list must be strictly increasing")
    rad = builtin_inputs()["rademacher"]
    rows = []
    for i, n in enumerate(n_list):
        if n < k or n > max_n:
            raise ValueError(f"n={n} outside the admissible range {k}..{max_n}")
        form = sharpness_form(k, n, V)
        z = sample_z(form, rad, sample_count, seed, stream=(i, 0))
        ref_rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(i, 1)))
        ref = V * hermite(k, ref_rng.standard_normal(sample_count))
        stat = stats.ks_2samp(z, ref, method="asymp").statistic
        rows.append(SharpnessRow(n, float(stat), sample_count))
    return rows
