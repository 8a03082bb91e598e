"""Seeded Monte Carlo estimates of tails and moments of a form.

Draws are produced in fixed-size chunks; chunk ``c`` uses its own
``SeedSequence(seed, spawn_key=(*stream, c))``, so results depend only on
``(seed, stream)`` and never on how chunks are scheduled; a shorter run
is a prefix of a longer one.
Coordinates are filled column by column in index order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .distributions import SubGaussianInput
from .form_core import SymmetricMultilinearForm

CHUNK = 8192
SE_MARGIN = 5.0


@dataclass(frozen=True)
class TailEstimate:
    u: float
    point: float
    std_error: float
    samples: int
    seed: int


@dataclass(frozen=True)
class MomentEstimate:
    order: int
    point: float
    std_error: float
    samples: int
    seed: int


def _per_coordinate(inputs, n):
    if isinstance(inputs, SubGaussianInput):
        return [inputs] * n
    inputs = list(inputs)
    if len(inputs) != n:
        raise ValueError(f"got {len(inputs)} inputs for a form with n={n}")
    return inputs


def _chunk_rng(seed, stream, chunk):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(*stream, chunk)))


def sample_z(
    form: SymmetricMultilinearForm,
    inputs: SubGaussianInput | Sequence[SubGaussianInput],
    count: int,
    seed: int,
    stream: tuple = (),
) -> np.ndarray:
    """Draw ``count`` independent realizations of the form.

    ``inputs`` is either one input used for every coordinate or a sequence
    with one input per coordinate.
    """
    if count < 1:
        raise ValueError("count must be positive")
    coords = _per_coordinate(inputs, form.n)
    out = np.empty(count, dtype=np.float64)
    for c, start in enumerate(range(0, count, CHUNK)):
        size = min(CHUNK, count - start)
        rng = _chunk_rng(seed, stream, c)
        # always draw a full chunk so draw i is the same for every count > i
        x = np.empty((CHUNK, form.n), dtype=np.float64)
        for j, inp in enumerate(coords):
            x[:, j] = inp.sample(rng, CHUNK)
        out[start : start + size] = form.evaluate_many(x[:size])
    return out


def estimate_tail(form, inputs, u, count, seed) -> TailEstimate:
    """Fraction of draws with ``|Z| > u`` and its binomial standard error."""
    z = sample_z(form, inputs, count, seed)
    point = float(np.count_nonzero(np.abs(z) > u)) / count
    return TailEstimate(float(u), point, math.sqrt(point * (1.0 - point) / count), count, seed)


def estimate_moment(form, inputs, order, count, seed) -> MomentEstimate:
    """Sample mean of ``Z**order`` with its standard error."""
    z = sample_z(form, inputs, count, seed)
    powers = z**order
    se = float(np.std(powers, ddof=1)) / math.sqrt(count) if count > 1 else math.inf
    return MomentEstimate(order, float(np.mean(powers)), se, count, seed)
