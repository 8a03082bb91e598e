"""Diagram formula for moments of multiple Wiener-Ito integrals over a finite
ground set.

A layout ``(k_1, ..., k_L)`` has vertices ``(l, j)`` with ``0 <= l < L`` and
``0 <= j < k_l`` (0-based), ordered lexicographically. A diagram is a
perfect matching of these vertices; the cross-row class forbids edges
inside a row. For an edge the *lower endpoint* is the vertex in the larger
row (for a same-row edge, the one with the larger column).

With an atomic measure ``mu`` on ``{0, ..., G-1}`` the white noise is a
vector of independent ``N(0, mu(x))`` variables and
``k! J_k(f) = sum_x f(x_1, ..., x_k) W(x_1) ... W(x_k)`` when ``f`` vanishes
on diagonals, so every quantity below is a finite tensor contraction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations
from typing import Iterator, Sequence

import numpy as np

from .bounds import double_factorial_odd
from .errors import BudgetError, FormatError
from .form_core import SymmetricMultilinearForm

DEFAULT_MAX_DIAGRAMS = 10**7


@dataclass(frozen=True)
class RowLayout:
    row_sizes: tuple

    def __post_init__(self):
        sizes = tuple(int(k) for k in self.row_sizes)
        if any(k < 1 for k in sizes):
            raise ValueError("row sizes must be positive")
        object.__setattr__(self, "row_sizes", sizes)

    @classmethod
    def equal_rows(cls, k: int, rows: int) -> RowLayout:
        return cls((k,) * rows)

    @property
    def vertex_count(self) -> int:
        return sum(self.row_sizes)

    def vertices(self) -> list:
        return [(l, j) for l, k in enumerate(self.row_sizes) for j in range(k)]

    def same_row_count(self) -> int:
        """Number of unrestricted perfect matchings, ``(V - 1)!!`` or 0."""
        v = self.vertex_count
        return double_factorial_odd(v - 1) if v % 2 == 0 else 0


@dataclass(frozen=True)
class Diagram:
    """A perfect matching; each edge is stored as ``(upper, lower)``."""

    layout: RowLayout
    edges: tuple

    @property
    def lower_endpoints(self) -> list:
        """The set of lower endpoints in lexicographic order (one per edge)."""
        return sorted(lower for _, lower in self.edges)

    def is_cross_row(self) -> bool:
        return all(a[0] != b[0] for a, b in self.edges)

    def alpha(self) -> dict:
        """Map each vertex to the lower endpoint of its edge."""
        out = {}
        for upper, lower in self.edges:
            out[upper] = lower
            out[lower] = lower
        return out


def _edge(a, b):
    return (a, b) if a < b else (b, a)


def enumerate_diagrams(
    layout: RowLayout,
    allow_same_row: bool = False,
    max_diagrams: int = DEFAULT_MAX_DIAGRAMS,
) -> Iterator[Diagram]:
    """Yield every perfect matching of the layout exactly once.

    The first unmatched vertex (lexicographic order) is paired with each
    admissible later vertex in turn, so the output is in lexicographic
    order of the edge lists. Refuses layouts whose unrestricted matching
    count exceeds ``max_diagrams``.
    """
    projected = layout.same_row_count()
    if projected > max_diagrams:
        raise BudgetError(
            f"layout {layout.row_sizes} has {projected} matchings, above the budget {max_diagrams}",
            projected=projected,
        )
    if projected == 0:
        return
    verts = layout.vertices()

    def feasible(remaining):
        if allow_same_row:
            return True
        per_row = {}
        for l, _ in remaining:
            per_row[l] = per_row.get(l, 0) + 1
        return 2 * max(per_row.values(), default=0) <= len(remaining)

    def rec(remaining, edges):
        if not remaining:
            yield Diagram(layout, tuple(edges))
            return
        first, rest = remaining[0], remaining[1:]
        for i, other in enumerate(rest):
            if not allow_same_row and other[0] == first[0]:
                continue
            left = rest[:i] + rest[i + 1 :]
            if not feasible(left):
                continue
            edges.append(_edge(first, other))
            yield from rec(left, edges)
            edges.pop()

    yield from rec(verts, [])


def count_diagrams(layout: RowLayout, allow_same_row: bool = False) -> int:
    """Number of diagrams, counted by recursion on per-row remaining sizes."""

    @lru_cache(maxsize=None)
    def count(sizes):
        live = [l for l, r in enumerate(sizes) if r]
        if not live:
            return 1
        l = live[0]
        total = 0
        for m in live:
            if m == l:
                if allow_same_row and sizes[l] >= 2:
                    nxt = list(sizes)
                    nxt[l] -= 2
                    total += (sizes[l] - 1) * count(tuple(nxt))
            else:
                nxt = list(sizes)
                nxt[l] -= 1
                nxt[m] -= 1
                total += sizes[m] * count(tuple(nxt))
        return total

    if layout.vertex_count % 2:
        return 0
    return count(layout.row_sizes)


@dataclass(frozen=True)
class DiscreteKernel:
    """Real tensor of arity ``k`` over ``{0..G-1}`` with atom weights ``measure``."""

    values: np.ndarray
    measure: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        measure = np.asarray(self.measure, dtype=np.float64)
        if values.ndim < 1:
            raise ValueError("kernel needs arity >= 1")
        if measure.ndim != 1 or any(s != measure.shape[0] for s in values.shape):
            raise ValueError(
                f"kernel shape {values.shape} does not match ground size {measure.shape[0]}"
            )
        if not np.all(np.isfinite(values)) or not np.all(np.isfinite(measure)):
            raise ValueError("kernel values and measure must be finite")
        if np.any(measure < 0):
            raise ValueError("measure weights must be nonnegative")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "measure", measure)

    @property
    def arity(self) -> int:
        return self.values.ndim

    @property
    def ground_size(self) -> int:
        return self.measure.shape[0]

    def squared_norm(self) -> float:
        """``sum f**2 * mu(x_1) ... mu(x_k)``."""
        operands = [self.values**2, list(range(self.arity))]
        for axis in range(self.arity):
            operands += [self.measure, [axis]]
        return float(np.einsum(*operands, [], optimize="greedy"))


def _check_kernels(layout, kernels):
    if len(kernels) != len(layout.row_sizes):
        raise ValueError(f"{len(kernels)} kernels for {len(layout.row_sizes)} rows")
    base = kernels[0]
    for l, (f, k) in enumerate(zip(kernels, layout.row_sizes)):
        if f.arity != k:
            raise ValueError(f"kernel {l} has arity {f.arity}, row {l} has {k} vertices")
        if f.ground_size != base.ground_size or not np.array_equal(f.measure, base.measure):
            raise ValueError(f"kernel {l} does not share the ground set and measure of kernel 0")


def f_gamma(gamma: Diagram, kernels: Sequence[DiscreteKernel], order=None) -> float:
    """Integral of the edge-identified kernel product over the lower endpoints.

    Each edge becomes one summation variable weighted by ``mu``. Variables are
    numbered by the lexicographic order of lower endpoints unless ``order``
    (a permutation of edge positions) says otherwise; the value does not
    depend on the numbering.
    """
    layout = gamma.layout
    _check_kernels(layout, kernels)
    lowers = gamma.lower_endpoints
    if order is not None:
        lowers = [lowers[i] for i in order]
    label = {v: r for r, v in enumerate(lowers)}
    alpha = gamma.alpha()
    operands = []
    for l, f in enumerate(kernels):
        operands += [f.values, [label[alpha[(l, j)]] for j in range(f.arity)]]
    mu = kernels[0].measure
    for r in range(len(lowers)):
        operands += [mu, [r]]
    return float(np.einsum(*operands, [], optimize="greedy"))


def expected_product(kernels: Sequence[DiscreteKernel], max_diagrams: int = DEFAULT_MAX_DIAGRAMS) -> float:
    """``E prod_l k_l! J_{k_l}(f_l)``: sum of ``f_gamma`` over cross-row diagrams.

    Contributions are combined with ``math.fsum``, so the result does not
    depend on diagram order.
    """
    layout = RowLayout(tuple(f.arity for f in kernels))
    _check_kernels(layout, kernels)
    return math.fsum(
        f_gamma(g, kernels) for g in enumerate_diagrams(layout, False, max_diagrams)
    )


def chaos_moment_via_diagrams(
    kernel: DiscreteKernel, M: int, max_diagrams: int = DEFAULT_MAX_DIAGRAMS
) -> float:
    """``E (k! J_k(f))**(2M)`` from ``2M`` copies of the kernel."""
    if M < 1:
        raise ValueError("M must be positive")
    projected = double_factorial_odd(2 * kernel.arity * M - 1)
    if projected > max_diagrams:
        raise BudgetError(
            f"chaos moment needs up to {projected} diagrams, above the budget {max_diagrams}",
            projected=projected,
        )
    return expected_product([kernel] * (2 * M), max_diagrams)


def embed_form(form: SymmetricMultilinearForm, use_absolute_values: bool = True) -> DiscreteKernel:
    """Dense kernel on ``{0..n-1}`` with unit atoms carrying the form's coefficients.

    Entries on tuples with a repeated index are zero; every ordering of a
    distinct tuple carries the (optionally absolute) coefficient.
    """
    values = np.zeros((form.n,) * form.k, dtype=np.float64)
    for key, v in form.coeffs.items():
        v = abs(v) if use_absolute_values else v
        for perm in permutations(j - 1 for j in key):
            values[perm] = v
    return DiscreteKernel(values, np.ones(form.n))


def kernel_from_document(doc) -> DiscreteKernel:
    """Parse ``{"values": nested list, "measure": [...]}``; measure defaults to ones."""
    try:
        values = np.asarray(doc["values"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"kernel document needs a numeric 'values' array ({exc})") from None
    measure = doc.get("measure")
    if measure is None:
        measure = np.ones(values.shape[0] if values.ndim else 0)
    try:
        return DiscreteKernel(values, measure)
    except ValueError as exc:
        raise FormatError(str(exc)) from None
