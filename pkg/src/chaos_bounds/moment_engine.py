"""Exact moments and tails of a form.

Two independent routes are provided:

* enumeration over all ``2**n`` sign vectors (Rademacher inputs only), done
  with one Walsh-Hadamard transform of the coefficient vector indexed by
  subsets, which yields the value of the form at every sign vector at once;
* symbolic expansion of ``Z**order`` into monomials with term merging,
  followed by substituting each variable's moments (any symmetric input).

Summation policy: like terms are merged in blocks whose boundaries depend
only on the input sizes, so repeated runs give identical floats; the final
expectation is reduced with ``math.fsum``. Enumeration moments are exact
integers when every value of the form is an integer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import chain

import numpy as np
from scipy.special import logsumexp

from . import kernels
from .distributions import MomentSequence
from .errors import BudgetError
from .form_core import SymmetricMultilinearForm

MAX_ENUMERATION_N = 24
DEFAULT_MAX_TERMS = 10**7
_PRODUCT_BLOCK = 1 << 20  # cap on unmerged products held at once


@dataclass(frozen=True)
class RademacherDistribution:
    """Exact law of a form under independent random signs.

    ``values`` are the distinct values taken, ascending; ``counts[i]`` is the
    number of the ``2**n`` sign vectors producing ``values[i]``.
    """

    values: np.ndarray
    counts: np.ndarray
    n: int

    @property
    def total(self) -> int:
        return 1 << self.n

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def _integral(self) -> bool:
        v = self.values
        return bool(np.all(np.floor(v) == v) and np.all(np.abs(v) < 2.0**53))

    def moment(self, order: int) -> float:
        """``E Z**order``, exact when the form only takes integer values."""
        if order < 0:
            raise ValueError("order must be nonnegative")
        if self._integral():
            acc = sum(int(c) * int(v) ** order for v, c in zip(self.values, self.counts))
            return float(Fraction(acc, self.total))
        return math.fsum(float(c) * float(v) ** order for v, c in zip(self.values, self.counts)) / self.total

    def log_moment(self, order: int) -> float:
        """``log E Z**order`` for even ``order``, safe when the moment overflows."""
        if order < 0 or order % 2:
            raise ValueError("log_moment needs a nonnegative even order")
        nz = self.values != 0
        if order == 0:
            return 0.0
        if not nz.any():
            return -math.inf
        terms = np.log(self.counts[nz].astype(np.float64)) + order * np.log(np.abs(self.values[nz]))
        return float(logsumexp(terms)) - self.n * math.log(2.0)

    def tail(self, u: float) -> float:
        """``P(|Z| > u)``."""
        hits = int(self.counts[np.abs(self.values) > u].sum())
        return float(Fraction(hits, self.total))


def _check_budget(form, max_n):
    if form.n > max_n:
        raise BudgetError(
            f"enumeration over 2**{form.n} sign vectors exceeds the budget n <= {max_n}",
            projected=1 << form.n,
        )


def all_sign_values(form: SymmetricMultilinearForm, max_n: int = MAX_ENUMERATION_N) -> np.ndarray:
    """Value of the form at every sign vector.

    Entry ``s`` corresponds to the sign vector whose coordinate ``j`` (0-based)
    is ``-1`` exactly when bit ``j`` of ``s`` is set.
    """
    _check_budget(form, max_n)
    w = np.zeros(1 << form.n, dtype=np.float64)
    if form.coeffs:
        masks = (np.left_shift(1, form.key_array)).sum(axis=1)
        w[masks] = form.multiplicity * form.value_array
    return kernels.walsh_hadamard(w)


def rademacher_distribution(form, max_n=MAX_ENUMERATION_N) -> RademacherDistribution:
    values, counts = np.unique(all_sign_values(form, max_n), return_counts=True)
    return RademacherDistribution(values, counts, form.n)


def exact_moment_rademacher(form, order: int, max_n: int = MAX_ENUMERATION_N) -> float:
    """``E Z**order`` under Rademacher inputs by full enumeration."""
    _check_budget(form, max_n)
    if order < 1 or int(order) != order:
        raise ValueError(f"order must be a positive integer, got {order}")
    if order % 2:
        return 0.0
    return rademacher_distribution(form, max_n).moment(order)


def exact_tail(form, u: float, max_n: int = MAX_ENUMERATION_N) -> float:
    """``P(|Z| > u)`` under Rademacher inputs by full enumeration."""
    if u < 0:
        raise ValueError("u must be nonnegative")
    return rademacher_distribution(form, max_n).tail(u)


class MonomialPolynomial:
    """Polynomial in ``n`` variables stored as an exponent matrix plus coefficients.

    Rows of ``exponents`` are kept unique and lexicographically sorted (the
    canonical order by variable index), with zero coefficients removed. With
    ``reduced=True`` every exponent is taken modulo 2, which is exact for
    variables satisfying ``x**2 = 1``.
    """

    def __init__(self, exponents, coeffs, reduced=False, max_terms=DEFAULT_MAX_TERMS):
        exponents = np.asarray(exponents, dtype=np.int16)
        coeffs = np.asarray(coeffs, dtype=np.float64)
        if exponents.ndim != 2 or exponents.shape[0] != coeffs.shape[0]:
            raise ValueError("exponents must be (terms, n) matching coeffs")
        self.reduced = reduced
        self.max_terms = max_terms
        if reduced:
            exponents = exponents % 2
        self.exponents, self.coeffs = self._merge(exponents, coeffs)
        self._guard()

    @property
    def n(self) -> int:
        return self.exponents.shape[1]

    def __len__(self):
        return self.coeffs.shape[0]

    @property
    def terms(self) -> dict:
        """Mapping from exponent signature ``((var, exp), ...)`` to coefficient.

        Variables are 1-based and only positive exponents are listed.
        """
        out = {}
        for row, c in zip(self.exponents, self.coeffs):
            sig = tuple((j + 1, int(e)) for j, e in enumerate(row) if e)
            out[sig] = float(c)
        return out

    @staticmethod
    def _merge(exponents, coeffs):
        if exponents.shape[0] == 0:
            return exponents, coeffs
        uniq, inverse = np.unique(exponents, axis=0, return_inverse=True)
        merged = np.bincount(inverse.reshape(-1), weights=coeffs, minlength=uniq.shape[0])
        keep = merged != 0.0
        return uniq[keep], merged[keep]

    def _guard(self):
        if len(self) > self.max_terms:
            raise BudgetError(
                f"expansion has {len(self)} live terms, above the cap of {self.max_terms}",
                projected=len(self),
            )

    @classmethod
    def from_form(cls, form: SymmetricMultilinearForm, reduced=False, max_terms=DEFAULT_MAX_TERMS):
        """The form as a multilinear polynomial, one term per sorted key."""
        exps = np.zeros((len(form.coeffs), form.n), dtype=np.int16)
        if form.coeffs:
            rows = np.repeat(np.arange(len(form.coeffs)), form.k)
            exps[rows, form.key_array.reshape(-1)] = 1
        return cls(exps, form.multiplicity * form.value_array, reduced, max_terms)

    @classmethod
    def one(cls, n, reduced=False, max_terms=DEFAULT_MAX_TERMS):
        return cls(np.zeros((1, n), dtype=np.int16), [1.0], reduced, max_terms)

    def multiply(self, other: MonomialPolynomial) -> MonomialPolynomial:
        """Product with term merging, formed in bounded blocks."""
        if self.n != other.n:
            raise ValueError("polynomials live in different numbers of variables")
        reduced = self.reduced or other.reduced
        if len(self) == 0 or len(other) == 0:
            return MonomialPolynomial(np.zeros((0, self.n)), [], reduced, self.max_terms)
        block = max(1, _PRODUCT_BLOCK // len(other))
        acc_e = np.zeros((0, self.n), dtype=np.int16)
        acc_c = np.zeros(0)
        for start in range(0, len(self), block):
            e = self.exponents[start : start + block, None, :] + other.exponents[None, :, :]
            c = np.outer(self.coeffs[start : start + block], other.coeffs)
            e = e.reshape(-1, self.n)
            if reduced:
                e %= 2
            acc_e, acc_c = self._merge(
                np.concatenate([acc_e, e]), np.concatenate([acc_c, c.reshape(-1)])
            )
            if acc_e.shape[0] > self.max_terms:
                raise BudgetError(
                    f"expansion exceeded {self.max_terms} live terms",
                    projected=acc_e.shape[0],
                )
        result = MonomialPolynomial.__new__(MonomialPolynomial)
        result.reduced, result.max_terms = reduced, self.max_terms
        result.exponents, result.coeffs = acc_e, acc_c
        return result

    def power(self, m: int) -> MonomialPolynomial:
        result = MonomialPolynomial.one(self.n, self.reduced, self.max_terms)
        for _ in range(m):
            result = result.multiply(self)
        return result

    def constant_term(self) -> float:
        zero = ~self.exponents.any(axis=1)
        return float(self.coeffs[zero].sum())

    def expectation(self, moments: MomentSequence) -> float:
        """Replace every ``x_j**e`` by ``E x**e`` (odd exponents give 0)."""
        if len(self) == 0:
            return 0.0
        if self.reduced:
            return self.constant_term()
        table = moments.table(int(self.exponents.max()))
        factors = table[self.exponents].prod(axis=1)
        return math.fsum(self.coeffs * factors)


def expectation_of_product(p: MonomialPolynomial, q: MonomialPolynomial, moments: MomentSequence) -> float:
    """``E[p * q]`` without materializing the product polynomial.

    Only pairs of terms whose exponent parities agree can survive the
    expectation, so terms are bucketed by parity pattern first.
    """
    if len(p) == 0 or len(q) == 0:
        return 0.0
    table = moments.table(int(p.exponents.max()) + int(q.exponents.max()))
    parity = np.concatenate([p.exponents % 2, q.exponents % 2])
    _, cls = np.unique(parity, axis=0, return_inverse=True)
    cls = cls.reshape(-1)
    cls_p, cls_q = cls[: len(p)], cls[len(p) :]
    parts = []
    for c in np.unique(cls_p):
        ip = np.flatnonzero(cls_p == c)
        iq = np.flatnonzero(cls_q == c)
        if iq.size == 0:
            continue
        eq, cq = q.exponents[iq], q.coeffs[iq]
        block = max(1, _PRODUCT_BLOCK // (iq.size * p.n))
        for start in range(0, ip.size, block):
            rows = ip[start : start + block]
            sums = p.exponents[rows, None, :] + eq[None, :, :]
            factors = table[sums].prod(axis=2)
            parts.append((p.coeffs[rows, None] * factors * cq[None, :]).reshape(-1))
    return math.fsum(chain.from_iterable(parts))


def exact_moment_by_expansion(
    form: SymmetricMultilinearForm,
    moments: MomentSequence,
    order: int,
    max_terms: int = DEFAULT_MAX_TERMS,
) -> float:
    """``E Z**order`` for i.i.d. symmetric inputs with the given even moments.

    Unit-modulus inputs (all even moments 1) expand ``Z**order`` with
    exponents reduced mod 2 and read off the constant term. Otherwise
    ``Z**(order/2)`` is expanded and paired with itself.
    """
    if order < 1 or int(order) != order:
        raise ValueError(f"order must be a positive integer, got {order}")
    if order % 2:
        return 0.0
    # a variable appears at most once per factor, so exponents never exceed order
    needed = order
    if moments.max_order < needed:
        raise ValueError(
            f"moment sequence {moments.label or ''} supplies moments up to order "
            f"{moments.max_order}; order {needed} is required"
        )
    if moments.is_unit_modulus():
        z = MonomialPolynomial.from_form(form, reduced=True, max_terms=max_terms)
        return z.power(order).constant_term()
    z = MonomialPolynomial.from_form(form, max_terms=max_terms)
    half = z.power(order // 2)
    return expectation_of_product(half, half, moments)
