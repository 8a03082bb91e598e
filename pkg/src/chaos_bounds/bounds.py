"""Closed-form moment and tail bounds for multilinear forms.

All functions take the variance constant ``v2`` (the sum of squared
coefficients over ordered distinct tuples) rather than a form, so they can
be evaluated without touching coefficient data.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

SQRT2 = math.sqrt(2.0)
DOMINATION_RTOL = 1e-9


def double_factorial_odd(m: int) -> int:
    """``1 * 3 * 5 * ... * m`` for odd ``m >= 1``, as an exact integer."""
    if int(m) != m or m < 1 or m % 2 == 0:
        raise ValueError(f"double_factorial_odd needs an odd positive integer, got {m}")
    return math.prod(range(1, int(m) + 1, 2))


def log_double_factorial_odd(m: int) -> float:
    """Natural log of ``m!!`` for odd ``m``; exact product below 20001, lgamma above."""
    if int(m) != m or m < 1 or m % 2 == 0:
        raise ValueError(f"log_double_factorial_odd needs an odd positive integer, got {m}")
    if m <= 20001:
        return math.log(double_factorial_odd(m))
    half = (int(m) + 1) // 2
    return math.lgamma(2 * half + 1) - half * math.log(2.0) - math.lgamma(half + 1)


def hoeffding_exponent(u: float, v2: float) -> float:
    """``-u**2 / (2 v2)``."""
    return -(u * u / v2) * 0.5


def hoeffding_tail_bound(u: float, v2: float) -> float:
    """Scalar Hoeffding bound ``exp(-u**2 / (2 v2))`` on ``P(Z > u)``."""
    if u <= 0 or v2 <= 0:
        raise ValueError("hoeffding_tail_bound needs u > 0 and v2 > 0")
    return math.exp(hoeffding_exponent(u, v2))


def theorem2_moment_bound(k: int, M: int, v2: float) -> float:
    """``(2kM - 1)!! * v2**M``, the bound on ``E Z**(2M)``.

    Raises ``OverflowError`` when the value does not fit in a double; use
    :func:`log_theorem2_moment_bound` then.
    """
    _check_km(k, M)
    if v2 < 0:
        raise ValueError("v2 must be nonnegative")
    value = float(double_factorial_odd(2 * k * M - 1)) * v2**M
    if math.isinf(value):
        raise OverflowError(f"theorem2 bound overflows a double at k={k}, M={M}")
    return value


def log_theorem2_moment_bound(k: int, M: int, v2: float) -> float:
    _check_km(k, M)
    if v2 <= 0:
        return -math.inf
    return log_double_factorial_odd(2 * k * M - 1) + M * math.log(v2)


def _check_km(k, M):
    if k < 1 or M < 1 or int(k) != k or int(M) != M:
        raise ValueError(f"k and M must be positive integers, got k={k}, M={M}")


def tail_constant_A(k: int) -> float:
    """Explicit prefactor ``2 sqrt(2) e**k`` for the two-sided tail bound.

    Markov's inequality at order ``2M`` with ``M = floor(u**(2/k) / (2k V**(2/k)))``
    and ``(2N-1)!! <= sqrt(2) (2N/e)**N`` gives
    ``P(Z > u) <= sqrt(2) e**k exp(-(u/V)**(2/k) / 2)`` whenever ``M >= 1``;
    below that threshold the right side already exceeds 1. The extra factor
    2 covers ``-Z``.
    """
    if k < 1:
        raise ValueError("k must be positive")
    return 2.0 * SQRT2 * math.exp(k)


def theorem1_exponent(u: float, k: int, v2: float) -> float:
    """``-(u/V)**(2/k) / 2`` computed as ``-(u**2/v2)**(1/k) / 2``."""
    return -((u * u / v2) ** (1.0 / k)) * 0.5


def theorem1_tail_bound(u: float, k: int, v2: float, A: float | None = None) -> float:
    """``min(1, A exp(-(u/V)**(2/k) / 2))``, a bound on ``P(|Z| > u)``."""
    if u < 0:
        raise ValueError("u must be nonnegative")
    if v2 <= 0:
        raise ValueError("v2 must be positive")
    if A is None:
        A = tail_constant_A(k)
    elif A <= 0:
        raise ValueError("A must be positive")
    return min(1.0, A * math.exp(theorem1_exponent(u, k, v2)))


def borell_moment_bound(k: int, p: float, v2: float) -> float:
    """Hypercontractive bound ``(2p-1)**(kp) (k! v2)**p`` on ``E|Z|**(2p)``."""
    if p < 1:
        raise ValueError("Borell bound needs p >= 1")
    return (2 * p - 1) ** (k * p) * (math.factorial(k) * v2) ** p


def log_borell_moment_bound(k: int, p: float, v2: float) -> float:
    if p < 1:
        raise ValueError("Borell bound needs p >= 1")
    if v2 <= 0:
        return -math.inf
    return k * p * math.log(2 * p - 1) + p * (math.log(math.factorial(k)) + math.log(v2))


@dataclass(frozen=True)
class BoundComparison:
    k: int
    M: int
    log_theorem2: float
    log_borell: float
    log_ratio: float


def compare_theorem2_vs_borell(k: int, M: int, v2: float) -> BoundComparison:
    """Both bounds on ``E Z**(2M)`` in log form; negative ratio means the
    double-factorial bound is the sharper one."""
    if v2 <= 0:
        raise ValueError("v2 must be positive")
    t2 = log_theorem2_moment_bound(k, M, v2)
    bo = log_borell_moment_bound(k, M, v2)
    return BoundComparison(k, M, t2, bo, t2 - bo)


def stirling_step_ratios(n_max: int = 200) -> list[float]:
    """``(2N-1)!! / (sqrt(2) (2N/e)**N)`` for ``N = 1..n_max``.

    The numerator is an exact integer; the ratio is formed in log space.
    """
    out = []
    for N in range(1, n_max + 1):
        log_lhs = math.log(double_factorial_odd(2 * N - 1))
        log_rhs = 0.5 * math.log(2.0) + N * (math.log(2 * N) - 1.0)
        out.append(math.exp(log_lhs - log_rhs))
    return out


def stirling_step_holds(n_max: int = 200) -> bool:
    """Every ratio is at most 1 and the sequence increases strictly."""
    r = stirling_step_ratios(n_max)
    return all(x <= 1.0 for x in r) and all(a < b for a, b in zip(r, r[1:]))


def dominates(bound: float, oracle: float, rtol: float = DOMINATION_RTOL) -> bool:
    """``bound >= oracle - rtol * max(1, |oracle|)``."""
    return bound >= oracle - rtol * max(1.0, abs(oracle))


@dataclass(frozen=True)
class BoundReport:
    """One bound evaluated at one threshold or order.

    With ``scale="log"`` both ``bound_value`` and ``oracle_value`` are
    natural logarithms (a zero oracle is then ``-inf``).
    """

    bound_name: str
    u_or_order: float
    bound_value: float
    oracle_value: float | None = None
    dominates: bool | None = None
    scale: str = "linear"
    oracle: str | None = None

    @classmethod
    def checked(cls, name, at, bound, oracle_value=None, oracle=None, scale="linear"):
        verdict = None
        if oracle_value is not None:
            if scale == "log":
                verdict = oracle_value == -math.inf or bound >= oracle_value - DOMINATION_RTOL * max(
                    1.0, abs(oracle_value))
            else:
                verdict = dominates(bound, oracle_value)
        return cls(name, at, bound, oracle_value, verdict, scale, oracle)
