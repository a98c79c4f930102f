"""Exact combinatorial kernels for systematic RLNC decoding.

Every value is an exact ``Fraction``; conversion to float happens in the
callers. The inner sums are carried out over integers and divided once, so
the alternating inclusion-exclusion terms never lose precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, prod

Rational = Fraction


@dataclass(frozen=True)
class KernelParams:
    k: int
    n_T: int
    n: int
    mu: int
    q: int

    def __post_init__(self) -> None:
        if not 0 <= self.mu <= self.k <= self.n_T:
            raise ValueError(
                f"need 0 <= mu <= k <= n_T, got mu={self.mu}, k={self.k}, n_T={self.n_T}"
            )
        if not 0 <= self.n <= self.n_T:
            raise ValueError(f"need 0 <= n <= n_T, got n={self.n}, n_T={self.n_T}")
        if self.q < 2:
            raise ValueError(f"field order must be >= 2, got {self.q}")

    @property
    def h_low(self) -> int:
        return max(0, self.n - self.n_T + self.k)


def binom(a: int, b: int) -> int:
    if a < 0:
        raise ValueError(f"binom needs a >= 0, got {a}")
    if b < 0 or b > a:
        return 0
    return comb(a, b)


@lru_cache(maxsize=1 << 14)
def gauss_binom(a: int, b: int, q: int) -> int:
    """Gaussian binomial [a choose b]_q (number of b-dim subspaces of GF(q)^a)."""
    if a < 0:
        raise ValueError(f"gauss_binom needs a >= 0, got {a}")
    if q < 2:
        raise ValueError(f"gauss_binom needs q >= 2, got {q}")
    if b < 0 or b > a:
        return 0
    numerator = prod(q ** (a - i) - 1 for i in range(b))
    denominator = prod(q ** (i + 1) - 1 for i in range(b))
    return numerator // denominator


def _full_rank_count(rows: int, cols: int, rank: int, q: int) -> int:
    """prod_{w<rank} (q^rows - q^w): numerator of the rank-`rank` probability
    of a uniform rows x cols matrix once the [cols choose rank]_q factor and
    the q^(rows*cols) denominator are taken out."""
    return prod(q**rows - q**w for w in range(rank))


@lru_cache(maxsize=1 << 14)
def _subspaces_with_units(dim: int, sub_dim: int, at_least: int, q: int) -> int:
    """Number of sub_dim-dimensional subspaces of GF(q)^dim that contain at
    least ``at_least`` of the standard basis vectors (inclusion-exclusion on
    the basis vectors contained)."""
    total = 0
    for b in range(max(0, at_least), sub_dim + 1):
        exactly_b = 0
        for ell in range(dim - b + 1):
            term = binom(dim - b, ell) * gauss_binom(dim - b - ell, sub_dim - b - ell, q)
            exactly_b += -term if ell % 2 else term
        total += binom(dim, b) * exactly_b
    return total


def _check(k: int, n: int, n_T: int, q: int, mu: int | None = None) -> KernelParams:
    return KernelParams(k=k, n_T=n_T, n=n, mu=k if mu is None else mu, q=q)


@lru_cache(maxsize=1 << 12)
def p_sr_full(k: int, n: int, n_T: int, q: int) -> Fraction:
    """Probability that n of the n_T systematic-RLNC packets, picked uniformly,
    have rank k. Zero for n < k."""
    params = _check(k, n, n_T, q)
    if n < k:
        return Fraction(0)
    total = Fraction(0)
    for h in range(params.h_low, k + 1):
        weight = binom(k, h) * binom(n_T - k, n - h)
        if weight == 0:
            continue
        coded = n - h
        missing = k - h
        total += Fraction(
            weight * _full_rank_count(coded, missing, missing, q), q ** (coded * missing)
        )
    return total / binom(n_T, n)


@lru_cache(maxsize=1 << 12)
def p_sr_partial(mu: int, k: int, n: int, n_T: int, q: int) -> Fraction:
    """Probability that n received packets decode into at least mu sources.

    Sums over the total rank r >= mu and the number h of received source
    packets; the r - h coded dimensions land in a uniformly random subspace of
    the k - h unknown coordinates, which must hold at least mu - h unit
    vectors.
    """
    params = _check(k, n, n_T, q, mu)
    total = Fraction(0)
    for r in range(mu, min(n, k) + 1):
        for h in range(params.h_low, r + 1):
            weight = binom(k, h) * binom(n_T - k, n - h)
            if weight == 0:
                continue
            coded = n - h
            unknown = k - h
            numerator = (
                weight
                * _full_rank_count(coded, unknown, r - h, q)
                * _subspaces_with_units(unknown, r - h, mu - h, q)
            )
            total += Fraction(numerator, q ** (coded * unknown))
    return total / binom(n_T, n)
