"""Finite-field arithmetic over GF(p^m) and matrix rank/RREF.

Elements are integers in ``[0, q)``: the base-``p`` digits of an element are
the coefficients of its polynomial representative, lowest degree first, so in
GF(8) the integer 2 is ``x`` and 3 is ``x + 1``.

Unless a reduction polynomial is supplied, the monic irreducible polynomial
of degree ``m`` with the smallest integer value (coefficients read as base-p
digits) is used. That gives, for the fields in common use:

    GF(4)   x^2 + x + 1
    GF(8)   x^3 + x + 1
    GF(16)  x^4 + x + 1
    GF(256) x^8 + x^4 + x^3 + x + 1

and ``x`` for every prime field.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from utils.settings import get_settings

from .errors import UnsupportedFieldError

Poly = Tuple[int, ...]


@dataclass(frozen=True)
class FieldSpec:
    """GF(q) with precomputed operation tables. Immutable and safe to share."""

    q: int
    p: int
    m: int
    reduction_polynomial: Poly
    add_table: np.ndarray = field(repr=False, compare=False)
    sub_table: np.ndarray = field(repr=False, compare=False)
    mul_table: np.ndarray = field(repr=False, compare=False)
    inv_table: np.ndarray = field(repr=False, compare=False)
    exp_table: np.ndarray = field(repr=False, compare=False)
    log_table: np.ndarray = field(repr=False, compare=False)

    def add(self, a: int, b: int) -> int:
        return int(self.add_table[a, b])

    def sub(self, a: int, b: int) -> int:
        return int(self.sub_table[a, b])

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_table[a, b])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no multiplicative inverse")
        return int(self.inv_table[a])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def power(self, a: int, exponent: int) -> int:
        if a == 0:
            return 1 if exponent == 0 else 0
        idx = (int(self.log_table[a]) * exponent) % (self.q - 1)
        return int(self.exp_table[idx])


@dataclass(frozen=True)
class GfMatrix:
    """Dense matrix over a FieldSpec; ``entries`` has shape (rows, cols)."""

    field: FieldSpec
    entries: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.entries, dtype=np.int64, copy=True)
        if arr.ndim != 2:
            raise ValueError("matrix entries must be two-dimensional")
        if arr.size and (arr.min() < 0 or arr.max() >= self.field.q):
            raise ValueError(f"matrix entries must lie in [0, {self.field.q})")
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)

    @property
    def rows(self) -> int:
        return int(self.entries.shape[0])

    @property
    def cols(self) -> int:
        return int(self.entries.shape[1])

    @classmethod
    def from_rows(
        cls, gf: FieldSpec, rows: Iterable[Sequence[int]], cols: Optional[int] = None
    ) -> "GfMatrix":
        data = [list(row) for row in rows]
        if not data:
            return cls(gf, np.zeros((0, cols or 0), dtype=np.int64))
        return cls(gf, np.array(data, dtype=np.int64))

    @classmethod
    def identity(cls, gf: FieldSpec, size: int) -> "GfMatrix":
        return cls(gf, np.eye(size, dtype=np.int64))

    @classmethod
    def zeros(cls, gf: FieldSpec, rows: int, cols: int) -> "GfMatrix":
        return cls(gf, np.zeros((rows, cols), dtype=np.int64))

    def to_lists(self) -> List[List[int]]:
        return self.entries.tolist()


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    divisor = 2
    while divisor * divisor <= n:
        if n % divisor == 0:
            return False
        divisor += 1
    return True


def _trim(poly: Sequence[int]) -> List[int]:
    out = list(poly)
    while out and out[-1] == 0:
        out.pop()
    return out


def _poly_mod(a: Sequence[int], b: Sequence[int], p: int) -> List[int]:
    rem = _trim(a)
    div = _trim(b)
    lead_inv = pow(div[-1], p - 2, p) if p > 2 else 1
    while len(rem) >= len(div):
        factor = (rem[-1] * lead_inv) % p
        shift = len(rem) - len(div)
        for i, coeff in enumerate(div):
            rem[shift + i] = (rem[shift + i] - factor * coeff) % p
        rem = _trim(rem)
    return rem


def _poly_mul(a: Sequence[int], b: Sequence[int], p: int) -> List[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % p
    return out


def _digits(value: int, p: int, length: int) -> List[int]:
    out = []
    for _ in range(length):
        value, digit = divmod(value, p)
        out.append(digit)
    return out


def _from_digits(digits: Sequence[int], p: int) -> int:
    value = 0
    for digit in reversed(digits):
        value = value * p + digit
    return value


def _monic_polys(p: int, degree: int) -> Iterable[List[int]]:
    for low in range(p**degree):
        yield _digits(low, p, degree) + [1]


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    poly = _trim(poly)
    degree = len(poly) - 1
    if degree < 1:
        return False
    for d in range(1, degree // 2 + 1):
        for divisor in _monic_polys(p, d):
            if not _poly_mod(poly, divisor, p):
                return False
    return True


def default_polynomial(p: int, m: int) -> Poly:
    for candidate in _monic_polys(p, m):
        if is_irreducible(candidate, p):
            return tuple(candidate)
    raise UnsupportedFieldError(f"no irreducible polynomial of degree {m} over GF({p})")


def _mul_elements(a: int, b: int, p: int, m: int, poly: Poly) -> int:
    product = _poly_mul(_digits(a, p, m), _digits(b, p, m), p)
    rem = _poly_mod(product, poly, p)
    return _from_digits(rem + [0] * (m - len(rem)), p)


def _find_generator(q: int, p: int, m: int, poly: Poly) -> List[int]:
    """Return the powers g^0..g^(q-2) of the first primitive element."""
    for g in range(1, q):
        powers = [1]
        value = g
        while value != 1:
            powers.append(value)
            value = _mul_elements(value, g, p, m, poly)
        if len(powers) == q - 1:
            return powers
    raise UnsupportedFieldError(f"GF({q}) has no primitive element for {poly}")


@lru_cache(maxsize=None)
def _build_field(p: int, m: int, poly: Poly) -> FieldSpec:
    q = p**m
    powers = _find_generator(q, p, m, poly)

    exp_table = np.array(powers + powers, dtype=np.int64)
    log_table = np.zeros(q, dtype=np.int64)
    log_table[np.array(powers, dtype=np.int64)] = np.arange(q - 1)

    mul_table = np.zeros((q, q), dtype=np.int64)
    logs = log_table[1:]
    mul_table[1:, 1:] = exp_table[logs[:, None] + logs[None, :]]

    inv_table = np.zeros(q, dtype=np.int64)
    inv_table[1:] = exp_table[(q - 1 - logs) % (q - 1)]

    weights = p ** np.arange(m, dtype=np.int64)
    digits = (np.arange(q, dtype=np.int64)[:, None] // weights) % p
    add_table = ((digits[:, None, :] + digits[None, :, :]) % p) @ weights
    neg = ((p - digits) % p) @ weights
    sub_table = add_table[:, neg]

    for table in (add_table, sub_table, mul_table, inv_table, exp_table, log_table):
        table.flags.writeable = False

    return FieldSpec(
        q=q,
        p=p,
        m=m,
        reduction_polynomial=poly,
        add_table=add_table,
        sub_table=sub_table,
        mul_table=mul_table,
        inv_table=inv_table,
        exp_table=exp_table,
        log_table=log_table,
    )


def field_new(
    p: int,
    m: int = 1,
    reduction_polynomial: Optional[Sequence[int]] = None,
    max_order: Optional[int] = None,
) -> FieldSpec:
    """Build GF(p^m).

    ``reduction_polynomial`` lists coefficients lowest degree first and must be
    monic of degree ``m``. Raises UnsupportedFieldError for a non-prime ``p``,
    a reducible polynomial, or ``p**m`` above ``max_order``
    (default: settings.FIELD_MAX_ORDER).
    """
    if not _is_prime(p):
        raise UnsupportedFieldError(f"characteristic {p} is not prime")
    if m < 1:
        raise UnsupportedFieldError(f"extension degree must be >= 1, got {m}")
    cap = max_order if max_order is not None else get_settings().FIELD_MAX_ORDER
    if p**m > cap:
        raise UnsupportedFieldError(f"GF({p}^{m}) exceeds the supported order {cap}")

    if reduction_polynomial is None:
        poly = default_polynomial(p, m)
    else:
        poly = tuple(int(c) for c in reduction_polynomial)
        if len(poly) != m + 1 or poly[-1] != 1:
            raise UnsupportedFieldError(f"reduction polynomial must be monic of degree {m}")
        if any(not 0 <= c < p for c in poly):
            raise UnsupportedFieldError(f"polynomial coefficients must lie in [0, {p})")
        if not is_irreducible(poly, p):
            raise UnsupportedFieldError(f"{list(poly)} is reducible over GF({p})")
    return _build_field(p, m, poly)


def field_for_order(q: int, max_order: Optional[int] = None) -> FieldSpec:
    """GF(q) with the default polynomial; q must be a prime power."""
    if q < 2:
        raise UnsupportedFieldError(f"field order must be >= 2, got {q}")
    p = next(d for d in range(2, q + 1) if q % d == 0)
    m = 0
    rest = q
    while rest % p == 0:
        rest //= p
        m += 1
    if rest != 1:
        raise UnsupportedFieldError(f"{q} is not a prime power")
    return field_new(p, m, max_order=max_order)


def rref_array(gf: FieldSpec, entries: np.ndarray) -> Tuple[np.ndarray, List[int]]:
    """Reduced row echelon form of a raw array plus its pivot columns.

    Pivot rows are taken as the first nonzero entry scanning downwards.
    """
    a = np.array(entries, dtype=np.int64, copy=True)
    rows, cols = a.shape
    mul, sub, inv = gf.mul_table, gf.sub_table, gf.inv_table
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nonzero = np.flatnonzero(a[r:, c])
        if nonzero.size == 0:
            continue
        pivot = r + int(nonzero[0])
        if pivot != r:
            a[[r, pivot]] = a[[pivot, r]]
        a[r] = mul[inv[a[r, c]], a[r]]
        factors = a[:, c].copy()
        factors[r] = 0
        targets = np.flatnonzero(factors)
        if targets.size:
            a[targets] = sub[a[targets], mul[factors[targets, None], a[r][None, :]]]
        pivots.append(c)
        r += 1
    return a, pivots


def rank_array(gf: FieldSpec, entries: np.ndarray) -> int:
    return len(rref_array(gf, entries)[1])


def unit_rows_in_rref(reduced: np.ndarray) -> int:
    if reduced.size == 0:
        return 0
    return int(np.count_nonzero(np.count_nonzero(reduced, axis=1) == 1))


def mat_rank(matrix: GfMatrix) -> int:
    return rank_array(matrix.field, matrix.entries)


def mat_rref(matrix: GfMatrix) -> GfMatrix:
    reduced, _ = rref_array(matrix.field, matrix.entries)
    return GfMatrix(matrix.field, reduced)


def recoverable_sources(matrix: GfMatrix) -> int:
    """Number of standard basis vectors in the row space.

    e_b is in the row space exactly when some RREF row has a single nonzero
    entry (at column b).
    """
    reduced, _ = rref_array(matrix.field, matrix.entries)
    return unit_rows_in_rref(reduced)
