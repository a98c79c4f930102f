from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Protocol

import numpy as np

from .gfmat import FieldSpec, field_for_order, rref_array, unit_rows_in_rref
from .models import Carousel, Scheme, SystematicRlnc


@dataclass(frozen=True)
class Decoded:
    received: object
    count: int
    full: bool


class BroadcastStrategy(Protocol):
    """Strategy interface for what the source sends and how a base decodes it."""

    name: str

    def transmit(self, k: int, n_T: int, rng: np.random.Generator) -> np.ndarray:
        ...

    def decode(self, payload: np.ndarray, arrived: np.ndarray, k: int) -> Decoded:
        ...


class CarouselStrategy:
    """Packet n (0-based) carries source n mod k; the first cycle is the
    systematic prefix."""

    name = "carousel"

    def transmit(self, k: int, n_T: int, rng: np.random.Generator) -> np.ndarray:
        return np.arange(n_T) % k

    def decode(self, payload: np.ndarray, arrived: np.ndarray, k: int) -> Decoded:
        positions = np.flatnonzero(arrived)
        count = int(np.unique(payload[positions]).size)
        return Decoded(received=frozenset(positions.tolist()), count=count, full=count == k)


class RlncStrategy:
    """Systematic RLNC: k unit rows, then n_T - k rows uniform over GF(q)^k
    (the zero row included)."""

    name = "rlnc"

    def __init__(self, gf: FieldSpec) -> None:
        self._field = gf

    @property
    def field(self) -> FieldSpec:
        return self._field

    def transmit(self, k: int, n_T: int, rng: np.random.Generator) -> np.ndarray:
        coded = rng.integers(0, self._field.q, size=(n_T - k, k), dtype=np.int64)
        return np.vstack([np.eye(k, dtype=np.int64), coded])

    def decode(self, payload: np.ndarray, arrived: np.ndarray, k: int) -> Decoded:
        rows = payload[arrived]
        if rows.shape[0] == 0:
            return Decoded(received=rows, count=0, full=False)
        # Duplicate rows never change the row space.
        rows = np.unique(rows, axis=0)
        reduced, pivots = rref_array(self._field, rows)
        count = unit_rows_in_rref(reduced)
        return Decoded(received=rows, count=count, full=len(pivots) == k)


@lru_cache(maxsize=32)
def strategy_for(scheme: Scheme) -> BroadcastStrategy:
    if isinstance(scheme, SystematicRlnc):
        return RlncStrategy(field_for_order(scheme.q))
    if isinstance(scheme, Carousel):
        return CarouselStrategy()
    raise ValueError(f"unknown scheme {scheme!r}")

