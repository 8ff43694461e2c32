"""Finite measure spaces and dense complex functions on ``Omega^k``."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np


@dataclass(frozen=True, eq=False)
class DiscreteMeasureSpace:
    """``Omega = range(n)`` with strictly positive point masses."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float).reshape(-1)
        if w.size < 1:
            raise ValueError("measure space needs at least one point")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise ValueError("all point masses must be finite and > 0")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @classmethod
    def counting(cls, n: int) -> "DiscreteMeasureSpace":
        return cls(np.ones(int(n)))

    @classmethod
    def uniform(cls, n: int) -> "DiscreteMeasureSpace":
        return cls(np.full(int(n), 1.0 / int(n)))

    @property
    def n(self) -> int:
        return int(self.weights.size)

    @property
    def total(self) -> float:
        return math.fsum(self.weights)

    @property
    def is_probability(self) -> bool:
        return abs(self.total - 1.0) <= 1e-12

    def product(self, other: "DiscreteMeasureSpace") -> "DiscreteMeasureSpace":
        """Point ``(x, y)`` -> ``x * other.n + y`` with mass ``w(x) w'(y)``."""
        return DiscreteMeasureSpace(np.outer(self.weights, other.weights).reshape(-1))

    def __eq__(self, other):
        return isinstance(other, DiscreteMeasureSpace) and np.array_equal(self.weights, other.weights)

    def __hash__(self):
        return hash(self.weights.tobytes())


@dataclass(frozen=True, eq=False)
class GridFunction:
    """A complex function on ``Omega^k`` stored as an ``(n,)*k`` array."""

    space: DiscreteMeasureSpace
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        n = self.space.n
        if v.ndim == 1 and v.size != n:
            k = round(math.log(v.size, n)) if n > 1 else None
            if k is None or n ** k != v.size:
                raise ValueError(f"{v.size} values is not a power of n={n}")
            v = v.reshape((n,) * k)
        if v.ndim < 1 or any(s != n for s in v.shape):
            raise ValueError(f"values must have shape (n,)*k with n={n}, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("function values must be finite")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @classmethod
    def from_array(cls, values, weights=None, *, counting: bool = False) -> "GridFunction":
        values = np.asarray(values)
        n = values.shape[0]
        if weights is None:
            space = DiscreteMeasureSpace.counting(n) if counting else DiscreteMeasureSpace.uniform(n)
        else:
            space = DiscreteMeasureSpace(weights)
        return cls(space, values)

    @classmethod
    def constant(cls, space: DiscreteMeasureSpace, k: int, c: complex = 1.0) -> "GridFunction":
        return cls(space, np.full((space.n,) * k, c, dtype=complex))

    @property
    def k(self) -> int:
        return self.values.ndim

    @property
    def n(self) -> int:
        return self.space.n

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.space, values)

    def _same(self, other: "GridFunction"):
        if self.space != other.space or self.k != other.k:
            raise ValueError("functions live on different spaces")

    def __add__(self, other):
        self._same(other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other):
        self._same(other)
        return self.with_values(self.values - other.values)

    def __mul__(self, c):
        if isinstance(c, GridFunction):
            self._same(c)
            return self.with_values(self.values * c.values)
        return self.with_values(self.values * complex(c))

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self.with_values(self.values / complex(c))

    def __neg__(self):
        return self.with_values(-self.values)

    def conj(self) -> "GridFunction":
        return self.with_values(np.conj(self.values))

    def abs(self) -> "GridFunction":
        return self.with_values(np.abs(self.values))

    # -- JSON ------------------------------------------------------------

    def to_dict(self) -> dict:
        flat = self.values.reshape(-1)
        return {
            "k": self.k,
            "n": self.n,
            "values": [[float(z.real), float(z.imag)] for z in flat],
            "weights": [float(w) for w in self.space.weights],
        }

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=indent)

    @classmethod
    def from_dict(cls, data: Mapping) -> "GridFunction":
        try:
            n, k = int(data["n"]), int(data["k"])
            weights = [float(w) for w in data["weights"]]
            vals = np.array([complex(re, im) for re, im in data["values"]])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed function JSON: {exc!r}") from exc
        if len(weights) != n:
            raise ValueError(f"expected {n} weights, got {len(weights)}")
        if vals.size != n ** k:
            raise ValueError(f"expected n^k={n ** k} values, got {vals.size}")
        return cls(DiscreteMeasureSpace(weights), vals.reshape((n,) * k))

    @classmethod
    def from_json(cls, text: str) -> "GridFunction":
        return cls.from_dict(json.loads(text))


def diagonal_function(a: Sequence[complex], k: int, space: DiscreteMeasureSpace | None = None) -> GridFunction:
    """``f_a(i, ..., i) = a_i`` and zero off the diagonal."""
    a = np.asarray(a, dtype=complex)
    n = a.size
    vals = np.zeros((n,) * k, dtype=complex)
    idx = np.arange(n)
    vals[(idx,) * k] = a
    return GridFunction(space or DiscreteMeasureSpace.counting(n), vals)
