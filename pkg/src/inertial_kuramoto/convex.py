"""Order-weighted convex combinations and the spread functional.

For a vector z sorted ascending, the top combination puts rapidly growing
weights M_1 < M_2 < ... < M_n on increasing entries, so it hugs the maximum;
the bottom combination applies the same weights in reverse and hugs the
minimum. Their difference, spread(z), is sandwiched against the plain
diameter D_z = max(z) - min(z):

    eta * D_z <= spread(z) <= D_z,    eta = 1 - 4 / (c + 2),

where the integer c > 2 steers how sharply the weights concentrate. The
weights follow the recurrence M_1 = 1, M_{i+1} = (c + n - 1 - i) * M_i, so
M_n equals the product (c)(c+1)...(c+n-2). They are built multiplicatively
in floating point: factorial ratios overflow integers for moderate n and
only ratios matter after normalization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ConvexWeights",
    "make_weights",
    "eta",
    "upper_comb",
    "lower_comb",
    "spread",
    "spread_batch",
    "spread_along",
    "spread_along_batch",
]


@dataclass(frozen=True)
class ConvexWeights:
    """Strictly increasing weight vector M_1..M_n with its normalization."""

    c: int
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64).copy()
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def total(self) -> float:
        return float(self.weights.sum())

    @property
    def top(self) -> float:
        """The largest weight M_n."""
        return float(self.weights[-1])


def _check_c(c: int) -> None:
    if not isinstance(c, (int, np.integer)) or isinstance(c, bool):
        raise ValueError(f"c must be an integer, got {c!r}")
    if c <= 2:
        raise ValueError(f"c must exceed 2, got {c}")


def make_weights(c: int, n: int) -> ConvexWeights:
    """Build the weight vector for n values via the multiplicative recurrence."""
    _check_c(c)
    if n < 1:
        raise ValueError(f"need at least one value, got n = {n}")
    w = np.empty(n, dtype=np.float64)
    w[0] = 1.0
    for k in range(1, n):
        w[k] = w[k - 1] * (c + n - 1 - k)
    return ConvexWeights(c=int(c), weights=w)


def eta(c: int) -> float:
    """Lower sandwich factor 1 - 4/(c+2); approaches 1 as c grows."""
    _check_c(c)
    return 1.0 - 4.0 / (c + 2)


def _check_vector(z, w: ConvexWeights) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    if z.ndim != 1 or z.shape[0] != w.n:
        raise ValueError(f"expected a vector of length {w.n}, got shape {z.shape}")
    return z


def upper_comb(z, w: ConvexWeights) -> float:
    """Weighted combination hugging max(z): largest weight on the largest entry."""
    z = _check_vector(z, w)
    return float(np.dot(w.weights, np.sort(z, kind="stable")) / w.total)


def lower_comb(z, w: ConvexWeights) -> float:
    """Mirror of upper_comb: largest weight on the smallest entry."""
    z = _check_vector(z, w)
    return float(np.dot(w.weights, np.sort(z, kind="stable")[::-1]) / w.total)


def spread(z, w: ConvexWeights) -> float:
    """upper_comb - lower_comb, an order-weighted surrogate for max(z) - min(z).

    Computed from sorted pairwise differences rather than as a difference of
    the two combinations, which keeps precision when the entries nearly agree.
    """
    z = _check_vector(z, w)
    zs = np.sort(z, kind="stable")
    return float(np.dot(w.weights, zs - zs[::-1]) / w.total)


def spread_batch(rows, w: ConvexWeights) -> np.ndarray:
    """spread applied to every row of a 2-D array."""
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim != 2 or rows.shape[1] != w.n:
        raise ValueError(f"expected rows of length {w.n}, got shape {rows.shape}")
    zs = np.sort(rows, axis=1, kind="stable")
    return (zs - zs[:, ::-1]) @ w.weights / w.total


def spread_along(values, order, w: ConvexWeights) -> float:
    """spread computed with an externally supplied ordering.

    On an interval where the ordering of an underlying quantity is frozen,
    the time derivative of its spread is this same weighted combination
    applied to the entrywise derivative, using the frozen permutation.
    """
    values = _check_vector(values, w)
    vs = values[np.asarray(order)]
    return float(np.dot(w.weights, vs - vs[::-1]) / w.total)


def spread_along_batch(rows, orders, w: ConvexWeights) -> np.ndarray:
    """Row-wise spread_along for matching 2-D value and permutation arrays."""
    rows = np.asarray(rows, dtype=np.float64)
    vs = np.take_along_axis(rows, np.asarray(orders), axis=1)
    return (vs - vs[:, ::-1]) @ w.weights / w.total
