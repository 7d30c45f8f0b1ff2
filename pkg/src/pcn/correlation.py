"""Popularity versus influence: the correlator kappa, joint and product
histograms of (log rho, log rho*), and procedures high in both rankings."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np

from .rank import RankVector


@dataclass(frozen=True)
class CorrelationReport:
    kappa: float
    n: int
    converged: bool


@dataclass(frozen=True)
class JointHistogram:
    """Node counts on a grid of ``log10 rho`` by ``log10 rho*`` cells.

    Cell keys are integer bin indices; bin ``k`` covers
    ``[k * bin_width, (k + 1) * bin_width)`` decades.  Product histograms
    share this type and hold real-valued cells.
    """

    bin_width: float
    cells: Mapping[tuple[int, int], float]
    marginal_x: Mapping[int, int]
    marginal_y: Mapping[int, int]
    n: int

    @property
    def x_bins(self) -> list[int]:
        return sorted(self.marginal_x)

    @property
    def y_bins(self) -> list[int]:
        return sorted(self.marginal_y)

    def dense(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(matrix, x_edges, y_edges)`` over the contiguous bin ranges.

        ``matrix[a, b]`` is the cell for the a-th x bin and b-th y bin.
        """
        xs, ys = self.x_bins, self.y_bins
        x0, y0 = xs[0], ys[0]
        mat = np.zeros((xs[-1] - x0 + 1, ys[-1] - y0 + 1))
        for (bx, by), c in self.cells.items():
            mat[bx - x0, by - y0] = c
        x_edges = np.arange(x0, xs[-1] + 2) * self.bin_width
        y_edges = np.arange(y0, ys[-1] + 2) * self.bin_width
        return mat, x_edges, y_edges


@dataclass(frozen=True)
class CriticalSet:
    threshold_fraction: float
    members: tuple[tuple[int, int, int], ...]  # (node_id, K, K*)


def _exact_sum_of_products(a: np.ndarray, b: np.ndarray) -> Fraction:
    """Exact rational value of ``sum(a * b)`` for float64 arrays."""
    ma, ea = np.frexp(a)
    mb, eb = np.frexp(b)
    ia = (ma * 2.0**53).astype(np.int64).tolist()
    ib = (mb * 2.0**53).astype(np.int64).tolist()
    exps = (ea.astype(np.int64) + eb.astype(np.int64) - 106).tolist()
    acc: dict[int, int] = defaultdict(int)
    for x, y, e in zip(ia, ib, exps):
        acc[e] += x * y
    total = Fraction(0)
    for e, s in acc.items():
        total += s * (Fraction(2) ** e)
    return total


def correlator(rho: RankVector | np.ndarray, rho_star: RankVector | np.ndarray) -> CorrelationReport:
    """``kappa = N * sum_i rho(i) rho*(i) - 1``.

    Evaluated in exact rational arithmetic as
    ``N * sum(rho * rho*) - sum(rho) * sum(rho*)``, which equals the textbook
    form for normalized vectors and makes the independence baseline (either
    vector uniform) come out as exactly zero.
    """
    converged = all(getattr(r, "converged", True) for r in (rho, rho_star))
    a = np.asarray(getattr(rho, "rho", rho), dtype=float)
    b = np.asarray(getattr(rho_star, "rho", rho_star), dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"rank vectors differ in size: {a.shape[0]} vs {b.shape[0]}")
    n = a.shape[0]
    ones = np.ones(n)
    kappa = n * _exact_sum_of_products(a, b) - _exact_sum_of_products(a, ones) * _exact_sum_of_products(b, ones)
    return CorrelationReport(float(kappa), n, converged)


def _bin_index(v: np.ndarray, width: float) -> np.ndarray:
    return np.floor(np.log10(v) / width).astype(np.int64)


def joint_histogram(
    rho: RankVector | np.ndarray, rho_star: RankVector | np.ndarray, bin_width_decades: float = 0.25
) -> JointHistogram:
    a = np.asarray(getattr(rho, "rho", rho), dtype=float)
    b = np.asarray(getattr(rho_star, "rho", rho_star), dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"rank vectors differ in size: {a.shape[0]} vs {b.shape[0]}")
    if not bin_width_decades > 0:
        raise ValueError("bin width must be positive")
    if (a <= 0).any() or (b <= 0).any():
        raise ValueError("rank vectors must be strictly positive")
    bx = _bin_index(a, bin_width_decades)
    by = _bin_index(b, bin_width_decades)
    cells: dict[tuple[int, int], int] = defaultdict(int)
    for x, y in zip(bx.tolist(), by.tolist()):
        cells[(x, y)] += 1
    mx: dict[int, int] = defaultdict(int)
    my: dict[int, int] = defaultdict(int)
    for (x, y), c in cells.items():
        mx[x] += c
        my[y] += c
    return JointHistogram(
        bin_width_decades,
        dict(sorted(cells.items())),
        dict(sorted(mx.items())),
        dict(sorted(my.items())),
        len(a),
    )


def product_histogram(h: JointHistogram) -> JointHistogram:
    """Histogram expected if rho and rho* were independent: each cell is
    ``marginal_x * marginal_y / N``.  Marginals are carried over unchanged."""
    cells = {(x, y): cx * cy / h.n for x, cx in h.marginal_x.items() for y, cy in h.marginal_y.items()}
    return JointHistogram(h.bin_width, cells, dict(h.marginal_x), dict(h.marginal_y), h.n)


def top_count(fraction: float, n: int) -> int:
    """``ceil(fraction * n)`` without float round-up (0.07 * 100 -> 7)."""
    return min(n, math.ceil(round(fraction * n, 9)))


def critical_set(rho: RankVector, rho_star: RankVector, threshold_fraction: float = 0.01) -> CriticalSet:
    """Nodes in the top ``ceil(f N)`` of both K and K*, by increasing K + K*."""
    if not 0 < threshold_fraction <= 1:
        raise ValueError(f"threshold_fraction must lie in (0, 1], got {threshold_fraction}")
    if rho.n != rho_star.n:
        raise ValueError(f"rank vectors differ in size: {rho.n} vs {rho_star.n}")
    m = top_count(threshold_fraction, rho.n)
    k, ks = rho.ranks, rho_star.ranks
    both = sorted(set(rho.top(m)) & set(rho_star.top(m)), key=lambda i: (k[i] + ks[i], i))
    return CriticalSet(threshold_fraction, tuple((i, int(k[i]), int(ks[i])) for i in both))
