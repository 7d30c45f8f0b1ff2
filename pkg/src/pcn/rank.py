"""Google matrix operators, PageRank and influence-PageRank.

The Google matrix ``G = alpha * S + (1 - alpha) / N`` is never formed.  ``S``
is stored as a sparse column-stochastic matrix for the non-dangling columns;
the uniform columns of dangling nodes and the teleportation term are applied
inside the matrix-vector product.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .graph import CallGraph, FitError, PowerLawFit, fit_loglog, log_bin_edges

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class StochasticOperator:
    n: int
    matrix: sp.csc_matrix  # column j holds the transition weights out of j
    dangling: np.ndarray  # sorted indices of columns with no links
    link_direction: str = "forward"
    weighting: str = "distinct"

    def column(self, j: int) -> list[tuple[int, float]]:
        lo, hi = self.matrix.indptr[j], self.matrix.indptr[j + 1]
        return [(int(i), float(w)) for i, w in zip(self.matrix.indices[lo:hi], self.matrix.data[lo:hi])]

    def apply_google(self, x: np.ndarray, alpha: float) -> np.ndarray:
        """``G @ x`` with the dangling and teleportation terms applied implicitly."""
        y = alpha * (self.matrix @ x)
        y += (alpha * x[self.dangling].sum() + (1.0 - alpha) * x.sum()) / self.n
        return y


@dataclass(frozen=True)
class GoogleParams:
    alpha: float = 0.85
    tol: float = 1e-12
    max_iter: int = 10_000

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")


@dataclass(frozen=True, eq=False)
class RankVector:
    rho: np.ndarray
    order: np.ndarray  # order[K - 1] is the node at rank K
    direction: str
    iterations_used: int
    residual: float
    converged: bool
    alpha: float

    @property
    def n(self) -> int:
        return len(self.rho)

    @property
    def ranks(self) -> np.ndarray:
        """Rank K (1-based) of every node."""
        k = np.empty(self.n, dtype=np.int64)
        k[self.order] = np.arange(1, self.n + 1)
        return k

    def top(self, count: int) -> list[int]:
        return [int(i) for i in self.order[:count]]


def rank_order(rho: np.ndarray) -> np.ndarray:
    """Node ids by decreasing value, ties by increasing id."""
    return np.lexsort((np.arange(len(rho)), -np.asarray(rho)))


def build_stochastic(g: CallGraph, link_direction: str = "forward", weighting: str = "distinct") -> StochasticOperator:
    """Column-normalized adjacency of ``g``.

    Forward links send a surfer from a caller to one of its callees; reversed
    links go from callee to caller.  ``weighting="multiplicity"`` makes a
    callee invoked twice twice as likely.
    """
    if link_direction not in ("forward", "reversed"):
        raise ValueError(f"link_direction must be 'forward' or 'reversed', got {link_direction!r}")
    if weighting not in ("distinct", "multiplicity"):
        raise ValueError(f"weighting must be 'distinct' or 'multiplicity', got {weighting!r}")
    src, dst, mult = g.edge_arrays
    rows, cols = (dst, src) if link_direction == "forward" else (src, dst)
    w = mult.astype(float) if weighting == "multiplicity" else np.ones(len(src))
    colsum = np.bincount(cols, weights=w, minlength=g.n)
    data = w / colsum[cols]
    m = sp.csc_matrix((data, (rows, cols)), shape=(g.n, g.n))
    m.sort_indices()
    dangling = np.flatnonzero(colsum == 0)
    dangling.setflags(write=False)
    return StochasticOperator(g.n, m, dangling, link_direction, weighting)


def pagerank(s: StochasticOperator, p: GoogleParams | None = None) -> RankVector:
    """Stationary vector of the Google matrix by power iteration.

    Starts from the uniform vector and stops once the L1 change per step
    drops below ``p.tol``.  Hitting ``p.max_iter`` first returns the current
    iterate with ``converged=False``.
    """
    p = p or GoogleParams()
    n, alpha = s.n, p.alpha
    floor = (1.0 - alpha) / n
    x = np.full(n, 1.0 / n)
    converged = False
    it = 0
    for it in range(1, p.max_iter + 1):
        y = alpha * (s.matrix @ x)
        y += alpha * x[s.dangling].sum() / n
        # rescale the link part to alpha so the sum stays 1 and x >= floor holds exactly
        x_new = y * (alpha / y.sum()) + floor
        delta = float(np.abs(x_new - x).sum())
        x = x_new
        if delta < p.tol:
            converged = True
            break
    residual = float(np.abs(s.apply_google(x, alpha) - x).sum())
    if not converged:
        log.warning("pagerank stopped after %d iterations, residual %.3g", it, residual)
    x.setflags(write=False)
    order = rank_order(x)
    order.setflags(write=False)
    direction = "popularity" if s.link_direction == "forward" else "influence"
    return RankVector(x, order, direction, it, residual, converged, alpha)


def influence_pagerank(g: CallGraph, p: GoogleParams | None = None, weighting: str = "distinct") -> RankVector:
    """PageRank of the Google matrix built on the link-reversed graph."""
    return pagerank(build_stochastic(g, "reversed", weighting), p)


def _floor_start(values: np.ndarray) -> int:
    """Number of leading entries before the trailing run equal to the minimum."""
    vmin = values[-1]
    k = len(values)
    while k > 0 and values[k - 1] <= vmin * (1 + 1e-9):
        k -= 1
    return k


def rank_decay_fit(
    r: RankVector | Sequence[float], fit_range: tuple[int, int] | None = None, bins_per_decade: int = 5
) -> PowerLawFit:
    """Exponent beta of ``rho(K) ~ K**-beta``.

    Ranks are log-binned and each bin holds the mean of ``rho`` over its
    ranks; bins are clipped to the fitted rank interval.  By default the first
    bin is dropped and so is the flat floor of nodes that share the minimum
    value (nodes nothing links to).
    """
    rho = np.asarray(r.rho if isinstance(r, RankVector) else r, dtype=float)
    if isinstance(r, RankVector):
        rho = rho[r.order]
    else:
        rho = -np.sort(-rho)
    n = len(rho)
    if fit_range is None:
        kmin, kmax = 1, max(_floor_start(rho), 1)
        skip_first = True
    else:
        kmin, kmax = int(fit_range[0]), min(int(fit_range[1]), n)
        skip_first = False
    edges = log_bin_edges(n, bins_per_decade)
    first, last, vals = [], [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        a = max(int(np.ceil(lo)), kmin)
        b = min(int(np.ceil(hi)) - 1, kmax)
        if a > b:
            continue
        first.append(a)
        last.append(b)
        vals.append(rho[a - 1 : b].mean())
    if skip_first:
        first, last, vals = first[1:], last[1:], vals[1:]
    if len(vals) < 3:
        raise FitError(f"insufficient tail: {len(vals)} usable rank bins, need 3")
    beta, stderr = fit_loglog(np.array(first), np.array(last), np.array(vals))
    if not beta > 0:
        raise FitError(f"no power-law decay: fitted exponent {beta:.3g}")
    return PowerLawFit(beta, stderr, (first[0], last[-1]), len(vals))
