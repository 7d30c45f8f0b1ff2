"""Call graph model, degree statistics and power-law fits on log-binned data."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy import stats

FIT_METHOD = "log-binned least squares"


@dataclass(frozen=True, eq=False)
class CallGraph:
    """Directed multigraph over dense node ids ``0..n-1``.

    ``edges`` maps ``(src, dst)`` to the number of calls from ``src`` to
    ``dst``.  Instances are treated as immutable.
    """

    n: int
    names: tuple[str, ...]
    edges: dict[tuple[int, int], int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        if len(self.names) != self.n:
            raise ValueError(f"expected {self.n} names, got {len(self.names)}")
        for (s, d), m in self.edges.items():
            if not (0 <= s < self.n and 0 <= d < self.n):
                raise ValueError(f"edge ({s}, {d}) outside [0, {self.n})")
            if m < 1:
                raise ValueError(f"edge ({s}, {d}) has multiplicity {m}")

    def __eq__(self, other):
        if not isinstance(other, CallGraph):
            return NotImplemented
        return self.n == other.n and self.names == other.names and self.edges == other.edges

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def total_calls(self) -> int:
        return sum(self.edges.values())

    @cached_property
    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(src, dst, multiplicity)`` sorted by ``(src, dst)``."""
        if not self.edges:
            empty = np.zeros(0, dtype=np.int64)
            return empty, empty.copy(), empty.copy()
        pairs = np.array(list(self.edges.keys()), dtype=np.int64)
        mult = np.fromiter(self.edges.values(), dtype=np.int64, count=len(self.edges))
        order = np.lexsort((pairs[:, 1], pairs[:, 0]))
        arrays = pairs[order, 0], pairs[order, 1], mult[order]
        for a in arrays:
            a.setflags(write=False)
        return arrays

    def reversed(self) -> "CallGraph":
        return CallGraph(self.n, self.names, {(d, s): m for (s, d), m in self.edges.items()})

    def without_self_loops(self) -> "CallGraph":
        return CallGraph(self.n, self.names, {(s, d): m for (s, d), m in self.edges.items() if s != d})

    def index(self, name: str) -> int:
        return self.names.index(name)


def degree_sequence(g: CallGraph, direction: str = "in", counting: str = "multiplicity") -> np.ndarray:
    """In- or out-degree of every node, counting call multiplicity or only
    distinct neighbours."""
    if direction not in ("in", "out"):
        raise ValueError(f"direction must be 'in' or 'out', got {direction!r}")
    if counting not in ("multiplicity", "distinct"):
        raise ValueError(f"counting must be 'multiplicity' or 'distinct', got {counting!r}")
    src, dst, mult = g.edge_arrays
    ends = dst if direction == "in" else src
    weights = mult if counting == "multiplicity" else None
    return np.bincount(ends, weights=weights, minlength=g.n).astype(np.int64)


@dataclass(frozen=True)
class HistogramBin:
    lo: float  # [lo, hi) in degree units
    hi: float
    first: int  # smallest and largest integer degree the bin covers
    last: int
    density: float
    count: int

    @property
    def width(self) -> int:
        return self.last - self.first + 1


@dataclass(frozen=True)
class DegreeHistogram:
    bins: tuple[HistogramBin, ...]
    zero_count: int
    n: int
    bins_per_decade: int
    direction: str = "in"
    counting: str = "multiplicity"

    @property
    def zero_mass(self) -> float:
        return self.zero_count / self.n if self.n else 0.0

    @property
    def total_count(self) -> int:
        return self.zero_count + sum(b.count for b in self.bins)

    @property
    def total_mass(self) -> float:
        return self.zero_mass + sum(b.density * b.width for b in self.bins)


@dataclass(frozen=True)
class PowerLawFit:
    gamma: float
    stderr: float
    fit_range: tuple[int, int]
    n_bins: int
    method: str = FIT_METHOD


class FitError(ValueError):
    pass


def log_bin_edges(top: float, bins_per_decade: int) -> np.ndarray:
    """Edges ``10**(k / bins_per_decade)`` from 1 until ``top`` is covered."""
    kmax = int(np.floor(np.log10(max(top, 1.0)) * bins_per_decade)) + 2
    return 10.0 ** (np.arange(kmax + 1) / bins_per_decade)


def log_binned_histogram(
    degrees: Sequence[int] | np.ndarray,
    bins_per_decade: int = 5,
    counts: Sequence[int] | np.ndarray | None = None,
    direction: str = "in",
    counting: str = "multiplicity",
) -> DegreeHistogram:
    """Histogram of a degree sequence on geometric bins.

    With ``counts`` given, ``degrees`` are distinct degree values and
    ``counts`` the number of nodes having each.  Bin density is the node
    fraction divided by the number of integer degrees the bin spans; the last
    bin is clipped at the largest observed degree.  Degree zero is kept apart
    as ``zero_count``.
    """
    if bins_per_decade < 1:
        raise ValueError("bins_per_decade must be >= 1")
    degrees = np.asarray(degrees, dtype=np.int64)
    if counts is None:
        values, weights = np.unique(degrees, return_counts=True)
    else:
        weights = np.asarray(counts, dtype=np.int64)
        if weights.shape != degrees.shape:
            raise ValueError("degrees and counts differ in length")
        keep = weights > 0
        values, weights = degrees[keep], weights[keep]
    if values.size and values.min() < 0:
        raise ValueError("degrees must be nonnegative")
    n = int(weights.sum())
    zero = int(weights[values == 0].sum())
    pos = values > 0
    values, weights = values[pos], weights[pos]
    if values.size == 0:
        return DegreeHistogram((), zero, n, bins_per_decade, direction, counting)

    top = int(values.max())
    edges = log_bin_edges(top, bins_per_decade)
    idx = np.searchsorted(edges, values, side="right") - 1
    per_bin = np.bincount(idx, weights=weights, minlength=len(edges) - 1)
    bins = []
    for k in np.flatnonzero(per_bin):
        lo, hi = float(edges[k]), float(edges[k + 1])
        first = int(np.ceil(lo))
        last = min(int(np.ceil(hi)) - 1, top)
        c = int(per_bin[k])
        bins.append(HistogramBin(lo, hi, first, last, c / n / (last - first + 1), c))
    return DegreeHistogram(tuple(bins), zero, n, bins_per_decade, direction, counting)


def _effective_log_center(first: int, last: int, gamma: float) -> float:
    """log10 of the point where x**-gamma equals the mean of d**-gamma over
    the integers first..last."""
    d = np.arange(first, last + 1, dtype=float)
    if abs(gamma) < 1e-9:
        return float(np.mean(np.log10(d)))
    return float(np.log10(np.mean(d ** (-gamma))) / -gamma)


def fit_loglog(first: np.ndarray, last: np.ndarray, values: np.ndarray, max_iter: int = 100) -> tuple[float, float]:
    """Least-squares exponent of ``values ~ x**-gamma`` over integer bins.

    Bin abscissae start at the geometric midpoint and are then moved to the
    point matching the bin average under the current exponent, repeated to a
    fixed point.  This removes the bias that coarse bins at small degree
    otherwise put on the slope.  Returns ``(gamma, stderr)``.
    """
    y = np.log10(values)
    x = 0.5 * (np.log10(first) + np.log10(last))
    gamma = None
    for _ in range(max_iter):
        res = stats.linregress(x, y)
        g = -float(res.slope)
        if gamma is not None and abs(g - gamma) < 1e-12:
            gamma = g
            break
        gamma = g
        if gamma <= 0:
            break
        x = np.array([_effective_log_center(a, b, gamma) for a, b in zip(first, last)])
    return gamma, float(res.stderr)


def fit_power_law(h: DegreeHistogram, fit_range: tuple[float, float] | None = None, min_count: int = 5) -> PowerLawFit:
    """Fit ``P(k) ~ k**-gamma`` to the populated bins of a histogram.

    By default the first populated bin is dropped, as is the run of trailing
    bins holding fewer than ``min_count`` nodes.  An explicit ``fit_range``
    keeps the bins lying entirely within ``[lo, hi]``.
    """
    bins = list(h.bins)
    if fit_range is None:
        bins = bins[1:]
        while bins and bins[-1].count < min_count:
            bins.pop()
    else:
        lo, hi = fit_range
        bins = [b for b in bins if b.first >= lo and b.last <= hi]
    if len(bins) < 3:
        raise FitError(f"insufficient tail: {len(bins)} usable bins, need 3")
    first = np.array([b.first for b in bins])
    last = np.array([b.last for b in bins])
    dens = np.array([b.density for b in bins])
    gamma, stderr = fit_loglog(first, last, dens)
    if not gamma > 0:
        raise FitError(f"no power-law decay: fitted exponent {gamma:.3g}")
    return PowerLawFit(gamma, stderr, (int(first[0]), int(last[-1])), len(bins))
