"""Complex eigenvalue spectrum of the Google matrix."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg.lapack as lapack
import scipy.sparse.linalg as spla

from .rank import StochasticOperator

log = logging.getLogger(__name__)

DENSE_LIMIT = 4000
DEFAULT_RADII = (0.1,)


class DenseLimitError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    eigenvalues: np.ndarray  # complex, sorted by decreasing modulus
    n: int
    alpha: float
    method: str
    threshold_stats: dict[float, float] = field(default_factory=dict)
    partial: bool = False
    unconverged: int = 0  # dense: eigenvalues LAPACK failed to converge

    @property
    def complete(self) -> bool:
        return self.method == "dense" and not self.partial


def densify_google(s: StochasticOperator, alpha: float = 0.85, dense_limit: int = DENSE_LIMIT) -> np.ndarray:
    """Explicit ``G = alpha * S + (1 - alpha) / N`` with dangling columns set
    to ``1 / N``."""
    if s.n > dense_limit:
        raise DenseLimitError(
            f"N = {s.n} exceeds the dense limit {dense_limit}; raise the limit, "
            "use the arnoldi method, or analyze a subgraph"
        )
    n = s.n
    g = alpha * s.matrix.toarray() + (1.0 - alpha) / n
    g[:, s.dangling] = 1.0 / n
    return g


def _sorted_by_modulus(ev: np.ndarray) -> np.ndarray:
    # stable order: modulus down, then real part down, then imaginary part down
    return ev[np.lexsort((-ev.imag, -ev.real, -np.round(np.abs(ev), 12)))]


def eigenvalues_dense(
    g: np.ndarray, alpha: float = 0.85, radii=DEFAULT_RADII, dense_limit: int = DENSE_LIMIT
) -> SpectrumResult:
    """All eigenvalues of a real square matrix.

    LAPACK ``dgeev`` without eigenvectors: Hessenberg reduction then shifted
    QR.  If the QR sweeps fail for some eigenvalues the converged ones are
    returned and the result is marked partial.
    """
    g = np.asarray(g, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {g.shape}")
    n = g.shape[0]
    if n > dense_limit:
        raise DenseLimitError(f"N = {n} exceeds the dense limit {dense_limit}")
    wr, wi, _, _, info = lapack.dgeev(g, compute_vl=0, compute_vr=0)
    if info < 0:
        raise ValueError(f"dgeev: illegal argument {-info}")
    ev = wr + 1j * wi
    unconverged = 0
    if info > 0:
        # eigenvalues info..n-1 converged
        unconverged = int(info)
        ev = ev[info:]
        log.warning("QR failed to converge for %d of %d eigenvalues", unconverged, n)
    ev = _sorted_by_modulus(ev)
    result = SpectrumResult(ev, n, alpha, "dense", {}, partial=unconverged > 0, unconverged=unconverged)
    return _with_stats(result, radii)


def eigenvalues_arnoldi(
    s: StochasticOperator, alpha: float = 0.85, k: int = 200, radii=DEFAULT_RADII, tol: float = 0.0
) -> SpectrumResult:
    """The ``k`` largest-modulus eigenvalues by implicitly restarted Arnoldi.

    The matrix-vector product applies dangling columns and teleportation
    implicitly, so memory stays O(nnz).  Threshold fractions computed from a
    partial spectrum are lower bounds.
    """
    n = s.n
    if n <= k + 1:
        raise ValueError(f"arnoldi needs k < N - 1 (k = {k}, N = {n}); use the dense method")
    op = spla.LinearOperator((n, n), matvec=lambda x: s.apply_google(np.real(x), alpha), dtype=float)
    v0 = np.full(n, 1.0 / n)
    ev = spla.eigs(op, k=k, which="LM", return_eigenvectors=False, v0=v0, tol=tol)
    result = SpectrumResult(_sorted_by_modulus(np.asarray(ev)), n, alpha, "arnoldi", {}, partial=True)
    return _with_stats(result, radii)


def spectral_fraction(spec: SpectrumResult, radius: float) -> float:
    """Fraction of the N modes with ``|lambda| > radius``, the unit mode included."""
    if not 0 < radius < 1:
        raise ValueError(f"radius must lie in (0, 1), got {radius}")
    return int(np.count_nonzero(np.abs(spec.eigenvalues) > radius)) / spec.n


def _with_stats(result: SpectrumResult, radii) -> SpectrumResult:
    for r in radii:
        result.threshold_stats[float(r)] = spectral_fraction(result, r)
    return result


def google_spectrum(
    s: StochasticOperator,
    alpha: float = 0.85,
    method: str = "dense",
    dense_limit: int = DENSE_LIMIT,
    arnoldi_k: int = 200,
    radii=DEFAULT_RADII,
) -> SpectrumResult:
    if method == "dense":
        return eigenvalues_dense(densify_google(s, alpha, dense_limit), alpha, radii, dense_limit)
    if method == "arnoldi":
        return eigenvalues_arnoldi(s, alpha, arnoldi_k, radii)
    raise ValueError(f"method must be 'dense' or 'arnoldi', got {method!r}")
