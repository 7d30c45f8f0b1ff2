"""Eigenvalues of the Google matrix.

A directed cycle has an exactly known spectrum: 1 plus alpha times every
other root of unity.  A random sparse graph instead piles most
eigenvalues near the origin, which is what the fraction of modes outside
a small radius measures.
"""

import numpy as np

from pcn import CallGraph, build_stochastic, google_spectrum, spectral_fraction

alpha = 0.85
n = 16
cycle = CallGraph(n, tuple(f"c{i}" for i in range(n)), {(i, (i + 1) % n): 1 for i in range(n)})
spec = google_spectrum(build_stochastic(cycle), alpha)
moduli = sorted({float(m) for m in np.round(np.abs(spec.eigenvalues), 12)})
print(f"cycle N={n}: distinct moduli {moduli}")

rng = np.random.default_rng(3)
for n in (200, 800):
    m = 2 * n
    edges = {}
    for s, d in zip(rng.integers(0, n, m).tolist(), rng.integers(0, n, m).tolist()):
        edges[(s, d)] = edges.get((s, d), 0) + 1
    g = CallGraph(n, tuple(f"p{i}" for i in range(n)), edges)
    spec = google_spectrum(build_stochastic(g), alpha, radii=(0.1, 0.5))
    print(f"random N={n}: |lambda_2|={abs(spec.eigenvalues[1]):.3f}  "
          f"fraction beyond 0.1={spectral_fraction(spec, 0.1):.3f}  beyond 0.5={spectral_fraction(spec, 0.5):.3f}")
