"""End-to-end analysis of a call graph: the JSON summary and CSV sidecars."""

from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .correlation import correlator, critical_set, joint_histogram, product_histogram
from .graph import CallGraph, FitError, degree_sequence, fit_power_law, log_binned_histogram
from .io import write_csv
from .rank import GoogleParams, build_stochastic, pagerank, rank_decay_fit
from .spectrum import google_spectrum

SCHEMA = 1
STAGES = ("degrees", "rank", "correlation", "spectrum")
DEFAULT_STAGES = ("degrees", "rank", "correlation")


class StageError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage} failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class AnalysisConfig:
    alpha: float = 0.85
    tol: float = 1e-12
    max_iter: int = 10_000
    weighted: bool = False
    drop_self_loops: bool = False
    direction: str = "forward"  # link direction of the matrix whose spectrum is taken
    stages: tuple[str, ...] = DEFAULT_STAGES
    bins_per_decade: int = 5
    bin_width: float = 0.25
    critical_fraction: float = 0.01
    top: int = 20
    dense_limit: int = 4000
    radii: tuple[float, ...] = (0.1,)
    method: str = "dense"
    arnoldi_k: int = 200

    def __post_init__(self):
        unknown = set(self.stages) - set(STAGES)
        if unknown:
            raise ValueError(f"unknown stages: {', '.join(sorted(unknown))}")
        object.__setattr__(self, "stages", tuple(s for s in STAGES if s in self.stages))
        if self.direction not in ("forward", "reversed"):
            raise ValueError(f"direction must be 'forward' or 'reversed', got {self.direction!r}")
        GoogleParams(self.alpha, self.tol, self.max_iter)

    @property
    def weighting(self) -> str:
        return "multiplicity" if self.weighted else "distinct"


@dataclass
class Analysis:
    report: dict
    tables: dict[str, tuple[list[str], list, list[str]]] = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        rank = self.report.get("rank")
        if not rank:
            return True
        return all(rank[d]["converged"] for d in ("popularity", "influence"))


def _fit_dict(fit_call) -> dict:
    try:
        f = fit_call()
    except FitError as exc:
        return {"error": str(exc)}
    return {"exponent": f.gamma, "stderr": f.stderr, "fit_range": list(f.fit_range), "bins": f.n_bins, "method": f.method}


def _degrees_stage(g: CallGraph, cfg: AnalysisConfig, out: Analysis) -> dict:
    result = {}
    for direction in ("in", "out"):
        for counting in ("multiplicity", "distinct"):
            deg = degree_sequence(g, direction, counting)
            h = log_binned_histogram(deg, cfg.bins_per_decade, direction=direction, counting=counting)
            key = f"{direction}_{counting}"
            result[f"gamma_{key}"] = _fit_dict(lambda: fit_power_law(h))
            result[f"zero_degree_{key}"] = h.zero_count
            out.tables[f"degrees_{key}"] = (
                ["bin_lo", "bin_hi", "density", "count"],
                [(b.lo, b.hi, b.density, b.count) for b in h.bins],
                [f"{direction}-degree histogram, {counting} counting, N={g.n}", f"zero_degree_count={h.zero_count}"],
            )
    return result


def _rank_table(g: CallGraph, r, deg_in, deg_out):
    return [(k + 1, int(i), g.names[i], float(r.rho[i]), int(deg_in[i]), int(deg_out[i])) for k, i in enumerate(r.order)]


def analyze(g: CallGraph, config: AnalysisConfig | None = None, corpus: str = "") -> Analysis:
    """Run the selected stages on ``g`` and collect the report and tables.

    Errors inside a stage are re-raised as :class:`StageError`.
    """
    cfg = config or AnalysisConfig()
    if cfg.drop_self_loops:
        g = g.without_self_loops()
    out = Analysis({})
    total = g.total_calls
    rep = out.report
    rep.update(
        {
            "schema": SCHEMA,
            "tool": "pcn",
            "version": __version__,
            "generated_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "corpus": corpus,
            "config": {k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(cfg).items()},
            "n": g.n,
            "edges": g.n_edges,
            "total_calls": total,
            "mean_calls_per_procedure": total / g.n if g.n else 0.0,
            "self_loops": sum(1 for s, d in g.edges if s == d),
        }
    )

    stage = "degrees"
    try:
        if "degrees" in cfg.stages:
            rep["degrees"] = _degrees_stage(g, cfg, out)

        ranks = None
        if "rank" in cfg.stages or "correlation" in cfg.stages:
            stage = "rank"
            params = GoogleParams(cfg.alpha, cfg.tol, cfg.max_iter)
            rho = pagerank(build_stochastic(g, "forward", cfg.weighting), params)
            rho_star = pagerank(build_stochastic(g, "reversed", cfg.weighting), params)
            ranks = rho, rho_star
            deg_in = degree_sequence(g, "in")
            deg_out = degree_sequence(g, "out")
            rank_rep = {}
            for r in ranks:
                rank_rep[r.direction] = {
                    "iterations": r.iterations_used,
                    "residual": r.residual,
                    "converged": r.converged,
                    "decay_exponent": _fit_dict(lambda: rank_decay_fit(r)),
                    "top": [{"K": k + 1, "name": g.names[i], "rho": float(r.rho[i])} for k, i in enumerate(r.top(cfg.top))],
                }
                out.tables[f"rank_{r.direction}"] = (
                    ["K", "node_id", "name", "rho", "in_degree", "out_degree"],
                    _rank_table(g, r, deg_in, deg_out),
                    [f"{r.direction} ranking, alpha={cfg.alpha!r}, weighting={cfg.weighting}"],
                )
            rep["rank"] = rank_rep

        if "correlation" in cfg.stages:
            stage = "correlation"
            rho, rho_star = ranks
            corr = correlator(rho, rho_star)
            joint = joint_histogram(rho, rho_star, cfg.bin_width)
            prod = product_histogram(joint)
            crit = critical_set(rho, rho_star, cfg.critical_fraction)
            rep["correlation"] = {
                "kappa": corr.kappa,
                "n": corr.n,
                "converged": corr.converged,
                "critical_fraction": cfg.critical_fraction,
                "critical_count": len(crit.members),
                "critical": [
                    {"name": g.names[i], "node_id": i, "K": k, "K_star": ks} for i, k, ks in crit.members[: cfg.top]
                ],
            }
            for name, h in (("joint_histogram", joint), ("product_histogram", prod)):
                mat, xe, ye = h.dense()
                out.tables[name] = (
                    [f"y{j}" for j in range(mat.shape[1])],
                    [list(row) for row in mat],
                    [
                        f"{name}: rows are log10(rho) bins, columns log10(rho*) bins, N={h.n}",
                        "x_edges=" + " ".join(f"{v:.17g}" for v in xe),
                        "y_edges=" + " ".join(f"{v:.17g}" for v in ye),
                    ],
                )

        if "spectrum" in cfg.stages:
            stage = "spectrum"
            s = build_stochastic(g, cfg.direction, cfg.weighting)
            spec = google_spectrum(s, cfg.alpha, cfg.method, cfg.dense_limit, cfg.arnoldi_k, cfg.radii)
            rep["spectrum"] = {
                "method": spec.method,
                "n": spec.n,
                "computed": int(len(spec.eigenvalues)),
                "partial": spec.partial,
                "direction": cfg.direction,
                "second_modulus": float(np.abs(spec.eigenvalues[1])) if len(spec.eigenvalues) > 1 else 0.0,
                "threshold_stats": {f"{r:g}": v for r, v in spec.threshold_stats.items()},
            }
            out.tables["eigenvalues"] = (
                ["re", "im"],
                [(float(z.real), float(z.imag)) for z in spec.eigenvalues],
                [f"Google matrix eigenvalues, method={spec.method}, alpha={cfg.alpha!r}, N={spec.n}"],
            )
    except StageError:
        raise
    except (ValueError, ArithmeticError, MemoryError, RuntimeError) as exc:
        raise StageError(stage, exc) from exc
    return out


def _finite(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_finite(v) for v in obj]
    return obj


def dumps_report(report: dict) -> str:
    return json.dumps(_finite(report), indent=2) + "\n"


def write_analysis(analysis: Analysis, out_dir: str | os.PathLike) -> list[Path]:
    """Write ``report.json`` and one CSV per table; return the paths written."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, (columns, rows, comments) in sorted(analysis.tables.items()):
        path = out_dir / f"{name}.csv"
        write_csv(path, columns, rows, comments)
        written.append(path)
    path = out_dir / "report.json"
    path.write_text(dumps_report(analysis.report), encoding="utf-8")
    written.append(path)
    return written
