"""Task dispatch for experiment configs and CSV/JSON report emission."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List

import numpy as np

from . import __version__
from .config import SCHEMA_VERSION, ExperimentConfig
from .families import lambda_grid, parse_family
from .geometry import format_domain, parse_domain
from .inequalities import (
    bly_kroger_check,
    critical_exponent_scan,
    excess_factor_estimate,
    polya_check,
    two_term_margin,
)
from .optimizer import convergence_scan, optimize_single, optimize_union
from .semiclassics import remainder_profile, weyl_main
from .spectrum import eigenvalues_below, get_budget, riesz_means, set_budget

ESTIMATE_NOTE = "grid estimate, one-sided; not a value of the true extremal constant"
RESTRICTED_NOTE = "restricted to family"


@dataclass
class ScanReport:
    task: str
    columns: List[str]
    rows: List[tuple]
    summary: Dict[str, Any]
    config: ExperimentConfig
    provenance: Dict[str, Any] = field(default_factory=dict)

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([_cell(v) for v in row])
        return buf.getvalue()

    def json_text(self) -> str:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "task": self.task,
            "config": self.config.to_dict(),
            "summary": _jsonable(self.summary),
            "provenance": self.provenance,
        }
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"

    def write(self, prefix):
        with open(f"{prefix}.csv", "w", encoding="utf-8", newline="") as fh:
            fh.write(self.csv_text())
        with open(f"{prefix}.json", "w", encoding="utf-8") as fh:
            fh.write(self.json_text())


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return _fmt(v)
    if isinstance(v, tuple):
        return ";".join(_fmt(x) for x in v)
    return str(v)


def _jsonable(v):
    """Plain JSON types; floats round-trip through repr (17 significant digits at most)."""
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        f = float(v)
        return f if math.isfinite(f) else None
    return v


def resolve_lambdas(spec) -> np.ndarray:
    if isinstance(spec, list):
        return np.array(spec, dtype=float)
    return lambda_grid(spec["min"], spec["max"], spec["points"], spec.get("spacing", "log"))


def resolve_gammas(spec) -> np.ndarray:
    if isinstance(spec, list):
        return np.array(spec, dtype=float)
    if spec.get("spacing", "linear") == "linear":
        return np.linspace(spec["min"], spec["max"], spec["points"])
    return lambda_grid(spec["min"], spec["max"], spec["points"], "log")


# ---------------------------------------------------------------------------
# tasks: each returns (columns, rows, summary)


def _spectrum(cfg, threads):
    D = parse_domain(cfg["domain"])
    cutoff = float(resolve_lambdas(cfg["lambda"]).max())
    sl = eigenvalues_below(D, cfg["bc"], cutoff)
    rows = [(i, float(mu), int(m)) for i, (mu, m) in enumerate(zip(sl.eigenvalues, sl.multiplicity))]
    return ["index", "eigenvalue", "multiplicity_tag"], rows, {"cutoff": cutoff, "count": len(rows)}


def _riesz(cfg, threads):
    D = parse_domain(cfg["domain"])
    lams = resolve_lambdas(cfg["lambda"])
    gamma = cfg["gamma"]
    values = riesz_means(D, cfg["bc"], gamma, lams)
    rows = []
    for lam, v in zip(lams, values):
        main = weyl_main(D, gamma, lam)
        rows.append((float(lam), float(v), main, v / main if main > 0 else None))
    summary = {"values": [r[1] for r in rows]}
    if len(rows) == 1:
        summary["value"] = rows[0][1]
    return ["lambda", "value", "main", "ratio"], rows, summary


def _weyl(cfg, threads):
    D = parse_domain(cfg["domain"])
    prof = remainder_profile(D, cfg["bc"], cfg["gamma"], resolve_lambdas(cfg["lambda"]), cfg.get("alpha"))
    rows = [
        (r.lam, r.value, r.main, r.boundary, r.remainder, r.normalized, r.rate_factor) for r in prof.records
    ]
    summary = {
        "empirical_constant": prof.empirical_constant,
        "bounded": prof.bounded,
        "alpha": prof.records[0].alpha,
    }
    return list(prof.columns), rows, summary


def _margins(report):
    rows = [tuple(float(x) for x in r) for r in report.rows]
    return ["lambda", "value", "weyl", "margin"], rows, {"min_margin": report.min_margin, "pass": report.passed}


def _polya(cfg, threads):
    return _margins(polya_check(parse_domain(cfg["domain"]), cfg["bc"], resolve_lambdas(cfg["lambda"])))


def _bly(cfg, threads):
    D = parse_domain(cfg["domain"])
    return _margins(bly_kroger_check(D, cfg["bc"], cfg["gamma"], resolve_lambdas(cfg["lambda"])))


_GRID_COLUMNS = ["member", "params", "domain", "lambda", "value", "main", "ratio"]


def _excess(cfg, threads):
    fam = parse_family(cfg["family"])
    est = excess_factor_estimate(fam, cfg["bc"], cfg["gamma"], resolve_lambdas(cfg["lambda"]), cfg["grid"], threads)
    rows = [(p.member, p.params, p.domain, p.lam, p.value, p.main, p.ratio) for p in est.rows]
    summary = {
        "value": est.value,
        "arg": {"params": list(est.arg_params), "lambda": est.arg_lambda, "domain": est.arg_domain},
        "grids": est.grids,
        "label": ESTIMATE_NOTE,
    }
    return _GRID_COLUMNS, rows, summary


def _critical(cfg, threads):
    fam = parse_family(cfg["family"])
    est = critical_exponent_scan(
        fam, cfg["bc"], resolve_gammas(cfg["gamma_grid"]), resolve_lambdas(cfg["lambda"]), cfg["grid"], threads
    )
    ok = set(est.certificate)
    rows = [(g, r, g not in ok) for g, r in est.extremal_ratios]
    summary = {
        "lower": est.lower,
        "upper": est.upper,
        "certificate": est.certificate,
        "witnesses": [vars(w) for w in est.witnesses],
        "label": ESTIMATE_NOTE,
    }
    return ["gamma", "extremal_ratio", "violated"], rows, summary


def _margin(cfg, threads):
    fam = parse_family(cfg["family"])
    est = two_term_margin(fam, cfg["bc"], cfg["gamma"], resolve_lambdas(cfg["lambda"]), cfg["grid"], threads)
    summary = {
        "c_hat": est.c_hat,
        "arg": {"params": list(est.arg_params), "lambda": est.arg_lambda},
        "consistent": est.consistent,
        "grids": est.grids,
        "label": ESTIMATE_NOTE,
    }
    return ["params", "lambda", "value", "main", "surplus"], list(est.rows), summary


def _optimize(cfg, threads):
    fam = parse_family(cfg["family"])
    rows, best = [], []
    for lam in resolve_lambdas(cfg["lambda"]):
        res = optimize_single(fam, cfg["bc"], cfg["gamma"], lam, cfg["tol"], cfg["grid"], threads)
        dom = format_domain(res.best_domain)
        rows.append((float(lam), res.member, res.best_parameter, dom, res.value,
                     res.iterations, res.tolerance_achieved, res.degenerate))
        best.append({"lambda": float(lam), "parameter": list(res.best_parameter), "domain": dom,
                     "value": res.value, "degenerate": res.degenerate})
    cols = ["lambda", "member", "parameter", "domain", "value", "iterations", "tolerance_achieved", "degenerate"]
    return cols, rows, {"results": best, "label": RESTRICTED_NOTE}


def _candidates(cfg):
    return [(parse_domain(c), ls) for c in cfg["candidates"] for ls in cfg["base_lambda"]]


def _multicomp(cfg, threads):
    cands = _candidates(cfg)
    rows, best = [], []
    for lam in resolve_lambdas(cfg["lambda"]):
        res = optimize_union(cands, cfg["bc"], cfg["gamma"], lam, threads)
        for t in res.table:
            rows.append((float(lam), t["branch"], t["base"], t["base_lambda"], t["M"], t["eta"],
                         t["components"], t["value"]))
        d = res.best_domain.dim
        best.append({
            "lambda": float(lam),
            "branch": res.member,
            "base_lambda": res.best_parameter[0] if res.best_parameter else float(lam),
            "domain": format_domain(res.trial.base_domain if res.trial else res.best_domain),
            "component_count": res.component_count,
            "count_over_lambda_d2": res.component_count / float(lam) ** (d / 2.0),
            "value": res.value,
            "normalized": res.value / weyl_main(parse_domain(cfg["candidates"][0]), cfg["gamma"], lam),
        })
    cols = ["lambda", "branch", "base", "base_lambda", "M", "eta", "components", "value"]
    return cols, rows, {"results": best, "label": RESTRICTED_NOTE}


def _scan(cfg, threads):
    fam = parse_family(cfg["family"])
    cands = _candidates(cfg) if "candidates" in cfg and "base_lambda" in cfg else None
    recs = convergence_scan(fam, cfg["bc"], cfg["gamma"], resolve_lambdas(cfg["lambda"]), cfg["tol"],
                            cfg["grid"], cands, threads)
    rows = [
        (r.lam, r.best_parameter, r.best_domain, r.value, r.hausdorff_to_ball, r.hausdorff_to_reference,
         r.value_gap_vs_ball, r.inradius_sqrt_lambda, r.component_count)
        for r in recs
    ]
    cols = ["lambda", "parameter", "domain", "value", "hausdorff_to_ball", "hausdorff_to_reference",
            "value_gap_vs_ball", "inradius_sqrt_lambda", "component_count"]
    summary = {"final_hausdorff_to_ball": recs[-1].hausdorff_to_ball, "label": RESTRICTED_NOTE}
    return cols, rows, summary


TASK_RUNNERS = {
    "spectrum": _spectrum,
    "riesz": _riesz,
    "weyl": _weyl,
    "polya": _polya,
    "bly": _bly,
    "excess": _excess,
    "critical": _critical,
    "margin": _margin,
    "optimize": _optimize,
    "multicomp": _multicomp,
    "scan": _scan,
}


def run(config, write=True) -> ScanReport:
    """Execute a config; writes ``<out>.csv`` and ``<out>.json`` when ``out`` is set."""
    if not isinstance(config, ExperimentConfig):
        config = ExperimentConfig.from_dict(config)
    cfg = config.data
    old = get_budget()
    if "budget" in cfg:
        set_budget(cfg["budget"])
    try:
        columns, rows, summary = TASK_RUNNERS[cfg["task"]](cfg, cfg.get("threads"))
    finally:
        if "budget" in cfg:
            set_budget(old)
    provenance = {"config_hash": config.digest(), "tool_version": __version__}
    report = ScanReport(cfg["task"], columns, rows, summary, config, provenance)
    if write and cfg.get("out"):
        report.write(cfg["out"])
    return report
