"""Experiment runner: convergence and saturation ladders with predictions.

A study is described by a JSON config, runs a grid-size ladder of error
measurements through the Fourier-side machinery, fits the empirical rate,
computes the predicted rate and constant from the closed-form module, and
persists CSV / JSON / SVG outputs under a content-addressed directory.
Rerunning a config reproduces the result files byte for byte (timing lives
in a sidecar).
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from typing import Optional

import numpy as np

from . import constants as consts
from . import evolve, multiplier, spectral
from .bases import BasisFunction, make_basis
from .symbols import Symbol, make_symbol

__all__ = [
    "ExperimentConfig",
    "StudyResult",
    "estimate_rate",
    "plateau_estimate",
    "run_study",
    "emit_outputs",
]

STUDY_KINDS = (
    "interp_convergence",
    "interp_saturation",
    "scheme_convergence",
    "scheme_saturation",
    "constants_table",
    "cross_validation",
)


# ---------------------------------------------------------------------------
# Config
# ---------------------------------------------------------------------------

@dataclass
class ExperimentConfig:
    study: str
    basis: dict
    data: Optional[dict] = None
    symbol: Optional[dict] = None
    ladder: dict = field(default_factory=lambda: {"start_exp": 2, "count": 8})
    t: float = 1.0
    tol: float = 1e-12
    seed: int = 0
    cross: dict = field(default_factory=dict)

    @staticmethod
    def from_json(text: str) -> "ExperimentConfig":
        spec = json.loads(text)
        cfg = ExperimentConfig(**spec)
        cfg.validate()
        return cfg

    def validate(self):
        if self.study not in STUDY_KINDS:
            raise ValueError(f"unknown study kind {self.study!r}")
        if self.study not in ("constants_table", "cross_validation"):
            if int(self.ladder.get("count", 0)) < 4:
                raise ValueError("ladder needs at least 4 points")
        if self.tol <= 0:
            raise ValueError("tolerance must be positive")
        self.make_basis()  # resolvable?
        if self.symbol is not None:
            self.make_symbol()
        if self.data is not None:
            self.make_data()
        if self.study.startswith("scheme") and self.symbol is None:
            raise ValueError("scheme studies need a symbol spec")

    def make_basis(self) -> BasisFunction:
        spec = dict(self.basis)
        return make_basis(spec.pop("family"), spec.pop("n"), **spec)

    def make_symbol(self) -> Symbol:
        return make_symbol(self.symbol["kind"], n=self.basis.get("n", 1),
                           **self.symbol.get("params", {}))

    def make_data(self) -> spectral.SpectralDensity:
        d = self.data or {"kind": "gaussian", "params": {}}
        return spectral.make_density(d["kind"], n=self.basis.get("n", 1),
                                     **d.get("params", {}))

    def h_values(self) -> np.ndarray:
        start = float(self.ladder.get("start_exp", 2))
        count = int(self.ladder.get("count", 8))
        return 2.0 ** -(start + np.arange(count))

    def canonical_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()[:12]


# ---------------------------------------------------------------------------
# Rate and plateau estimation
# ---------------------------------------------------------------------------

def estimate_rate(h, errors) -> dict:
    """Least squares of log e against log h, plus pairwise orders.

    Exact-zero errors short-circuit to the degenerate verdict "exact".
    """
    h = np.asarray(h, dtype=float)
    e = np.asarray(errors, dtype=float)
    if len(h) < 3:
        raise ValueError("need at least 3 ladder points")
    if np.any(np.diff(h) >= 0):
        raise ValueError("h must be strictly decreasing")
    if np.any(e == 0.0):
        return {"verdict": "exact", "slope": math.inf, "intercept": -math.inf,
                "residual": 0.0, "pairwise": []}
    if np.any(e < 0.0):
        raise ValueError("errors must be nonnegative")
    lh, le = np.log(h), np.log(e)
    slope, intercept = np.polyfit(lh, le, 1)
    resid = float(np.sqrt(np.mean((le - (slope * lh + intercept)) ** 2)))
    pairwise = list(np.diff(le) / np.diff(lh))
    return {
        "verdict": "fit",
        "slope": float(slope),
        "intercept": float(intercept),
        "residual": resid,
        "pairwise": [float(p) for p in pairwise],
    }


def plateau_estimate(h, errors, order_tol: float = 0.2) -> Optional[float]:
    """Mean of the last three ladder errors once the pairwise order stalls."""
    e = np.asarray(errors, dtype=float)
    h = np.asarray(h, dtype=float)
    orders = np.diff(np.log(e)) / np.diff(np.log(h))
    if len(orders) >= 2 and abs(orders[-1]) < order_tol and abs(orders[-2]) < order_tol:
        return float(np.mean(e[-3:]))
    return None


# ---------------------------------------------------------------------------
# Study execution
# ---------------------------------------------------------------------------

def _interp_point(args):
    cfg_json, h = args
    cfg = ExperimentConfig.from_json(cfg_json)
    return spectral.interp_error_norm(cfg.make_data(), cfg.make_basis(), h, cfg.tol)


def _scheme_point(args):
    cfg_json, h = args
    cfg = ExperimentConfig.from_json(cfg_json)
    return multiplier.wiener_error_scheme(
        cfg.make_data(), cfg.make_basis(), cfg.make_symbol(), h, cfg.t, cfg.tol
    )


@dataclass
class StudyResult:
    study: str
    config_digest: str
    h: list = field(default_factory=list)
    errors: list = field(default_factory=list)
    fit: dict = field(default_factory=dict)
    predicted_rate: Optional[float] = None
    predicted_constant: Optional[float] = None
    plateau: Optional[float] = None
    plateau_bracket: Optional[list] = None
    verdicts: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)
    runtime_seconds: float = 0.0

    def to_json(self) -> str:
        doc = asdict(self)
        doc.pop("runtime_seconds")  # timing lives in the sidecar
        return json.dumps(doc, indent=2, sort_keys=True)


def _guarded(worker, arg):
    try:
        return float(worker(arg)), None
    except Exception as exc:  # per-point failures are recorded, not raised
        return math.nan, f"h={arg[1]:g}: {exc}"


def _ladder_errors(cfg: ExperimentConfig, worker, jobs: int) -> tuple:
    hs = cfg.h_values()
    args = [(cfg.canonical_json(), float(h)) for h in hs]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            outcomes = list(ex.map(_guarded, [worker] * len(args), args))
    else:
        outcomes = [_guarded(worker, a) for a in args]
    errors = [e for e, _ in outcomes]
    failures = [msg for _, msg in outcomes if msg]
    return errors, failures


def run_study(cfg: ExperimentConfig, jobs: int = 1) -> StudyResult:
    """Execute one study; per-point failures are recorded, not raised."""
    cfg.validate()
    t0 = time.perf_counter()
    basis = cfg.make_basis()
    res = StudyResult(study=cfg.study, config_digest=cfg.digest())

    if cfg.study == "constants_table":
        symbol = cfg.make_symbol() if cfg.symbol else None
        rep = consts.constants_report(
            basis, symbol=symbol, q_list=[max(symbol.order, 0.0)] if symbol else (),
            with_rho=basis.n == 1,
        )
        res.extras["constants"] = json.loads(rep.to_json())
        res.runtime_seconds = time.perf_counter() - t0
        return res

    if cfg.study == "cross_validation":
        rep = evolve.cross_validate(
            cfg.make_data(), basis, cfg.make_symbol(),
            h=float(cfg.cross.get("h", 0.25)),
            J=int(cfg.cross.get("J", 64)),
            T=float(cfg.cross.get("T", 0.5)),
            budget=float(cfg.cross.get("budget", 1e-4)),
        )
        res.extras["cross_validation"] = rep
        res.verdicts["within_budget"] = rep["passed"]
        res.runtime_seconds = time.perf_counter() - t0
        return res

    data = cfg.make_data()
    hs = cfg.h_values()
    worker = _interp_point if cfg.study.startswith("interp") else _scheme_point
    errors, failures = _ladder_errors(cfg, worker, jobs)
    if failures:
        res.extras["point_failures"] = failures
    res.h = [float(h) for h in hs]
    res.errors = errors
    good = ~np.isnan(errors)
    if good.sum() >= 3:
        res.fit = estimate_rate(np.asarray(hs)[good], np.asarray(errors)[good])
    else:
        res.fit = {"verdict": "insufficient", "pairwise": []}
    hs = np.asarray(hs)[good]
    errors = list(np.asarray(errors)[good])

    kappa = basis.kappa
    base_consts = consts.interp_constants(basis)
    if cfg.study == "interp_convergence":
        res.predicted_rate = min(kappa, data.decay_rate - data.n)
        if res.predicted_rate == kappa:
            norm = spectral.weighted_l1_norm(data, ("hom", kappa))
            res.predicted_constant = base_consts["l_upper"] * norm
            res.extras["limit_ratio"] = [
                float(e * h ** -kappa / res.predicted_constant)
                for e, h in zip(errors, hs)
            ]
    elif cfg.study == "interp_saturation":
        norm = spectral.weighted_l1_norm(data, "wiener" if kappa == 0 else ("hom", kappa))
        res.plateau = plateau_estimate(hs, errors)
        res.plateau_bracket = [base_consts["l_lower"] * norm, base_consts["l_upper"] * norm]
        res.predicted_rate = kappa
        res.extras["pre_plateau_max_order"] = (
            float(np.max(res.fit["pairwise"])) if res.fit["pairwise"] else None
        )
    else:
        symbol = cfg.make_symbol()
        q = max(symbol.order, 0.0)
        res.predicted_rate = kappa - q
        if cfg.study == "scheme_convergence" and kappa > q:
            g_a = consts.symbol_constant(basis, symbol)
            weight = _exact_rate_weight(data, symbol, cfg.t, kappa)
            res.predicted_constant = abs(g_a) * cfg.t * weight
            res.extras["limit_ratio"] = [
                float(e * h ** (q - kappa) / res.predicted_constant)
                if res.predicted_constant
                else math.nan
                for e, h in zip(errors, hs)
            ]
        if cfg.study == "scheme_saturation":
            res.plateau = plateau_estimate(hs, errors)
            if basis.decay_n > basis.n + 2 and abs(kappa - 2.0) < 1e-12:
                hc = consts.heat_constants(basis)
                res.plateau_bracket = [
                    _saturation_integral(data, hc["g_lower"], cfg.t),
                    _saturation_integral(data, hc["g_upper"], cfg.t),
                ]
    if res.predicted_rate is not None and res.fit.get("verdict") == "fit":
        res.verdicts["rate_match"] = bool(
            abs(res.fit["slope"] - res.predicted_rate) <= 0.25
        )
    if res.plateau is not None and res.plateau_bracket:
        lo, hi = res.plateau_bracket
        res.verdicts["plateau_in_bracket"] = bool(0.9 * lo <= res.plateau <= 1.1 * hi)
    res.runtime_seconds = time.perf_counter() - t0
    return res


def _exact_rate_weight(data, symbol, t, kappa) -> float:
    w = data.window_radius()
    if math.isinf(w):
        w = 80.0
    grid = spectral.grid_1d(w) if data.n == 1 else spectral.grid_polar(w)
    rad = np.abs(grid.nodes) if data.n == 1 else np.sqrt(np.sum(grid.nodes**2, -1))
    re_a = np.asarray(symbol(grid.nodes)).real
    vals = rad**kappa * np.exp(-t * re_a) * np.abs(np.asarray(data.density(grid.nodes)))
    return float(np.sum(grid.weights * vals))


def _saturation_integral(data, g, t) -> float:
    w = data.window_radius()
    if math.isinf(w):
        w = 80.0
    grid = spectral.grid_1d(w) if data.n == 1 else spectral.grid_polar(w)
    rad2 = grid.nodes**2 if data.n == 1 else np.sum(grid.nodes**2, -1)
    vals = -np.expm1(-g * t * rad2)
    vals = vals * np.exp(-t * rad2) * np.abs(np.asarray(data.density(grid.nodes)))
    return float(np.sum(grid.weights * vals))


# ---------------------------------------------------------------------------
# Output emission
# ---------------------------------------------------------------------------

def _atomic_write(path: str, payload: str):
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(payload)
    os.replace(tmp, path)


def emit_outputs(result: StudyResult, cfg: ExperimentConfig, out_dir: str) -> dict:
    """Write result.json, ladder.csv, plot.svg and meta.json; returns paths."""
    run_dir = os.path.join(out_dir, cfg.digest())
    os.makedirs(run_dir, exist_ok=True)
    paths = {}

    jpath = os.path.join(run_dir, "result.json")
    _atomic_write(jpath, result.to_json() + "\n")
    paths["json"] = jpath

    _atomic_write(os.path.join(run_dir, "config.json"), cfg.canonical_json() + "\n")

    if result.h:
        lines = ["h,error,order"]
        pair = [math.nan] + list(result.fit.get("pairwise", []))
        for h, e, o in zip(result.h, result.errors, pair):
            lines.append(f"{h!r},{e!r},{'' if math.isnan(o) else repr(o)}")
        cpath = os.path.join(run_dir, "ladder.csv")
        _atomic_write(cpath, "\n".join(lines) + "\n")
        paths["csv"] = cpath
        paths["svg"] = _emit_plot(result, run_dir)

    mpath = os.path.join(run_dir, "meta.json")
    _atomic_write(
        mpath,
        json.dumps({"runtime_seconds": result.runtime_seconds}, sort_keys=True) + "\n",
    )
    paths["meta"] = mpath
    return paths


def _emit_plot(result: StudyResult, run_dir: str) -> str:
    import matplotlib

    matplotlib.use("Agg")
    matplotlib.rcParams["svg.hashsalt"] = "gridrbf"
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5.5, 4.2))
    h = np.asarray(result.h)
    e = np.asarray(result.errors)
    ax.loglog(h, e, "o-", label="measured")
    if result.predicted_rate is not None and result.predicted_rate > 0:
        guide = e[0] * (h / h[0]) ** result.predicted_rate
        ax.loglog(h, guide, "--", label=f"slope {result.predicted_rate:g} guide")
    if result.plateau_bracket:
        for level, tag in zip(result.plateau_bracket, ("lower", "upper")):
            if level and level > 0:
                ax.axhline(level, color="gray", lw=0.8, ls=":", label=f"plateau {tag}")
    ax.set_xlabel("h")
    ax.set_ylabel("Wiener-norm error")
    ax.set_title(result.study)
    ax.legend(fontsize=8)
    ax.invert_xaxis()
    spath = os.path.join(run_dir, "plot.svg")
    fig.savefig(spath, format="svg", metadata={"Date": None})
    plt.close(fig)
    return spath
