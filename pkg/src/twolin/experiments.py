"""Parameter sweeps over chi and n, success-rate curves, and scaling fits.

A sweep runs seeded batches of the selection loop on a (chi, n) grid,
records one CSV row per trial, and summarizes each grid point with success
counts, Wilson intervals, hitting-time quantiles, and the analytic verdict
from the drift matrix. The empirical efficiency threshold is read off as
the 0.5-crossing of the success-rate curve.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import _kernels, ea
from .drift_matrix import DegenerateMatrixError, build_matrix, classify, eigen_analysis
from .params import Params


@dataclass(frozen=True)
class SweepConfig:
    rho: float
    ell: float
    chi_grid: tuple[float, ...]
    n_list: tuple[int, ...]
    trials: int = 50
    budget_mult: float = 30.0         # budget = ceil(budget_mult * n * ln n)
    start: str = "uniform"            # "uniform", "zeros", or "small"
    small_start_exponent: float = 0.6  # zeros = round(n**exponent) for "small"
    seed: int = 0

    def __post_init__(self):
        if not self.chi_grid or not self.n_list:
            raise ValueError("chi_grid and n_list must be non-empty")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if list(self.chi_grid) != sorted(self.chi_grid):
            raise ValueError("chi_grid must be sorted")

    def budget(self, n: int) -> int:
        return int(math.ceil(self.budget_mult * n * math.log(n)))

    def start_spec(self, n: int) -> ea.StartSpec:
        if self.start == "uniform":
            return ea.UniformStart()
        if self.start == "zeros":
            return ea.AllZerosStart()
        if self.start == "small":
            return ea.TotalZerosStart(max(1, round(n ** self.small_start_exponent)),
                                      placement="eigen")
        raise ValueError(f"unknown start rule {self.start!r}")


@dataclass
class PointSummary:
    chi: float
    n: int
    trials: int
    successes: int
    budget: int
    wilson95: tuple[float, float]
    hit_quantiles: dict
    verdict: Optional[str]
    classifier: Optional[float]

    @property
    def success_rate(self) -> float:
        return self.successes / self.trials


@dataclass
class SweepResult:
    config: SweepConfig
    rows: list = field(default_factory=list)   # (chi, rho, ell, n, trial, seed, hit, generations)
    points: dict = field(default_factory=dict)  # (chi, n) -> PointSummary

    CSV_HEADER = "chi,rho,ell,n,trial,seed,hit,generations"

    def csv(self) -> str:
        buf = io.StringIO()
        buf.write(self.CSV_HEADER + "\n")
        for chi, rho, ell, n, trial, seed, hit, gens in self.rows:
            buf.write(f"{chi!r},{rho!r},{ell!r},{n},{trial},{seed},{hit},{gens}\n")
        return buf.getvalue()

    def threshold_estimate(self, n: int) -> Optional[float]:
        chis = [c for c in self.config.chi_grid if (c, n) in self.points]
        rates = [self.points[(c, n)].success_rate for c in chis]
        return threshold_crossing(chis, rates)

    def summary(self) -> dict:
        return {
            "rho": self.config.rho,
            "ell": self.config.ell,
            "trials": self.config.trials,
            "budget_mult": self.config.budget_mult,
            "start": self.config.start,
            "seed": self.config.seed,
            "points": [
                {
                    "chi": ps.chi,
                    "n": ps.n,
                    "successes": ps.successes,
                    "trials": ps.trials,
                    "budget": ps.budget,
                    "success_rate": ps.success_rate,
                    "wilson95": list(ps.wilson95),
                    "hit_quantiles": ps.hit_quantiles,
                    "verdict": ps.verdict,
                    "classifier": ps.classifier,
                }
                for ps in self.points.values()
            ],
            "threshold_estimate": {
                str(n): self.threshold_estimate(n) for n in self.config.n_list
            },
        }


def threshold_crossing(chis: Sequence[float], rates: Sequence[float]) -> Optional[float]:
    """chi where the success rate first crosses 0.5 from above, interpolated."""
    for (c0, r0), (c1, r1) in zip(zip(chis, rates), zip(chis[1:], rates[1:])):
        if r0 >= 0.5 > r1:
            if r0 == r1:
                return c0
            return c0 + (r0 - 0.5) * (c1 - c0) / (r0 - r1)
    return None


def sweep(cfg: SweepConfig) -> SweepResult:
    """Run the full grid; byte-identical output for identical configs."""
    res = SweepResult(config=cfg)
    point_idx = 0
    for n in cfg.n_list:
        for chi in cfg.chi_grid:
            p = Params(chi, cfg.rho, cfg.ell, n)
            budget = cfg.budget(n)
            point_seed = _kernels.derive_seed(cfg.seed, point_idx)
            point_idx += 1
            run_cfg = ea.RunConfig(p, cfg.start_spec(n), budget,
                                   seed=point_seed, record_every=budget)
            trajs = ea.batch_run(run_cfg, cfg.trials)
            successes = 0
            for trial, tr in enumerate(trajs):
                hit = -1 if tr.hit is None else tr.hit
                if tr.hit is not None:
                    successes += 1
                res.rows.append((chi, cfg.rho, cfg.ell, n, trial,
                                 _kernels.derive_seed(point_seed, trial),
                                 hit, tr.generations))
            summ = ea.batch_summary(trajs, budget)
            try:
                verdict = classify(p).value
                cla = eigen_analysis(build_matrix(p)).classifier
            except DegenerateMatrixError:
                verdict, cla = None, None
            res.points[(chi, n)] = PointSummary(
                chi=chi, n=n, trials=cfg.trials, successes=successes,
                budget=budget, wilson95=tuple(summ["wilson95"]),
                hit_quantiles=summ["hit_quantiles"],
                verdict=verdict, classifier=cla,
            )
    return res


class InsufficientDataError(ValueError):
    pass


@dataclass
class ScalingFit:
    chi: float
    n_used: list[int]
    medians: list[float]
    slope: float
    intercept: float
    r_squared: float


def scaling_fit(result: SweepResult, chi: float,
                min_success_rate: float = 0.9) -> ScalingFit:
    """Least-squares fit of median hitting time against n ln n at one chi.

    Uses only n values whose success rate reaches min_success_rate; requires
    at least three of them.
    """
    ns, medians = [], []
    for n in result.config.n_list:
        ps = result.points.get((chi, n))
        if ps is None or ps.success_rate < min_success_rate:
            continue
        if "0.5" not in ps.hit_quantiles:
            continue
        ns.append(n)
        medians.append(ps.hit_quantiles["0.5"])
    if len(ns) < 3:
        raise InsufficientDataError(
            f"need >= 3 sizes with success rate >= {min_success_rate} at "
            f"chi={chi}, found {len(ns)}"
        )
    x = np.array([n * math.log(n) for n in ns])
    y = np.array(medians)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return ScalingFit(chi, ns, medians, float(slope), float(intercept), r2)


@dataclass
class SpotCheckRow:
    chi: float
    classifier: float
    verdict: str
    successes: int
    trials: int
    wilson95: tuple[float, float]
    margin_separated: bool
    agrees: Optional[bool]


@dataclass
class SpotCheckReport:
    rho: float
    ell: float
    n: int
    rows: list[SpotCheckRow]

    @property
    def agreement_rate(self) -> float:
        decided = [r for r in self.rows if r.margin_separated]
        if not decided:
            return 1.0
        return sum(1 for r in decided if r.agrees) / len(decided)


def asymmetric_spotcheck(rho: float, ell: float, chi_grid: Sequence[float],
                         n: int, trials: int = 30, budget_mult: float = 30.0,
                         margin: float = 0.02, seed: int = 0) -> SpotCheckReport:
    """Analytic classifier sign vs empirical success on a chi grid.

    Positive-regime theory only covers starts with few zero-bits in the
    asymmetric case, so trials start from ~n**0.6 zeros in the eigenvector
    ratio. A grid point counts as decided when |classifier| > margin; a
    decided point agrees when a positive classifier comes with success rate
    > 0.5 and a negative one with rate < 0.5.
    """
    if not (0.0 < rho < 1.0 and 0.0 < ell < 1.0):
        raise ValueError("rho and ell must lie strictly inside (0, 1)")
    cfg = SweepConfig(rho=rho, ell=ell, chi_grid=tuple(sorted(chi_grid)),
                      n_list=(n,), trials=trials, budget_mult=budget_mult,
                      start="small", seed=seed)
    res = sweep(cfg)
    rows = []
    for chi in cfg.chi_grid:
        ps = res.points[(chi, n)]
        cla = ps.classifier
        decided = cla is not None and abs(cla) > margin
        agrees = None
        if decided:
            agrees = (cla > 0) == (ps.success_rate > 0.5)
        rows.append(SpotCheckRow(
            chi=chi, classifier=cla, verdict=ps.verdict,
            successes=ps.successes, trials=ps.trials,
            wilson95=ps.wilson95, margin_separated=decided, agrees=agrees,
        ))
    return SpotCheckReport(rho=rho, ell=ell, n=n, rows=rows)
