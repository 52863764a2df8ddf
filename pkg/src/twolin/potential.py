"""Linear potential aligned with the eigenbasis of the drift matrix.

f(x) is the coefficient of x along the all-positive eigenvector e1 when x is
written in the basis {e1, e2}: the unique linear function with f(e1) = 1 and
f(e2) = 0. On the first quadrant it is equivalent to the max-norm, and in
the efficient regime its expected value contracts by a factor
1 - lambda1/(4n) per step near the optimum; in the inefficient regime it
expands along the e1 ray. Both facts are checked here against the exact
drift, using that a linear f commutes with expectation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .drift_matrix import DegenerateMatrixError, EigenSystem
from .ea import Trajectory
from .exact_drift import exact_drift
from .params import Params, State


@dataclass(frozen=True)
class Potential:
    eigensystem: EigenSystem
    w1: float
    w2: float
    kappa1: float
    kappa2: float

    def value(self, x1: float, x2: float) -> float:
        return self.w1 * x1 + self.w2 * x2


def build_potential(es: EigenSystem) -> Potential:
    """Coefficients and norm-equivalence constants from the eigensystem.

    Cramer's rule on x = eta1 e1 + eta2 e2 gives
    eta1 = (e22 x1 - e21 x2) / (e11 e22 - e12 e21); with e21 < 0 < e22 every
    term is nonnegative on the first quadrant. On that quadrant
    kappa1 * max(x1, x2) <= f(x) <= kappa2 * (x1 + x2); the max-norm upper
    bound holds with 2 * kappa2.
    """
    e11, e12 = es.e1
    e21, e22 = es.e2
    denom = e11 * e22 - e12 * e21
    if not (e21 < 0 < e22) or denom <= 0:
        raise DegenerateMatrixError(f"eigensystem lacks the sign pattern: {es}")
    w1 = e22 / denom
    w2 = -e21 / denom
    kappa1 = min(e22, -e21) / denom
    kappa2 = max(e22, -e21) / denom
    return Potential(es, w1, w2, kappa1, kappa2)


def expected_potential_after_step(pot: Potential, s: State, p: Params) -> float:
    """E[f(X_{t+1})] at state s, exactly: f(s) minus the f-weighted drift."""
    dv = exact_drift(s, p)
    return pot.value(s.x_l, s.x_r) - (pot.w1 * dv.d_l + pot.w2 * dv.d_r)


@dataclass
class PotentialDriftReport:
    mode: str                       # "contraction" or "expansion"
    bound_factor: float             # 1 -/+ lambda1-term
    states_checked: int = 0
    violations: list = field(default_factory=list)
    worst_margin: float = math.inf  # min over states of (bound - actual) signed

    @property
    def ok(self) -> bool:
        return not self.violations


def potential_drift_check(p: Params, es: EigenSystem,
                          region_cap: float = 0.01,
                          trials: int = 100,
                          seed: int = 0) -> PotentialDriftReport:
    """Check the per-step bound on E[f] against the exact drift.

    Efficient regime (classifier > 0): at states sampled from the box
    ||x|| <= region_cap * n, requires E[f(X_{t+1})] <= (1 - lambda1/(4n)) f(x).
    Inefficient regime: at states on the e1 ray in the same box, requires
    E[f(X_{t+1})] >= (1 + |lambda1|/(2n)) f(x).
    """
    pot = build_potential(es)
    n = p.n
    cap = max(1, int(region_cap * n))
    rng = np.random.default_rng(seed)

    if es.classifier > 0:
        mode = "contraction"
        factor = 1.0 - es.lambda1 / (4.0 * n)
        states = []
        while len(states) < trials:
            x1 = int(rng.integers(0, min(cap, p.left_len) + 1))
            x2 = int(rng.integers(0, min(cap, p.right_len) + 1))
            if x1 == 0 and x2 == 0:
                continue
            states.append(State(x1, x2))
    else:
        mode = "expansion"
        factor = 1.0 + abs(es.lambda1) / (2.0 * n)
        g0 = es.gamma0
        states = []
        for x2 in np.linspace(1, min(cap, p.right_len), num=trials):
            x2 = int(round(x2))
            x1 = int(round(g0 * x2))
            if 1 <= x1 <= p.left_len and 1 <= x2 <= p.right_len:
                states.append(State(x1, x2))

    rep = PotentialDriftReport(mode=mode, bound_factor=factor)
    for s in states:
        fx = pot.value(s.x_l, s.x_r)
        ef = expected_potential_after_step(pot, s, p)
        bound = factor * fx
        margin = (bound - ef) if mode == "contraction" else (ef - bound)
        rep.states_checked += 1
        rep.worst_margin = min(rep.worst_margin, margin)
        if margin < 0:
            rep.violations.append((s, ef, bound))
    return rep


def y_statistic(traj: Trajectory, es: EigenSystem) -> np.ndarray:
    """Y_t = x_l(t) - gamma0 * x_r(t) along a recorded trajectory.

    Y measures the deviation from the self-stabilizing ray x_l = gamma0 x_r;
    it should shrink toward a band around zero while the total zero count is
    still large. Returns an array of (t, Y) rows.
    """
    y = traj.x_l.astype(np.float64) - es.gamma0 * traj.x_r.astype(np.float64)
    return np.column_stack([traj.t.astype(np.float64), y])


def y_summary(traj: Trajectory, es: EigenSystem) -> dict:
    y = traj.x_l - es.gamma0 * traj.x_r
    norm = np.maximum(np.maximum(traj.x_l, traj.x_r), 1)
    rel = np.abs(y) / norm
    return {
        "mean_abs_rel_y": float(np.mean(rel)),
        "initial_abs_y": float(abs(y[0])),
        "final_abs_y": float(abs(y[-1])),
        "initial_rel_y": float(rel[0]),
        "final_rel_y": float(rel[-1]),
    }


@dataclass
class StepTailReport:
    """Empirical geometric tail fit of the one-step displacement norm.

    survival[i] estimates Pr[||X_t - X_{t+1}|| >= i]. A least-squares line
    through log survival gives the geometric rate: survival ~ kappa/(1+r)^i.
    Diagnostic only; no particular (kappa, r) pair is asserted.
    """

    survival: np.ndarray
    kappa: float
    r: float
    max_step: int


def step_tail_diagnostic(s: State, p: Params, samples: int = 200_000,
                         seed: int = 0) -> StepTailReport:
    rng = np.random.default_rng(seed)
    fp = p.flip_prob
    i = rng.binomial(s.x_l, fp, size=samples)
    r1 = rng.binomial(p.left_len - s.x_l, fp, size=samples)
    j = rng.binomial(s.x_r, fp, size=samples)
    r2 = rng.binomial(p.right_len - s.x_r, fp, size=samples)
    env1 = rng.random(samples) < p.rho
    acc = np.where(env1,
                   (i > r1) | ((i == r1) & (j >= r2)),
                   (j > r2) | ((j == r2) & (i >= r1)))
    step = np.where(acc, np.maximum(np.abs(i - r1), np.abs(j - r2)), 0)
    max_step = int(step.max())
    ks = np.arange(1, max_step + 1)
    survival = np.array([np.mean(step >= k) for k in ks]) if max_step >= 1 \
        else np.zeros(0)
    pos = survival > 0
    if pos.sum() >= 2:
        slope, intercept = np.polyfit(ks[pos], np.log(survival[pos]), 1)
        r = math.exp(-slope) - 1.0
        kappa = math.exp(intercept + (-slope))   # survival(0) extrapolation
    else:
        r, kappa = 0.0, 1.0
    return StepTailReport(survival=survival, kappa=kappa, r=r,
                          max_step=max_step)
