"""(1+1)-EA with standard bit mutation at rate chi/n in the dynamic environment.

run() simulates the zero-count pair (x_l, x_r) directly through the compiled
kernel; the count pair is Markov with exactly the law of the bit-string
algorithm, since category flip counts are independent binomials and
acceptance depends only on them. reference_run() is the literal bit-string
loop (draw environment, mutate, compare) kept as an independent
implementation for cross-validation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from . import _kernels
from .environment import BitString, compare, draw_environment, fitness
from .params import Params, State


@dataclass(frozen=True)
class UniformStart:
    """Start from a uniformly random bit string."""


@dataclass(frozen=True)
class AllZerosStart:
    """Start from the all-zeros string."""


@dataclass(frozen=True)
class ExplicitStart:
    """Start from a string with the given zero counts per part."""

    state: State


@dataclass(frozen=True)
class TotalZerosStart:
    """Start with a given total number of zeros, split between the parts.

    placement 'uniform' draws the zero positions uniformly among all n
    positions; 'eigen' splits the total deterministically in the gamma0:1
    ratio of the drift matrix eigenvector.
    """

    total: int
    placement: str = "uniform"

    def __post_init__(self):
        if self.placement not in ("uniform", "eigen"):
            raise ValueError(f"unknown placement {self.placement!r}")


StartSpec = Union[UniformStart, AllZerosStart, ExplicitStart, TotalZerosStart]


@dataclass(frozen=True)
class RunConfig:
    params: Params
    start: StartSpec = UniformStart()
    budget: int = 1000
    seed: int = 0
    record_every: int = 1

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError("budget must be >= 1")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")
        if self.params.chi >= self.params.n:
            raise ValueError("mutation rate chi/n must be below 1")
        if isinstance(self.start, ExplicitStart):
            self.start.state.check_bounds(self.params)
        if isinstance(self.start, TotalZerosStart):
            if not (0 <= self.start.total <= self.params.n):
                raise ValueError("total zeros out of range")


@dataclass
class Trajectory:
    """Sampled states (t, x_l, x_r); hit is the hitting generation, if any."""

    t: np.ndarray
    x_l: np.ndarray
    x_r: np.ndarray
    hit: Optional[int]
    budget_exhausted: bool
    seed: int = 0

    @property
    def generations(self) -> int:
        return int(self.t[-1])

    def final_state(self) -> State:
        return State(int(self.x_l[-1]), int(self.x_r[-1]))

    def rows(self):
        return zip(self.t.tolist(), self.x_l.tolist(), self.x_r.tolist())


def mutate(parent: BitString, p: Params, rng: np.random.Generator) -> np.ndarray:
    """Positions flipped by standard bit mutation.

    Samples the flip count Binomial(n, chi/n) and then a uniform subset of
    positions of that size, which is distributionally identical to n
    independent per-bit coin flips but takes O(chi) expected work.
    """
    if p.chi >= p.n:
        raise ValueError("mutation rate chi/n must be below 1")
    k = int(rng.binomial(p.n, p.flip_prob))
    if k == 0:
        return np.empty(0, dtype=np.int64)
    return rng.choice(p.n, size=k, replace=False).astype(np.int64)


def _start_state(cfg: RunConfig, rng: np.random.Generator) -> State:
    p = cfg.params
    s = cfg.start
    if isinstance(s, UniformStart):
        return State(int(rng.binomial(p.left_len, 0.5)),
                     int(rng.binomial(p.right_len, 0.5)))
    if isinstance(s, AllZerosStart):
        return State(p.left_len, p.right_len)
    if isinstance(s, ExplicitStart):
        return s.state
    if isinstance(s, TotalZerosStart):
        if s.placement == "uniform":
            x_l = int(rng.hypergeometric(p.left_len, p.right_len, s.total)) \
                if s.total > 0 else 0
            return State(x_l, s.total - x_l)
        from .drift_matrix import build_matrix, eigen_analysis

        g0 = eigen_analysis(build_matrix(p)).gamma0
        x_l = int(round(s.total * g0 / (1.0 + g0)))
        x_l = min(max(x_l, s.total - p.right_len), p.left_len)
        return State(x_l, s.total - x_l)
    raise TypeError(f"unknown start spec {s!r}")


def run(cfg: RunConfig) -> Trajectory:
    """Execute one trajectory; identical seed gives an identical trajectory."""
    p = cfg.params
    rng = np.random.default_rng(np.uint64(cfg.seed & 0xFFFFFFFFFFFFFFFF))
    s0 = _start_state(cfg, rng).check_bounds(p)

    cap = cfg.budget // cfg.record_every + 3
    rec_t = np.empty(cap, dtype=np.int64)
    rec_xl = np.empty(cap, dtype=np.int64)
    rec_xr = np.empty(cap, dtype=np.int64)
    with np.errstate(over="ignore"):
        hit, gens, nrec = _kernels.ea_chain(
            np.uint64(_kernels.derive_seed(cfg.seed, 0)),
            s0.x_l, s0.x_r, p.left_len, p.right_len,
            p.chi, p.rho, cfg.budget, cfg.record_every,
            rec_t, rec_xl, rec_xr,
        )
    return Trajectory(
        t=rec_t[:nrec].copy(),
        x_l=rec_xl[:nrec].copy(),
        x_r=rec_xr[:nrec].copy(),
        hit=None if hit < 0 else int(hit),
        budget_exhausted=hit < 0,
        seed=cfg.seed,
    )


def run_hit_only(cfg: RunConfig) -> Trajectory:
    """Like run() but records only the start and final state (fast path)."""
    p = cfg.params
    rng = np.random.default_rng(np.uint64(cfg.seed & 0xFFFFFFFFFFFFFFFF))
    s0 = _start_state(cfg, rng).check_bounds(p)
    with np.errstate(over="ignore"):
        hit, gens, fxl, fxr = _kernels.ea_chain_hit_only(
            np.uint64(_kernels.derive_seed(cfg.seed, 0)),
            s0.x_l, s0.x_r, p.left_len, p.right_len,
            p.chi, p.rho, cfg.budget,
        )
    npts = 2 if gens > 0 else 1
    return Trajectory(
        t=np.array([0, gens], dtype=np.int64)[:npts],
        x_l=np.array([s0.x_l, fxl], dtype=np.int64)[:npts],
        x_r=np.array([s0.x_r, fxr], dtype=np.int64)[:npts],
        hit=None if hit < 0 else int(hit),
        budget_exhausted=hit < 0,
        seed=cfg.seed,
    )


def reference_run(cfg: RunConfig) -> Trajectory:
    """Literal bit-string loop; slow, used to validate the kernel."""
    p = cfg.params
    rng = np.random.default_rng(np.uint64(cfg.seed & 0xFFFFFFFFFFFFFFFF))
    s0 = _start_state(cfg, rng).check_bounds(p)
    x = BitString.with_state(s0.x_l, s0.x_r, p)

    ts, xls, xrs = [0], [x.zeros_left], [x.zeros_right]
    hit: Optional[int] = 0 if s0.is_optimum() else None
    t = 0
    while hit is None and t < cfg.budget:
        t += 1
        env = draw_environment(rng, p)
        flips = mutate(x, p, rng)
        y = x.apply_flips(flips)
        f_parent = fitness(x, env, p)
        if compare(x, y, env, p):
            # elitism under the drawn function: accepted steps never lower it
            assert fitness(y, env, p) >= f_parent
            x = y
        if t % cfg.record_every == 0:
            ts.append(t); xls.append(x.zeros_left); xrs.append(x.zeros_right)
        if x.zeros_left == 0 and x.zeros_right == 0:
            hit = t
    if ts[-1] != t:
        ts.append(t); xls.append(x.zeros_left); xrs.append(x.zeros_right)
    return Trajectory(
        t=np.array(ts, dtype=np.int64),
        x_l=np.array(xls, dtype=np.int64),
        x_r=np.array(xrs, dtype=np.int64),
        hit=hit,
        budget_exhausted=hit is None,
        seed=cfg.seed,
    )


def batch_run(cfg: RunConfig, trials: int, hit_only: bool = True) -> list[Trajectory]:
    """Independent trials with per-trial seeds derived from cfg.seed.

    Trial i runs with seed derive_seed(cfg.seed, i); results are ordered by
    trial index and reproducible from the master seed alone.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    out = []
    runner = run_hit_only if hit_only else run
    for i in range(trials):
        seed_i = _kernels.derive_seed(cfg.seed, i)
        cfg_i = RunConfig(cfg.params, cfg.start, cfg.budget, seed_i,
                          cfg.record_every)
        out.append(runner(cfg_i))
    return out


def wilson_interval(successes: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    phat = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (phat + z2 / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z2 / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def batch_summary(trajs: Sequence[Trajectory], budget: int) -> dict:
    """Success count, Wilson interval, and hitting-time quantiles for a batch."""
    hits = [tr.hit for tr in trajs if tr.hit is not None]
    trials = len(trajs)
    successes = len(hits)
    lo, hi = wilson_interval(successes, trials)
    qs = {}
    if hits:
        arr = np.array(sorted(hits))
        for q in (0.1, 0.25, 0.5, 0.75, 0.9):
            qs[str(q)] = float(np.quantile(arr, q))
    return {
        "trials": trials,
        "successes": successes,
        "budget": budget,
        "success_rate": successes / trials,
        "wilson95": [lo, hi],
        "hit_quantiles": qs,
    }
