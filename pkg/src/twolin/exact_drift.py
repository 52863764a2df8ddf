"""Exact one-step drift of the zero-count pair, from first principles.

Conditioned on flipping i zero-bits and r1 one-bits on the left and j, r2 on
the right, acceptance is decided lexicographically by the weighted part:
under the left-heavy function the offspring wins iff i > r1, or i = r1 and
j >= r2 (the right part can never outweigh a left difference), and
symmetrically under the right-heavy one. Summing (i - r1) and (j - r2) over
the accepted region with binomial weights gives the exact drift vector. The
four flip counts are independent, so the four-fold sums factor into
products of two-dimensional ones.

Three independent routes to the same quantities are provided: the
factorized exact computation, a 2^n enumeration over all mutation masks
(the oracle, n <= 14), and a Monte-Carlo estimator.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .params import Params, State

BRUTE_FORCE_MAX_N = 14
DEFAULT_TAIL_TOL = 1e-15


@dataclass(frozen=True)
class DriftVector:
    """Expected one-step decrease (d_l, d_r) of the zero counts."""

    d_l: float
    d_r: float
    method: str
    truncation_mass: float = 0.0
    samples: int = 0
    ci_halfwidth: tuple[float, float] = (0.0, 0.0)

    @property
    def total(self) -> float:
        return self.d_l + self.d_r


def binom_pmf(m: int, p: float, tail_tol: float = DEFAULT_TAIL_TOL,
              min_len: int = 0):
    """Binomial(m, p) pmf[0..k], truncated when the remaining tail < tail_tol.

    pmf(0) = exp(m log1p(-p)) and the multiplicative ratio recurrence keep
    the relative error near machine precision over the truncated range
    (log-factorial differences lose ~1e-10 already at m = 1e5). Needs
    m * p small enough that pmf(0) does not underflow, which holds for every
    mutation-rate regime here. min_len forces the array out to at least that
    many entries. Returns (pmf, neglected_tail_mass).
    """
    if m < 0:
        raise ValueError("m must be nonnegative")
    if m == 0:
        out = np.zeros(max(1, min_len))
        out[0] = 1.0
        return out, 0.0
    odds = p / (1.0 - p)
    v = math.exp(m * math.log1p(-p))
    out = [v]
    cum = v
    k = 0
    while k < m:
        if 1.0 - cum < tail_tol and len(out) >= min_len:
            break
        v *= (m - k) / (k + 1.0) * odds
        k += 1
        out.append(v)
        cum += v
    while len(out) < min_len:
        out.append(0.0)
    return np.asarray(out), max(0.0, 1.0 - cum)


def _part_sums(zero_pmf: np.ndarray, one_pmf: np.ndarray):
    """Signed sums of (i - r) over the zero/one flip-count joint pmf.

    Returns (s_plus, s_minus, w_ge, w_gt, w_lt) where s_plus sums (i - r)
    over i > r, s_minus over i < r, and the w's are the probabilities of
    i >= r, i > r, i < r.
    """
    D = np.arange(len(zero_pmf))[:, None] - np.arange(len(one_pmf))[None, :]
    W = zero_pmf[:, None] * one_pmf[None, :]
    DW = D * W
    gt = D > 0
    lt = D < 0
    s_plus = float(np.sum(DW, where=gt, initial=0.0))
    s_minus = float(np.sum(DW, where=lt, initial=0.0))
    w_gt = float(np.sum(W, where=gt, initial=0.0))
    w_lt = float(np.sum(W, where=lt, initial=0.0))
    w_ge = float(np.sum(W, where=~lt, initial=0.0))
    return s_plus, s_minus, w_ge, w_gt, w_lt


def exact_drift(state: State, p: Params, tail_tol: float = DEFAULT_TAIL_TOL,
                _fault: float = 1.0) -> DriftVector:
    """Exact drift vector at a state, via the factored acceptance-region sums.

    _fault is a test-only hook that scales the weight of the region accepted
    only under the left-heavy function; it must stay 1.0 in real use.
    """
    state.check_bounds(p)
    fp = p.flip_prob
    P, tP = binom_pmf(state.x_l, fp, tail_tol)
    pl, tpl = binom_pmf(p.left_len - state.x_l, fp, tail_tol)
    Q, tQ = binom_pmf(state.x_r, fp, tail_tol)
    ql, tql = binom_pmf(p.right_len - state.x_r, fp, tail_tol)

    sl_plus, sl_minus, wl_ge, wl_gt, wl_lt = _part_sums(P, pl)
    sr_plus, sr_minus, wr_ge, wr_gt, wr_lt = _part_sums(Q, ql)

    rho = p.rho
    d_l = sl_plus * (wr_ge + _fault * rho * wr_lt) \
        + (1.0 - rho) * sl_minus * wr_gt
    d_r = sr_plus * (wl_ge + (1.0 - rho) * wl_lt) \
        + _fault * rho * sr_minus * wl_gt
    return DriftVector(d_l, d_r, "exact",
                       truncation_mass=tP + tpl + tQ + tql)


@dataclass
class ConditionalDriftTable:
    """delta[i, j] for all 0 <= i <= x_l, 0 <= j <= x_r at one state.

    zero_pmf_left/right are the flip-count distributions of the zero bits,
    used to weight the table entries by event probabilities.
    """

    state: State
    delta: np.ndarray
    zero_pmf_left: np.ndarray
    zero_pmf_right: np.ndarray
    truncation_mass: float

    def event_probs(self) -> np.ndarray:
        """Pr[i zero-flips left, j right], padded to the delta shape."""
        out = np.zeros_like(self.delta)
        P, Q = self.zero_pmf_left, self.zero_pmf_right
        out[: len(P), : len(Q)] = np.outer(P, Q)
        return out


def drift_table(state: State, p: Params, tail_tol: float = DEFAULT_TAIL_TOL,
                _fault: float = 1.0) -> ConditionalDriftTable:
    """All conditional drifts at a state, via prefix sums over the one-flip pmfs."""
    state.check_bounds(p)
    fp = p.flip_prob
    P, tP = binom_pmf(state.x_l, fp, tail_tol)
    Q, tQ = binom_pmf(state.x_r, fp, tail_tol)
    pl, tpl = binom_pmf(p.left_len - state.x_l, fp, tail_tol)
    ql, tql = binom_pmf(p.right_len - state.x_r, fp, tail_tol)

    def prefix(w):
        cs = np.cumsum(w)
        ms = np.cumsum(np.arange(len(w)) * w)
        return cs, ms, float(cs[-1]), float(ms[-1])

    csl, msl, totl, mtotl = prefix(pl)
    csr, msr, totr, mtotr = prefix(ql)

    def at(arr, idx):
        idx = np.clip(idx, -1, len(arr) - 1)
        return np.where(idx < 0, 0.0, arr[np.maximum(idx, 0)])

    iv = np.arange(state.x_l + 1)
    jv = np.arange(state.x_r + 1)
    P_le, M_le = at(csl, iv), at(msl, iv)
    P_lt, M_lt = at(csl, iv - 1), at(msl, iv - 1)
    P_gt, M_gt = totl - P_le, mtotl - M_le
    Q_le, N_le = at(csr, jv), at(msr, jv)
    Q_lt, N_lt = at(csr, jv - 1), at(msr, jv - 1)
    Q_gt, N_gt = totr - Q_le, mtotr - N_le

    S = iv[:, None] + jv[None, :]
    both = S * np.outer(P_le, Q_le) - np.outer(M_le, Q_le) - np.outer(P_le, N_le)
    left_only = S * np.outer(P_lt, Q_gt) - np.outer(M_lt, Q_gt) - np.outer(P_lt, N_gt)
    right_only = S * np.outer(P_gt, Q_lt) - np.outer(M_gt, Q_lt) - np.outer(P_gt, N_lt)
    delta = both + _fault * p.rho * left_only + (1.0 - p.rho) * right_only
    return ConditionalDriftTable(
        state=state,
        delta=delta,
        zero_pmf_left=P,
        zero_pmf_right=Q,
        truncation_mass=tP + tQ + tpl + tql,
    )


def conditional_drift(i: int, j: int, state: State, p: Params,
                      tail_tol: float = DEFAULT_TAIL_TOL) -> float:
    """Drift conditional on flipping exactly i/j zero-bits left/right.

    Literal evaluation of the three acceptance-region double sums with
    exactly-rounded accumulation; cross-checked against drift_table in the
    test suite.
    """
    state.check_bounds(p)
    if not (0 <= i <= state.x_l and 0 <= j <= state.x_r):
        raise ValueError(f"conditional flips ({i},{j}) out of range for {state}")
    fp = p.flip_prob
    pl, tpl = binom_pmf(p.left_len - state.x_l, fp, tail_tol, min_len=i + 2)
    ql, tql = binom_pmf(p.right_len - state.x_r, fp, tail_tol, min_len=j + 2)

    terms = []
    for r1 in range(0, i + 1):
        for r2 in range(0, j + 1):
            terms.append((i + j - r1 - r2) * pl[r1] * ql[r2])
    for r1 in range(0, i):
        for r2 in range(j + 1, len(ql)):
            terms.append(p.rho * (i + j - r1 - r2) * pl[r1] * ql[r2])
    for r1 in range(i + 1, len(pl)):
        for r2 in range(0, j):
            terms.append((1.0 - p.rho) * (i + j - r1 - r2) * pl[r1] * ql[r2])
    return math.fsum(terms)


_mask_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _masks(n: int):
    if n not in _mask_cache:
        m = np.arange(2 ** n, dtype=np.uint32)
        bits = ((m[:, None] >> np.arange(n, dtype=np.uint32)[None, :]) & 1)
        bits = bits.astype(np.int64)
        _mask_cache[n] = (bits, bits.sum(axis=1))
    return _mask_cache[n]


def brute_force_drift(state: State, p: Params) -> DriftVector:
    """Exact drift by enumerating all 2^n mutation masks on explicit strings.

    Materializes every offspring, evaluates both weighted fitnesses as
    integers, and applies the selection rule literally. Independent of the
    factored computation; restricted to n <= 14.
    """
    if p.n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"brute force limited to n <= {BRUTE_FORCE_MAX_N}")
    state.check_bounds(p)
    L, n = p.left_len, p.n
    fp = p.flip_prob
    parent = np.ones(n, dtype=np.int64)
    parent[: state.x_l] = 0
    parent[L: L + state.x_r] = 0

    bits, k = _masks(n)
    w = fp ** k * (1.0 - fp) ** (n - k)
    off = parent[None, :] ^ bits
    ones_l = off[:, :L].sum(axis=1)
    ones_r = off[:, L:].sum(axis=1)
    pl_ones, pr_ones = int(parent[:L].sum()), int(parent[L:].sum())

    acc1 = (n * ones_l + ones_r) >= (n * pl_ones + pr_ones)
    acc2 = (ones_l + n * ones_r) >= (pl_ones + n * pr_ones)
    p_acc = p.rho * acc1 + (1.0 - p.rho) * acc2

    d_l = state.x_l - (L - ones_l)          # parent zeros minus offspring zeros
    d_r = state.x_r - ((n - L) - ones_r)
    return DriftVector(
        float(np.sum(w * p_acc * d_l)),
        float(np.sum(w * p_acc * d_r)),
        "brute-force",
    )


def mc_drift(state: State, p: Params, samples: int,
             rng: np.random.Generator) -> DriftVector:
    """Monte-Carlo drift estimate with 99% normal confidence intervals."""
    if samples < 100:
        raise ValueError("need at least 100 samples")
    state.check_bounds(p)
    fp = p.flip_prob
    i = rng.binomial(state.x_l, fp, size=samples)
    r1 = rng.binomial(p.left_len - state.x_l, fp, size=samples)
    j = rng.binomial(state.x_r, fp, size=samples)
    r2 = rng.binomial(p.right_len - state.x_r, fp, size=samples)
    env1 = rng.random(samples) < p.rho
    acc_f1 = (i > r1) | ((i == r1) & (j >= r2))
    acc_f2 = (j > r2) | ((j == r2) & (i >= r1))
    acc = np.where(env1, acc_f1, acc_f2)
    d_l = np.where(acc, i - r1, 0).astype(np.float64)
    d_r = np.where(acc, j - r2, 0).astype(np.float64)
    z99 = 2.5758293035489004
    half = (z99 * float(np.std(d_l, ddof=1)) / math.sqrt(samples),
            z99 * float(np.std(d_r, ddof=1)) / math.sqrt(samples))
    return DriftVector(float(np.mean(d_l)), float(np.mean(d_r)),
                       "monte-carlo", samples=samples, ci_halfwidth=half)


@dataclass
class DominationReport:
    """Outcome of the 'both single-flip drifts positive' implication check."""

    params: Params
    eps: float
    states_checked: int = 0
    hypothesis_states: int = 0
    cells_checked: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_domination(p: Params, eps: float = 1e-10,
                     states: Optional[list[State]] = None,
                     _fault: float = 1.0) -> DominationReport:
    """Check: both unit conditional drifts positive implies all are positive.

    Exhausts every state of the instance by default; at each state where
    delta[1,0] > eps and delta[0,1] > eps, every cell with i + j >= 1 must
    stay above -eps.
    """
    rep = DominationReport(params=p, eps=eps)
    if states is None:
        states = [State(xl, xr)
                  for xl in range(p.left_len + 1)
                  for xr in range(p.right_len + 1)]
    for s in states:
        tab = drift_table(s, p, _fault=_fault)
        rep.states_checked += 1
        if s.x_l < 1 or s.x_r < 1:
            continue
        if tab.delta[1, 0] > eps and tab.delta[0, 1] > eps:
            rep.hypothesis_states += 1
            bad = tab.delta <= -eps
            bad[0, 0] = False
            rep.cells_checked += tab.delta.size - 1
            if np.any(bad):
                for i, j in zip(*np.nonzero(bad)):
                    rep.violations.append((s, int(i), int(j),
                                           float(tab.delta[i, j])))
    return rep


def single_flip_ratio_bound(i: int, state: State, p: Params,
                            tail_tol: float = DEFAULT_TAIL_TOL) -> float:
    """Lower-bound coefficient for delta[i,0] in terms of delta[1,0].

    Equals (sum of the one-flip pmf over r1 < i) / pmf(0), which is >= 1.
    """
    pl, _ = binom_pmf(p.left_len - state.x_l, p.flip_prob, tail_tol,
                      min_len=i + 1)
    return float(np.sum(pl[:i]) / pl[0])


def multiflip_contribution(state: State, p: Params,
                           tail_tol: float = DEFAULT_TAIL_TOL) -> float:
    """Absolute drift contribution of events flipping two or more zero-bits."""
    tab = drift_table(state, p, tail_tol)
    pe = tab.event_probs()
    m = np.abs(tab.delta) * pe
    m[0, 0] = 0.0
    if m.shape[0] > 1:
        m[1, 0] = 0.0
    if m.shape[1] > 1:
        m[0, 1] = 0.0
    return float(np.sum(m))


def multiflip_flip_bound(state: State, p: Params,
                         tail_tol: float = DEFAULT_TAIL_TOL) -> float:
    """Upper bound: expected total flips restricted to the same events."""
    tab = drift_table(state, p, tail_tol)
    pe = tab.event_probs()
    mu_ones = (p.left_len - state.x_l + p.right_len - state.x_r) * p.flip_prob
    iv = np.arange(tab.delta.shape[0])[:, None]
    jv = np.arange(tab.delta.shape[1])[None, :]
    m = pe * (iv + jv + mu_ones)
    m[0, 0] = 0.0
    if m.shape[0] > 1:
        m[1, 0] = 0.0
    if m.shape[1] > 1:
        m[0, 1] = 0.0
    return float(np.sum(m))


@dataclass
class ConformanceRow:
    n: int
    state: State
    exact: tuple[float, float]
    predicted: tuple[float, float]
    rel_dev: tuple[float, float]


def conformance_report(chi: float, rho: float, ell: float,
                       n_list=(10 ** 3, 10 ** 4, 10 ** 5),
                       beta: float = 0.01) -> list[ConformanceRow]:
    """Exact drift vs the matrix prediction A x / n across problem sizes.

    At each n, beta * n zeros are split between the parts in the gamma0 : 1
    eigenvector ratio and the componentwise relative deviation is reported.
    """
    from .drift_matrix import build_matrix, eigen_analysis

    rows = []
    for n in n_list:
        p = Params(chi, rho, ell, int(n))
        m = build_matrix(p)
        g0 = eigen_analysis(m).gamma0
        total = round(beta * n)
        x1 = int(round(total * g0 / (1.0 + g0)))
        x1 = min(max(x1, total - p.right_len), p.left_len)
        s = State(x1, total - x1)
        dv = exact_drift(s, p)
        pred = m.apply(s.x_l / p.n, s.x_r / p.n)
        rel = (abs(dv.d_l / pred[0] - 1.0) if pred[0] != 0 else math.inf,
               abs(dv.d_r / pred[1] - 1.0) if pred[1] != 0 else math.inf)
        rows.append(ConformanceRow(int(n), s, (dv.d_l, dv.d_r), pred, rel))
    return rows
