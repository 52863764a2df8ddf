"""Self-contained verification suites behind the `verify` CLI subcommand.

Each suite returns a list of named checks with pass/fail and a detail
string; the CLI exits nonzero if any check fails. The fault argument is a
test-only perturbation of one acceptance-region coefficient in the exact
drift computation, used to demonstrate that the suites actually detect
errors (it must be 1.0 in real use).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .drift_matrix import build_matrix, eigen_analysis
from .exact_drift import (
    brute_force_drift,
    check_domination,
    conditional_drift,
    drift_table,
    exact_drift,
)
from .params import Params, State
from .potential import build_potential

ORACLE_TOL = 1e-12
TOTAL_PROB_TOL = 1e-10
DOMINATION_EPS = 1e-10

ORACLE_NS = (6, 8, 10, 12)
GRID_CHI = (0.5, 1.0, 2.0)
GRID_RHO = (0.3, 0.5, 0.7)
GRID_ELL = (0.25, 0.5, 0.75)


@dataclass
class CheckResult:
    suite: str
    name: str
    ok: bool
    detail: str


def _all_states(p: Params):
    return [State(xl, xr)
            for xl in range(p.left_len + 1)
            for xr in range(p.right_len + 1)]


def oracle_suite(fault: float = 1.0) -> list[CheckResult]:
    """Exact drift vs 2^n enumeration, plus internal consistency checks."""
    out = []
    worst = 0.0
    worst_case = None
    count = 0
    for n, chi, rho, ell in itertools.product(ORACLE_NS, GRID_CHI, GRID_RHO,
                                              GRID_ELL):
        p = Params(chi, rho, ell, n)
        for s in _all_states(p):
            ex = exact_drift(s, p, _fault=fault)
            bf = brute_force_drift(s, p)
            err = max(abs(ex.d_l - bf.d_l), abs(ex.d_r - bf.d_r))
            count += 1
            if err > worst:
                worst, worst_case = err, (n, chi, rho, ell, s)
    out.append(CheckResult(
        "oracle", "exact-vs-brute-force", worst <= ORACLE_TOL,
        f"{count} states, worst |diff| = {worst:.3e} at {worst_case} "
        f"(tol {ORACLE_TOL:g})",
    ))

    worst = 0.0
    count = 0
    for chi, rho, ell in itertools.product(GRID_CHI, GRID_RHO, GRID_ELL):
        p = Params(chi, rho, ell, 12)
        for s in _all_states(p):
            tab = drift_table(s, p, _fault=fault)
            pe = tab.event_probs()
            scalar = float(np.sum(pe * tab.delta))
            ex = exact_drift(s, p, _fault=fault)
            worst = max(worst, abs(scalar - ex.total))
            count += 1
    out.append(CheckResult(
        "oracle", "law-of-total-probability", worst <= TOTAL_PROB_TOL,
        f"{count} states at n=12, worst |sum PrE*delta - (dL+dR)| = {worst:.3e}",
    ))

    worst = 0.0
    rng = np.random.default_rng(20240801)
    for _ in range(200):
        n = int(rng.integers(6, 30))
        chi = float(rng.choice(GRID_CHI))
        rho = float(rng.choice(GRID_RHO))
        ell = float(rng.choice(GRID_ELL))
        p = Params(chi, rho, ell, n)
        s = State(int(rng.integers(0, p.left_len + 1)),
                  int(rng.integers(0, p.right_len + 1)))
        tab = drift_table(s, p, _fault=fault)
        i = int(rng.integers(0, s.x_l + 1))
        j = int(rng.integers(0, s.x_r + 1))
        worst = max(worst, abs(tab.delta[i, j] - conditional_drift(i, j, s, p)))
    out.append(CheckResult(
        "oracle", "table-vs-literal-sums", worst <= ORACLE_TOL,
        f"200 random cells, worst |diff| = {worst:.3e}",
    ))

    worst = 0.0
    p = Params(2.0, 0.5, 0.5, 1000)
    for s in [State(5, 5), State(10, 3), State(0, 7), State(7, 0)]:
        a = exact_drift(s, p, _fault=fault)
        b = exact_drift(State(s.x_r, s.x_l), p, _fault=fault)
        worst = max(worst, abs(a.d_l - b.d_r), abs(a.d_r - b.d_l))
    out.append(CheckResult(
        "oracle", "symmetric-swap", worst <= 1e-14,
        f"worst asymmetry at rho=ell=0.5: {worst:.3e}",
    ))
    return out


def domination_suite(n: int = 20, fault: float = 1.0) -> list[CheckResult]:
    """Both unit drifts positive implies every conditional drift positive."""
    out = []
    total_states = 0
    total_cells = 0
    total_viol = 0
    for chi, rho, ell in itertools.product(GRID_CHI, GRID_RHO, GRID_ELL):
        p = Params(chi, rho, ell, n)
        rep = check_domination(p, eps=DOMINATION_EPS, _fault=fault)
        total_states += rep.states_checked
        total_cells += rep.cells_checked
        total_viol += len(rep.violations)
    out.append(CheckResult(
        "domination", f"implication-n{n}", total_viol == 0,
        f"{total_states} states, {total_cells} cells under hypothesis, "
        f"{total_viol} violations (eps {DOMINATION_EPS:g})",
    ))

    # lower-bound coefficient spot check: delta[i,0] >= c_i * delta[1,0]
    from .exact_drift import single_flip_ratio_bound

    ok = True
    detail_parts = []
    for chi, rho, ell in ((2.0, 0.5, 0.5), (1.5, 0.3, 0.7)):
        p = Params(chi, rho, ell, n)
        s = State(min(6, p.left_len), min(4, p.right_len))
        tab = drift_table(s, p, _fault=fault)
        for i in range(2, s.x_l + 1):
            c = single_flip_ratio_bound(i, s, p)
            lhs, rhs = tab.delta[i, 0], c * tab.delta[1, 0]
            if lhs < rhs - 1e-12:
                ok = False
                detail_parts.append(f"fail i={i} chi={chi}: {lhs} < {c}*{tab.delta[1,0]}")
    out.append(CheckResult(
        "domination", "single-flip-ratio-bound", ok,
        "; ".join(detail_parts) if detail_parts else "all spot checks hold",
    ))
    return out


def potential_suite(fault: float = 1.0) -> list[CheckResult]:
    """Norm equivalence of the potential and its per-step drift bounds."""
    out = []

    worst = 0.0
    for chi, rho, ell in itertools.product((0.5, 1.0, 2.0, 4.0), GRID_RHO,
                                           GRID_ELL):
        es = eigen_analysis(build_matrix(Params(chi, rho, ell, 100)))
        pot = build_potential(es)
        worst = max(worst,
                    abs(pot.value(*es.e1) - 1.0),
                    abs(pot.value(*es.e2)))
        for x1, x2 in ((0.0, 1.0), (1.0, 0.0), (3.0, 7.0), (100.0, 1.0),
                       (1.0, 1.0)):
            f = pot.value(x1, x2)
            lo = pot.kappa1 * max(x1, x2)
            hi = pot.kappa2 * (x1 + x2)
            if not (lo - 1e-12 <= f <= hi + 1e-12):
                worst = max(worst, 1.0)
    out.append(CheckResult(
        "potential", "basis-and-norm-bounds", worst <= 1e-12,
        f"worst defect {worst:.3e} over the parameter grid",
    ))

    # smaller-scale versions of the contraction/expansion acceptance checks,
    # evaluated inline so the fault hook reaches the drift values
    def per_step_margins(p, es, states, mode):
        pot = build_potential(es)
        margins = []
        for s in states:
            dv = exact_drift(s, p, _fault=fault)
            fx = pot.value(s.x_l, s.x_r)
            ef = fx - (pot.w1 * dv.d_l + pot.w2 * dv.d_r)
            if mode == "contraction":
                margins.append((1.0 - es.lambda1 / (4.0 * p.n)) * fx - ef)
            else:
                margins.append(ef - (1.0 + abs(es.lambda1) / (2.0 * p.n)) * fx)
        return min(margins)

    rng = np.random.default_rng(11)
    p = Params(2.0, 0.5, 0.5, 2000)
    es = eigen_analysis(build_matrix(p))
    cap = int(0.01 * p.n)
    states = []
    while len(states) < 40:
        x1, x2 = int(rng.integers(0, cap + 1)), int(rng.integers(0, cap + 1))
        if x1 or x2:
            states.append(State(x1, x2))
    m = per_step_margins(p, es, states, "contraction")
    out.append(CheckResult(
        "potential", "contraction-chi2", m >= 0,
        f"{len(states)} states with ||x|| <= {cap}, worst margin {m:.3e}",
    ))

    p3 = Params(3.0, 0.5, 0.5, 2000)
    es3 = eigen_analysis(build_matrix(p3))
    ray = [State(s, s) for s in range(1, cap + 1, 2)]
    m3 = per_step_margins(p3, es3, ray, "expansion")
    out.append(CheckResult(
        "potential", "expansion-chi3", m3 >= 0,
        f"{len(ray)} on-ray states, worst margin {m3:.3e}",
    ))
    return out


SUITES = {
    "oracle": oracle_suite,
    "domination": domination_suite,
    "potential": potential_suite,
}


def run_suites(names, fault: float = 1.0) -> list[CheckResult]:
    results = []
    for name in names:
        if name == "domination":
            results.extend(domination_suite(fault=fault))
        else:
            results.extend(SUITES[name](fault=fault))
    return results
