"""Closed-form drift matrix for the two-part process and its eigen analysis.

Near the optimum the expected one-step decrease of the zero-count pair is
approximately A x / n with a fixed 2x2 matrix A whose entries are explicit
in (chi, rho, ell). The matrix has a, d > 0 and b, c <= 0; in the interior
case b, c < 0 the quadratic c g^2 + (d - a) g - b has a unique positive root
gamma0, the vector (gamma0, 1) is an eigenvector, and the sign of
a*gamma0 + b decides between both eigenvalues positive (fast convergence)
and one negative eigenvalue (the process stalls).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .params import Params


class DegenerateMatrixError(ValueError):
    """Sign pattern a,d > 0 and b,c < 0 does not hold (e.g. rho or ell is 0/1).

    In that case one of the two counts evolves independently of the other and
    the coupled 2d analysis does not apply; the one-dimensional case should
    be treated separately.
    """


@dataclass(frozen=True)
class DriftMatrix:
    a: float
    b: float
    c: float
    d: float

    def apply(self, x1: float, x2: float) -> tuple[float, float]:
        return self.a * x1 + self.b * x2, self.c * x1 + self.d * x2

    @property
    def scale(self) -> float:
        return max(abs(self.a), abs(self.b), abs(self.c), abs(self.d))


@dataclass(frozen=True)
class EigenSystem:
    gamma0: float
    lambda1: float
    lambda2: float
    e1: tuple[float, float]
    e2: tuple[float, float]
    classifier: float


def build_matrix(p: Params) -> DriftMatrix:
    """Evaluate the four closed-form entries at (chi, rho, ell)."""
    chi, rho, ell = p.chi, p.rho, p.ell
    a = rho * chi * math.exp(-ell * chi) + (1 - rho) * chi * math.exp(-chi)
    b = -(1 - rho) * ell * chi * chi * math.exp(-(1 - ell) * chi)
    c = -rho * (1 - ell) * chi * chi * math.exp(-ell * chi)
    d = (1 - rho) * chi * math.exp(-(1 - ell) * chi) + rho * chi * math.exp(-chi)
    return DriftMatrix(a, b, c, d)


def _positive_root(m: DriftMatrix) -> float:
    """Unique positive root of c g^2 + (d - a) g - b = 0, computed stably.

    Uses the sign-aware quadratic formula to avoid cancellation, then one
    Newton polish step. The product of the roots is -b/c < 0, so exactly one
    root is positive.
    """
    A, B, C = m.c, m.d - m.a, -m.b
    disc = math.sqrt(B * B - 4.0 * A * C)
    sgn = 1.0 if B >= 0 else -1.0
    q = -(B + sgn * disc) / 2.0
    roots = (q / A, C / q)
    g = max(roots)
    if g <= 0:
        raise DegenerateMatrixError(f"no positive root for {m}")
    fp = 2.0 * A * g + B
    if fp != 0.0:
        g -= (A * g * g + B * g + C) / fp
    return g


def eigen_analysis(m: DriftMatrix) -> EigenSystem:
    """Eigen decomposition in the b,c < 0 case.

    lambda2 = a - c*gamma0 is a sum of positive terms; lambda1 is recovered
    from the determinant, lambda1 = det(A)/lambda2, which avoids the
    cancellation in c*gamma0 + d when lambda1 is near zero. The classifier
    a*gamma0 + b equals gamma0*lambda1 and is computed that way so its sign
    agrees with lambda1 by construction.
    """
    if not (m.a > 0 and m.d > 0):
        raise DegenerateMatrixError(f"need a,d > 0, got a={m.a}, d={m.d}")
    if not (m.b < 0 and m.c < 0):
        raise DegenerateMatrixError(
            f"need b,c < 0, got b={m.b}, c={m.c}; the coupled 2d case requires "
            "rho and ell strictly inside (0, 1)"
        )
    g0 = _positive_root(m)
    lam2 = m.a - m.c * g0
    lam1 = (m.a * m.d - m.b * m.c) / lam2
    return EigenSystem(
        gamma0=g0,
        lambda1=lam1,
        lambda2=lam2,
        e1=(g0, 1.0),
        e2=(m.b, -m.c * g0),
        classifier=g0 * lam1,
    )


def symmetric_threshold() -> float:
    """Root of 2 - chi + 2 exp(-chi/2) = 0, the rho = ell = 1/2 threshold.

    The function is strictly decreasing with a sign change in [2, 3];
    plain bisection converges to machine precision.
    """
    f = lambda x: 2.0 - x + 2.0 * math.exp(-x / 2.0)
    lo, hi = 2.0, 3.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class Verdict(enum.Enum):
    EFFICIENT = "Efficient"
    INEFFICIENT = "Inefficient"
    BOUNDARY = "Boundary"


def classify(p: Params, tol: float = 1e-9) -> Verdict:
    """Sign of the classifier, with a small neutral band around zero.

    Raises DegenerateMatrixError when the sign pattern fails (rho or ell at
    the boundary), since then the 2d criterion does not apply.
    """
    es = eigen_analysis(build_matrix(p))
    if es.classifier > tol:
        return Verdict.EFFICIENT
    if es.classifier < -tol:
        return Verdict.INEFFICIENT
    return Verdict.BOUNDARY


def classifier_sign_changes(rho: float, ell: float, chi_grid) -> list[float]:
    """Sign-change points of the classifier along a chi grid.

    Each bracketing interval found on the grid is refined by bisection.
    Reports every crossing found; makes no uniqueness claim, since a single
    threshold in chi is only established for the symmetric case.
    """
    chis = sorted(float(c) for c in chi_grid)
    if len(chis) < 2:
        raise ValueError("need at least two grid points")

    def cla(chi):
        return eigen_analysis(build_matrix(Params(chi, rho, ell, 100))).classifier

    vals = [cla(c) for c in chis]
    roots = []
    for (x0, v0), (x1, v1) in zip(zip(chis, vals), zip(chis[1:], vals[1:])):
        if v0 == 0.0:
            roots.append(x0)
            continue
        if v0 * v1 < 0:
            lo, hi = x0, x1
            for _ in range(100):
                mid = 0.5 * (lo + hi)
                if cla(mid) * v0 > 0:
                    lo = mid
                else:
                    hi = mid
            roots.append(0.5 * (lo + hi))
    if vals[-1] == 0.0:
        roots.append(chis[-1])
    return roots
