"""Problem and algorithm parameters shared across the toolkit."""
from __future__ import annotations

import math
from dataclasses import dataclass


def split_point(ell: float, n: int) -> int:
    """Length of the left part, floor(ell * n).

    Snaps to the nearest integer when ell * n is within 1e-9 of one, so that
    e.g. ell=0.7, n=10 yields 7 despite 0.7 * 10 == 6.999... in binary floats.
    """
    t = ell * n
    f = math.floor(t)
    if t - f > 1 - 1e-9:
        f += 1
    return int(f)


@dataclass(frozen=True)
class Params:
    """Mutation strength chi, environment bias rho, split fraction ell, size n.

    The bit string is split after the first floor(ell * n) positions; the
    heavy weight n sits on the left part under the first fitness function and
    on the right part under the second. Each generation one of the two is
    drawn, the first with probability rho.
    """

    chi: float
    rho: float
    ell: float
    n: int

    def __post_init__(self):
        if not (self.chi > 0):
            raise ValueError(f"chi must be positive, got {self.chi}")
        if not (0.0 <= self.rho <= 1.0):
            raise ValueError(f"rho must be in [0, 1], got {self.rho}")
        if not (0.0 <= self.ell <= 1.0):
            raise ValueError(f"ell must be in [0, 1], got {self.ell}")
        if not (isinstance(self.n, int) and self.n >= 2):
            raise ValueError(f"n must be an integer >= 2, got {self.n}")

    @property
    def left_len(self) -> int:
        return split_point(self.ell, self.n)

    @property
    def right_len(self) -> int:
        return self.n - self.left_len

    @property
    def flip_prob(self) -> float:
        """Per-bit mutation probability chi / n."""
        return self.chi / self.n


@dataclass(frozen=True)
class State:
    """Zero-bit counts (x_l, x_r) in the left and right part."""

    x_l: int
    x_r: int

    def __post_init__(self):
        if self.x_l < 0 or self.x_r < 0:
            raise ValueError(f"state counts must be nonnegative, got {self}")

    def check_bounds(self, p: Params) -> "State":
        if self.x_l > p.left_len or self.x_r > p.right_len:
            raise ValueError(
                f"state {self} out of bounds for parts of length "
                f"{p.left_len}/{p.right_len}"
            )
        return self

    @property
    def total(self) -> int:
        return self.x_l + self.x_r

    def is_optimum(self) -> bool:
        return self.x_l == 0 and self.x_r == 0
